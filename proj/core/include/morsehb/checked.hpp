#pragma once

#include <cstdint>

#include "morsehb/errors.hpp"

namespace morsehb {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw overflow_error("integer overflow in addition");
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw overflow_error("integer overflow in subtraction");
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw overflow_error("integer overflow in multiplication");
    return r;
}

inline std::int64_t checked_neg(std::int64_t a) {
    return checked_sub(0, a);
}

/// Narrow a 128-bit intermediate back to 64 bits, or throw.
inline std::int64_t narrow_i128(__int128 v) {
    if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
        throw overflow_error("128-bit intermediate does not fit in 64 bits");
    return static_cast<std::int64_t>(v);
}

} // namespace morsehb
