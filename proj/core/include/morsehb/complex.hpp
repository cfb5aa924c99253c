#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morsehb/int_matrix.hpp"
#include "morsehb/morse_data.hpp"

namespace morsehb {

struct boundary_matrix {
    int degree = 0;                // k: maps degree k to degree k-1
    std::vector<std::string> rows; // generators of degree k-1
    std::vector<std::string> cols; // generators of degree k
    int_matrix entries;            // rows x cols
};

/// The Morse chain complex (CM_*, d_*). boundaries[k-1] holds d_k for
/// k = 1..n; d_0 and d_{n+1} are zero maps by convention and not stored.
struct graded_complex {
    int ambient_dimension = 0;
    std::vector<std::vector<std::string>> generator_lists; // size n+1, degree 0..n
    std::vector<boundary_matrix> boundaries;               // size n (may be 0 for n=0)

    const boundary_matrix& boundary(int k) const { return boundaries.at(k - 1); }
};

/// Assemble the boundary matrices from validated data.
///
/// Column of an interior generator p of degree k:
///     d p = sum_p' M(p,p') p' + sum_g M(p,g) g      over degree k-1 generators.
/// Column of a boundary-positive generator g of degree k:
///     d g = sum_p sum_d N(g,d) M(d,p) p
///         + sum_g' [ sum_d N(g,d) M(d,g') + N(g,g') ] g'
/// where d runs over the degree k-1 boundary-negative points of g's own
/// component (the n-table keys enforce that structurally).
///
/// Precondition: validate(data).ok. Throws precondition_error otherwise,
/// overflow_error if a bilinear sum leaves 64 bits.
graded_complex assemble_boundary(const morse_data& data);

struct d_squared_report {
    bool ok = true;
    // first failing composite entry, valid when !ok
    int degree = 0; // k with d_{k-1} . d_k != 0
    std::size_t row = 0, col = 0;
    std::int64_t value = 0;
};

/// Certificate that the assembled matrices form a chain complex. This is not
/// assumed for arbitrary valid data: validity is local, realizability global.
d_squared_report verify_d_squared(const graded_complex& cx);

std::string serialize(const graded_complex& cx);
graded_complex parse_graded_complex(const std::string& text);

} // namespace morsehb
