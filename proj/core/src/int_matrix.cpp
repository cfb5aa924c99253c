#include "morsehb/int_matrix.hpp"

#include "morsehb/errors.hpp"

namespace morsehb {

// Bareiss fraction-free elimination; every intermediate is a determinant of a
// submatrix, kept exact in 128 bits.
std::int64_t determinant(const int_matrix& m) {
    if (m.rows() != m.cols()) throw precondition_error("determinant of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;

    std::vector<__int128> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m.at(i, j);

    int sign = 1;
    __int128 prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k * n + k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && a[swap_row * n + k] == 0) ++swap_row;
            if (swap_row == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[swap_row * n + j]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                __int128 num = a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j];
                a[i * n + j] = num / prev; // exact division (Bareiss)
            }
        prev = a[k * n + k];
    }
    return narrow_i128(sign * a[n * n - 1]);
}

} // namespace morsehb
