#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "morsehb/checked.hpp"

namespace morsehb {

/// Dense integer matrix. Corpus sizes are tiny, so no sparsity anywhere.
/// All arithmetic entry points are overflow-checked.
class int_matrix {
public:
    int_matrix() = default;
    int_matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    static int_matrix identity(std::size_t n) {
        int_matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    std::int64_t& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    std::int64_t at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool is_zero() const {
        for (auto v : data_)
            if (v != 0) return false;
        return true;
    }

    /// this * other with checked arithmetic.
    int_matrix multiply(const int_matrix& other) const {
        int_matrix out(rows_, other.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const std::int64_t a = at(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < other.cols_; ++j)
                    out.at(i, j) = checked_add(out.at(i, j), checked_mul(a, other.at(k, j)));
            }
        return out;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j) std::swap(at(a, j), at(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows_; ++i) std::swap(at(i, a), at(i, b));
    }
    /// row[dst] += q * row[src]
    void add_row(std::size_t dst, std::size_t src, std::int64_t q) {
        for (std::size_t j = 0; j < cols_; ++j)
            at(dst, j) = checked_add(at(dst, j), checked_mul(q, at(src, j)));
    }
    void add_col(std::size_t dst, std::size_t src, std::int64_t q) {
        for (std::size_t i = 0; i < rows_; ++i)
            at(i, dst) = checked_add(at(i, dst), checked_mul(q, at(i, src)));
    }
    void negate_row(std::size_t r) {
        for (std::size_t j = 0; j < cols_; ++j) at(r, j) = checked_neg(at(r, j));
    }

    friend bool operator==(const int_matrix& a, const int_matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::int64_t> data_;
};

/// Exact determinant by fraction-free (Bareiss) elimination in 128-bit
/// intermediates. Intended for the small unimodular transform checks.
std::int64_t determinant(const int_matrix& m);

} // namespace morsehb
