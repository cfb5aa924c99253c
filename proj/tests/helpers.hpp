#pragma once

// Shared test utilities: random instance generators and small exact oracles
// kept independent of the implementation paths they check.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "morsehb/int_matrix.hpp"
#include "morsehb/morse_data.hpp"

namespace testutil {

using morsehb::int_matrix;
using morsehb::morse_data;

inline int_matrix random_matrix(std::mt19937_64& rng, std::size_t max_size = 5,
                                std::int64_t max_entry = 5) {
    std::uniform_int_distribution<std::size_t> size(1, max_size);
    std::uniform_int_distribution<std::int64_t> entry(-max_entry, max_entry);
    int_matrix m(size(rng), size(rng));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = entry(rng);
    return m;
}

// ---- gcd-of-minors oracle for the Smith normal form ------------------------
//
// The product d_1 ... d_k equals the gcd of all k x k minors, so the k-th
// elementary divisor is D_k / D_{k-1}. Enumerating minors is exponential but
// exact and entirely independent of the row-reduction path.

inline std::int64_t minor_det(const int_matrix& m, const std::vector<std::size_t>& rows,
                              const std::vector<std::size_t>& cols) {
    int_matrix sub(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) sub.at(i, j) = m.at(rows[i], cols[j]);
    return morsehb::determinant(sub);
}

inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> cur(k);
    std::iota(cur.begin(), cur.end(), 0);
    for (;;) {
        out.push_back(cur);
        std::size_t i = k;
        while (i-- > 0) {
            if (cur[i] + (k - i) < n) {
                ++cur[i];
                for (std::size_t j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
    }
}

inline std::vector<std::int64_t> divisors_by_minors(const int_matrix& m) {
    std::vector<std::int64_t> determinantal; // D_k = gcd of k x k minors
    const std::size_t kmax = std::min(m.rows(), m.cols());
    for (std::size_t k = 1; k <= kmax; ++k) {
        std::vector<std::vector<std::size_t>> row_sets, col_sets;
        subsets(m.rows(), k, row_sets);
        subsets(m.cols(), k, col_sets);
        std::int64_t g = 0;
        for (const auto& r : row_sets)
            for (const auto& c : col_sets) g = std::gcd(g, minor_det(m, r, c));
        if (g == 0) break;
        determinantal.push_back(g);
    }
    std::vector<std::int64_t> divisors;
    std::int64_t prev = 1;
    for (std::int64_t dk : determinantal) {
        divisors.push_back(dk / prev);
        prev = dk;
    }
    return divisors;
}

// ---- exact rank over Q (fraction-free elimination) --------------------------

inline std::size_t rational_rank(const int_matrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<__int128> a(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i * cols + j] = m.at(i, j);
    std::size_t rank = 0;
    __int128 prev = 1;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && a[pivot * cols + col] == 0) ++pivot;
        if (pivot == rows) continue;
        for (std::size_t j = 0; j < cols; ++j) std::swap(a[rank * cols + j], a[pivot * cols + j]);
        for (std::size_t i = rank + 1; i < rows; ++i)
            for (std::size_t j = col + 1; j < cols; ++j)
                a[i * cols + j] =
                    (a[i * cols + j] * a[rank * cols + col] - a[i * cols + col] * a[rank * cols + j]) /
                    prev;
        prev = a[rank * cols + col];
        for (std::size_t i = rank + 1; i < rows; ++i) a[i * cols + col] = 0;
        ++rank;
    }
    return rank;
}

// ---- random valid combinatorial instances -----------------------------------

inline morse_data random_valid_data(std::mt19937_64& rng) {
    using namespace morsehb;
    morse_data d;
    d.ambient_dimension = 2;
    std::uniform_int_distribution<int> comp_count(0, 2);
    std::uniform_real_distribution<double> value(0.25, 3.0);
    std::uniform_int_distribution<int> coin(0, 1);

    const int ncomp = comp_count(rng);
    for (int c = 0; c < ncomp; ++c) {
        boundary_component bc;
        bc.id = "N" + std::to_string(c);
        bc.constant_c = double(ncomp - c); // strictly decreasing constants
        bc.dimension = 1;
        d.boundary_components.push_back(bc);

        // an alternating circle: equal counts of maxima and minima
        std::uniform_int_distribution<int> pairs(1, 2);
        const int np = pairs(rng);
        for (int i = 0; i < np; ++i) {
            critical_point mx;
            mx.id = bc.id + "max" + std::to_string(i);
            mx.kind = critical_kind::boundary;
            mx.component = bc.id;
            mx.index = 1;
            mx.critical_value = coin(rng) ? value(rng) : -value(rng);
            d.critical_points.push_back(mx);
            critical_point mn;
            mn.id = bc.id + "min" + std::to_string(i);
            mn.kind = critical_kind::boundary;
            mn.component = bc.id;
            mn.index = 0;
            mn.critical_value = coin(rng) ? value(rng) : -value(rng);
            d.critical_points.push_back(mn);
        }
    }
    std::uniform_int_distribution<int> int_count(1, 4);
    const int ni = int_count(rng);
    std::uniform_int_distribution<int> idx(0, 2);
    for (int i = 0; i < ni; ++i) {
        critical_point p;
        p.id = "p" + std::to_string(i);
        p.kind = critical_kind::interior;
        p.index = idx(rng);
        d.critical_points.push_back(p);
    }

    std::uniform_int_distribution<std::int64_t> count(-3, 3);
    // legal m-entries
    for (const auto& from : d.critical_points) {
        for (const auto& to : d.critical_points) {
            if (from.id == to.id || coin(rng)) continue;
            const bool from_ok = !from.is_boundary() || from.is_negative();
            const bool to_ok = !to.is_boundary() || to.is_positive();
            if (!from_ok || !to_ok) continue;
            if (from.is_boundary() && to.is_boundary()) {
                if (from.component == to.component) continue;
                const auto* ci = d.find_component(from.component);
                const auto* cj = d.find_component(to.component);
                if (!(ci->constant_c > cj->constant_c)) continue;
            }
            const int effective = from.index + (from.is_negative() ? 1 : 0);
            if (!(effective > to.index)) continue;
            d.counts.m_table[{from.id, to.id}] = count(rng);
        }
    }
    // legal n-entries
    for (const auto& from : d.critical_points) {
        for (const auto& to : d.critical_points) {
            if (from.id == to.id || coin(rng)) continue;
            if (!from.is_boundary() || !to.is_boundary()) continue;
            if (from.component != to.component) continue;
            if (from.is_negative() && to.is_positive()) continue;
            if (!(from.index > to.index)) continue;
            d.counts.n_table[{from.id, to.id}] = count(rng);
        }
    }
    d.sort();
    return d;
}

} // namespace testutil
