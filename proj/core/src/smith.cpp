#include <cstdlib>

#include "morsehb/homology.hpp"

namespace morsehb {

namespace {

// Round-to-nearest quotient keeps the remainders small so the pivot shrinks
// fast under the smallest-absolute-value rule.
std::int64_t nearest_quotient(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    std::int64_t r = a - q * b;
    if (std::llabs(r) * 2 > std::llabs(b)) q += (a < 0) == (b < 0) ? 1 : -1;
    return q;
}

} // namespace

smith_form smith_normal_form(const int_matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    int_matrix w = a;
    int_matrix u = int_matrix::identity(m);
    int_matrix v = int_matrix::identity(n);

    const std::size_t steps = std::min(m, n);
    std::size_t t = 0;
    for (; t < steps; ++t) {
        for (;;) {
            // pivot: smallest nonzero |entry| in the trailing submatrix,
            // row-major tie break
            std::size_t pi = t, pj = t;
            std::int64_t best = 0;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j) {
                    std::int64_t val = w.at(i, j);
                    if (val == 0) continue;
                    if (best == 0 || std::llabs(val) < std::llabs(best)) {
                        best = val;
                        pi = i;
                        pj = j;
                    }
                }
            if (best == 0) goto done; // trailing submatrix is zero

            if (pi != t) {
                w.swap_rows(pi, t);
                u.swap_rows(pi, t);
            }
            if (pj != t) {
                w.swap_cols(pj, t);
                v.swap_cols(pj, t);
            }
            if (w.at(t, t) < 0) {
                w.negate_row(t);
                u.negate_row(t);
            }
            const std::int64_t pivot = w.at(t, t);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (w.at(i, t) == 0) continue;
                std::int64_t q = nearest_quotient(w.at(i, t), pivot);
                if (q != 0) {
                    w.add_row(i, t, checked_neg(q));
                    u.add_row(i, t, checked_neg(q));
                }
                if (w.at(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (w.at(t, j) == 0) continue;
                std::int64_t q = nearest_quotient(w.at(t, j), pivot);
                if (q != 0) {
                    w.add_col(j, t, checked_neg(q));
                    v.add_col(j, t, checked_neg(q));
                }
                if (w.at(t, j) != 0) clean = false;
            }
            if (!clean) continue; // a smaller pivot appeared, start over

            // divisibility: the pivot must divide the whole trailing block so
            // the diagonal comes out as a chain
            bool divides_all = true;
            for (std::size_t i = t + 1; i < m && divides_all; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (w.at(i, j) % pivot != 0) {
                        w.add_row(t, i, 1);
                        u.add_row(t, i, 1);
                        divides_all = false;
                        break;
                    }
            if (divides_all) break;
        }
    }
done:

    smith_form out;
    for (std::size_t i = 0; i < steps; ++i) {
        std::int64_t d = w.at(i, i);
        if (d == 0) break;
        out.diagonal.push_back(d);
    }
    out.rank = out.diagonal.size();
    out.left = std::move(u);
    out.right = std::move(v);
    return out;
}

} // namespace morsehb
