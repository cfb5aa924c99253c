#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morsehb/complex.hpp"
#include "morsehb/int_matrix.hpp"
#include "morsehb/morse_data.hpp"

namespace morsehb {

struct smith_form {
    std::vector<std::int64_t> diagonal; // elementary divisors d_1 | d_2 | ... , all >= 1
    std::size_t rank = 0;               // == diagonal.size()
    int_matrix left;                    // U, unimodular, rows x rows
    int_matrix right;                   // V, unimodular, cols x cols; U A V = diag
};

/// Smith normal form over Z. Pivot rule: smallest nonzero absolute value,
/// ties broken by row-major position, so the run is deterministic.
/// Throws overflow_error if intermediates leave 64 bits.
smith_form smith_normal_form(const int_matrix& a);

struct homology_group {
    int degree = 0;
    std::int64_t betti = 0;
    std::vector<std::int64_t> torsion; // divisibility chain, entries >= 2

    friend bool operator==(const homology_group&, const homology_group&) = default;
};

struct homology_result {
    std::vector<homology_group> groups; // one per degree 0..n

    friend bool operator==(const homology_result&, const homology_result&) = default;
};

/// Integer homology of the complex: betti_k = dim CM_k - rank d_k - rank d_{k+1},
/// torsion in degree k = elementary divisors of d_{k+1} exceeding 1.
/// Refuses complexes failing verify_d_squared unless force is set.
homology_result homology(const graded_complex& cx, bool force = false);

std::vector<std::int64_t> betti_numbers(const homology_result& h);

struct inequality_line {
    int degree = 0;
    std::int64_t lhs = 0; // #Cr_k + #Cr_k^+
    std::int64_t rhs = 0; // betti_k
    bool holds = false;
};

struct inequality_report {
    std::vector<inequality_line> lines;
    bool all_hold = true;
    bool all_equal = true; // lhs == rhs in every degree
};

/// Morse-type inequalities: generator count >= betti number per degree.
/// betti must have length n+1 (throws precondition_error otherwise).
inequality_report morse_inequalities(const morse_data& data,
                                     const std::vector<std::int64_t>& betti);

/// Alternating sum over degrees of (#Cr_k + #Cr_k^+). Precondition: valid data.
std::int64_t euler_characteristic(const morse_data& data);

/// Isomorphism-class comparison: betti and torsion agree in every degree.
bool compare_reference(const homology_result& result, const homology_result& reference);

std::string serialize(const homology_result& h);
homology_result parse_homology_result(const std::string& text);

} // namespace morsehb
