#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "morsehb/errors.hpp"

namespace morsehb {

enum class critical_kind { interior, boundary };

struct boundary_component {
    std::string id;
    double constant_c = 0.0; // additive constant of the cone-end function on this component
    int dimension = 0;       // always ambient_dimension - 1

    friend bool operator==(const boundary_component&, const boundary_component&) = default;
};

struct critical_point {
    std::string id;
    critical_kind kind = critical_kind::interior;
    int index = 0;
    std::string component;       // boundary points only
    double critical_value = 0.0; // boundary points only: the value of f_N there

    bool is_boundary() const { return kind == critical_kind::boundary; }
    // Sign class is derived, never stored; value 0 is a validation error.
    bool is_positive() const { return is_boundary() && critical_value > 0.0; }
    bool is_negative() const { return is_boundary() && critical_value < 0.0; }

    friend bool operator==(const critical_point&, const critical_point&) = default;
};

using pair_key = std::pair<std::string, std::string>; // (from id, to id)
using count_table = std::map<pair_key, std::int64_t>;

struct trajectory_counts {
    count_table m_table; // signed counts of trajectories through the interior
    count_table n_table; // signed counts of trajectories inside one boundary component

    friend bool operator==(const trajectory_counts&, const trajectory_counts&) = default;
};

/// The full combinatorial input. Vectors are kept sorted by id; parse and the
/// corpus builders establish that invariant, so round-trips are exact.
struct morse_data {
    int ambient_dimension = 0;
    std::vector<boundary_component> boundary_components;
    std::vector<critical_point> critical_points;
    trajectory_counts counts;

    const critical_point* find_point(const std::string& id) const;
    const boundary_component* find_component(const std::string& id) const;
    std::int64_t m_count(const std::string& from, const std::string& to) const;
    std::int64_t n_count(const std::string& from, const std::string& to) const;
    void sort(); // restore the sorted-by-id invariant

    friend bool operator==(const morse_data&, const morse_data&) = default;
};

// Validation rule identifiers.
namespace rules {
inline constexpr const char* nonzero_boundary_value = "NONZERO-BOUNDARY-VALUE";
inline constexpr const char* same_component_delta_gamma = "SAME-COMPONENT-DELTA-GAMMA";
inline constexpr const char* neg_to_pos_in_n = "NEG-TO-POS-IN-N";
inline constexpr const char* index_m = "INDEX-M";
inline constexpr const char* index_n = "INDEX-N";
inline constexpr const char* cross_component_constant = "CROSS-COMPONENT-CONSTANT";
inline constexpr const char* dangling_id = "DANGLING-ID";
inline constexpr const char* index_range = "INDEX-RANGE";
// Kind-pattern violations the named rules above do not cover: an m-key whose
// source is boundary-positive or target boundary-negative (no such trajectory
// exists through the interior), and an n-key with an interior endpoint or
// endpoints on two different components.
inline constexpr const char* kind_m = "KIND-M";
inline constexpr const char* kind_n = "KIND-N";
} // namespace rules

struct violation {
    std::string rule;
    std::string message;
    std::vector<std::string> ids; // offending point/component ids

    friend bool operator==(const violation&, const violation&) = default;
};

struct validation_report {
    bool ok = true;
    std::vector<violation> violations;
};

/// Parse the JSON input format. Structural errors throw parse_error with
/// line/column; semantic checking is validate()'s job, never done here.
morse_data parse_morse_data(const std::string& text);

/// Canonical serialization: fixed key order, arrays sorted by id.
/// parse_morse_data(serialize(d)) == d.
std::string serialize(const morse_data& d);

/// Check every semantic invariant. Reports, never throws.
validation_report validate(const morse_data& d);

/// Generators of the degree-k chain group: interior critical points of index
/// k, then boundary-positive points of index k, each block sorted by id.
/// Boundary-negative points are never generators.
/// Precondition: 0 <= k <= n, data valid.
std::vector<std::string> generators(const morse_data& d, int k);

} // namespace morsehb
