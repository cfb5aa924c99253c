#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morsehb/errors.hpp"

namespace morsehb {

// Exact signed trajectory counts inside a circle boundary component of an
// oriented surface.
//
// Orientation conventions (fixed; the frame-determinant oracle in the test
// suite realizes them concretely and the values below must never change):
//   - the circle is the unit circle of an oriented plane chart of the collar,
//     the manifold on the inner side, v_in = -d/dr at r = 0 (plane radius r);
//   - the component's `orientation` field o is the induced boundary
//     orientation: the positively oriented tangent is o * d/dphi;
//   - per-generator gauge: or(Uum) of a maximum = o * d/dphi, or(S) of an
//     index-0 target = the ambient orientation, or(S) of a negative minimum =
//     o * d/dphi, or(U) of a negative minimum = the inward normal.
// In this gauge every adjacent max->min arc contributes +1 when it runs in
// the o direction and -1 against it, for all three count shapes. The
// (-1)^(n-k-1) boundary-orientation discrepancy is +1 for circles in surfaces
// (n = 2, k = 1), the only case this module computes.

enum class circle_point_type { maximum, minimum };

struct circle_critical_point {
    std::string id;
    double angle = 0.0; // in [0, 2*pi)
    double value = 0.0; // value of f_N, never 0 for valid input
    circle_point_type type = circle_point_type::minimum;

    int index() const { return type == circle_point_type::maximum ? 1 : 0; }
};

struct circle_morse_function {
    std::string component;
    std::vector<circle_critical_point> points; // strictly increasing angle
    int orientation = +1;
};

/// Throws precondition_error unless: >= 2 points, types alternate around the
/// circle, angles strictly increasing in [0, 2*pi), every maximum exceeds both
/// adjacent minima, no value is 0, orientation is +1 or -1.
void validate_circle(const circle_morse_function& f);

enum class arc_direction { ccw, cw };

struct circle_trajectory {
    std::string from; // a maximum
    std::string to;   // the angle-adjacent minimum it descends to
    double start_angle = 0.0;
    double end_angle = 0.0;
    arc_direction direction = arc_direction::ccw;
};

/// One trajectory per adjacent (max, min) pair: each maximum emits exactly
/// two, each minimum absorbs exactly two.
std::vector<circle_trajectory> circle_trajectories(const circle_morse_function& f);

/// Signed count between same-sign-class points: from a maximum (index 1) to a
/// minimum (index 0), both values positive or both negative.
std::int64_t signed_count_same_sign(const circle_morse_function& f,
                                    const std::string& from_id,
                                    const std::string& to_id);

/// Signed count from a positive maximum to a negative minimum, computed by
/// the inward-vector frame rule. ambient_orientation is the chart orientation
/// sign; under the outward-first convention it equals f.orientation.
std::int64_t signed_count_pos_to_neg(const circle_morse_function& f,
                                     const std::string& gamma_id,
                                     const std::string& delta_id,
                                     int ambient_orientation);

} // namespace morsehb
