#include "morsehb/circle.hpp"

#include <cmath>

namespace morsehb {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

std::size_t index_of(const circle_morse_function& f, const std::string& id) {
    for (std::size_t i = 0; i < f.points.size(); ++i)
        if (f.points[i].id == id) return i;
    throw precondition_error("no critical point \"" + id + "\" on component " + f.component);
}

} // namespace

void validate_circle(const circle_morse_function& f) {
    const auto& pts = f.points;
    if (pts.size() < 2 || pts.size() % 2 != 0)
        throw precondition_error("a circle Morse function has an even number >= 2 of critical points");
    if (f.orientation != 1 && f.orientation != -1)
        throw precondition_error("orientation must be +1 or -1");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].angle < 0.0 || pts[i].angle >= two_pi)
            throw precondition_error("angles must lie in [0, 2*pi)");
        if (i > 0 && !(pts[i - 1].angle < pts[i].angle))
            throw precondition_error("angles must be strictly increasing");
        if (pts[i].value == 0.0)
            throw precondition_error("critical value 0 at \"" + pts[i].id + "\"");
        if (pts[(i + 1) % pts.size()].type == pts[i].type)
            throw precondition_error("maxima and minima must alternate around the circle");
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].type != circle_point_type::maximum) continue;
        const auto& next = pts[(i + 1) % pts.size()];
        const auto& prev = pts[(i + pts.size() - 1) % pts.size()];
        if (!(pts[i].value > next.value) || !(pts[i].value > prev.value))
            throw precondition_error("maximum \"" + pts[i].id +
                                     "\" does not exceed both adjacent minima");
    }
}

std::vector<circle_trajectory> circle_trajectories(const circle_morse_function& f) {
    validate_circle(f);
    std::vector<circle_trajectory> out;
    const auto& pts = f.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].type != circle_point_type::maximum) continue;
        const auto& ccw = pts[(i + 1) % pts.size()];
        const auto& cw = pts[(i + pts.size() - 1) % pts.size()];
        out.push_back({pts[i].id, ccw.id, pts[i].angle, ccw.angle, arc_direction::ccw});
        out.push_back({pts[i].id, cw.id, pts[i].angle, cw.angle, arc_direction::cw});
    }
    return out;
}

namespace {

// Both signed-count shapes reduce, in the documented gauge, to
//   orientation_sign * ([adjacent arc in the +phi direction] - [arc in the -phi direction]).
// On a two-point circle both arcs connect and the count cancels to 0.
std::int64_t arc_difference(const circle_morse_function& f, std::size_t from, std::size_t to,
                            int orientation_sign) {
    const std::size_t n = f.points.size();
    std::int64_t count = 0;
    if ((from + 1) % n == to) count += 1;     // ccw-adjacent
    if ((from + n - 1) % n == to) count -= 1; // cw-adjacent
    return orientation_sign * count;
}

} // namespace

std::int64_t signed_count_same_sign(const circle_morse_function& f, const std::string& from_id,
                                    const std::string& to_id) {
    validate_circle(f);
    const std::size_t from = index_of(f, from_id);
    const std::size_t to = index_of(f, to_id);
    if (from_id == to_id)
        throw precondition_error("no trajectory from a point to itself");
    const auto& a = f.points[from];
    const auto& b = f.points[to];
    if ((a.value > 0) != (b.value > 0))
        throw precondition_error("signed_count_same_sign needs both values of one sign");
    if (a.index() != 1 || b.index() != 0)
        throw precondition_error("signed counts run from a maximum (index 1) to a minimum (index 0)");
    return arc_difference(f, from, to, f.orientation);
}

std::int64_t signed_count_pos_to_neg(const circle_morse_function& f, const std::string& gamma_id,
                                     const std::string& delta_id, int ambient_orientation) {
    validate_circle(f);
    if (ambient_orientation != 1 && ambient_orientation != -1)
        throw precondition_error("ambient orientation must be +1 or -1");
    const std::size_t gi = index_of(f, gamma_id);
    const std::size_t di = index_of(f, delta_id);
    const auto& g = f.points[gi];
    const auto& d = f.points[di];
    if (!(g.value > 0.0 && d.value < 0.0))
        throw precondition_error("expected a positive source and negative target");
    if (g.index() != 1 || d.index() != 0)
        throw precondition_error("expected a maximum source and minimum target");
    // The inward-vector frame contributes +1 in this dimension; the arc signs
    // carry the ambient orientation.
    return arc_difference(f, gi, di, ambient_orientation);
}

} // namespace morsehb
