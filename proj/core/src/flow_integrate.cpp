#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "morsehb/flow.hpp"

namespace morsehb {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

double wrap_angle(double phi) {
    double w = std::fmod(phi, two_pi);
    if (w < 0) w += two_pi;
    return w;
}

double ang_diff(double a, double b) {
    double d = std::fabs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, two_pi - d);
}

} // namespace

namespace detail {

double chart_distance(const flow_problem& fp, std::array<double, 2> a, std::array<double, 2> b) {
    const double mid_s = 0.5 * (a[1] + b[1]);
    const double w = std::max(fp.warp_at(std::clamp(mid_s, 0.0, fp.length)), 0.0);
    const double dphi = ang_diff(a[0], b[0]);
    const double ds = a[1] - b[1];
    return std::sqrt(w * w * dphi * dphi + ds * ds);
}

// Distance used to decide convergence to a declared point: metric-weighted at
// the target for interior points.
double distance_to_point(const flow_problem& fp, std::array<double, 2> x,
                         const declared_point& p) {
    const double ps = fp.point_s(p);
    const double w = std::max(fp.warp_at(std::clamp(ps, 0.0, fp.length)), 0.0);
    const double dphi = ang_diff(x[0], p.phi);
    const double ds = x[1] - ps;
    return std::sqrt(w * w * dphi * dphi + ds * ds);
}

std::optional<limit_classification> classify_state(const flow_problem& fp,
                                                   std::array<double, 2> x, flow_direction dir,
                                                   std::array<double, 2> start,
                                                   const shooting_config& cfg) {
    std::vector<const declared_point*> hits;

    const double grad = fp.grad_norm(x[0], x[1]);
    for (const auto& p : fp.points) {
        if (p.kind == critical_kind::interior) {
            if (grad < cfg.grad_tol && distance_to_point(fp, x, p) < cfg.rho_class)
                hits.push_back(&p);
        } else {
            // A positive boundary point attracts interior trajectories; a
            // negative one only emits them (its stable set lies inside the
            // wall). A trajectory at r > 0 can brush r below the threshold
            // near a negative point without converging there, so forward
            // classification at a negative point needs a start on that wall.
            const collar_chart* collar = nullptr;
            for (const auto& c : fp.collars)
                if (c.component == p.component) collar = &c;
            const double value = collar ? collar->boundary_function.eval(p.phi) : 0.0;
            const double wall_s = fp.point_s(p);
            const double start_r = wall_s == 0.0 ? start[1] : fp.length - start[1];
            const bool on_wall = start_r < 1e-14;
            const bool admissible =
                value > 0.0 ? dir == flow_direction::forward || on_wall
                            : dir == flow_direction::backward || on_wall;
            if (!admissible) continue;
            const double r = wall_s == 0.0 ? x[1] : fp.length - x[1];
            if (r < cfg.r_boundary && ang_diff(x[0], p.phi) < cfg.rho_class)
                hits.push_back(&p);
        }
    }
    if (hits.empty()) return std::nullopt;
    limit_classification c;
    if (hits.size() > 1) {
        c.result = limit_classification::outcome::undecided;
        c.detail = "ambiguous: " + hits[0]->id + " and " + hits[1]->id + " both in range";
        return c;
    }
    c.result = limit_classification::outcome::point;
    c.id = hits[0]->id;
    return c;
}

} // namespace detail

trajectory integrate_trajectory(const flow_problem& fp, std::array<double, 2> start,
                                flow_direction dir, const shooting_config& cfg) {
    const double L = fp.length;
    if (start[1] < -1e-9 || start[1] > L + 1e-9)
        throw precondition_error("start point outside the chart");
    start[1] = std::clamp(start[1], 0.0, L);

    const double sign = dir == flow_direction::forward ? 1.0 : -1.0;
    auto field = [&](std::array<double, 2> y) {
        auto v = fp.vector_field(y[0], std::clamp(y[1], 0.0, L));
        return std::array<double, 2>{sign * v[0], sign * v[1]};
    };

    // Dormand-Prince 5(4)
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    trajectory tr;
    tr.direction = dir;
    std::array<double, 2> y = start;
    double t = 0.0;
    double h = 1e-3;
    const double h_max = 0.5;
    double f_prev = fp.f(y[0], std::clamp(y[1], 0.0, L));
    tr.times.push_back(t);
    tr.samples.push_back(y);
    tr.f_values.push_back(f_prev);

    limit_classification& limit =
        dir == flow_direction::forward ? tr.forward_limit : tr.backward_limit;

    if (auto c = detail::classify_state(fp, y, dir, start, cfg)) {
        // starting at (or within tolerance of) a critical point: constant trajectory
        limit = *c;
        return tr;
    }

    auto add = [](std::array<double, 2> y0, double c, std::array<double, 2> k) {
        return std::array<double, 2>{y0[0] + c * k[0], y0[1] + c * k[1]};
    };

    std::size_t accepted = 0;
    while (t < cfg.t_max) {
        h = std::min({h, h_max, cfg.t_max - t});
        auto k1 = field(y);
        auto k2 = field(add(y, h * a21, k1));
        auto k3 = field({y[0] + h * (a31 * k1[0] + a32 * k2[0]), y[1] + h * (a31 * k1[1] + a32 * k2[1])});
        auto k4 = field({y[0] + h * (a41 * k1[0] + a42 * k2[0] + a43 * k3[0]),
                         y[1] + h * (a41 * k1[1] + a42 * k2[1] + a43 * k3[1])});
        auto k5 = field({y[0] + h * (a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0]),
                         y[1] + h * (a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1])});
        auto k6 = field({y[0] + h * (a61 * k1[0] + a62 * k2[0] + a63 * k3[0] + a64 * k4[0] +
                                     a65 * k5[0]),
                         y[1] + h * (a61 * k1[1] + a62 * k2[1] + a63 * k3[1] + a64 * k4[1] +
                                     a65 * k5[1])});
        std::array<double, 2> y_new{
            y[0] + h * (b1 * k1[0] + b3 * k3[0] + b4 * k4[0] + b5 * k5[0] + b6 * k6[0]),
            y[1] + h * (b1 * k1[1] + b3 * k3[1] + b4 * k4[1] + b5 * k5[1] + b6 * k6[1])};
        auto k7 = field(y_new);
        const double err_phi = h * (e1 * k1[0] + e3 * k3[0] + e4 * k4[0] + e5 * k5[0] +
                                    e6 * k6[0] + e7 * k7[0]);
        const double err_s = h * (e1 * k1[1] + e3 * k3[1] + e4 * k4[1] + e5 * k5[1] + e6 * k6[1] +
                                  e7 * k7[1]);
        const double scale_phi = cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(y[0]), std::fabs(y_new[0]));
        const double scale_s = cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(y[1]), std::fabs(y_new[1]));
        const double err = std::sqrt(0.5 * ((err_phi / scale_phi) * (err_phi / scale_phi) +
                                            (err_s / scale_s) * (err_s / scale_s)));

        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-14) throw numeric_error("step-size underflow during integration");
            continue;
        }

        // accepted
        t += h;
        if (y_new[1] < 0.0) {
            if (y_new[1] < -1e-7) throw numeric_error("trajectory escaped the chart (s < 0)");
            y_new[1] = 0.0;
        }
        if (y_new[1] > L) {
            if (y_new[1] > L + 1e-7) throw numeric_error("trajectory escaped the chart (s > L)");
            y_new[1] = L;
        }
        y = y_new;
        const double f_now = fp.f(y[0], y[1]);
        const double slack = 1e-10;
        if (dir == flow_direction::forward ? f_now > f_prev + slack : f_now < f_prev - slack) {
            std::ostringstream os;
            os << "f monotonicity violated at t = " << t << " (" << f_prev << " -> " << f_now
               << ")";
            throw numeric_error(os.str());
        }
        f_prev = f_now;
        tr.times.push_back(t);
        tr.samples.push_back(y);
        tr.f_values.push_back(f_now);
        if (++accepted > 400000) throw numeric_error("integration exceeded the sample budget");

        if (auto c = detail::classify_state(fp, y, dir, start, cfg)) {
            limit = *c;
            return tr;
        }
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }

    limit.result = limit_classification::outcome::undecided;
    limit.detail = "no classification before t_max";
    return tr;
}

limit_classification classify_limit(const flow_problem& fp, const trajectory& tr,
                                    const shooting_config& cfg) {
    if (tr.samples.empty()) {
        limit_classification c;
        c.detail = "empty trajectory";
        return c;
    }
    const auto& end = tr.samples.back();
    if (end[1] < -1e-7 || end[1] > fp.length + 1e-7) {
        limit_classification c;
        c.result = limit_classification::outcome::escaped;
        c.detail = "endpoint left the chart";
        return c;
    }
    if (auto c = detail::classify_state(fp, end, tr.direction, tr.samples.front(), cfg)) return *c;
    limit_classification c;
    c.result = limit_classification::outcome::undecided;
    c.detail = "endpoint not near any declared critical point";
    return c;
}

} // namespace morsehb
