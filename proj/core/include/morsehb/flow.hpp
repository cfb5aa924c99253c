#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "morsehb/circle.hpp"
#include "morsehb/errors.hpp"
#include "morsehb/morse_data.hpp"

namespace morsehb {

/// Finite Fourier series on the circle: const + sum a_m cos(m phi) + b_m sin(m phi).
struct trig_poly {
    double constant = 0.0;
    std::vector<double> cos_coeffs; // coefficient of cos((j+1) phi)
    std::vector<double> sin_coeffs;

    double eval(double phi) const;
    double d1(double phi) const;
    double d2(double phi) const;
};

/// Piecewise polynomial in s; segment j uses coefficients in (s - breaks[j]).
struct piecewise_poly {
    std::vector<double> breaks;              // K+1 ascending breakpoints
    std::vector<std::vector<double>> coeffs; // K segments

    double lo() const { return breaks.front(); }
    double hi() const { return breaks.back(); }
    double eval(double s) const;
    double d1(double s) const;
    double d2(double s) const;

    /// Coefficients of the degree-5 polynomial on [0, h] matching value /
    /// first / second derivative at both ends.
    static std::vector<double> quintic_hermite(double h, double v0, double s0, double c0,
                                               double v1, double s1, double c1);
};

/// End-family profile: metric (A r^2 + B) g_N + r^a-weighted radial part,
/// function (A r^2 + B) f_N + C r^2 + D. a = 0 is cone, a = -1 horn; the
/// doubling variant shares the cone's gradient.
struct cone_end_profile {
    double A = 1.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;
    double exponent_a = 0.0;
    bool doubling = false;
};

enum class collar_end { low, high };

struct collar_chart {
    std::string component;
    double constant_c = 0.0;
    trig_poly boundary_function; // f_N on the circle, after end-family normalization
    double r_max = 0.0;
    collar_end end = collar_end::low;
    double metric_scale = 1.0; // boundary metric is metric_scale^2 * dphi^2
};

/// Change of variables between end exponents a and a_bar (both != -2):
/// returns the new radial coordinate and the multiplicative scales applied to
/// g_N and f_N so the metric/function pair is unchanged pointwise.
struct end_conversion {
    double r_bar = 0.0;
    double g_scale = 1.0;
    double f_scale = 1.0;
};
end_conversion convert_end(double a, double a_bar, double r,
                           double g_scale = 1.0, double f_scale = 1.0);

struct declared_point {
    std::string id;
    critical_kind kind = critical_kind::interior;
    int index = 0;
    std::string component; // boundary points only
    double phi = 0.0;
    double s = 0.0; // boundary points: derived from the collar end
};

struct flow_mode {
    int m = 0;
    piecewise_poly cos_profile;
    piecewise_poly sin_profile; // optional, empty breaks when absent
    bool has_sin = false;
};

/// A concrete manifold: warped-cylinder chart (phi, s) on [0, 2pi) x [0, L]
/// with metric w(s)^2 dphi^2 + ds^2. Ends carrying a collar are boundary
/// circles with the cone-end normal form; ends without one are smooth caps
/// (interior points). f(phi, s) is a finite angular-mode sum with piecewise
/// polynomial radial profiles that equal the collar forms exactly.
struct flow_problem {
    int dimension = 2;
    double length = 0.0;
    piecewise_poly warp;
    std::vector<flow_mode> modes;
    std::vector<collar_chart> collars;
    std::vector<declared_point> points;

    double f(double phi, double s) const;
    double df_dphi(double phi, double s) const;
    double df_ds(double phi, double s) const;
    double warp_at(double s) const { return warp.eval(s); }

    /// Negative-gradient field of f: (dphi/dt, ds/dt). Tangent to the ends.
    std::array<double, 2> vector_field(double phi, double s) const;
    /// Riemannian norm of grad f at a point.
    double grad_norm(double phi, double s) const;

    const collar_chart* collar_at(collar_end e) const;
    bool has_cap(collar_end e) const { return collar_at(e) == nullptr; }
    const declared_point* find_point(const std::string& id) const;
    double point_s(const declared_point& p) const; // boundary points mapped to their end
};

flow_problem parse_flow_problem(const std::string& text);
std::string serialize(const flow_problem& fp);

/// Numeric consistency checks: collar forms hold exactly on their intervals,
/// caps are smooth rotationally symmetric critical points, declared critical
/// points are (nondegenerate) zeros of the gradient with the stated index.
/// Throws parse_error / numeric_error on failure.
void check_flow_problem(const flow_problem& fp);

/// Gradient of (A r^2 + B) f_N + C r^2 + D under metric (A r^2 + B) g_N +
/// dr (x) dr in chart components (tangential, radial):
///     X = X_{f_N}(x) + 2 (A f_N(x) + C) r d/dr.
/// r = 0 uses the tangential extension. Throws precondition_error for r < 0.
std::array<double, 2> cone_gradient(const cone_end_profile& profile,
                                    const collar_chart& collar,
                                    double x, double r);

struct shooting_config {
    double eps_shoot = 0.02;  // unstable-sphere radius
    int samples = 64;         // per 1-dimensional sphere; >= 8 per sphere dimension
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    double t_max = 200.0; // boundary creep slows drift to a logarithmic crawl
    double rho_class = 1e-3;  // limit-classification radius
    double grad_tol = 1e-6;
    double quorum = 0.9;      // required classified fraction
    std::uint64_t seed = 0;   // grid jitter; MORSEHB_SEED overrides in the CLI
    double hausdorff_factor = 10.0; // class grouping threshold, times rho_class
    double r_boundary = 1e-8; // boundary-convergence radius
};

struct limit_classification {
    enum class outcome { point, escaped, undecided };
    outcome result = outcome::undecided;
    std::string id;     // set when result == point
    std::string detail; // diagnostics: ambiguity, timeout, ...
};

enum class flow_direction { forward, backward };

struct trajectory {
    flow_direction direction = flow_direction::forward;
    std::vector<double> times;
    std::vector<std::array<double, 2>> samples; // (phi, s), phi unwrapped
    std::vector<double> f_values;               // strictly decreasing forward
    limit_classification forward_limit;
    limit_classification backward_limit;
};

/// Adaptive RK45 solution of the negative-gradient flow from `start`,
/// terminating at t_max or on limit classification. f-monotonicity is
/// asserted per accepted step (1e-10 roundoff allowance).
trajectory integrate_trajectory(const flow_problem& fp, std::array<double, 2> start,
                                flow_direction dir, const shooting_config& cfg);

/// Classify the endpoint of an integrated trajectory: the declared critical
/// point within rho_class with small gradient, a boundary point when r has
/// collapsed below r_boundary, else Escaped/Undecided. Two candidates in
/// range is reported Undecided, never guessed.
limit_classification classify_limit(const flow_problem& fp, const trajectory& tr,
                                    const shooting_config& cfg);

struct trajectory_class_info {
    std::string target;
    int sign = 0; // epsilon of the class
    int sample_count = 0;
    bool from_bisection = false;
    double residual_distance = 0.0;
    double residual_gradient = 0.0;
};

struct count_certificate {
    std::int64_t count = 0;
    std::vector<trajectory_class_info> classes;
    int total_samples = 0;
    int undecided_samples = 0;
    double classified_fraction = 1.0;
};

/// Signed trajectory count between `from` and `to` by shooting from the
/// unstable sphere of `from` (a half-sphere for boundary-negative sources).
/// Signs come from the orientation-frame determinants. Refuses (numeric_error)
/// when fewer than `quorum` of the samples classify.
count_certificate count_m(const flow_problem& fp, const std::string& from,
                          const std::string& to, const shooting_config& cfg);

/// The circle data of a collar: critical points of f_N ordered by angle,
/// orientation +1 at the low end and -1 at the high end (outward-first rule).
circle_morse_function circle_from_collar(const flow_problem& fp, const collar_chart& collar);

/// Full combinatorial data: every legal index-adjacent m-table pair via
/// count_m, n-table entries via the exact circle counts. Output validates.
morse_data build_morse_data(const flow_problem& fp, const shooting_config& cfg);

} // namespace morsehb
