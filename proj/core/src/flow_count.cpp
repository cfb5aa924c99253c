#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "morsehb/checked.hpp"
#include "morsehb/flow.hpp"

namespace morsehb {

namespace detail {
double chart_distance(const flow_problem& fp, std::array<double, 2> a, std::array<double, 2> b);
double distance_to_point(const flow_problem& fp, std::array<double, 2> x, const declared_point& p);
} // namespace detail

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

using vec2 = std::array<double, 2>;

double det2(vec2 a, vec2 b) { return a[0] * b[1] - a[1] * b[0]; }
vec2 rot_plus(vec2 v) { return {-v[1], v[0]}; } // [v, rot_plus v] positively oriented
vec2 normalized(vec2 v) {
    const double n = std::hypot(v[0], v[1]);
    if (n == 0) throw numeric_error("cannot normalize a zero vector");
    return {v[0] / n, v[1] / n};
}

// Jacobian of the forward field by central differences.
std::array<vec2, 2> jacobian(const flow_problem& fp, vec2 x) {
    const double h = 1e-6;
    auto fx1 = fp.vector_field(x[0] + h, x[1]);
    auto fx0 = fp.vector_field(x[0] - h, x[1]);
    auto fs1 = fp.vector_field(x[0], x[1] + h);
    auto fs0 = fp.vector_field(x[0], x[1] - h);
    // rows: dF_phi/d(phi,s); dF_s/d(phi,s)
    return {vec2{(fx1[0] - fx0[0]) / (2 * h), (fs1[0] - fs0[0]) / (2 * h)},
            vec2{(fx1[1] - fx0[1]) / (2 * h), (fs1[1] - fs0[1]) / (2 * h)}};
}

struct eigen_pair {
    double value;
    vec2 vector;
};

// Real 2x2 eigensystem; gradient-flow linearizations have real spectra.
std::array<eigen_pair, 2> eigen2(const std::array<vec2, 2>& j) {
    const double tr = j[0][0] + j[1][1];
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    double disc = tr * tr - 4 * det;
    if (disc < 0) {
        if (disc < -1e-6) throw numeric_error("complex linearization spectrum at a critical point");
        disc = 0;
    }
    const double root = std::sqrt(disc);
    std::array<eigen_pair, 2> out;
    for (int i = 0; i < 2; ++i) {
        const double lambda = (tr + (i == 0 ? root : -root)) / 2;
        vec2 v;
        const vec2 r0{j[0][0] - lambda, j[0][1]};
        const vec2 r1{j[1][0], j[1][1] - lambda};
        if (std::hypot(r0[0], r0[1]) > std::hypot(r1[0], r1[1]))
            v = {-r0[1], r0[0]};
        else
            v = {-r1[1], r1[0]};
        out[i] = {lambda, normalized(v)};
    }
    return out;
}

vec2 canonical_sign(vec2 v) {
    if (std::fabs(v[0]) > 1e-12) return v[0] > 0 ? v : vec2{-v[0], -v[1]};
    return v[1] > 0 ? v : vec2{-v[0], -v[1]};
}

struct sphere_sample {
    double param = 0;
    vec2 point{};
    vec2 outward{};
    int point_sign = 0; // 0-dimensional spheres only
};

struct shooting_sphere {
    std::vector<sphere_sample> samples;
    int dim = 0;      // 0 or 1
    bool closed = false; // wrap-around adjacency (full circles)
    // rebuild a sample at an arbitrary parameter (dim 1 only)
    std::function<sphere_sample(double)> at;
};

double jitter_from_seed(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

shooting_sphere make_sphere(const flow_problem& fp, const declared_point& from,
                            const shooting_config& cfg) {
    shooting_sphere sphere;
    const double eps = cfg.eps_shoot;
    const double L = fp.length;
    const int K = std::max(cfg.samples, 8);
    const double jitter = jitter_from_seed(cfg.seed);

    if (from.kind == critical_kind::interior) {
        const bool cap_low = std::abs(from.s) < 1e-9;
        const bool cap_high = std::abs(from.s - L) < 1e-9;
        if (from.index == 1) {
            auto eig = eigen2(jacobian(fp, {from.phi, from.s}));
            const eigen_pair* unstable = nullptr;
            for (const auto& e : eig)
                if (e.value > 0 && (!unstable || e.value > unstable->value)) unstable = &e;
            if (!unstable) throw numeric_error("no unstable direction at index-1 source");
            const vec2 u = canonical_sign(unstable->vector);
            sphere.dim = 0;
            sphere.samples.push_back(
                {0.0, {from.phi + eps * u[0], from.s + eps * u[1]}, u, +1});
            sphere.samples.push_back(
                {3.14159, {from.phi - eps * u[0], from.s - eps * u[1]}, {-u[0], -u[1]}, -1});
        } else if (from.index == 2) {
            sphere.dim = 1;
            sphere.closed = true;
            if (cap_low || cap_high) {
                const double s = cap_low ? eps : L - eps;
                const vec2 out = cap_low ? vec2{0, 1} : vec2{0, -1};
                sphere.at = [s, out](double theta) {
                    return sphere_sample{theta, {theta, s}, out, 0};
                };
            } else {
                const double w = fp.warp_at(from.s);
                const double phi0 = from.phi, s0 = from.s;
                sphere.at = [phi0, s0, w, eps](double theta) {
                    vec2 dir{std::cos(theta) / w, std::sin(theta)};
                    return sphere_sample{
                        theta, {phi0 + eps * dir[0], s0 + eps * dir[1]}, dir, 0};
                };
            }
            for (int j = 0; j < K; ++j) sphere.samples.push_back(sphere.at(two_pi * (j + jitter) / K));
        } else {
            throw precondition_error("interior source must have index 1 or 2");
        }
    } else {
        // boundary-negative source: unstable half-sphere into the manifold
        const collar_chart* collar = nullptr;
        for (const auto& c : fp.collars)
            if (c.component == from.component) collar = &c;
        if (!collar) throw precondition_error("source component has no collar");
        const bool low = collar->end == collar_end::low;
        const double phi0 = from.phi;
        if (from.index == 0) {
            sphere.dim = 0;
            const vec2 inward = low ? vec2{0, 1} : vec2{0, -1};
            sphere.samples.push_back(
                {0.0, {phi0, low ? eps : L - eps}, inward, +1});
        } else if (from.index == 1) {
            sphere.dim = 1;
            sphere.closed = false;
            sphere.at = [phi0, low, L, eps](double alpha) {
                const double dphi = eps * std::cos(alpha);
                const double dr = eps * std::sin(alpha);
                vec2 point{phi0 + dphi, low ? dr : L - dr};
                vec2 out{std::cos(alpha), low ? std::sin(alpha) : -std::sin(alpha)};
                return sphere_sample{alpha, point, out, 0};
            };
            for (int j = 0; j < K; ++j) {
                const double alpha =
                    3.141592653589793 * (j + 0.5 + 0.98 * (jitter - 0.5)) / K;
                sphere.samples.push_back(sphere.at(alpha));
            }
        } else {
            throw precondition_error("boundary-negative source in a surface has index 0 or 1");
        }
    }
    return sphere;
}

struct shot {
    sphere_sample sample;
    trajectory tr;
    limit_classification limit;
};

shot integrate_sample(const flow_problem& fp, const sphere_sample& sample,
                      const shooting_config& cfg) {
    shot s;
    s.sample = sample;
    s.tr = integrate_trajectory(fp, sample.point, flow_direction::forward, cfg);
    s.limit = s.tr.forward_limit;
    return s;
}

// Hausdorff-style distance between paths after reparametrization by f-level.
// The flat cylinder metric is used on purpose: the cone metric collapses
// tangential separations near the boundary, which would merge genuinely
// distinct routes around a boundary target. Levels are spaced geometrically
// toward the low end so divergence inside a shrinking f-window stays visible.
double path_distance(const flow_problem& fp, const trajectory& a, const trajectory& b) {
    if (a.f_values.empty() || b.f_values.empty()) return 1e9;
    const double hi = std::min(a.f_values.front(), b.f_values.front());
    const double lo = std::max(a.f_values.back(), b.f_values.back());
    if (!(hi > lo)) return 1e9;
    auto point_at = [](const trajectory& tr, double level) -> vec2 {
        // f_values decrease along the recorded path
        std::size_t lo_i = 0, hi_i = tr.f_values.size() - 1;
        while (hi_i - lo_i > 1) {
            std::size_t mid = (lo_i + hi_i) / 2;
            if (tr.f_values[mid] >= level)
                lo_i = mid;
            else
                hi_i = mid;
        }
        const double f0 = tr.f_values[lo_i], f1 = tr.f_values[hi_i];
        const double t = f0 == f1 ? 0.0 : (f0 - level) / (f0 - f1);
        return {tr.samples[lo_i][0] + t * (tr.samples[hi_i][0] - tr.samples[lo_i][0]),
                tr.samples[lo_i][1] + t * (tr.samples[hi_i][1] - tr.samples[lo_i][1])};
    };
    auto flat_distance = [](vec2 x, vec2 y) {
        double dphi = std::fabs(std::fmod(x[0] - y[0], two_pi));
        if (dphi > two_pi / 2) dphi = two_pi - dphi;
        return std::hypot(dphi, x[1] - y[1]);
    };
    (void)fp;
    double worst = 0;
    for (int i = 1; i <= 24; ++i) { // uniform levels
        const double level = lo + (hi - lo) * i / 25.0;
        worst = std::max(worst, flat_distance(point_at(a, level), point_at(b, level)));
    }
    for (int j = 1; j <= 24; ++j) { // geometric refinement toward the bottom
        const double level = lo + (hi - lo) * std::pow(10.0, -0.5 * j);
        worst = std::max(worst, flat_distance(point_at(a, level), point_at(b, level)));
    }
    return worst;
}

int point_index(const flow_problem& fp, const std::string& id) {
    const declared_point* p = fp.find_point(id);
    return p ? p->index : -1;
}

double flat_metric(const vec2& x, double phi, double s) {
    double dphi = std::fabs(std::fmod(x[0] - phi, two_pi));
    if (dphi > two_pi / 2) dphi = two_pi - dphi;
    return std::hypot(dphi, x[1] - s);
}

// A path that rides along the stable set of an index-1 point before falling
// into a sink carries a side signature: which side of that point it exits on.
// Two same-sink paths with equal signatures bound no separatrix.
struct creep_info {
    const declared_point* point = nullptr;
    double distance = 1e18;
    int side = 0;
    bool creeping() const { return point != nullptr; }
};

creep_info creep_of(const flow_problem& fp, const trajectory& tr, double creep_tol) {
    creep_info best;
    std::size_t best_at = 0;
    for (const auto& p : fp.points) {
        if (p.index != 1) continue;
        const double ps = fp.point_s(p);
        for (std::size_t i = 0; i < tr.samples.size(); ++i) {
            const double d = flat_metric(tr.samples[i], p.phi, ps);
            if (d < best.distance) {
                best.distance = d;
                best.point = &p;
                best_at = i;
            }
        }
    }
    if (!best.point || best.distance > creep_tol) return {};

    const double ps = fp.point_s(*best.point);
    vec2 exit_dir{};
    bool found = false;
    for (std::size_t i = best_at; i < tr.samples.size(); ++i) {
        if (flat_metric(tr.samples[i], best.point->phi, ps) > 5 * creep_tol) {
            double dphi = std::remainder(tr.samples[i][0] - best.point->phi, two_pi);
            exit_dir = {dphi, tr.samples[i][1] - ps};
            found = true;
            break;
        }
    }
    if (!found) return {}; // path ends at the point itself: not a sink path
    if (best.point->kind == critical_kind::boundary) {
        best.side = exit_dir[0] > 0 ? 1 : -1;
    } else {
        auto eig = eigen2(jacobian(fp, {best.point->phi, best.point->s}));
        const eigen_pair* unstable = nullptr;
        for (const auto& e : eig)
            if (e.value > 0 && (!unstable || e.value > unstable->value)) unstable = &e;
        if (!unstable) return {};
        const vec2 u = canonical_sign(unstable->vector);
        best.side = exit_dir[0] * u[0] + exit_dir[1] * u[1] > 0 ? 1 : -1;
    }
    return best;
}

struct crossing {
    std::string target;
    sphere_sample where;
    trajectory tr; // trajectory through the crossing
    bool from_bisection = false;
    double residual_distance = 0;
    double residual_gradient = 0;
};

// Orientation sign of a crossing against the chart orientation dphi ^ ds.
int crossing_sign(const flow_problem& fp, const declared_point& to, const crossing& c,
                  int sphere_dim) {
    if (to.index == 0) {
        // index-0 targets: or(S) is the ambient orientation, the sign is the
        // boundary orientation of the sphere point
        return c.where.point_sign;
    }
    // index-1 targets: frame [S-direction, sphere boundary vector]
    const vec2 b = rot_plus(c.where.outward);
    vec2 flow_dir = normalized(fp.vector_field(c.where.point[0], c.where.point[1]));
    vec2 s_dir;
    if (to.kind == critical_kind::boundary) {
        // stable curve of a positive boundary maximum is oriented by the flow
        s_dir = flow_dir;
    } else {
        // interior saddle: stable orientation chosen so [or(S), or(U)] is the
        // chart orientation; transport flips across the two branches
        auto eig = eigen2(jacobian(fp, {to.phi, to.s}));
        const eigen_pair* stable = nullptr;
        const eigen_pair* unstable = nullptr;
        for (const auto& e : eig) {
            if (e.value < 0 && (!stable || e.value < stable->value)) stable = &e;
            if (e.value > 0 && (!unstable || e.value > unstable->value)) unstable = &e;
        }
        if (!stable || !unstable)
            throw numeric_error("target is not a saddle of the linearized flow");
        const vec2 u = canonical_sign(unstable->vector);
        vec2 v_or = canonical_sign(stable->vector);
        if (det2(v_or, u) < 0) v_or = {-v_or[0], -v_or[1]};
        // branch of the stable curve the crossing trajectory approaches along
        double best = 1e18;
        vec2 closest{};
        for (const auto& pt : c.tr.samples) {
            const double d = detail::distance_to_point(fp, pt, to);
            if (d < best) {
                best = d;
                closest = pt;
            }
        }
        double side = (closest[0] - to.phi) * v_or[0] + (closest[1] - to.s) * v_or[1];
        if (side == 0) throw numeric_error("cannot resolve the stable branch of the crossing");
        const double sigma = side > 0 ? 1.0 : -1.0;
        s_dir = {-sigma * flow_dir[0], -sigma * flow_dir[1]};
    }
    (void)sphere_dim;
    const double d = det2(s_dir, b);
    if (d == 0) throw numeric_error("degenerate orientation frame at a crossing");
    return d > 0 ? 1 : -1;
}

} // namespace

count_certificate count_m(const flow_problem& fp, const std::string& from_id,
                          const std::string& to_id, const shooting_config& cfg) {
    count_certificate cert;
    if (from_id == to_id) return cert; // constant trajectories are excluded

    const declared_point* from = fp.find_point(from_id);
    const declared_point* to = fp.find_point(to_id);
    if (!from || !to) throw precondition_error("unknown critical point id in count_m");

    // legal shapes with zero-dimensional unparameterized moduli
    auto positive_boundary = [&](const declared_point& p) {
        if (p.kind != critical_kind::boundary) return false;
        const collar_chart* c = nullptr;
        for (const auto& col : fp.collars)
            if (col.component == p.component) c = &col;
        return c && c->boundary_function.eval(p.phi) > 0;
    };
    if (from->kind == critical_kind::interior) {
        if (to->index != from->index - 1)
            throw precondition_error("interior source needs a target of index one less");
        if (to->kind == critical_kind::boundary && !positive_boundary(*to))
            throw precondition_error("boundary targets must be positive");
    } else {
        if (positive_boundary(*from))
            throw precondition_error("positive boundary points have no interior trajectories out");
        if (to->index != from->index)
            throw precondition_error("boundary-negative source needs a target of equal index");
        if (to->kind == critical_kind::boundary) {
            if (!positive_boundary(*to))
                throw precondition_error("boundary targets must be positive");
            if (to->component == from->component)
                throw precondition_error("no interior trajectory returns to its own component");
            const collar_chart *cf = nullptr, *ct = nullptr;
            for (const auto& col : fp.collars) {
                if (col.component == from->component) cf = &col;
                if (col.component == to->component) ct = &col;
            }
            if (!(cf->constant_c > ct->constant_c))
                throw precondition_error(
                    "cross-component trajectories need strictly decreasing constants");
        }
    }

    shooting_sphere sphere = make_sphere(fp, *from, cfg);
    std::vector<shot> shots;
    for (const auto& sample : sphere.samples) shots.push_back(integrate_sample(fp, sample, cfg));

    cert.total_samples = static_cast<int>(shots.size());
    int classified = 0;
    for (const auto& s : shots)
        if (s.limit.result == limit_classification::outcome::point) ++classified;
    cert.undecided_samples = cert.total_samples - classified;
    cert.classified_fraction =
        cert.total_samples == 0 ? 1.0 : double(classified) / cert.total_samples;
    if (cert.classified_fraction < cfg.quorum) {
        std::ostringstream os;
        os << "refusing count " << from_id << " -> " << to_id << ": only " << classified << "/"
           << cert.total_samples << " samples classified";
        throw numeric_error(os.str());
    }

    // no trajectory may return to its own boundary component through the interior
    if (from->kind == critical_kind::boundary)
        for (const auto& s : shots)
            if (s.limit.result == limit_classification::outcome::point) {
                const declared_point* hit = fp.find_point(s.limit.id);
                if (hit && hit->kind == critical_kind::boundary &&
                    hit->component == from->component)
                    throw numeric_error("invariant violated: trajectory from " + from_id +
                                        " returned to component " + from->component);
            }

    std::vector<crossing> crossings;

    if (sphere.dim == 0) {
        for (const auto& s : shots) {
            if (s.limit.result != limit_classification::outcome::point) continue;
            const int idx = point_index(fp, s.limit.id);
            if (idx >= 1 && s.limit.id != from_id)
                throw numeric_error("non-generic connection from " + from_id + " to the index-" +
                                    std::to_string(idx) + " point " + s.limit.id);
            crossing c;
            c.target = s.limit.id;
            c.where = s.sample;
            c.tr = s.tr;
            crossings.push_back(std::move(c));
        }
    } else {
        // 1-dimensional spheres: direct hits on index-1 targets are isolated
        // crossings; basin transitions between sink classes are resolved by
        // bisection until the limiting trajectory classifies at a saddle-type
        // point or the two bracket paths merge.
        const double merge_tol = cfg.hausdorff_factor * cfg.rho_class;
        const int n = static_cast<int>(shots.size());

        auto is_sink = [&](const shot& s) {
            return s.limit.result == limit_classification::outcome::point &&
                   point_index(fp, s.limit.id) == 0;
        };
        auto is_hit = [&](const shot& s) {
            return s.limit.result == limit_classification::outcome::point &&
                   point_index(fp, s.limit.id) >= 1;
        };

        // direct hits, one crossing per maximal run
        int i = 0;
        while (i < n) {
            if (!is_hit(shots[i])) {
                ++i;
                continue;
            }
            int j = i;
            while (j + 1 < n && is_hit(shots[j + 1]) && shots[j + 1].limit.id == shots[i].limit.id)
                ++j;
            const shot& mid = shots[(i + j) / 2];
            crossing c;
            c.target = mid.limit.id;
            c.where = mid.sample;
            c.tr = mid.tr;
            crossings.push_back(std::move(c));
            i = j + 1;
        }

        // Adjacent classified sink pairs seed a recursive subdivision. An
        // interval is dropped once it provably bounds no separatrix: same sink
        // with grossly matching routes, or same sink with equal side
        // signatures around one index-1 point. Otherwise it splits at its
        // midpoint until the midpoint trajectory itself classifies at an
        // index-1 point, which is the crossing. Subdivision never picks a
        // side, so a noisy comparison cannot lose the separatrix.
        std::vector<int> order;
        for (int k = 0; k < n; ++k)
            if (shots[k].limit.result == limit_classification::outcome::point) order.push_back(k);

        struct bracket {
            sphere_sample a, b;
            trajectory tr_a, tr_b;
            std::string target_a, target_b;
        };
        std::deque<bracket> work;
        const int pairs = sphere.closed ? static_cast<int>(order.size())
                                        : static_cast<int>(order.size()) - 1;
        for (int k = 0; k < pairs; ++k) {
            const shot& sa = shots[order[k]];
            const shot& sb = shots[order[(k + 1) % order.size()]];
            if (!is_sink(sa) || !is_sink(sb)) continue; // hits already handled
            work.push_back({sa.sample, sb.sample, sa.tr, sb.tr, sa.limit.id, sb.limit.id});
        }

        // Routes on distinct sides of a saddle differ by the extent of its
        // unstable set, which is macroscopic; same-basin neighbours converge
        // with the bracket width.
        const double route_tol = 0.3;
        const double creep_tol = std::max(2.0 * merge_tol, 0.02);

        int guard = 0;
        while (!work.empty()) {
            if (++guard > 20000) throw numeric_error("subdivision budget exceeded");
            bracket br = work.front();
            work.pop_front();

            double pa = br.a.param, pb = br.b.param;
            if (sphere.closed && pb < pa) pb += two_pi;
            // strong tangential shear near a boundary target can demand very
            // narrow brackets before the midpoint classifies there
            if (pb - pa < 5e-13) {
                if (br.target_a != br.target_b)
                    throw numeric_error("unresolved basin transition between " + br.target_a +
                                        " and " + br.target_b + " while counting " + from_id +
                                        " -> " + to_id);
                continue;
            }
            if (br.target_a == br.target_b) {
                creep_info ca = creep_of(fp, br.tr_a, creep_tol);
                creep_info cb = creep_of(fp, br.tr_b, creep_tol);
                if (!ca.creeping() && !cb.creeping() &&
                    path_distance(fp, br.tr_a, br.tr_b) < route_tol)
                    continue; // one continuous family
                if (ca.creeping() && cb.creeping() && ca.point == cb.point && ca.side == cb.side)
                    continue; // both pass the saddle region on one side
            }

            const double pm = 0.5 * (pa + pb);
            sphere_sample mid_sample = sphere.at(sphere.closed ? std::fmod(pm, two_pi) : pm);
            mid_sample.param = pm;
            shot mid = integrate_sample(fp, mid_sample, cfg);
            if (mid.limit.result != limit_classification::outcome::point)
                throw numeric_error("unresolved transition while counting " + from_id + " -> " +
                                    to_id + ": " + mid.limit.detail);
            const int idx = point_index(fp, mid.limit.id);
            if (idx >= 1) {
                crossing c;
                c.target = mid.limit.id;
                c.where = mid_sample;
                c.tr = mid.tr;
                c.from_bisection = true;
                const declared_point* tp = fp.find_point(mid.limit.id);
                c.residual_distance = detail::distance_to_point(fp, mid.tr.samples.back(), *tp);
                c.residual_gradient =
                    fp.grad_norm(mid.tr.samples.back()[0], mid.tr.samples.back()[1]);
                crossings.push_back(std::move(c));
                continue;
            }
            work.push_back({br.a, mid_sample, br.tr_a, mid.tr, br.target_a, mid.limit.id});
            work.push_back({mid_sample, br.b, mid.tr, br.tr_b, mid.limit.id, br.target_b});
        }
    }

    // tally and certify
    for (const auto& c : crossings) {
        trajectory_class_info info;
        info.target = c.target;
        info.from_bisection = c.from_bisection;
        info.sample_count = 1;
        info.residual_distance = c.residual_distance;
        info.residual_gradient = c.residual_gradient;
        if (c.target == to_id) {
            info.sign = crossing_sign(fp, *to, c, sphere.dim);
            cert.count = checked_add(cert.count, info.sign);
        }
        cert.classes.push_back(std::move(info));
    }
    return cert;
}

circle_morse_function circle_from_collar(const flow_problem& fp, const collar_chart& collar) {
    circle_morse_function f;
    f.component = collar.component;
    f.orientation = collar.end == collar_end::low ? 1 : -1;

    // locate the critical angles of f_N
    const trig_poly& fn = collar.boundary_function;
    std::vector<double> angles;
    const int grid = 2048;
    double prev = fn.d1(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double phi = two_pi * i / grid;
        const double cur = fn.d1(std::fmod(phi, two_pi));
        if (prev == 0.0) {
            angles.push_back(two_pi * (i - 1) / grid);
        } else if (prev * cur < 0) {
            double lo = two_pi * (i - 1) / grid, hi = phi;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (fn.d1(mid) * prev <= 0)
                    hi = mid;
                else
                    lo = mid;
            }
            angles.push_back(std::fmod(0.5 * (lo + hi), two_pi));
        }
        prev = cur;
    }
    std::sort(angles.begin(), angles.end());

    // every found angle must match a declared boundary point and vice versa
    std::vector<const declared_point*> declared;
    for (const auto& p : fp.points)
        if (p.kind == critical_kind::boundary && p.component == collar.component)
            declared.push_back(&p);
    if (declared.size() != angles.size())
        throw numeric_error("declared boundary points of " + collar.component +
                            " do not match the critical set of f_N");
    for (double angle : angles) {
        const declared_point* match = nullptr;
        for (const auto* p : declared) {
            double d = std::fabs(p->phi - angle);
            d = std::min(d, two_pi - d);
            if (d < 1e-6) match = p;
        }
        if (!match)
            throw numeric_error("undeclared boundary critical point on " + collar.component);
        circle_critical_point cp;
        cp.id = match->id;
        cp.angle = match->phi;
        cp.value = fn.eval(match->phi);
        cp.type = fn.d2(match->phi) < 0 ? circle_point_type::maximum : circle_point_type::minimum;
        f.points.push_back(std::move(cp));
    }
    std::sort(f.points.begin(), f.points.end(),
              [](const auto& a, const auto& b) { return a.angle < b.angle; });
    validate_circle(f);
    return f;
}

morse_data build_morse_data(const flow_problem& fp, const shooting_config& cfg) {
    check_flow_problem(fp);

    morse_data data;
    data.ambient_dimension = fp.dimension;
    for (const auto& c : fp.collars)
        data.boundary_components.push_back({c.component, c.constant_c, fp.dimension - 1});

    std::map<std::string, circle_morse_function> circles;
    for (const auto& c : fp.collars) circles[c.component] = circle_from_collar(fp, c);

    for (const auto& p : fp.points) {
        critical_point cp;
        cp.id = p.id;
        cp.kind = p.kind;
        cp.index = p.index;
        if (p.kind == critical_kind::boundary) {
            cp.component = p.component;
            const collar_chart* collar = nullptr;
            for (const auto& c : fp.collars)
                if (c.component == p.component) collar = &c;
            cp.critical_value = collar->boundary_function.eval(p.phi);
        }
        data.critical_points.push_back(std::move(cp));
    }
    data.sort();

    // exact boundary-internal counts per component
    for (const auto& [component, circle] : circles) {
        for (const auto& a : circle.points) {
            if (a.type != circle_point_type::maximum) continue;
            for (const auto& b : circle.points) {
                if (b.type != circle_point_type::minimum) continue;
                const bool a_pos = a.value > 0, b_pos = b.value > 0;
                if (!a_pos && b_pos) continue; // no negative-to-positive trajectories
                std::int64_t count =
                    a_pos && !b_pos
                        ? signed_count_pos_to_neg(circle, a.id, b.id, circle.orientation)
                        : signed_count_same_sign(circle, a.id, b.id);
                data.counts.n_table[{a.id, b.id}] = count;
            }
        }
    }

    // interior counts for every legal index-adjacent pair
    auto constant_of = [&](const std::string& component) {
        for (const auto& c : fp.collars)
            if (c.component == component) return c.constant_c;
        throw precondition_error("unknown component " + component);
    };
    for (const auto& from : fp.points) {
        const bool from_interior = from.kind == critical_kind::interior;
        const bool from_negative =
            !from_interior &&
            circles[from.component].points.size() > 0 &&
            [&] {
                for (const auto& q : circles[from.component].points)
                    if (q.id == from.id) return q.value < 0;
                return false;
            }();
        if (!from_interior && !from_negative) continue;
        if (from_interior && from.index == 0) continue;
        for (const auto& to : fp.points) {
            if (to.id == from.id) continue;
            const bool to_interior = to.kind == critical_kind::interior;
            bool to_positive = false;
            if (!to_interior)
                for (const auto& q : circles[to.component].points)
                    if (q.id == to.id) to_positive = q.value > 0;
            if (!to_interior && !to_positive) continue;
            const int want = from_interior ? from.index - 1 : from.index;
            if (to.index != want) continue;
            if (from_negative && !to_interior) {
                if (to.component == from.component) continue;
                if (!(constant_of(from.component) > constant_of(to.component))) continue;
            }
            count_certificate cert = count_m(fp, from.id, to.id, cfg);
            data.counts.m_table[{from.id, to.id}] = cert.count;
        }
    }

    validation_report report = validate(data);
    if (!report.ok)
        throw numeric_error("internal error: flow-built data failed validation: " +
                            report.violations.front().rule);
    return data;
}

} // namespace morsehb
