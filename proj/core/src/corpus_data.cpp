#include <cmath>
#include <functional>

#include "morsehb/corpus.hpp"
#include "morsehb/flow.hpp"

// Built-in corpus. Every document is produced by the serializers so the
// shipped files, the embedded entries, and the parsers cannot drift apart.

namespace morsehb {

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;

piecewise_poly make_pp(std::vector<double> breaks, std::vector<std::vector<double>> coeffs) {
    piecewise_poly p;
    p.breaks = std::move(breaks);
    p.coeffs = std::move(coeffs);
    return p;
}

// Three-segment radial profile: exact collar/cap quadratics at the ends and a
// quintic Hermite blend between, C^2 at the junctions.
piecewise_poly three_segment(double s0, std::vector<double> left, double s1,
                             std::vector<double> right, double L) {
    auto eval_at = [](const std::vector<double>& c, double x) {
        double v = 0, d = 0, dd = 0;
        for (std::size_t i = c.size(); i-- > 0;) {
            if (i >= 2) dd = dd * x + double(i) * double(i - 1) * c[i];
            if (i >= 1) d = d * x + double(i) * c[i];
            v = v * x + c[i];
        }
        return std::array<double, 3>{v, d, dd};
    };
    auto [v0, d0, c0] = eval_at(left, s0);
    auto [v1raw, d1raw, c1raw] = eval_at(right, 0.0);
    std::vector<double> mid =
        piecewise_poly::quintic_hermite(s1 - s0, v0, d0, c0, v1raw, d1raw, c1raw);
    return make_pp({0.0, s0, s1, L}, {std::move(left), std::move(mid), std::move(right)});
}

double bisect_zero(const std::function<double(double)>& g, double lo, double hi) {
    double flo = g(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) * flo <= 0)
            hi = mid;
        else {
            lo = mid;
            flo = g(lo);
        }
    }
    return 0.5 * (lo + hi);
}

// Zeros of a smooth function on [lo, hi] by grid scan + bisection.
std::vector<double> find_zeros(const std::function<double(double)>& g, double lo, double hi) {
    std::vector<double> zeros;
    const int grid = 4000;
    double prev = g(lo);
    for (int i = 1; i <= grid; ++i) {
        const double s = lo + (hi - lo) * i / grid;
        const double cur = g(s);
        if (prev * cur < 0) zeros.push_back(bisect_zero(g, lo + (hi - lo) * (i - 1) / grid, s));
        prev = cur;
    }
    return zeros;
}

piecewise_poly standard_warp(double r_low, double r_high, double L) {
    // w = r at both ends, positive quintic hump between
    std::vector<double> mid = piecewise_poly::quintic_hermite(
        (L - r_high) - r_low, r_low, 1.0, 0.0, r_high, -1.0, 0.0);
    return make_pp({0.0, r_low, L - r_high, L},
                   {{0.0, 1.0}, std::move(mid), {r_high, -1.0}});
}

homology_result make_reference(std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> gs) {
    homology_result h;
    int k = 0;
    for (auto& [betti, torsion] : gs) {
        homology_group g;
        g.degree = k++;
        g.betti = betti;
        g.torsion = torsion;
        h.groups.push_back(std::move(g));
    }
    return h;
}

critical_point interior_point(std::string id, int index) {
    critical_point p;
    p.id = std::move(id);
    p.kind = critical_kind::interior;
    p.index = index;
    return p;
}

critical_point boundary_point(std::string id, std::string component, int index, double value) {
    critical_point p;
    p.id = std::move(id);
    p.kind = critical_kind::boundary;
    p.index = index;
    p.component = std::move(component);
    p.critical_value = value;
    return p;
}

declared_point declare_interior(std::string id, int index, double phi, double s) {
    declared_point p;
    p.id = std::move(id);
    p.kind = critical_kind::interior;
    p.index = index;
    p.phi = phi;
    p.s = s;
    return p;
}

declared_point declare_boundary(std::string id, std::string component, int index, double phi) {
    declared_point p;
    p.id = std::move(id);
    p.kind = critical_kind::boundary;
    p.index = index;
    p.component = std::move(component);
    p.phi = phi;
    return p;
}

// ----------------------------------------------------------- flow problems

// Disk: all-negative boundary circle at the low end, cap minimum at the top.
flow_problem disk_neg_flow() {
    const double L = 2.0, r = 0.2;
    flow_problem fp;
    fp.dimension = 2;
    fp.length = L;
    fp.warp = standard_warp(r, r, L);

    collar_chart c;
    c.component = "N1";
    c.constant_c = 0.0;
    c.boundary_function = {-1.5, {0.5}, {}};
    c.r_max = r;
    c.end = collar_end::low;
    fp.collars.push_back(c);

    flow_mode mode0;
    mode0.m = 0;
    mode0.cos_profile = three_segment(r, {0.0, 0.0, -1.5}, L - r, {-0.94, -0.6, 1.5}, L);
    flow_mode mode1;
    mode1.m = 1;
    mode1.cos_profile = three_segment(r, {0.0, 0.0, 0.5}, L - r, {0.0}, L);
    fp.modes = {mode0, mode1};

    fp.points.push_back(declare_boundary("dmax", "N1", 1, 0.0));
    fp.points.push_back(declare_boundary("dmin", "N1", 0, pi));
    fp.points.push_back(declare_interior("p", 0, 0.0, L));
    return fp;
}

// Cylinder: all-positive circle (small constant) at the low end, all-negative
// (large constant) at the high end, no interior critical points.
flow_problem annulus_split_flow() {
    const double L = 2.0, r = 0.2;
    flow_problem fp;
    fp.dimension = 2;
    fp.length = L;
    fp.warp = standard_warp(r, r, L);

    collar_chart pos;
    pos.component = "pos";
    pos.constant_c = 0.0;
    pos.boundary_function = {1.5, {0.5}, {}};
    pos.r_max = r;
    pos.end = collar_end::low;
    collar_chart neg;
    neg.component = "neg";
    neg.constant_c = 1.0;
    neg.boundary_function = {-1.5, {0.5}, {}};
    neg.r_max = r;
    neg.end = collar_end::high;
    fp.collars = {pos, neg};

    flow_mode mode0;
    mode0.m = 0;
    mode0.cos_profile = three_segment(r, {0.0, 0.0, 1.5}, L - r, {0.94, 0.6, -1.5}, L);
    flow_mode mode1;
    mode1.m = 1;
    mode1.cos_profile = three_segment(r, {0.0, 0.0, 0.5}, L - r, {0.02, -0.2, 0.5}, L);
    fp.modes = {mode0, mode1};

    fp.points.push_back(declare_boundary("gmax", "pos", 1, 0.0));
    fp.points.push_back(declare_boundary("gmin", "pos", 0, pi));
    fp.points.push_back(declare_boundary("dmax", "neg", 1, 0.0));
    fp.points.push_back(declare_boundary("dmin", "neg", 0, pi));
    return fp;
}

// Cylinder with a mixed-sign circle: the collar edge slopes force an interior
// max / saddle pair on the axis through the positive point, plus the global
// minimum on the opposite axis.
flow_problem annulus_cross_flow() {
    const double L = 2.0, r_mixed = 0.6, r_neg = 0.2;
    flow_problem fp;
    fp.dimension = 2;
    fp.length = L;
    fp.warp = standard_warp(r_mixed, r_neg, L);

    collar_chart mixed;
    mixed.component = "mixed";
    mixed.constant_c = 0.0;
    mixed.boundary_function = {0.0, {1.0}, {}};
    mixed.r_max = r_mixed;
    mixed.end = collar_end::low;
    collar_chart neg;
    neg.component = "neg";
    neg.constant_c = -1.0;
    neg.boundary_function = {-1.5, {0.5}, {}};
    neg.r_max = r_neg;
    neg.end = collar_end::high;
    fp.collars = {mixed, neg};

    flow_mode mode0;
    mode0.m = 0;
    mode0.cos_profile = three_segment(r_mixed, {0.0}, L - r_neg, {-1.06, 0.6, -1.5}, L);
    flow_mode mode1;
    mode1.m = 1;
    mode1.cos_profile = three_segment(r_mixed, {0.0, 0.0, 1.0}, L - r_neg, {0.02, -0.2, 0.5}, L);
    fp.modes = {mode0, mode1};

    const piecewise_poly& A = fp.modes[0].cos_profile;
    const piecewise_poly& B = fp.modes[1].cos_profile;
    auto curve_pos = [&](double s) { return A.d1(s) + B.d1(s); }; // phi = 0 axis
    auto curve_neg = [&](double s) { return A.d1(s) - B.d1(s); }; // phi = pi axis
    std::vector<double> on_pos = find_zeros(curve_pos, r_mixed, L - r_neg);
    std::vector<double> on_neg = find_zeros(curve_neg, r_mixed, L - r_neg);
    if (on_pos.size() != 2 || on_neg.size() != 1)
        throw numeric_error("annulus-cross interior structure changed; retune the profiles");

    fp.points.push_back(declare_boundary("g", "mixed", 1, 0.0));
    fp.points.push_back(declare_boundary("d", "mixed", 0, pi));
    fp.points.push_back(declare_boundary("dmax", "neg", 1, 0.0));
    fp.points.push_back(declare_boundary("dmin", "neg", 0, pi));
    fp.points.push_back(declare_interior("w", 2, 0.0, on_pos[0]));
    fp.points.push_back(declare_interior("q", 1, 0.0, on_pos[1]));
    fp.points.push_back(declare_interior("p", 0, pi, on_neg[0]));
    return fp;
}

// Round sphere analogue: caps at both ends, pure height function.
flow_problem sphere_closed_flow() {
    const double L = 2.0, r = 0.2;
    flow_problem fp;
    fp.dimension = 2;
    fp.length = L;
    fp.warp = standard_warp(r, r, L);
    flow_mode mode0;
    mode0.m = 0;
    mode0.cos_profile = three_segment(r, {1.0, 0.0, -1.5}, L - r, {-0.94, -0.6, 1.5}, L);
    fp.modes = {mode0};
    fp.points.push_back(declare_interior("top", 2, 0.0, 0.0));
    fp.points.push_back(declare_interior("bot", 0, 0.0, L));
    return fp;
}

// ------------------------------------------------------------ morse tables

morse_data disk_neg_data() {
    morse_data d;
    d.ambient_dimension = 2;
    d.boundary_components = {{"N1", 0.0, 1}};
    d.critical_points = {boundary_point("dmax", "N1", 1, -1.0),
                         boundary_point("dmin", "N1", 0, -2.0), interior_point("p", 0)};
    d.counts.m_table[{"dmin", "p"}] = 1;
    d.counts.n_table[{"dmax", "dmin"}] = 0;
    d.sort();
    return d;
}

morse_data annulus_split_data() {
    morse_data d;
    d.ambient_dimension = 2;
    d.boundary_components = {{"neg", 1.0, 1}, {"pos", 0.0, 1}};
    d.critical_points = {
        boundary_point("dmax", "neg", 1, -1.0), boundary_point("dmin", "neg", 0, -2.0),
        boundary_point("gmax", "pos", 1, 2.0), boundary_point("gmin", "pos", 0, 1.0)};
    d.counts.m_table[{"dmin", "gmin"}] = 1;
    d.counts.m_table[{"dmax", "gmax"}] = 1;
    d.counts.n_table[{"gmax", "gmin"}] = 0;
    d.counts.n_table[{"dmax", "dmin"}] = 0;
    d.sort();
    return d;
}

morse_data annulus_cross_data() {
    morse_data d;
    d.ambient_dimension = 2;
    d.boundary_components = {{"mixed", 0.0, 1}, {"neg", -1.0, 1}};
    d.critical_points = {
        boundary_point("g", "mixed", 1, 1.0), boundary_point("d", "mixed", 0, -1.0),
        boundary_point("dmax", "neg", 1, -1.0), boundary_point("dmin", "neg", 0, -2.0),
        interior_point("p", 0)};
    d.counts.m_table[{"d", "p"}] = 1;
    d.counts.m_table[{"dmin", "p"}] = 1;
    d.counts.n_table[{"g", "d"}] = 0;
    d.counts.n_table[{"dmax", "dmin"}] = 0;
    d.sort();
    return d;
}

morse_data sphere_closed_data() {
    morse_data d;
    d.ambient_dimension = 2;
    d.critical_points = {interior_point("bot", 0), interior_point("top", 2)};
    d.sort();
    return d;
}

std::vector<corpus_entry> build_entries() {
    std::vector<corpus_entry> entries;

    corpus_entry disk;
    disk.name = "disk-neg";
    disk.description =
        "Disk with an everywhere-negative boundary function: two negative boundary "
        "points, one interior minimum, no generators besides the minimum.";
    disk.morse_json = serialize(disk_neg_data());
    disk.flow_json = serialize(disk_neg_flow());
    disk.reference = make_reference({{1, {}}, {0, {}}, {0, {}}});
    disk.reference_euler = 1;
    entries.push_back(std::move(disk));

    corpus_entry split;
    split.name = "annulus-split";
    split.description =
        "Cylinder with an all-positive boundary function on the small-constant "
        "component and an all-negative one on the other; the boundary matrix is zero.";
    split.morse_json = serialize(annulus_split_data());
    split.flow_json = serialize(annulus_split_flow());
    split.reference = make_reference({{1, {}}, {1, {}}, {0, {}}});
    split.reference_euler = 0;
    entries.push_back(std::move(split));

    corpus_entry cross;
    cross.name = "annulus-cross";
    cross.description =
        "Cylinder with a mixed-sign boundary circle (positive maximum, negative "
        "minimum), an all-negative circle, and one interior minimum; exercises the "
        "bilinear boundary terms, which cancel.";
    cross.morse_json = serialize(annulus_cross_data());
    cross.flow_json = serialize(annulus_cross_flow());
    cross.reference = make_reference({{1, {}}, {1, {}}, {0, {}}});
    cross.reference_euler = 0;
    entries.push_back(std::move(cross));

    corpus_entry sphere;
    sphere.name = "sphere-closed";
    sphere.description =
        "Closed surface regression case: empty boundary, height function with one "
        "minimum and one maximum.";
    sphere.morse_json = serialize(sphere_closed_data());
    sphere.flow_json = serialize(sphere_closed_flow());
    sphere.reference = make_reference({{1, {}}, {0, {}}, {1, {}}});
    sphere.reference_euler = 2;
    entries.push_back(std::move(sphere));

    return entries;
}

} // namespace

const std::vector<corpus_entry>& corpus_entries() {
    static const std::vector<corpus_entry> entries = build_entries();
    return entries;
}

const corpus_entry& corpus_entry_by_name(const std::string& name) {
    for (const auto& e : corpus_entries())
        if (e.name == name) return e;
    throw precondition_error("no such entry: " + name);
}

} // namespace morsehb
