#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "morsehb/flow.hpp"

namespace morsehb {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;
}

// ---------------------------------------------------------------- trig_poly

double trig_poly::eval(double phi) const {
    double v = constant;
    for (std::size_t j = 0; j < cos_coeffs.size(); ++j)
        v += cos_coeffs[j] * std::cos(double(j + 1) * phi);
    for (std::size_t j = 0; j < sin_coeffs.size(); ++j)
        v += sin_coeffs[j] * std::sin(double(j + 1) * phi);
    return v;
}

double trig_poly::d1(double phi) const {
    double v = 0;
    for (std::size_t j = 0; j < cos_coeffs.size(); ++j) {
        const double m = double(j + 1);
        v -= cos_coeffs[j] * m * std::sin(m * phi);
    }
    for (std::size_t j = 0; j < sin_coeffs.size(); ++j) {
        const double m = double(j + 1);
        v += sin_coeffs[j] * m * std::cos(m * phi);
    }
    return v;
}

double trig_poly::d2(double phi) const {
    double v = 0;
    for (std::size_t j = 0; j < cos_coeffs.size(); ++j) {
        const double m = double(j + 1);
        v -= cos_coeffs[j] * m * m * std::cos(m * phi);
    }
    for (std::size_t j = 0; j < sin_coeffs.size(); ++j) {
        const double m = double(j + 1);
        v -= sin_coeffs[j] * m * m * std::sin(m * phi);
    }
    return v;
}

// ------------------------------------------------------------ piecewise_poly

namespace {

std::size_t segment_of(const std::vector<double>& breaks, double s) {
    // clamp outside queries to the end segments
    if (s <= breaks.front()) return 0;
    if (s >= breaks.back()) return breaks.size() - 2;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), s);
    return static_cast<std::size_t>(it - breaks.begin()) - 1;
}

} // namespace

double piecewise_poly::eval(double s) const {
    const std::size_t seg = segment_of(breaks, s);
    const double x = s - breaks[seg];
    const auto& c = coeffs[seg];
    double v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

double piecewise_poly::d1(double s) const {
    const std::size_t seg = segment_of(breaks, s);
    const double x = s - breaks[seg];
    const auto& c = coeffs[seg];
    double v = 0;
    for (std::size_t i = c.size(); i-- > 1;) v = v * x + double(i) * c[i];
    return v;
}

double piecewise_poly::d2(double s) const {
    const std::size_t seg = segment_of(breaks, s);
    const double x = s - breaks[seg];
    const auto& c = coeffs[seg];
    double v = 0;
    for (std::size_t i = c.size(); i-- > 2;) v = v * x + double(i) * double(i - 1) * c[i];
    return v;
}

std::vector<double> piecewise_poly::quintic_hermite(double h, double v0, double s0, double c0,
                                                    double v1, double s1, double c1) {
    const double r0 = v1 - v0 - s0 * h - 0.5 * c0 * h * h;
    const double r1 = s1 - s0 - c0 * h;
    const double r2 = c1 - c0;
    const double h2 = h * h, h3 = h2 * h, h4 = h3 * h, h5 = h4 * h;
    std::vector<double> a(6);
    a[0] = v0;
    a[1] = s0;
    a[2] = 0.5 * c0;
    a[3] = 10.0 * r0 / h3 - 4.0 * r1 / h2 + 0.5 * r2 / h;
    a[4] = -15.0 * r0 / h4 + 7.0 * r1 / h3 - r2 / h2;
    a[5] = 6.0 * r0 / h5 - 3.0 * r1 / h4 + 0.5 * r2 / h3;
    return a;
}

// ------------------------------------------------------------- flow_problem

double flow_problem::f(double phi, double s) const {
    double v = 0;
    for (const auto& mode : modes) {
        if (mode.m == 0) {
            v += mode.cos_profile.eval(s);
        } else {
            v += mode.cos_profile.eval(s) * std::cos(mode.m * phi);
            if (mode.has_sin) v += mode.sin_profile.eval(s) * std::sin(mode.m * phi);
        }
    }
    return v;
}

double flow_problem::df_dphi(double phi, double s) const {
    double v = 0;
    for (const auto& mode : modes) {
        if (mode.m == 0) continue;
        v -= mode.cos_profile.eval(s) * mode.m * std::sin(mode.m * phi);
        if (mode.has_sin) v += mode.sin_profile.eval(s) * mode.m * std::cos(mode.m * phi);
    }
    return v;
}

double flow_problem::df_ds(double phi, double s) const {
    double v = 0;
    for (const auto& mode : modes) {
        if (mode.m == 0) {
            v += mode.cos_profile.d1(s);
        } else {
            v += mode.cos_profile.d1(s) * std::cos(mode.m * phi);
            if (mode.has_sin) v += mode.sin_profile.d1(s) * std::sin(mode.m * phi);
        }
    }
    return v;
}

const collar_chart* flow_problem::collar_at(collar_end e) const {
    for (const auto& c : collars)
        if (c.end == e) return &c;
    return nullptr;
}

const declared_point* flow_problem::find_point(const std::string& id) const {
    for (const auto& p : points)
        if (p.id == id) return &p;
    return nullptr;
}

double flow_problem::point_s(const declared_point& p) const {
    if (p.kind != critical_kind::boundary) return p.s;
    const collar_chart* low = collar_at(collar_end::low);
    if (low && low->component == p.component) return 0.0;
    return length;
}

std::array<double, 2> flow_problem::vector_field(double phi, double s) const {
    const double eps = 1e-12;
    // Near a boundary the chart metric degenerates tangentially, so the
    // tangential quotient switches to its collar limit -f_N'(phi)/kappa^2.
    // The radial component stays the plain partial (0 exactly on the wall).
    if (s < eps && collar_at(collar_end::low)) {
        const collar_chart& c = *collar_at(collar_end::low);
        const double k2 = c.metric_scale * c.metric_scale;
        return {-c.boundary_function.d1(phi) / k2, -df_ds(phi, s)};
    }
    if (s > length - eps && collar_at(collar_end::high)) {
        const collar_chart& c = *collar_at(collar_end::high);
        const double k2 = c.metric_scale * c.metric_scale;
        return {-c.boundary_function.d1(phi) / k2, -df_ds(phi, s)};
    }
    const double w = warp.eval(std::clamp(s, 0.0, length));
    if (w <= 0.0) return {0.0, -df_ds(phi, s)}; // at a cap the angular modes vanish
    return {-df_dphi(phi, s) / (w * w), -df_ds(phi, s)};
}

double flow_problem::grad_norm(double phi, double s) const {
    const double eps = 1e-12;
    if ((s < eps && collar_at(collar_end::low)) || (s > length - eps && collar_at(collar_end::high))) {
        const collar_chart& c = s < eps ? *collar_at(collar_end::low) : *collar_at(collar_end::high);
        return std::abs(c.boundary_function.d1(phi)) / c.metric_scale;
    }
    const double w = warp.eval(std::clamp(s, 0.0, length));
    const double ds = df_ds(phi, s);
    if (w <= 0.0) return std::abs(ds);
    const double dphi = df_dphi(phi, s) / w;
    return std::sqrt(dphi * dphi + ds * ds);
}

// ------------------------------------------------------------- convert_end

end_conversion convert_end(double a, double a_bar, double r, double g_scale, double f_scale) {
    if (a == -2.0 || a_bar == -2.0)
        throw precondition_error("end conversion is undefined for exponent -2");
    if (!(r > 0.0)) throw precondition_error("end conversion needs r > 0");
    const double ratio = (a_bar + 2.0) / (a + 2.0);
    end_conversion out;
    out.r_bar = std::pow(ratio * ratio * std::pow(r, a + 2.0), 1.0 / (a_bar + 2.0));
    const double scale = 1.0 / (ratio * ratio); // ((a+2)/(a_bar+2))^2
    out.g_scale = g_scale * scale;
    out.f_scale = f_scale * scale;
    return out;
}

// ------------------------------------------------------------ cone_gradient

std::array<double, 2> cone_gradient(const cone_end_profile& profile, const collar_chart& collar,
                                    double x, double r) {
    if (r < 0.0) throw precondition_error("cone_gradient needs r >= 0");
    const double fn = collar.boundary_function.eval(x);
    const double tangential = collar.boundary_function.d1(x); // gradient of f_N under unit g_N
    const double radial = 2.0 * (profile.A * fn + profile.C) * r;
    return {tangential, radial};
}

// --------------------------------------------------------------- JSON layer

namespace {

[[noreturn]] void fail(const std::string& msg) { throw parse_error(msg); }

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            fail("unknown field \"" + it.key() + "\" in " + where);
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail("missing required field \"" + key + "\" in " + where);
    return *it;
}

trig_poly parse_trig(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where + " must be an object");
    require_keys(j, {"const", "cos", "sin"}, where);
    trig_poly t;
    if (j.contains("const")) t.constant = j["const"].get<double>();
    if (j.contains("cos"))
        for (const auto& c : j["cos"]) t.cos_coeffs.push_back(c.get<double>());
    if (j.contains("sin"))
        for (const auto& c : j["sin"]) t.sin_coeffs.push_back(c.get<double>());
    return t;
}

ordered_json dump_trig(const trig_poly& t) {
    ordered_json j;
    j["const"] = t.constant;
    j["cos"] = t.cos_coeffs;
    j["sin"] = t.sin_coeffs;
    return j;
}

piecewise_poly parse_pp(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where + " must be an object");
    require_keys(j, {"breaks", "coeffs"}, where);
    piecewise_poly p;
    for (const auto& b : require(j, "breaks", where)) p.breaks.push_back(b.get<double>());
    for (const auto& seg : require(j, "coeffs", where)) {
        std::vector<double> c;
        for (const auto& v : seg) c.push_back(v.get<double>());
        p.coeffs.push_back(std::move(c));
    }
    if (p.breaks.size() < 2 || p.coeffs.size() + 1 != p.breaks.size())
        fail(where + " needs K+1 breaks and K coefficient lists");
    for (std::size_t i = 0; i + 1 < p.breaks.size(); ++i)
        if (!(p.breaks[i] < p.breaks[i + 1])) fail(where + " breaks must be ascending");
    return p;
}

ordered_json dump_pp(const piecewise_poly& p) {
    ordered_json j;
    j["breaks"] = p.breaks;
    j["coeffs"] = p.coeffs;
    return j;
}

void scale_trig(trig_poly& t, double factor) {
    t.constant *= factor;
    for (auto& c : t.cos_coeffs) c *= factor;
    for (auto& c : t.sin_coeffs) c *= factor;
}

} // namespace

flow_problem parse_flow_problem(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("JSON syntax error: ") + e.what());
    }
    if (!doc.is_object()) fail("top level must be an object");
    require_keys(doc, {"dimension", "collars", "interior", "critical_points", "orientation"},
                 "flow problem");

    flow_problem fp;
    fp.dimension = require(doc, "dimension", "flow problem").get<int>();
    if (fp.dimension != 2)
        fail("only ambient dimension 2 (circle boundary components) is supported");

    const json& interior = require(doc, "interior", "flow problem");
    require_keys(interior, {"length", "warp", "modes"}, "interior");
    fp.length = require(interior, "length", "interior").get<double>();
    if (!(fp.length > 0)) fail("interior.length must be positive");
    fp.warp = parse_pp(require(interior, "warp", "interior"), "interior.warp");
    for (const auto& jm : require(interior, "modes", "interior")) {
        require_keys(jm, {"m", "cos", "sin"}, "interior mode");
        flow_mode mode;
        mode.m = require(jm, "m", "mode").get<int>();
        if (mode.m < 0) fail("mode numbers must be nonnegative");
        mode.cos_profile = parse_pp(require(jm, "cos", "mode"), "mode cos profile");
        if (jm.contains("sin")) {
            mode.sin_profile = parse_pp(jm["sin"], "mode sin profile");
            mode.has_sin = true;
        }
        fp.modes.push_back(std::move(mode));
    }

    for (const auto& jc : require(doc, "collars", "flow problem")) {
        require_keys(jc, {"component", "c", "fN", "r_max", "end", "end_family"}, "collar");
        collar_chart c;
        c.component = require(jc, "component", "collar").get<std::string>();
        c.constant_c = require(jc, "c", "collar").get<double>();
        c.boundary_function = parse_trig(require(jc, "fN", "collar"), "collar fN");
        c.r_max = require(jc, "r_max", "collar").get<double>();
        std::string end = require(jc, "end", "collar").get<std::string>();
        if (end == "low")
            c.end = collar_end::low;
        else if (end == "high")
            c.end = collar_end::high;
        else
            fail("collar end must be \"low\" or \"high\"");
        c.metric_scale = 1.0;

        if (jc.contains("end_family")) {
            const json& fam = jc["end_family"];
            require_keys(fam, {"a", "doubling", "A", "C"}, "end_family");
            // The doubling variant shares the cone gradient; its data loads
            // unchanged. Other exponents convert by the change of variables.
            double a = fam.contains("a") ? fam["a"].get<double>() : 0.0;
            if (a != 0.0) {
                end_conversion conv = convert_end(a, 0.0, c.r_max);
                c.r_max = conv.r_bar;
                scale_trig(c.boundary_function, conv.f_scale);
                c.metric_scale *= std::sqrt(conv.g_scale);
            }
            if (fam.contains("A") || fam.contains("C")) {
                double A = fam.contains("A") ? fam["A"].get<double>() : 1.0;
                double C = fam.contains("C") ? fam["C"].get<double>() : 0.0;
                if (!(A > 0)) fail("profile constant A must be positive for a Riemannian metric");
                scale_trig(c.boundary_function, A);
                c.boundary_function.constant += C;
                c.metric_scale *= std::sqrt(A);
            }
        }
        for (const auto& other : fp.collars) {
            if (other.end == c.end) fail("two collars share one end");
            if (other.component == c.component) fail("duplicate collar component id");
        }
        fp.collars.push_back(std::move(c));
    }

    const json& orient = require(doc, "orientation", "flow problem");
    for (const auto& c : fp.collars) {
        const int expected = c.end == collar_end::low ? 1 : -1;
        if (!orient.contains(c.component))
            fail("orientation entry missing for component \"" + c.component + "\"");
        if (orient[c.component].get<int>() != expected)
            fail("orientation of \"" + c.component +
                 "\" contradicts the outward-first convention for its end");
    }

    for (const auto& jp : require(doc, "critical_points", "flow problem")) {
        require_keys(jp, {"id", "kind", "index", "component", "phi", "s"}, "critical point");
        declared_point p;
        p.id = require(jp, "id", "critical point").get<std::string>();
        std::string kind = require(jp, "kind", "critical point").get<std::string>();
        if (kind == "interior")
            p.kind = critical_kind::interior;
        else if (kind == "boundary")
            p.kind = critical_kind::boundary;
        else
            fail("critical point kind must be interior or boundary");
        p.index = require(jp, "index", "critical point").get<int>();
        p.phi = require(jp, "phi", "critical point").get<double>();
        if (p.kind == critical_kind::interior) {
            p.s = require(jp, "s", "critical point").get<double>();
        } else {
            p.component = require(jp, "component", "critical point").get<std::string>();
            bool found = false;
            for (const auto& c : fp.collars) found = found || c.component == p.component;
            if (!found) fail("boundary point \"" + p.id + "\" references unknown component");
        }
        if (fp.find_point(p.id)) fail("duplicate critical point id \"" + p.id + "\"");
        fp.points.push_back(std::move(p));
    }
    return fp;
}

std::string serialize(const flow_problem& fp) {
    ordered_json doc;
    doc["dimension"] = fp.dimension;
    doc["collars"] = ordered_json::array();
    for (const auto& c : fp.collars) {
        ordered_json jc;
        jc["component"] = c.component;
        jc["c"] = c.constant_c;
        jc["fN"] = dump_trig(c.boundary_function);
        jc["r_max"] = c.r_max;
        jc["end"] = c.end == collar_end::low ? "low" : "high";
        doc["collars"].push_back(std::move(jc));
    }
    ordered_json interior;
    interior["length"] = fp.length;
    interior["warp"] = dump_pp(fp.warp);
    interior["modes"] = ordered_json::array();
    for (const auto& m : fp.modes) {
        ordered_json jm;
        jm["m"] = m.m;
        jm["cos"] = dump_pp(m.cos_profile);
        if (m.has_sin) jm["sin"] = dump_pp(m.sin_profile);
        interior["modes"].push_back(std::move(jm));
    }
    doc["interior"] = std::move(interior);
    doc["critical_points"] = ordered_json::array();
    for (const auto& p : fp.points) {
        ordered_json jp;
        jp["id"] = p.id;
        jp["kind"] = p.kind == critical_kind::interior ? "interior" : "boundary";
        jp["index"] = p.index;
        if (p.kind == critical_kind::boundary)
            jp["component"] = p.component;
        jp["phi"] = p.phi;
        if (p.kind == critical_kind::interior) jp["s"] = p.s;
        doc["critical_points"].push_back(std::move(jp));
    }
    ordered_json orient;
    for (const auto& c : fp.collars)
        orient[c.component] = c.end == collar_end::low ? 1 : -1;
    doc["orientation"] = std::move(orient);
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- checking

namespace {

// Coordinate Hessian by central differences; its signature is the index.
std::array<double, 3> hessian_fd(const flow_problem& fp, double phi, double s) {
    const double h = 1e-5;
    const double fpp = (fp.f(phi + h, s) - 2 * fp.f(phi, s) + fp.f(phi - h, s)) / (h * h);
    const double fss = (fp.f(phi, s + h) - 2 * fp.f(phi, s) + fp.f(phi, s - h)) / (h * h);
    const double fps = (fp.f(phi + h, s + h) - fp.f(phi + h, s - h) - fp.f(phi - h, s + h) +
                        fp.f(phi - h, s - h)) /
                       (4 * h * h);
    return {fpp, fps, fss};
}

} // namespace

void check_flow_problem(const flow_problem& fp) {
    const double L = fp.length;
    if (fp.warp.lo() > 1e-12 || fp.warp.hi() < L - 1e-12)
        throw numeric_error("warp profile does not cover [0, L]");

    // warp positive away from the ends
    for (int i = 1; i < 400; ++i) {
        const double s = L * i / 400.0;
        if (s > 1e-9 && s < L - 1e-9 && !(fp.warp.eval(s) > 0))
            throw numeric_error("warp must be positive in the interior");
    }

    for (const auto& c : fp.collars) {
        if (!(c.r_max > 0) || c.r_max >= L / 2)
            throw numeric_error("collar r_max must lie in (0, L/2)");
        // exact collar forms: w = kappa r and f = c + r^2 f_N on the collar
        for (int i = 0; i <= 24; ++i) {
            const double r = c.r_max * i / 24.0;
            const double s = c.end == collar_end::low ? r : L - r;
            if (std::abs(fp.warp.eval(s) - c.metric_scale * r) > 1e-9)
                throw numeric_error("warp does not equal the collar normal form on component " +
                                    c.component);
            for (int j = 0; j < 12; ++j) {
                const double phi = two_pi * j / 12.0;
                const double want = c.constant_c + r * r * c.boundary_function.eval(phi);
                if (std::abs(fp.f(phi, s) - want) > 1e-9)
                    throw numeric_error("f does not equal the cone normal form on component " +
                                        c.component);
            }
        }
    }

    for (collar_end e : {collar_end::low, collar_end::high}) {
        if (!fp.has_cap(e)) continue;
        // caps: rotationally symmetric near the end, warp equal to the distance
        const double cap_s = e == collar_end::low ? 0.0 : L;
        for (int i = 0; i <= 16; ++i) {
            const double d = 0.05 * L * i / 16.0;
            const double s = e == collar_end::low ? d : L - d;
            if (std::abs(fp.warp.eval(s) - d) > 1e-9)
                throw numeric_error("cap warp must equal the distance to the cap point");
            for (int j = 0; j < 8; ++j)
                if (std::abs(fp.f(two_pi * j / 8.0, s) - fp.f(0.0, s)) > 1e-10)
                    throw numeric_error("f must be rotationally symmetric near a cap");
        }
        bool declared = false;
        for (const auto& p : fp.points)
            declared = declared ||
                       (p.kind == critical_kind::interior && std::abs(p.s - cap_s) < 1e-9);
        if (!declared) throw numeric_error("cap end has no declared interior critical point");
    }

    for (const auto& p : fp.points) {
        if (p.kind == critical_kind::boundary) {
            const collar_chart* collar = nullptr;
            for (const auto& c : fp.collars)
                if (c.component == p.component) collar = &c;
            if (!collar) throw numeric_error("boundary point on unknown component");
            if (std::abs(collar->boundary_function.d1(p.phi)) > 1e-8)
                throw numeric_error("declared boundary point \"" + p.id +
                                    "\" is not critical for f_N");
            const double curv = collar->boundary_function.d2(p.phi);
            const int want = curv < 0 ? 1 : 0;
            if (std::abs(curv) < 1e-9)
                throw numeric_error("degenerate boundary critical point \"" + p.id + "\"");
            if (p.index != want)
                throw numeric_error("declared index of \"" + p.id + "\" contradicts f_N");
            if (std::abs(collar->boundary_function.eval(p.phi)) < 1e-12)
                throw numeric_error("boundary critical value must be nonzero at \"" + p.id + "\"");
        } else {
            const bool at_cap = std::abs(p.s) < 1e-9 || std::abs(p.s - L) < 1e-9;
            if (at_cap) {
                // rotational symmetry: index is 0 or 2 by the radial curvature
                const double d = 1e-4;
                const double s = std::abs(p.s) < 1e-9 ? d : L - d;
                const double curv = fp.f(0.0, s) - fp.f(0.0, p.s);
                if (std::abs(curv) < 1e-12)
                    throw numeric_error("degenerate cap critical point \"" + p.id + "\"");
                const int want = curv > 0 ? 0 : 2;
                if (p.index != want)
                    throw numeric_error("declared index of cap point \"" + p.id +
                                        "\" contradicts f");
            } else {
                if (fp.grad_norm(p.phi, p.s) > 1e-7)
                    throw numeric_error("declared interior point \"" + p.id +
                                        "\" is not a gradient zero");
                auto [fpp, fps, fss] = hessian_fd(fp, p.phi, p.s);
                const double det = fpp * fss - fps * fps;
                if (std::abs(det) < 1e-8)
                    throw numeric_error("degenerate interior critical point \"" + p.id + "\"");
                int want;
                if (det > 0)
                    want = fpp + fss > 0 ? 0 : 2;
                else
                    want = 1;
                if (p.index != want)
                    throw numeric_error("declared index of \"" + p.id + "\" contradicts the Hessian");
            }
        }
    }
}

} // namespace morsehb
