#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "morsehb/complex.hpp"
#include "morsehb/corpus.hpp"
#include "morsehb/flow.hpp"
#include "morsehb/homology.hpp"

#include "flow_fixtures.hpp"

using namespace morsehb;

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;

flow_problem corpus_flow(const std::string& name) {
    return parse_flow_problem(corpus_entry_by_name(name).flow_json);
}

// central-difference gradient of f = (A r^2 + B) f_N + C r^2 + D under the
// metric (A r^2 + B) g_N + dr (x) dr; g_N is the unit circle metric
std::array<double, 2> fd_gradient(const cone_end_profile& pr, const trig_poly& fn, double x,
                                  double r) {
    auto f = [&](double phi, double rr) {
        return (pr.A * rr * rr + pr.B) * fn.eval(phi) + pr.C * rr * rr + pr.D;
    };
    const double h = 1e-5;
    const double df_dphi = (f(x + h, r) - f(x - h, r)) / (2 * h);
    const double df_dr = (f(x, r + h) - f(x, r - h)) / (2 * h);
    const double g_tangential = pr.A * r * r + pr.B;
    return {df_dphi / g_tangential, df_dr};
}

} // namespace

TEST_CASE("flow problem documents") {
    SUBCASE("corpus problems parse, check, and round trip") {
        for (const auto& e : corpus_entries()) {
            flow_problem fp = parse_flow_problem(e.flow_json);
            check_flow_problem(fp);
            CHECK(serialize(parse_flow_problem(serialize(fp))) == serialize(fp));
        }
    }
    SUBCASE("unsupported ambient dimension is rejected") {
        CHECK_THROWS_AS(parse_flow_problem(R"({"dimension": 3, "collars": [],
            "interior": {"length": 1.0,
                         "warp": {"breaks": [0.0, 1.0], "coeffs": [[0.0, 1.0]]},
                         "modes": []},
            "critical_points": [], "orientation": {}})"),
                        parse_error);
    }
    SUBCASE("orientation entries must follow the outward-first convention") {
        nlohmann::json doc = nlohmann::json::parse(corpus_entry_by_name("disk-neg").flow_json);
        doc["orientation"]["N1"] = -1; // low end must be +1
        CHECK_THROWS_AS(parse_flow_problem(doc.dump()), parse_error);
    }
}

TEST_CASE("no stray critical points in the corpus problems") {
    for (const auto& e : corpus_entries()) {
        flow_problem fp = parse_flow_problem(e.flow_json);
        for (int i = 0; i < 120; ++i)
            for (int j = 1; j < 150; ++j) {
                const double phi = 2 * pi * i / 120;
                const double s = fp.length * j / 150.0;
                if (s < 0.05 || s > fp.length - 0.05) continue; // boundary gradient is O(r)
                if (fp.grad_norm(phi, s) > 2e-3) continue;
                double nearest = 1e9;
                for (const auto& p : fp.points) {
                    double dphi = std::fabs(phi - p.phi);
                    dphi = std::min(dphi, 2 * pi - dphi);
                    nearest = std::min(nearest, std::hypot(dphi, s - fp.point_s(p)));
                }
                CHECK(nearest < 0.2);
            }
    }
}

TEST_CASE("cone gradient formula") {
    collar_chart collar;
    collar.component = "N";
    collar.boundary_function = {0.5, {0.75}, {0.25}};

    SUBCASE("normalized cone at the boundary is tangential") {
        cone_end_profile cone; // A=1, B=0, C=0
        auto v = cone_gradient(cone, collar, 0.8, 0.0);
        CHECK(v[0] == doctest::Approx(collar.boundary_function.d1(0.8)));
        CHECK(v[1] == 0.0);
    }
    SUBCASE("radial part at a critical point of f_N") {
        collar_chart flat;
        flat.boundary_function = {1.0, {}, {}}; // f_N constant 1: every x critical
        cone_end_profile cone;
        auto v = cone_gradient(cone, flat, 0.3, 0.5);
        CHECK(v[0] == 0.0);
        CHECK(v[1] == doctest::Approx(1.0)); // 2 * 1 * 0.5
    }
    SUBCASE("negative r is rejected") {
        cone_end_profile cone;
        CHECK_THROWS_AS(cone_gradient(cone, collar, 0.0, -0.1), precondition_error);
    }
    SUBCASE("matches finite differences for general profiles") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> uA(0.5, 2.0), uB(0.0, 1.5), uC(-1.0, 1.0),
            uD(-2.0, 2.0), ux(0.0, 2 * pi), ur(0.05, 0.9), uc(-1.5, 1.5);
        for (int trial = 0; trial < 100; ++trial) {
            cone_end_profile pr;
            pr.A = uA(rng);
            pr.B = uB(rng);
            pr.C = uC(rng);
            pr.D = uD(rng);
            collar_chart ch;
            ch.boundary_function = {uc(rng), {uc(rng), uc(rng)}, {uc(rng)}};
            const double x = ux(rng), r = ur(rng);
            auto got = cone_gradient(pr, ch, x, r);
            // the formula gives X_{f_N} + 2 (A f_N + C) r d/dr
            std::array<double, 2> formula{ch.boundary_function.d1(x),
                                          2 * (pr.A * ch.boundary_function.eval(x) + pr.C) * r};
            CHECK(got[0] == doctest::Approx(formula[0]));
            CHECK(got[1] == doctest::Approx(formula[1]));
            // the finite-difference gradient under the full metric agrees
            auto fd = fd_gradient(pr, ch.boundary_function, x, r);
            const double radial_fd = 2 * pr.A * r * ch.boundary_function.eval(x) + 2 * pr.C * r;
            CHECK(std::fabs(fd[1] - radial_fd) < 1e-6);
            CHECK(std::fabs(fd[0] - ch.boundary_function.d1(x)) < 1e-6);
        }
    }
}

TEST_CASE("end conversion") {
    SUBCASE("identity at equal exponents") {
        end_conversion c = convert_end(0.0, 0.0, 0.37);
        CHECK(c.r_bar == doctest::Approx(0.37).epsilon(1e-14));
        CHECK(c.g_scale == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("horn to cone") {
        end_conversion c = convert_end(-1.0, 0.0, 0.25);
        CHECK(c.r_bar == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.g_scale == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(c.f_scale == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("round trip to 1e-12") {
        for (int i = 1; i <= 100; ++i) {
            const double r = i / 101.0;
            end_conversion fwd = convert_end(0.0, -1.0, r);
            end_conversion back = convert_end(-1.0, 0.0, fwd.r_bar, fwd.g_scale, fwd.f_scale);
            CHECK(std::fabs(back.r_bar - r) < 1e-12);
            CHECK(std::fabs(back.g_scale - 1.0) < 1e-12);
            CHECK(std::fabs(back.f_scale - 1.0) < 1e-12);
        }
    }
    SUBCASE("radial metric identity holds pointwise") {
        // the radial weight transforms as r_bar^a_bar (dr_bar/dr)^2 == r^a
        for (double a : {-1.0, 0.5, 1.0})
            for (int i = 1; i <= 20; ++i) {
                const double r = i / 21.0;
                const double a_bar = 0.0;
                const double h = 1e-6;
                const double rb1 = convert_end(a, a_bar, r + h).r_bar;
                const double rb0 = convert_end(a, a_bar, r - h).r_bar;
                const double drbar_dr = (rb1 - rb0) / (2 * h);
                const double r_bar = convert_end(a, a_bar, r).r_bar;
                CHECK(std::fabs(std::pow(r_bar, a_bar) * drbar_dr * drbar_dr - std::pow(r, a)) <
                      1e-6);
            }
    }
    SUBCASE("forbidden exponents") {
        CHECK_THROWS_AS(convert_end(-2.0, 0.0, 0.5), precondition_error);
        CHECK_THROWS_AS(convert_end(0.0, -2.0, 0.5), precondition_error);
        CHECK_THROWS_AS(convert_end(0.0, -1.0, 0.0), precondition_error);
    }
}

TEST_CASE("trajectory integration") {
    shooting_config cfg;
    SUBCASE("a start at a critical point is constant") {
        flow_problem fp = corpus_flow("annulus-cross");
        const declared_point* p = fp.find_point("p");
        trajectory tr = integrate_trajectory(fp, {p->phi, p->s}, flow_direction::forward, cfg);
        CHECK(tr.samples.size() == 1);
        CHECK(tr.forward_limit.result == limit_classification::outcome::point);
        CHECK(tr.forward_limit.id == "p");
    }
    SUBCASE("constant-boundary-value collar start decays exactly") {
        // above the positive maximum of the mixed circle f_N = cos(phi): the
        // tangential coordinate is stationary and r(t) = 0.5 exp(-2 t)
        flow_problem fp = corpus_flow("annulus-cross");
        shooting_config one = cfg;
        one.t_max = 1.0;
        trajectory tr = integrate_trajectory(fp, {0.0, 0.5}, flow_direction::forward, one);
        CHECK(tr.times.back() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::fabs(tr.samples.back()[1] - 0.5 * std::exp(-2.0)) < 1e-8);
        CHECK(std::fabs(tr.samples.back()[0]) < 1e-12);
    }
    SUBCASE("collar closed form against an independent integral oracle") {
        flow_problem fp = corpus_flow("annulus-cross");
        const double phi0 = 0.3, r0 = 1e-4;
        for (double T : {1.0, 2.5, 5.0}) {
            shooting_config c2 = cfg;
            c2.t_max = T;
            trajectory tr = integrate_trajectory(fp, {phi0, r0}, flow_direction::forward, c2);
            REQUIRE(tr.times.back() == doctest::Approx(T));
            // oracle: fixed-step RK4 on (phi, integral of f_N along the way)
            const trig_poly& fn = fp.collar_at(collar_end::low)->boundary_function;
            double phi = phi0, I = 0.0;
            const int steps = 200000;
            const double h = T / steps;
            for (int i = 0; i < steps; ++i) {
                auto tangent = [&](double x) { return -fn.d1(x); };
                const double k1 = tangent(phi);
                const double k2 = tangent(phi + 0.5 * h * k1);
                const double k3 = tangent(phi + 0.5 * h * k2);
                const double k4 = tangent(phi + h * k3);
                const double i1 = fn.eval(phi);
                const double i2 = fn.eval(phi + 0.5 * h * k1);
                const double i3 = fn.eval(phi + 0.5 * h * k2);
                const double i4 = fn.eval(phi + h * k3);
                phi += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
                I += h / 6 * (i1 + 2 * i2 + 2 * i3 + i4);
            }
            const double want = r0 * std::exp(-2.0 * I);
            CHECK(tr.samples.back()[1] < fp.collar_at(collar_end::low)->r_max);
            CHECK(std::fabs(tr.samples.back()[1] - want) / want < 1e-6);
            CHECK(std::fabs(std::remainder(tr.samples.back()[0] - phi, 2 * pi)) < 1e-6);
        }
    }
    SUBCASE("the boundary is invariant") {
        flow_problem fp = corpus_flow("annulus-cross");
        shooting_config c2 = cfg;
        c2.t_max = 3.0;
        trajectory tr = integrate_trajectory(fp, {1.0, 0.0}, flow_direction::forward, c2);
        for (const auto& x : tr.samples) CHECK(x[1] == 0.0);
    }
    SUBCASE("a trajectory on the wall reaches the negative minimum") {
        flow_problem fp = corpus_flow("annulus-cross");
        shooting_config c2 = cfg;
        c2.t_max = 40.0;
        trajectory tr = integrate_trajectory(fp, {1.0, 0.0}, flow_direction::forward, c2);
        CHECK(tr.forward_limit.result == limit_classification::outcome::point);
        CHECK(tr.forward_limit.id == "d");
    }
    SUBCASE("f decreases monotonically along recorded samples") {
        flow_problem fp = corpus_flow("disk-neg");
        trajectory tr = integrate_trajectory(fp, {2.0, 0.15}, flow_direction::forward, cfg);
        for (std::size_t i = 1; i < tr.f_values.size(); ++i)
            CHECK(tr.f_values[i] <= tr.f_values[i - 1] + 1e-10);
    }
    SUBCASE("timeout far from critical points is Undecided") {
        flow_problem fp = corpus_flow("disk-neg");
        shooting_config tiny = cfg;
        tiny.t_max = 1e-3;
        trajectory tr = integrate_trajectory(fp, {2.0, 0.5}, flow_direction::forward, tiny);
        CHECK(tr.forward_limit.result == limit_classification::outcome::undecided);
        CHECK(classify_limit(fp, tr, tiny).result == limit_classification::outcome::undecided);
    }
    SUBCASE("classify_limit agrees with the in-run classification") {
        flow_problem fp = corpus_flow("disk-neg");
        trajectory tr = integrate_trajectory(fp, {1.1, 1.0}, flow_direction::forward, cfg);
        REQUIRE(tr.forward_limit.result == limit_classification::outcome::point);
        CHECK(tr.forward_limit.id == "p"); // interior basin of the disk minimum
        limit_classification again = classify_limit(fp, tr, cfg);
        CHECK(again.result == limit_classification::outcome::point);
        CHECK(again.id == "p");
    }
    SUBCASE("backward integration finds sources") {
        flow_problem fp = corpus_flow("sphere-closed");
        trajectory tr = integrate_trajectory(fp, {0.7, 1.0}, flow_direction::backward, cfg);
        CHECK(tr.backward_limit.result == limit_classification::outcome::point);
        CHECK(tr.backward_limit.id == "top");
    }
}

TEST_CASE("count_m") {
    shooting_config cfg;
    SUBCASE("from equals to") {
        flow_problem fp = corpus_flow("disk-neg");
        count_certificate cert = count_m(fp, "p", "p", cfg);
        CHECK(cert.count == 0);
        CHECK(cert.classes.empty());
    }
    SUBCASE("single ray from the negative minimum") {
        flow_problem fp = corpus_flow("disk-neg");
        count_certificate cert = count_m(fp, "dmin", "p", cfg);
        CHECK(cert.count == 1);
        CHECK(cert.total_samples == 1);
        REQUIRE(cert.classes.size() == 1);
        CHECK(cert.classes[0].target == "p");
        CHECK(std::abs(cert.classes[0].sign) == 1);
    }
    SUBCASE("preconditions") {
        flow_problem fp = corpus_flow("annulus-split");
        CHECK_THROWS_AS(count_m(fp, "gmax", "gmin", cfg), precondition_error); // positive source
        CHECK_THROWS_AS(count_m(fp, "dmin", "dmax", cfg), precondition_error); // wrong index
        CHECK_THROWS_AS(count_m(fp, "nope", "gmin", cfg), precondition_error);
        // same component through the interior never counts
        flow_problem cross = corpus_flow("annulus-cross");
        CHECK_THROWS_AS(count_m(cross, "d", "g", cfg), precondition_error);
        // increasing constants forbid the cross-component direction
        CHECK_THROWS_AS(count_m(cross, "dmin", "g", cfg), precondition_error);
    }
    SUBCASE("quorum refusal on a hopeless budget") {
        flow_problem fp = corpus_flow("disk-neg");
        shooting_config tiny = cfg;
        tiny.t_max = 1e-3;
        CHECK_THROWS_AS(count_m(fp, "dmin", "p", tiny), numeric_error);
    }
    SUBCASE("separatrix crossings on the annulus") {
        flow_problem fp = corpus_flow("annulus-cross");
        CHECK(count_m(fp, "w", "g", cfg).count == 1);
        CHECK(count_m(fp, "w", "q", cfg).count == -1);
        CHECK(count_m(fp, "q", "p", cfg).count == 0); // the two separatrices cancel
        CHECK(count_m(fp, "dmax", "q", cfg).count == 1);
    }
    SUBCASE("counts are stable under radius halving and sample doubling") {
        flow_problem fp = corpus_flow("annulus-cross");
        shooting_config finer = cfg;
        finer.eps_shoot = cfg.eps_shoot / 2;
        finer.samples = cfg.samples * 2;
        for (auto [from, to] : {std::pair<std::string, std::string>{"w", "g"},
                                {"w", "q"},
                                {"q", "p"},
                                {"dmax", "q"}})
            CHECK(count_m(fp, from, to, cfg).count == count_m(fp, from, to, finer).count);
    }
    SUBCASE("no trajectory returns to its own component") {
        // every shooting run re-checks this; exercise runs with boundary
        // sources on mixed and negative circles
        flow_problem fp = corpus_flow("annulus-cross");
        CHECK_NOTHROW(count_m(fp, "d", "p", cfg));
        CHECK_NOTHROW(count_m(fp, "dmin", "p", cfg));
        CHECK_NOTHROW(count_m(fp, "dmax", "q", cfg));
    }
}

TEST_CASE("build_morse_data") {
    shooting_config cfg;
    SUBCASE("disk-neg reproduces the stored tables exactly") {
        morse_data built = build_morse_data(corpus_flow("disk-neg"), cfg);
        morse_data stored = parse_morse_data(corpus_entry_by_name("disk-neg").morse_json);
        CHECK(built == stored);
    }
    SUBCASE("annulus-split reproduces the stored tables exactly") {
        morse_data built = build_morse_data(corpus_flow("annulus-split"), cfg);
        morse_data stored = parse_morse_data(corpus_entry_by_name("annulus-split").morse_json);
        CHECK(built == stored);
    }
    SUBCASE("flow data validates and matches reference homology") {
        for (const auto& e : corpus_entries()) {
            flow_problem fp = parse_flow_problem(e.flow_json);
            morse_data built = build_morse_data(fp, cfg);
            CHECK(validate(built).ok);
            homology_result h = homology(assemble_boundary(built));
            CHECK(compare_reference(h, e.reference));
        }
    }
    SUBCASE("sphere atlas gives classical data") {
        morse_data built = build_morse_data(corpus_flow("sphere-closed"), cfg);
        CHECK(built.counts.m_table.empty());
        CHECK(built.boundary_components.empty());
        homology_result h = homology(assemble_boundary(built));
        CHECK(betti_numbers(h) == std::vector<std::int64_t>{1, 0, 1});
    }
}

TEST_CASE("positive four-point disk: circle counts against shooting") {
    // the full cross-module orientation certificate: exact circle counts feed
    // the gamma columns, shooting counts the interior-max column, and the
    // composite must vanish
    shooting_config cfg;
    flow_problem fp = testutil::disk_pos4_flow();
    check_flow_problem(fp);
    morse_data built = build_morse_data(fp, cfg);
    CHECK(built.m_count("w", "ga") == 1);
    CHECK(built.m_count("w", "gc") == 1);
    CHECK(built.n_count("ga", "gb") == 1);
    CHECK(built.n_count("ga", "gd") == -1);
    CHECK(built.n_count("gc", "gb") == -1);
    CHECK(built.n_count("gc", "gd") == 1);
    graded_complex cx = assemble_boundary(built);
    CHECK(verify_d_squared(cx).ok);
    homology_result h = homology(cx);
    CHECK(betti_numbers(h) == std::vector<std::int64_t>{1, 0, 0});
}

TEST_CASE("horn-declared collar converts on load") {
    // serialize the cone-normalized fixture, rewrite its collar in horn
    // coordinates, and check the loader recovers the same problem
    flow_problem cone = testutil::horn_disk_flow();
    nlohmann::json doc = nlohmann::json::parse(serialize(cone));
    doc["collars"][0]["fN"] = {{"const", -6.0}, {"cos", {2.0}}, {"sin", nlohmann::json::array()}};
    doc["collars"][0]["r_max"] = 0.01;
    doc["collars"][0]["end_family"] = {{"a", -1.0}};
    flow_problem horn = parse_flow_problem(doc.dump());
    CHECK(horn.collars[0].metric_scale == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(horn.collars[0].r_max == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(horn.collars[0].boundary_function.constant == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(horn.collars[0].boundary_function.cos_coeffs[0] == doctest::Approx(0.5).epsilon(1e-12));
    check_flow_problem(horn);

    shooting_config cfg;
    morse_data built = build_morse_data(horn, cfg);
    homology_result h = homology(assemble_boundary(built));
    CHECK(betti_numbers(h) == std::vector<std::int64_t>{1, 0, 0});
}

TEST_CASE("doubling-declared collar loads as the cone") {
    nlohmann::json doc = nlohmann::json::parse(corpus_entry_by_name("disk-neg").flow_json);
    doc["collars"][0]["end_family"] = {{"doubling", true}};
    flow_problem fp = parse_flow_problem(doc.dump());
    check_flow_problem(fp);
    shooting_config cfg;
    CHECK(count_m(fp, "dmin", "p", cfg).count == 1);
}
