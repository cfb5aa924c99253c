#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "morsehb/circle.hpp"

using namespace morsehb;

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;
constexpr double two_pi = 2 * pi;

// ---------------------------------------------------------------------------
// Frame-determinant oracle.
//
// The circle is embedded as the unit circle of a plane chart with the
// manifold inside; v_in = -d/dr. Signs are computed from actual frames at
// actual arc points: the boundary-orientation sign of the shooting pair as a
// dot product against the oriented unstable direction, and the inward-vector
// frame as a literal 2x2 determinant against the (possibly reversed) plane
// orientation. No combinatorial shortcut: this is the reference the library
// counts must reproduce, at any radius.
// ---------------------------------------------------------------------------

struct plane_vec {
    double x, y;
};

plane_vec tangent(double angle) { return {-std::sin(angle), std::cos(angle)}; }
plane_vec outward_radial(double angle) { return {std::cos(angle), std::sin(angle)}; }
double dot(plane_vec a, plane_vec b) { return a.x * b.x + a.y * b.y; }
double det(plane_vec a, plane_vec b) { return a.x * b.y - a.y * b.x; }

enum class count_shape { same_sign, pos_to_neg };

std::int64_t oracle_count(const circle_morse_function& f, const std::string& from_id,
                          const std::string& to_id, count_shape shape, int ambient, double radius) {
    const int o = f.orientation;
    const auto& pts = f.points;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].id != from_id) continue;
        for (int d : {+1, -1}) {
            const auto& target = pts[(i + (d > 0 ? 1 : pts.size() - 1)) % pts.size()];
            if (target.id != to_id) continue;

            const double x_angle = pts[i].angle + d * radius;
            const plane_vec tau = tangent(x_angle);

            // boundary-orientation sign of the sphere point inside the
            // oriented unstable arc: compare "away from the maximum" with the
            // transported orientation vector o * tangent
            const plane_vec away{d * tau.x, d * tau.y};
            const plane_vec oriented{o * tau.x, o * tau.y};
            const int point_sign = dot(away, oriented) > 0 ? 1 : -1;

            int frame_sign = 1;
            if (shape == count_shape::pos_to_neg) {
                // frame {oriented basis of the target's stable arc, v_in}
                const plane_vec stable{o * tau.x, o * tau.y};
                const plane_vec v_in{-outward_radial(x_angle).x, -outward_radial(x_angle).y};
                frame_sign = ambient * det(stable, v_in) > 0 ? 1 : -1;
            }
            total += frame_sign * point_sign;
        }
    }
    return total;
}

circle_critical_point cp(std::string id, double angle, double value, circle_point_type type) {
    return {std::move(id), angle, value, type};
}

circle_morse_function two_point_positive() {
    circle_morse_function f;
    f.component = "P";
    f.points = {cp("g1", 0.0, 1.0, circle_point_type::maximum),
                cp("g0", pi, 0.5, circle_point_type::minimum)};
    f.orientation = 1;
    return f;
}

circle_morse_function two_point_mixed() {
    circle_morse_function f;
    f.component = "X";
    f.points = {cp("g", 0.0, 1.0, circle_point_type::maximum),
                cp("d", pi, -1.0, circle_point_type::minimum)};
    f.orientation = 1;
    return f;
}

circle_morse_function four_point_positive() {
    circle_morse_function f;
    f.component = "P";
    f.points = {cp("ga", 0.0, 2.0, circle_point_type::maximum),
                cp("gb", pi / 2, 1.0, circle_point_type::minimum),
                cp("gc", pi, 3.0, circle_point_type::maximum),
                cp("gd", 3 * pi / 2, 0.5, circle_point_type::minimum)};
    f.orientation = 1;
    return f;
}

circle_morse_function four_point_mixed() {
    circle_morse_function f;
    f.component = "X";
    f.points = {cp("g", 0.0, 1.0, circle_point_type::maximum),
                cp("d1", pi / 2, -0.5, circle_point_type::minimum),
                cp("m2", pi, 0.5, circle_point_type::maximum),
                cp("d3", 3 * pi / 2, -2.0, circle_point_type::minimum)};
    f.orientation = 1;
    return f;
}

circle_morse_function random_circle(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pairs(1, 4);
    std::uniform_real_distribution<double> jitter(0.05, 0.3);
    std::uniform_real_distribution<double> level(0.2, 2.0);
    std::uniform_int_distribution<int> coin(0, 1);
    const int np = pairs(rng);
    circle_morse_function f;
    f.component = "R";
    f.orientation = coin(rng) ? 1 : -1;
    for (int i = 0; i < 2 * np; ++i) {
        const double base = two_pi * i / (2 * np);
        const double angle = base + jitter(rng) * two_pi / (2 * np);
        if (i % 2 == 0)
            f.points.push_back(cp("x" + std::to_string(i), angle, 2.0 + level(rng),
                                  circle_point_type::maximum));
        else
            f.points.push_back(cp("x" + std::to_string(i), angle, coin(rng) ? level(rng) : -level(rng),
                                  circle_point_type::minimum));
    }
    if (coin(rng)) // exercise the all-negative sign class too
        for (auto& p : f.points) p.value -= 5.0;
    return f;
}

} // namespace

TEST_CASE("trajectories: one per adjacent max-min pair") {
    SUBCASE("two points give the two arcs") {
        auto t = circle_trajectories(two_point_positive());
        REQUIRE(t.size() == 2);
        CHECK(t[0].from == "g1");
        CHECK(t[0].to == "g0");
        CHECK(t[0].direction == arc_direction::ccw);
        CHECK(t[1].direction == arc_direction::cw);
    }
    SUBCASE("four points give four arcs") {
        CHECK(circle_trajectories(four_point_positive()).size() == 4);
    }
    SUBCASE("each maximum emits two, each minimum absorbs two") {
        std::mt19937_64 rng(1);
        for (int trial = 0; trial < 50; ++trial) {
            auto f = random_circle(rng);
            auto t = circle_trajectories(f);
            for (const auto& p : f.points) {
                std::size_t out = 0, in = 0;
                for (const auto& arc : t) {
                    if (arc.from == p.id) ++out;
                    if (arc.to == p.id) ++in;
                }
                if (p.type == circle_point_type::maximum) {
                    CHECK(out == 2);
                    CHECK(in == 0);
                } else {
                    CHECK(in == 2);
                    CHECK(out == 0);
                }
            }
        }
    }
    SUBCASE("non-alternating input is rejected") {
        circle_morse_function f;
        f.component = "B";
        f.points = {cp("a", 0.0, 1.0, circle_point_type::maximum),
                    cp("b", 1.0, 2.0, circle_point_type::maximum),
                    cp("c", 2.0, 0.5, circle_point_type::minimum),
                    cp("d", 3.0, 0.25, circle_point_type::minimum)};
        CHECK_THROWS_AS(circle_trajectories(f), precondition_error);
    }
    SUBCASE("degenerate circles are rejected") {
        circle_morse_function f;
        f.component = "B";
        CHECK_THROWS_AS(circle_trajectories(f), precondition_error);
    }
}

TEST_CASE("locked same-sign counts") {
    SUBCASE("two-point circle cancels") {
        auto f = two_point_positive();
        CHECK(signed_count_same_sign(f, "g1", "g0") == 0);
        CHECK(oracle_count(f, "g1", "g0", count_shape::same_sign, 1, 0.13) == 0);
    }
    SUBCASE("four-point circle: one arc per pair") {
        auto f = four_point_positive();
        CHECK(signed_count_same_sign(f, "ga", "gb") == 1);
        CHECK(signed_count_same_sign(f, "ga", "gd") == -1);
        CHECK(signed_count_same_sign(f, "gc", "gb") == -1);
        CHECK(signed_count_same_sign(f, "gc", "gd") == 1);
    }
    SUBCASE("all-negative circles behave identically") {
        auto f = four_point_positive();
        for (auto& p : f.points) p.value -= 10.0; // all values negative now
        CHECK(signed_count_same_sign(f, "ga", "gb") == 1);
        CHECK(signed_count_same_sign(f, "ga", "gd") == -1);
    }
}

TEST_CASE("locked positive-to-negative counts") {
    SUBCASE("two-point mixed circle cancels") {
        auto f = two_point_mixed();
        CHECK(signed_count_pos_to_neg(f, "g", "d", 1) == 0);
        CHECK(oracle_count(f, "g", "d", count_shape::pos_to_neg, 1, 0.2) == 0);
    }
    SUBCASE("single arcs count plus-minus one") {
        auto f = four_point_mixed();
        CHECK(signed_count_pos_to_neg(f, "g", "d1", 1) == 1);
        CHECK(signed_count_pos_to_neg(f, "g", "d3", 1) == -1);
        CHECK(std::abs(signed_count_pos_to_neg(f, "m2", "d1", 1)) == 1);
    }
}

TEST_CASE("library counts equal the frame oracle on random circles") {
    std::mt19937_64 rng(20250808);
    for (int trial = 0; trial < 500; ++trial) {
        auto f = random_circle(rng);
        const int ambient = f.orientation; // outward-first convention ties them
        for (const auto& from : f.points) {
            if (from.type != circle_point_type::maximum) continue;
            for (const auto& to : f.points) {
                if (to.type != circle_point_type::minimum) continue;
                const bool fp = from.value > 0, tp = to.value > 0;
                if (!fp && tp) continue; // no negative-to-positive shape
                std::int64_t got, want1, want2;
                if (fp && !tp) {
                    got = signed_count_pos_to_neg(f, from.id, to.id, ambient);
                    want1 = oracle_count(f, from.id, to.id, count_shape::pos_to_neg, ambient, 0.07);
                    want2 = oracle_count(f, from.id, to.id, count_shape::pos_to_neg, ambient, 0.31);
                } else {
                    got = signed_count_same_sign(f, from.id, to.id);
                    want1 = oracle_count(f, from.id, to.id, count_shape::same_sign, ambient, 0.07);
                    want2 = oracle_count(f, from.id, to.id, count_shape::same_sign, ambient, 0.31);
                }
                CHECK(want1 == want2); // radius independence
                CHECK(got == want1);
                // the unsigned adjacency count bounds the signed count
                std::int64_t arcs = 0;
                for (const auto& t : circle_trajectories(f))
                    if (t.from == from.id && t.to == to.id) ++arcs;
                CHECK(std::abs(got) <= arcs);
            }
        }
    }
}

TEST_CASE("orientation reversal negates the counts") {
    auto f = four_point_positive();
    auto g = f;
    g.orientation = -1;
    for (const auto& [from, to] : {std::pair<std::string, std::string>{"ga", "gb"},
                                   {"ga", "gd"},
                                   {"gc", "gb"},
                                   {"gc", "gd"}})
        CHECK(signed_count_same_sign(g, from, to) == -signed_count_same_sign(f, from, to));

    auto m = four_point_mixed();
    auto mr = m;
    mr.orientation = -1;
    CHECK(signed_count_pos_to_neg(mr, "g", "d1", -1) == -signed_count_pos_to_neg(m, "g", "d1", 1));
}

TEST_CASE("rotation leaves counts unchanged") {
    auto f = four_point_mixed();
    auto rotated = f;
    const double shift = 0.7;
    for (auto& p : rotated.points) p.angle = std::fmod(p.angle + shift, two_pi);
    std::sort(rotated.points.begin(), rotated.points.end(),
              [](const auto& a, const auto& b) { return a.angle < b.angle; });
    CHECK(signed_count_pos_to_neg(rotated, "g", "d1", 1) ==
          signed_count_pos_to_neg(f, "g", "d1", 1));
    CHECK(signed_count_pos_to_neg(rotated, "g", "d3", 1) ==
          signed_count_pos_to_neg(f, "g", "d3", 1));
}

TEST_CASE("preconditions") {
    auto f = four_point_mixed();
    SUBCASE("from equals to") {
        CHECK_THROWS_AS(signed_count_same_sign(f, "g", "g"), precondition_error);
    }
    SUBCASE("sign classes must match for same-sign counts") {
        CHECK_THROWS_AS(signed_count_same_sign(f, "g", "d1"), precondition_error);
    }
    SUBCASE("pos-to-neg needs the right signs") {
        auto p = four_point_positive();
        CHECK_THROWS_AS(signed_count_pos_to_neg(p, "ga", "gb", 1), precondition_error);
    }
    SUBCASE("direction delta to gamma does not exist") {
        CHECK_THROWS_AS(signed_count_pos_to_neg(f, "d1", "g", 1), precondition_error);
        CHECK_THROWS_AS(signed_count_same_sign(f, "d1", "m2"), precondition_error);
    }
    SUBCASE("unknown ids") {
        CHECK_THROWS_AS(signed_count_same_sign(f, "nope", "d1"), precondition_error);
    }
    SUBCASE("zero critical value") {
        auto z = two_point_positive();
        z.points[1].value = 0.0;
        CHECK_THROWS_AS(circle_trajectories(z), precondition_error);
    }
}
