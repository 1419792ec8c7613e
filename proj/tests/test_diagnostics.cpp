#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gdp/diagnostics.hpp"
#include "gdp/errors.hpp"
#include "gdp/pdesim.hpp"

using namespace gdp;

namespace {

StructuralParams example2() { return StructuralParams({2.0, 0.0, 1.0, 3.0, 1.0, 5.0, 0.1}); }

std::vector<double> bump(const Grid& g, double x0, double a, double w) {
    std::vector<double> u(static_cast<std::size_t>(g.nodes));
    for (int j = 0; j < g.nodes; ++j) {
        const double d = g.wrap(g.x(j) - x0);
        u[static_cast<std::size_t>(j)] = a / std::cosh(d / w);
    }
    return u;
}

// Two sech crests translating at fixed speeds, no interaction.
Trajectory translated_pair(double v1, double v2, double t_end, int snaps) {
    Trajectory t;
    t.grid = Grid(40.0, 2048);
    for (int i = 0; i <= snaps; ++i) {
        const double time = t_end * i / snaps;
        auto u = bump(t.grid, 5.0 + v1 * time, 1.0, 0.2);
        const auto u2 = bump(t.grid, 25.0 + v2 * time, 0.5, 0.25);
        for (std::size_t j = 0; j < u.size(); ++j) u[j] += u2[j];
        Snapshot s;
        s.t = time;
        s.diag.t = time;
        s.diag.peaks = find_peaks(u, t.grid, 0.1, false);
        s.u = std::move(u);
        t.snapshots.push_back(std::move(s));
    }
    return t;
}

} // namespace

TEST_CASE("balance terms vanish for the zero state") {
    const Grid g(10.0, 64);
    const auto b = balance_terms(GridState{g, 0.0, std::vector<double>(64, 0.0)}, example2());
    CHECK(b.E == 0.0);
    CHECK(b.D == 0.0);
}

TEST_CASE("D vanishes when c3 = 2 c2 and for even states") {
    const Grid g(10.0, 512);
    GridState s{g, 0.0, bump(g, 4.0, 1.0, 0.3)};
    for (std::size_t j = 0; j < s.u.size(); ++j) s.u[j] += 0.2 * std::exp(-std::pow(g.x(static_cast<int>(j)) - 5.0, 2));
    CHECK(balance_terms(s, StructuralParams::camassa_holm(1.0, 2.0, 0.5)).D == 0.0);

    s.u = bump(g, 5.0, 1.0, 0.3);  // symmetric about a grid node
    const auto b = balance_terms(s, example2());
    CHECK(std::abs(b.D) <= 1e-12);
    CHECK(b.E > 0.0);
}

TEST_CASE("sign of D follows (c3 - 2 c2) times the cubed slope integral") {
    const Grid g(10.0, 512);
    GridState s{g, 0.0, std::vector<double>(512)};
    // steep front, gentle back: int u_x^3 < 0
    for (int j = 0; j < 512; ++j) {
        const double x = g.x(j);
        s.u[static_cast<std::size_t>(j)] = x < 5.0 ? std::exp(-std::pow((x - 5.0) / 1.0, 2)) : std::exp(-std::pow((x - 5.0) / 0.3, 2));
    }
    CHECK(balance_terms(s, example2()).D < 0.0);  // c3 - 2 c2 = 3 > 0
    const StructuralParams neg({2.0, 0.0, 1.0, 3.0, 4.0, 5.0, 0.1});
    CHECK(balance_terms(s, neg).D > 0.0);
}

TEST_CASE("E is additive for separated waves") {
    const Grid g(40.0, 4096);
    const auto a = bump(g, 10.0, 1.0, 0.2);
    const auto b = bump(g, 30.0, 0.6, 0.3);
    std::vector<double> ab(a.size());
    for (std::size_t j = 0; j < ab.size(); ++j) ab[j] = a[j] + b[j];
    const double Ea = balance_terms(GridState{g, 0.0, a}, example2()).E;
    const double Eb = balance_terms(GridState{g, 0.0, b}, example2()).E;
    const double Eab = balance_terms(GridState{g, 0.0, ab}, example2()).E;
    CHECK(Eab == doctest::Approx(Ea + Eb).epsilon(1e-12));
}

TEST_CASE("mass is a rectangle rule") {
    const Grid g(4.0, 64);
    CHECK(mass(GridState{g, 0.0, std::vector<double>(64, 0.5)}) == doctest::Approx(2.0));
}

TEST_CASE("decay-rate fit on an exact exponential") {
    std::vector<double> eta, omega;
    for (int j = -400; j <= 400; ++j) {
        eta.push_back(0.02 * j);
        omega.push_back(std::exp(-3.0 * std::abs(0.02 * j)));
    }
    CHECK(std::abs(fit_decay_rate(eta, omega) - 3.0) <= 1e-6);
}

TEST_CASE("decay-rate fit needs two decades") {
    std::vector<double> eta, omega;
    for (int j = -10; j <= 10; ++j) {
        eta.push_back(0.01 * j);
        omega.push_back(std::exp(-std::abs(0.01 * j)));
    }
    CHECK_THROWS_AS(fit_decay_rate(eta, omega), InsufficientTail);
}

TEST_CASE("quadratic peak location is sub-grid accurate") {
    const Grid g(10.0, 1024);
    for (double x0 : {3.0, 3.0031, 7.4999}) {
        std::vector<double> u(1024);
        for (int j = 0; j < 1024; ++j) u[static_cast<std::size_t>(j)] = std::exp(-std::pow(g.wrap(g.x(j) - x0) / 0.2, 2));
        const auto pk = find_peaks(u, g, 0.5, false);
        REQUIRE(pk.size() == 1);
        CHECK(pk[0].x == doctest::Approx(x0).epsilon(1e-5));
        CHECK(pk[0].value == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("cusped peaks by intersecting one-sided lines") {
    const Grid g(10.0, 2048);
    const double x0 = 5.00123;
    std::vector<double> u(2048);
    for (int j = 0; j < 2048; ++j) u[static_cast<std::size_t>(j)] = std::exp(-4.0 * std::abs(g.x(j) - x0));
    const auto pk = find_peaks(u, g, 0.5, true);
    REQUIRE(pk.size() == 1);
    CHECK(pk[0].x == doctest::Approx(x0).epsilon(1e-5));
    // straight lines through curved flanks: O(k dx) low bias in the crest value
    CHECK(pk[0].value == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("peaks come largest first and wrap") {
    const Grid g(10.0, 1024);
    auto u = bump(g, 9.99, 0.6, 0.2);
    const auto v = bump(g, 4.0, 1.0, 0.2);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] += v[j];
    const auto pk = find_peaks(u, g, 0.1, false);
    REQUIRE(pk.size() == 2);
    CHECK(pk[0].value > pk[1].value);
    CHECK(pk[1].x == doctest::Approx(9.99).epsilon(1e-4));
}

TEST_CASE("collision measurement on free translation") {
    const double v1 = 1.7, v2 = 0.9;
    const auto traj = translated_pair(v1, v2, 4.0, 80);
    const auto rep = measure_collision(traj, CollisionWindows{0.0, 1.9, 2.1, 4.0});
    CHECK(rep.waves[0].velocity_pre == doctest::Approx(v1).epsilon(1e-3));
    CHECK(rep.waves[1].velocity_post == doctest::Approx(v2).epsilon(1e-3));
    CHECK(std::abs(rep.waves[0].phase_shift) <= 1e-3);
    CHECK(rep.max_relative_amplitude_change() <= 1e-4);
    CHECK(to_text(rep).find("wave 2") != std::string::npos);
    const auto w = default_collision_windows(traj, 1.0);
    CHECK(w.pre_begin == 0.0);
    CHECK(w.post_end == doctest::Approx(4.0));
}

TEST_CASE("collision windows must be ordered") {
    const auto traj = translated_pair(1.0, 0.5, 1.0, 20);
    CHECK_THROWS_AS(measure_collision(traj, CollisionWindows{0.0, 0.6, 0.5, 1.0}), ConfigError);
}

TEST_CASE("losing a crest inside a window is reported") {
    auto traj = translated_pair(1.0, 0.5, 1.0, 20);
    traj.snapshots[3].diag.peaks.resize(1);
    CHECK_THROWS_AS(measure_collision(traj, CollisionWindows{0.0, 0.4, 0.6, 1.0}), TrackingLost);
}

TEST_CASE("interaction separation") {
    CHECK(interaction_separation(example2()) == doctest::Approx(10.0 * 0.1 / (5.0 / 6.0 * std::sqrt(18.0) / 5.0)));
}
