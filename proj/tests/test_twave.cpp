#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gdp/diagnostics.hpp"
#include "gdp/errors.hpp"
#include "gdp/params.hpp"
#include "gdp/twave.hpp"

using namespace gdp;

namespace {

StructuralParams example2() { return StructuralParams({2.0, 0.0, 1.0, 3.0, 1.0, 5.0, 0.1}); }

// F written out term by term, linear in q: F = f0(g) + q f1(g).
double f0(double g, double r) {
    return g * g - 4.0 / (2.0 - r) * std::pow(g, 2.0 - r) + std::pow(g, 2.0 - 2.0 * r) / (1.0 - r) -
           r * r / ((1.0 - r) * (2.0 - r));
}
double f1(double g, double r) {
    return 2.0 / (2.0 - r) * std::pow(g, 2.0 - r) - std::pow(g, 2.0 - 2.0 * r) / (1.0 - r) +
           r / ((1.0 - r) * (2.0 - r));
}

// g'' = F_g(g) / 2 from the crest, classical RK4.
std::vector<double> shoot(const FPoly& f, double g_star, double h, int steps) {
    std::vector<double> g(steps + 1);
    double y = g_star, v = 0.0;
    g[0] = y;
    auto acc = [&](double x) { return 0.5 * f.slope(x); };
    for (int i = 1; i <= steps; ++i) {
        const double k1y = v, k1v = acc(y);
        const double k2y = v + 0.5 * h * k1v, k2v = acc(y + 0.5 * h * k1y);
        const double k3y = v + 0.5 * h * k2v, k3v = acc(y + 0.5 * h * k2y);
        const double k4y = v + h * k3v, k4v = acc(y + h * k3y);
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        g[i] = y;
    }
    return g;
}

} // namespace

TEST_CASE("F vanishes to second order at g = 1") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ur(0.05, 0.95), uq(-2.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const FPoly f(ur(rng), uq(rng));
        CHECK(std::abs(f.value(1.0)) <= 1e-12);
        CHECK(std::abs(f.slope(1.0)) <= 1e-12);
    }
}

TEST_CASE("second derivative at g = 1 is 2 r q") {
    const FPoly f(0.7, 0.4);
    for (double w : {1e-3, 1e-5, 1e-8}) CHECK(f.value_near_one(w) / (w * w) == doctest::Approx(0.7 * 0.4).epsilon(2e-3));
}

TEST_CASE("q = r collapses F to a perfect square") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ur(0.05, 0.95), ug(0.01, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double r = ur(rng), g = ug(rng);
        const double exact = g * g * std::pow(std::pow(g, -r) - 1.0, 2);
        CHECK(std::abs(FPoly(r, r).value(g) - exact) <= 1e-12);
    }
}

TEST_CASE("factored slope agrees with differentiation of the closed form") {
    const FPoly f(5.0 / 6.0, 0.3);
    for (double g : {0.1, 0.35, 0.6, 0.9}) {
        const double h = 1e-6;
        const double fd = (f.value(g + h) - f.value(g - h)) / (2 * h);
        CHECK(f.slope(g) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("series, increment and closed forms agree where all are accurate") {
    const FPoly f(2.0 / 3.0, 0.25);
    for (double w : {0.05, 0.15, 0.24}) CHECK(f.value_near_one(w) == doctest::Approx(f.value(1.0 - w)).epsilon(1e-12));
    for (double d : {1e-3, 0.1, 0.3}) CHECK(f.increment(0.4, d) == doctest::Approx(f.value(0.4 + d) - f.value(0.4)).epsilon(1e-10));
    CHECK_THROWS_AS(f.value(0.0), DomainError);
    CHECK_THROWS_AS(FPoly(1.0, 0.2), DomainError);
}

TEST_CASE("self-consistency polynomial is (1-r)(2-r) F(g, q(g))") {
    const auto s = SelfConsistencyPoly::from(example2(), 1.2);
    for (double g : {0.1, 0.3, 0.5, 0.8}) {
        const double expect = (1.0 - s.r) * (2.0 - s.r) * FPoly(s.r, s.q_of(g)).value(g);
        CHECK(s.value(g) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(s.C1 > 0.0);
}

TEST_CASE("reference root") {
    const auto sol = solve_g_star_alpha_pos(example2(), 1.2);
    CHECK(std::abs(sol.g_star - 0.5070) <= 0.005);
    CHECK(sol.q > 0.0);
    CHECK(std::abs(SelfConsistencyPoly::from(example2(), 1.2).value(sol.g_star)) <= 1e-13);
}

TEST_CASE("r = 2/3 closed-form root") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    int tested = 0;
    while (tested < 100) {
        const double c3 = u(rng);
        const StructuralParams p({u(rng), u(rng), u(rng), u(rng), 0.5 * c3, c3, 0.1});
        const double A = u(rng);
        const auto d = derive_constants(p);
        const double rhs = 1.0 - c3 * A / (d.gamma_alpha + d.r * p.c1() * p.alpha() * p.alpha() * A);
        if (rhs <= 1e-3) continue;
        const auto sol = solve_g_star_alpha_pos(p, A);
        CHECK(std::abs(std::pow(sol.g_star, 2.0 / 3.0) - rhs) <= 1e-8);
        ++tested;
    }
}

TEST_CASE("CH family root") {
    for (double c0 : {0.1, 1.0, 4.0}) {
        for (double A : {0.2, 1.0, 3.0}) {
            const auto p = StructuralParams::camassa_holm(1.5, 2.0, c0);
            const double expect = std::pow(1.0 + 2.0 * A / (c0 * 2.25), -1.5);
            CHECK(std::abs(solve_g_star_alpha_pos(p, A).g_star - expect) <= 1e-8);
        }
    }
}

TEST_CASE("C1 < 0 has no root") {
    const StructuralParams p({1.0, 1.0, 0.0, 1.0, 2.0, 2.0, 0.1});
    CHECK_THROWS_AS(solve_g_star_alpha_pos(p, 2.0), NoRoot);
    CHECK_THROWS_AS(solve_g_star_alpha_pos(StructuralParams({0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.1}), 0.5),
                    DegenerateParameters);
}

TEST_CASE("alpha = 0: q* against the direct linear solve") {
    const StructuralParams p({0.0, 10.0, 1.0, 1.0, 1.0, 4.0, 0.1});
    const double r = 0.8;
    for (double A : {0.4, 0.9, 2.0}) {
        const auto s = solve_q_star_alpha_zero(p, A);
        CHECK(s.p == doctest::Approx(0.4 * A));
        const double q = -f0(s.g_star, r) / f1(s.g_star, r);
        CHECK(s.q_star == doctest::Approx(q).epsilon(1e-10));
        CHECK(std::abs(FPoly(r, s.q_star).value(s.g_star)) <= 1e-12);
    }
    CHECK_THROWS_AS(solve_q_star_alpha_zero(p, 2.5), InvalidAmplitude);
}

TEST_CASE("alpha = 0: q* -> 0+ as p -> 0 with q*/p converging") {
    const StructuralParams p({0.0, 1.0, 0.0, 1.0, 1.0, 2.0, 0.1});
    double prev_ratio = 0.0;
    double prev_q = 1.0;
    for (double A = 0.05; A > 1e-6; A /= 10.0) {
        const auto s = solve_q_star_alpha_zero(p, A);
        CHECK(s.q_star > 0.0);
        CHECK(s.q_star < prev_q);
        const double ratio = s.q_star / s.p;
        if (prev_ratio > 0.0 && A < 1e-3) CHECK(ratio == doctest::Approx(prev_ratio).epsilon(1e-2));
        prev_ratio = ratio;
        prev_q = s.q_star;
    }
}

TEST_CASE("velocities") {
    const auto sol = solve_g_star_alpha_pos(example2(), 1.2);
    const double V = wave_velocity(example2(), 1.2, sol.g_star, sol.q);
    CHECK(V == doctest::Approx((5.0 * 1.2 / (1.0 - std::pow(sol.g_star, 5.0 / 6.0))) / 4.0));
    const StructuralParams a0({0.0, 10.0, 1.0, 1.0, 1.0, 4.0, 0.1});
    const auto s = solve_q_star_alpha_zero(a0, 0.9);
    CHECK(wave_velocity(a0, 0.9, s.g_star, s.q_star) == doctest::Approx(1.0 + s.q_star * 10.0 / 4.0));
}

TEST_CASE("EtaMap is monotone and invertible") {
    const auto sol = solve_g_star_alpha_pos(example2(), 1.2);
    const EtaMap map(sol.g_star, sol.q, 5.0 / 6.0, 1e-10);
    double last = 1.0;
    for (double eta = 0.25; eta < map.eta_end(); eta += 0.75) {
        const double w = map.w_of(eta);
        CHECK(w < 1.0 - sol.g_star);
        CHECK(map.eta_of_w(w) == doctest::Approx(eta).epsilon(1e-10));
        CHECK(w < last);
        last = w;
    }
    // through g the round trip is limited by the rounding of 1 - g
    CHECK(map.eta_of(map.g_of(3.0)) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(map.g_of(0.0) == sol.g_star);
    CHECK(1.0 - map.g_end() == doctest::Approx(1e-10));
}

TEST_CASE("EtaMap refuses a double zero and an invalid crest") {
    // q = 0: F has no simple zero in (0, 1)
    CHECK_THROWS(EtaMap(0.5, 0.0, 0.5, 1e-10));
    CHECK_THROWS_AS(EtaMap(0.5, 0.3, 0.5, 1e-10), DomainError);  // F(0.5) != 0
}

TEST_CASE("reference profile: residual, shooting and tail") {
    const auto p = example2();
    const auto w = classify_wave(p, 1.2);
    const auto prof = build_profile(p, w, {1e-10, 2001});
    REQUIRE(prof.eta.size() == 2001);
    CHECK(prof.omega[prof.center()] == 1.0);
    CHECK(profile_residual(prof, p, w.amplitude, w.velocity) <= 1e-6);

    // symmetric and decreasing away from the crest
    for (std::size_t j = 1; j < prof.center(); ++j) {
        CHECK(prof.omega[prof.center() + j] == prof.omega[prof.center() - j]);
        CHECK(prof.omega[prof.center() + j] < prof.omega[prof.center() + j - 1]);
    }

    const double r = 5.0 / 6.0;
    const double h = 1e-3;
    const auto g = shoot(FPoly(r, w.q), w.g_star, h, 8000);
    double worst = 0.0;
    for (std::size_t j = prof.center(); j < prof.eta.size() && prof.eta[j] <= 8.0; ++j) {
        const double eta = prof.eta[j];
        const auto i = static_cast<std::size_t>(std::lround(eta / h));
        if (std::abs(static_cast<double>(i) * h - eta) > 1e-12) continue;
        worst = std::max(worst, std::abs((1.0 - std::pow(g[i], r)) / w.p - prof.omega[j]));
    }
    CHECK(worst <= 1e-6);

    CHECK(prof.decay_rate == doctest::Approx(std::sqrt(r * w.q)).epsilon(1e-3));
    CHECK(prof.tail_rate == doctest::Approx(std::sqrt(r * w.q)).epsilon(1e-14));
}

TEST_CASE("alpha = 0 profile") {
    const StructuralParams p({0.0, 10.0, 1.0, 1.0, 1.0, 4.0, 0.1});
    const auto w = classify_wave(p, 0.9);
    REQUIRE(w.regime.kind == RegimeKind::SmoothSoliton);
    const auto prof = build_profile(p, w);
    CHECK(profile_residual(prof, p, w.amplitude, w.velocity) <= 1e-5);
    CHECK(prof.decay_rate == doctest::Approx(std::sqrt(0.8 * w.q)).epsilon(1e-3));
}

TEST_CASE("omega_at interpolates the samples and continues the tail") {
    const auto w = classify_wave(example2(), 1.2);
    const auto prof = build_profile(example2(), w, {1e-10, 1001});
    for (std::size_t j = 0; j < prof.eta.size(); j += 37) CHECK(prof.omega_at(prof.eta[j]) == doctest::Approx(prof.omega[j]).epsilon(1e-12));
    const double beyond = prof.omega_at(prof.eta_max() + 2.0);
    CHECK(beyond == doctest::Approx(prof.omega.back() * std::exp(-2.0 * prof.tail_rate)));
    // midpoints agree with a denser build
    const auto dense = build_profile(example2(), w, {1e-10, 8001});
    for (double eta : {0.013, 1.7, 6.31, -3.2}) CHECK(prof.omega_at(eta) == doctest::Approx(dense.omega_at(eta)).epsilon(1e-6));
}

TEST_CASE("physical samples") {
    const auto p = example2();
    const auto w = classify_wave(p, 1.2);
    const auto prof = build_profile(p, w);
    const std::vector<double> x{0.0, 0.1, -0.1, 3.0};
    const auto u = sample_physical_wave(prof, p, x, 0.0);
    CHECK(u[0] == doctest::Approx(1.2));
    CHECK(u[1] == doctest::Approx(u[2]));
    const auto moved = sample_physical_wave(prof, p, std::vector<double>{w.velocity * 0.5}, 0.5);
    CHECK(moved[0] == doctest::Approx(1.2));
}

TEST_CASE("build_profile needs a smooth soliton") {
    const auto dp = StructuralParams::degasperis_procesi(1.0, 1.0);
    CHECK_THROWS_AS(build_profile(dp, classify_wave(dp, 1.0)), DomainError);
}
