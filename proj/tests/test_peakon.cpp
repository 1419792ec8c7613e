#include <doctest.h>

#include <cmath>

#include "gdp/diagnostics.hpp"
#include "gdp/errors.hpp"
#include "gdp/peakon.hpp"

using namespace gdp;

TEST_CASE("DP peakons: any amplitude, V = c3 A / alpha^2") {
    const auto p = StructuralParams::degasperis_procesi(2.0, 5.0);
    for (double A : {0.3, 1.0, 4.0}) {
        const auto s = peakon_amplitude(p, A);
        CHECK(s.arbitrary_amplitude);
        CHECK(s.amplitude == A);
        CHECK(std::abs(s.velocity - 5.0 * A / 4.0) <= 1e-12 * s.velocity);
        CHECK(s.r == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(peakon_amplitude(p), InvalidAmplitude);
}

TEST_CASE("CH without linear dispersion: any amplitude") {
    const auto p = StructuralParams::camassa_holm(1.5, 2.0, 0.0);
    const auto s = peakon_amplitude(p, 0.8);
    CHECK(s.arbitrary_amplitude);
    CHECK(std::abs(s.velocity - (0.0 + 2.0 / 3.0 * p.c1() * 0.8)) <= 1e-12);
}

TEST_CASE("fixed amplitude for alpha = 0") {
    const StructuralParams p({0.0, 10.0, 1.0, 1.0, 1.0, 4.0, 0.1});
    const auto s = peakon_amplitude(p);
    CHECK_FALSE(s.arbitrary_amplitude);
    CHECK(s.amplitude == doctest::Approx(10.0 / 4.0).epsilon(1e-15));
    CHECK(std::abs(s.velocity - (1.0 + 0.8 * 10.0 * 1.0 / 4.0)) <= 1e-12);
    CHECK(peakon_amplitude(p, 2.5).amplitude == doctest::Approx(2.5));
    CHECK_THROWS_AS(peakon_amplitude(p, 2.0), InvalidAmplitude);
}

TEST_CASE("fixed amplitude for alpha > 0 agrees with the classifier") {
    const StructuralParams p({1.0, 1.0, 0.5, 1.0, 2.0, 2.0, 0.1});
    const auto s = peakon_amplitude(p);
    const double ga = 1.0 + 0.5;
    CHECK(s.amplitude == doctest::Approx(ga / (2.0 - 0.5)).epsilon(1e-14));
    CHECK(std::abs(s.velocity - (0.5 + 0.5 * 1.0 * s.amplitude)) <= 1e-12);
    CHECK(classify_wave(p, s.amplitude).regime.kind == RegimeKind::Peakon);
    CHECK(classify_wave(p, s.amplitude).velocity == doctest::Approx(s.velocity).epsilon(1e-12));
}

TEST_CASE("no peakon when the fixed amplitude would be negative") {
    const StructuralParams p({1.0, 1.0, 0.0, 4.0, 1.0, 1.0, 0.1});
    CHECK_THROWS_AS(peakon_amplitude(p), NoPeakon);
    // c3 = r alpha^2 c1 but gamma_alpha > 0
    const StructuralParams q({1.0, 1.0, 0.0, 2.0, 1.0, 1.0, 0.1});
    CHECK_THROWS_AS(peakon_amplitude(q, 1.0), NoPeakon);
}

TEST_CASE("closed form in space and time") {
    const auto p = StructuralParams::degasperis_procesi(1.0, 1.0, 0.2);
    const auto s = peakon_amplitude(p, 1.5);
    const std::vector<double> x{0.0, 1.0, -1.0, 1.5 + 0.3};
    const auto u = peakon_profile(s, p, x, 1.0);
    const double k = s.r * s.beta / 0.2;
    CHECK(u[0] == doctest::Approx(1.5 * std::exp(-k * 1.5)));
    CHECK(u[1] == doctest::Approx(1.5 * std::exp(-k * 0.5)));
    CHECK(u[3] == doctest::Approx(1.5 * std::exp(-k * 0.3)));
}

TEST_CASE("sampled peakon: cusp, decay rate r in eta units") {
    const auto p = StructuralParams::degasperis_procesi(1.0, 1.0);
    const auto s = peakon_amplitude(p, 1.0);
    const auto prof = peakon_sampled_profile(s, 40.0, 4001);
    CHECK(prof.cusped);
    CHECK(prof.omega[prof.center()] == 1.0);
    CHECK(fit_decay_rate(prof) == doctest::Approx(s.r).epsilon(1e-9));
    CHECK(prof.omega_at(3.0) == doctest::Approx(std::exp(-s.r * 3.0)).epsilon(1e-6));
}

TEST_CASE("jump conditions hold for closed-form peakons") {
    for (const auto& p : {StructuralParams::degasperis_procesi(2.0, 5.0), StructuralParams::camassa_holm(1.5, 2.0, 0.0),
                          StructuralParams({0.0, 10.0, 1.0, 1.0, 1.0, 4.0, 0.1})}) {
        const auto s = arbitrary_peakon_condition_holds(p) ? peakon_amplitude(p, 0.7) : peakon_amplitude(p);
        const auto j = verify_jump_conditions(s, p);
        CHECK(std::abs(j.first) <= 1e-8);
        CHECK(std::abs(j.second) <= 1e-6);
    }
}

TEST_CASE("jump residuals detect asymmetric slopes") {
    const auto p = StructuralParams::degasperis_procesi(1.0, 1.0);
    const auto bad = jump_residuals(CrestData{1.0, -0.5, 0.3}, p);
    CHECK(std::abs(bad.second) > 1e-3);
    const auto smooth_crest = jump_residuals(CrestData{0.6, 0.0, 0.0}, p);
    CHECK(smooth_crest.first == 0.0);
    CHECK(smooth_crest.second == 0.0);
}
