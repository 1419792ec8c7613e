#include "gdp/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gdp/errors.hpp"
#include "gdp/twave.hpp"

namespace gdp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

bool finite_all(const ModelCoefficients& c) {
    return std::isfinite(c.alpha) && std::isfinite(c.gamma) && std::isfinite(c.c0) &&
           std::isfinite(c.c1) && std::isfinite(c.c2) && std::isfinite(c.c3) &&
           std::isfinite(c.epsilon);
}

bool rel_equal(double a, double b, double scale, double rel_tol) {
    return std::abs(a - b) <= rel_tol * scale;
}

} // namespace

StructuralParams::StructuralParams(const ModelCoefficients& c) : c_(c) {
    require(finite_all(c), "coefficients must be finite");
    require(c.alpha >= 0.0, "alpha must be >= 0");
    require(c.gamma >= 0.0, "gamma must be >= 0");
    require(c.alpha + c.gamma > 0.0, "gamma + alpha must be > 0");
    require(c.c0 >= 0.0, "c0 must be >= 0");
    require(c.c1 > 0.0, "c1 must be > 0");
    require(c.c2 > 0.0, "c2 must be > 0");
    require(c.c3 > 0.0, "c3 must be > 0");
    require(c.epsilon > 0.0, "epsilon must be > 0");
}

StructuralParams StructuralParams::with_epsilon(double epsilon) const {
    ModelCoefficients c = c_;
    c.epsilon = epsilon;
    return StructuralParams(c);
}

StructuralParams StructuralParams::camassa_holm(double alpha, double c3, double c0, double epsilon) {
    if (!(alpha > 0.0)) throw ValidationError("Camassa-Holm coefficients need alpha > 0");
    return StructuralParams({.alpha = alpha,
                             .gamma = 0.0,
                             .c0 = c0,
                             .c1 = 1.5 * c3 / (alpha * alpha),
                             .c2 = 0.5 * c3,
                             .c3 = c3,
                             .epsilon = epsilon});
}

StructuralParams StructuralParams::degasperis_procesi(double alpha, double c3, double epsilon) {
    if (!(alpha > 0.0)) throw ValidationError("Degasperis-Procesi coefficients need alpha > 0");
    return StructuralParams({.alpha = alpha,
                             .gamma = 0.0,
                             .c0 = 0.0,
                             .c1 = 2.0 * c3 / (alpha * alpha),
                             .c2 = c3,
                             .c3 = c3,
                             .epsilon = epsilon});
}

DerivedConstants derive_constants(const StructuralParams& params) {
    DerivedConstants d;
    const double a2 = params.alpha() * params.alpha();
    d.r = params.c3() / (params.c2() + params.c3());
    d.beta = std::sqrt(params.c1() * (params.c2() + params.c3())) / params.c3();
    d.gamma_alpha = params.gamma() + a2 * params.c0();
    if (params.alpha() > 0.0) d.theta = params.c3() / (a2 * params.c1());
    return d;
}

double peakon_scale(const StructuralParams& params) {
    const double r = params.c3() / (params.c2() + params.c3());
    return std::sqrt(params.c1() / (r * params.c3()));
}

std::string_view to_string(RegimeKind kind) {
    switch (kind) {
    case RegimeKind::SmoothSoliton: return "SmoothSoliton";
    case RegimeKind::Peakon: return "Peakon";
    case RegimeKind::AlgebraicDecay: return "AlgebraicDecay";
    case RegimeKind::NoWave: return "NoWave";
    }
    return "Unknown";
}

std::string to_string(const Regime& regime) {
    std::string s(to_string(regime.kind));
    if (regime.kind == RegimeKind::Peakon)
        s += regime.arbitrary_amplitude ? "(arbitrary_amplitude=true)" : "(arbitrary_amplitude=false)";
    return s;
}

bool peakon_condition_holds(const StructuralParams& params, double amplitude, double rel_tol) {
    const auto d = derive_constants(params);
    const double a2 = params.alpha() * params.alpha();
    const double lhs = params.c3() * amplitude;
    const double rhs = d.gamma_alpha + d.r * params.c1() * amplitude * a2;
    const double scale = std::max({lhs, d.gamma_alpha, d.r * params.c1() * amplitude * a2});
    return rel_equal(lhs, rhs, scale, rel_tol);
}

bool arbitrary_peakon_condition_holds(const StructuralParams& params, double rel_tol) {
    const auto d = derive_constants(params);
    const double ra2c1 = d.r * params.alpha() * params.alpha() * params.c1();
    const double scale = std::max(params.c3(), ra2c1);
    return rel_equal(params.c3(), ra2c1, scale, rel_tol) && d.gamma_alpha <= rel_tol * scale;
}

namespace {

double one_minus_pow(double g, double r) {
    if (g <= 0.0) return 1.0;
    return -std::expm1(r * std::log(g));
}

WaveSpec peakon_wave(const StructuralParams& params, double amplitude, double rel_tol) {
    const auto d = derive_constants(params);
    WaveSpec w;
    w.regime = {RegimeKind::Peakon, arbitrary_peakon_condition_holds(params, rel_tol)};
    w.amplitude = amplitude;
    w.g_star = 0.0;
    w.p = 1.0;
    w.q = d.r;
    w.velocity = params.c0() + d.r * params.c1() * amplitude;
    return w;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// Cross-check the constructive result against the closed existence
// inequalities wherever their hypotheses apply.
void cross_check(const StructuralParams& params, WaveSpec& w, double rel_tol) {
    if (!(params.alpha() > 0.0)) return;
    const auto d = derive_constants(params);
    const double A = w.amplitude;
    const double ra2c1 = d.r * params.alpha() * params.alpha() * params.c1();
    const double scale = std::max(params.c3(), ra2c1);
    const bool soliton = w.regime.kind == RegimeKind::SmoothSoliton;
    const bool boundary = w.regime.kind == RegimeKind::Peakon ||
                          w.regime.kind == RegimeKind::AlgebraicDecay;

    double psi_value = kNaN;
    if (w.regime.kind != RegimeKind::NoWave)
        psi_value = d.gamma_alpha * one_minus_pow(w.g_star, d.r) / params.c3();

    if (d.gamma_alpha <= rel_tol * scale) {
        if (soliton)
            w.warnings.push_back(
                "gamma_alpha = 0 but a smooth soliton was constructed; the closed criterion "
                "'A = 0 if gamma_alpha = 0' does not cover c3 < r alpha^2 c1");
        return;
    }
    if (boundary) return;

    bool predicted = false;
    std::string which;
    if (std::abs(params.c3() - ra2c1) <= rel_tol * scale) {
        which = "Psi(A) < A (c3 = r alpha^2 c1)";
        predicted = std::isfinite(psi_value) && psi_value < A;
    } else if (params.c3() > ra2c1) {
        const double upper = d.gamma_alpha / (params.c3() - ra2c1);
        which = "Psi(A) < A < " + fmt(upper);
        predicted = A < upper && std::isfinite(psi_value) && psi_value < A;
    } else {
        return; // c3 < r alpha^2 c1: not covered by the closed inequalities
    }
    if (predicted != soliton) {
        w.warnings.push_back("closed criterion " + which + " predicts " +
                             (predicted ? "a soliton" : "no soliton") +
                             " but the constructive classification is " + to_string(w.regime));
    }
}

} // namespace

WaveSpec classify_wave(const StructuralParams& params, double amplitude, const ClassifyOptions& options) {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        throw InvalidAmplitude("amplitude must be finite and > 0");
    if (params.alpha() == 0.0 && params.gamma() == 0.0)
        throw DegenerateParameters("alpha = 0 and gamma = 0");

    const double tol = options.boundary_rel_tol;
    const auto d = derive_constants(params);
    WaveSpec w;
    w.amplitude = amplitude;

    auto no_wave = [&](std::string why) {
        w.regime = {RegimeKind::NoWave, false};
        w.velocity = w.p = w.q = w.g_star = kNaN;
        w.criterion = std::move(why);
    };

    if (params.alpha() > 0.0) {
        if (peakon_condition_holds(params, amplitude, tol)) {
            w = peakon_wave(params, amplitude, tol);
            w.criterion = "C1 = 0: c3 A - gamma_alpha = r c1 A alpha^2 (g* = 0)";
        } else {
            GStarSolution sol;
            try {
                sol = solve_g_star_alpha_pos(params, amplitude, {.boundary_rel_tol = tol});
            } catch (const NoRoot& e) {
                no_wave(e.what());
                cross_check(params, w, tol);
                return w;
            }
            w.warnings = sol.warnings;
            w.g_star = sol.g_star;
            w.q = sol.q;
            const double psi_value = d.gamma_alpha * one_minus_pow(sol.g_star, d.r) / params.c3();
            if (std::abs(psi_value - amplitude) <= tol * amplitude) {
                w.regime = {RegimeKind::AlgebraicDecay, false};
                w.velocity = wave_velocity(params, amplitude, sol.g_star, sol.q);
                w.p = one_minus_pow(sol.g_star, d.r);
                w.criterion = "Psi(A) = A: q(g*) = 0, algebraic decay";
            } else if (sol.q > 0.0) {
                w.regime = {RegimeKind::SmoothSoliton, false};
                w.velocity = wave_velocity(params, amplitude, sol.g_star, sol.q);
                w.p = params.c3() * amplitude /
                      (params.gamma() + params.alpha() * params.alpha() * w.velocity);
                w.criterion = "root g* in (0,1) with q(g*) > 0";
            } else {
                no_wave("root g* = " + fmt(sol.g_star) + " has q(g*) = " + fmt(sol.q) + " <= 0");
            }
        }
    } else {
        const double p = params.c3() * amplitude / params.gamma();
        if (std::abs(p - 1.0) <= tol) {
            w = peakon_wave(params, amplitude, tol);
            w.velocity = params.c0() + d.r * params.gamma() * params.c1() / params.c3();
            w.criterion = "alpha = 0, p = c3 A / gamma = 1";
        } else if (p > 1.0) {
            no_wave("alpha = 0, p = c3 A / gamma = " + fmt(p) + " > 1");
        } else {
            const auto sol = solve_q_star_alpha_zero(params, amplitude);
            w.regime = {RegimeKind::SmoothSoliton, false};
            w.g_star = sol.g_star;
            w.q = sol.q_star;
            w.p = p;
            w.velocity = wave_velocity(params, amplitude, sol.g_star, sol.q_star);
            w.criterion = "alpha = 0, p = c3 A / gamma < 1, q* > 0";
        }
    }
    cross_check(params, w, tol);
    return w;
}

double psi(const StructuralParams& params, double amplitude) {
    const auto d = derive_constants(params);
    if (params.alpha() > 0.0) {
        const auto sol = solve_g_star_alpha_pos(params, amplitude);
        return d.gamma_alpha * one_minus_pow(sol.g_star, d.r) / params.c3();
    }
    const double p = params.c3() * amplitude / params.gamma();
    if (p > 1.0) throw NoRoot("alpha = 0 and p = c3 A / gamma > 1: g* does not exist");
    const double g_star = std::pow(1.0 - p, 1.0 / d.r);
    return d.gamma_alpha * one_minus_pow(g_star, d.r) / params.c3();
}

} // namespace gdp
