#include "gdp/peakon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gdp/errors.hpp"

namespace gdp {

PeakonSpec peakon_amplitude(const StructuralParams& params, std::optional<double> amplitude, double rel_tol) {
    const auto d = derive_constants(params);
    const double ra2c1 = d.r * params.alpha() * params.alpha() * params.c1();
    const double scale = std::max(params.c3(), ra2c1);
    const bool balanced = std::abs(params.c3() - ra2c1) <= rel_tol * scale;
    const bool no_background = d.gamma_alpha <= rel_tol * scale;

    PeakonSpec spec;
    spec.r = d.r;
    spec.beta = d.beta;
    if (balanced && no_background) {
        if (!amplitude) throw InvalidAmplitude("peakons of arbitrary amplitude: an amplitude must be supplied");
        if (!(*amplitude > 0.0)) throw InvalidAmplitude("peakon amplitude must be > 0");
        spec.arbitrary_amplitude = true;
        spec.amplitude = *amplitude;
    } else if (balanced) {
        throw NoPeakon("c3 = r alpha^2 c1 with gamma_alpha > 0: c3 A - gamma_alpha = r c1 A alpha^2 has no solution");
    } else if (no_background) {
        throw NoPeakon("gamma_alpha = 0 with c3 != r alpha^2 c1: only A = 0 satisfies the crest condition");
    } else {
        const double A = d.gamma_alpha / (params.c3() - ra2c1);
        if (!(A > 0.0)) {
            std::ostringstream os;
            os << "amplitude gamma_alpha / (c3 - r alpha^2 c1) = " << A << " is not positive";
            throw NoPeakon(os.str());
        }
        if (amplitude && std::abs(*amplitude - A) > rel_tol * A) {
            std::ostringstream os;
            os << "peakon amplitude is fixed to " << A << " by the structural constants, got " << *amplitude;
            throw InvalidAmplitude(os.str());
        }
        spec.amplitude = A;
    }
    spec.velocity = params.c0() + d.r * params.c1() * spec.amplitude;
    return spec;
}

std::vector<double> peakon_profile(const PeakonSpec& spec, const StructuralParams& params,
                                   std::span<const double> x, double t) {
    const double k = spec.r * spec.beta / params.epsilon();
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        u[i] = spec.amplitude * std::exp(-k * std::abs(x[i] - spec.velocity * t));
    return u;
}

Profile peakon_sampled_profile(const PeakonSpec& spec, double eta_max, int nodes) {
    if (nodes < 5 || nodes % 2 == 0) throw DomainError("profile nodes must be odd and >= 5");
    Profile out;
    const std::size_t n = static_cast<std::size_t>(nodes);
    const std::size_t c = n / 2;
    out.eta.resize(n);
    out.omega.resize(n);
    out.domega.resize(n);
    const double h = eta_max / static_cast<double>(c);
    for (std::size_t j = 0; j <= c; ++j) {
        const double eta = j == c ? eta_max : static_cast<double>(j) * h;
        const double om = std::exp(-spec.r * eta);
        out.eta[c + j] = eta;
        out.eta[c - j] = -eta;
        out.omega[c + j] = out.omega[c - j] = om;
        // right-sided slope at the crest; omega_at only reads the eta >= 0 half
        out.domega[c + j] = -spec.r * om;
        out.domega[c - j] = j == 0 ? -spec.r : spec.r * om;
    }
    out.amplitude = spec.amplitude;
    out.velocity = spec.velocity;
    out.decay_rate = spec.r;
    out.tail_rate = spec.r;
    out.tail_tol = out.omega.back();
    out.g_star = 0.0;
    out.q = spec.r;
    out.p = 1.0;
    out.cusped = true;
    return out;
}

JumpReport jump_residuals(const CrestData& crest, const StructuralParams& params) {
    const double jump = crest.p * (crest.slope_plus - crest.slope_minus);
    const double jump_sq = crest.p * crest.p *
                           (crest.slope_plus * crest.slope_plus - crest.slope_minus * crest.slope_minus);
    JumpReport rep;
    rep.first = (1.0 - crest.p) * jump;
    rep.second = (1.0 - crest.p) * jump - params.c2() / params.c3() * jump_sq;
    return rep;
}

JumpReport verify_jump_conditions(const PeakonSpec& spec, const StructuralParams& params, double h) {
    auto omega = [&](double eta) { return std::exp(-spec.r * std::abs(eta)); };
    const double w0 = omega(0.0);
    CrestData crest;
    crest.p = 1.0;
    crest.slope_plus = (-3.0 * w0 + 4.0 * omega(h) - omega(2.0 * h)) / (2.0 * h);
    crest.slope_minus = (3.0 * w0 - 4.0 * omega(-h) + omega(-2.0 * h)) / (2.0 * h);
    return jump_residuals(crest, params);
}

} // namespace gdp
