#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gdp/params.hpp"
#include "gdp/twave.hpp"

namespace gdp {

/// Closed-form peaked wave u = A exp(-r beta |x - V t| / epsilon).
struct PeakonSpec {
    double amplitude = 0.0;
    double velocity = 0.0;
    double r = 0.0;
    double beta = 0.0;
    bool arbitrary_amplitude = false;
};

/// Peakon admitted by the structural constants.
///
/// - c3 != r alpha^2 c1 and gamma_alpha > 0: the amplitude is fixed,
///   A = gamma_alpha / (c3 - r alpha^2 c1), and must be positive.
/// - c3 = r alpha^2 c1 and gamma_alpha = 0: any amplitude; `amplitude` must be given.
///
/// Velocity is c0 + r c1 A in both cases. Throws NoPeakon with the violated
/// condition otherwise, InvalidAmplitude when a requested amplitude is
/// missing or contradicts the fixed one.
PeakonSpec peakon_amplitude(const StructuralParams& params,
                            std::optional<double> amplitude = std::nullopt,
                            double rel_tol = 1e-9);

std::vector<double> peakon_profile(const PeakonSpec& spec, const StructuralParams& params,
                                   std::span<const double> x, double t);

/// Closed form sampled onto a symmetric eta grid, for export and simulation.
Profile peakon_sampled_profile(const PeakonSpec& spec, double eta_max, int nodes);

/// One-sided data at the crest: W = p omega, slopes of omega at eta = +0 and -0.
struct CrestData {
    double p = 1.0;
    double slope_plus = 0.0;
    double slope_minus = 0.0;
};

struct JumpReport {
    double first = 0.0;   // (1 - p) [W']|_0
    double second = 0.0;  // (1 - p) [W']|_0 - (c2 / c3) [(W')^2]|_0
};

JumpReport jump_residuals(const CrestData& crest, const StructuralParams& params);

/// Residuals for the closed-form peakon; slopes are one-sided second-order
/// differences of the sampled profile.
JumpReport verify_jump_conditions(const PeakonSpec& spec, const StructuralParams& params,
                                  double h = 1e-4);

} // namespace gdp
