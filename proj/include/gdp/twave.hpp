#pragma once

#include <span>
#include <string>
#include <vector>

#include "gdp/params.hpp"

namespace gdp {

/// F(g, q) = g^2 - 2 (2-q)/(2-r) g^(2-r) + (1-q)/(1-r) g^(2-2r) - C(q),
/// C(q) = r (r - q) / ((1 - r)(2 - r)).
///
/// (dg/deta)^2 = F(g, q) is the first integral of the reduced profile equation.
/// F(1, q) = F_g(1, q) = 0 for every q and F_gg(1, q) = 2 r q.
class FPoly {
public:
    FPoly(double r, double q);

    double r() const noexcept { return r_; }
    double q() const noexcept { return q_; }
    double C() const noexcept { return c_; }

    /// Closed evaluation. Throws DomainError for g <= 0.
    double value(double g) const;
    /// F_g(g) = 2 g^(1-2r) (1 - g^r) ((1 - q) - g^r).
    double slope(double g) const;

    /// F(1 - w) from its Taylor series about g = 1; exact cancellation of the
    /// w^0 and w^1 terms keeps the double zero at g = 1 accurate for tiny w.
    double value_near_one(double w) const;
    /// F(g0 + d) - F(g0) without cancellation in the individual terms.
    double increment(double g0, double d) const;

private:
    double r_;
    double q_;
    double c_;
    double a_[3];  // coefficients of g^2, g^(2-r), g^(2-2r)
    double e_[3];  // the exponents
};

/// (1-r)(2-r) F(g, q(g)) with q(g) = theta - xi (1 - g^r), written as
/// rho1 g^2 - rho2 g^(2-r) + rho3 g^(2-2r) + rho4 g^r - C1.
struct SelfConsistencyPoly {
    double r = 0.0;
    double theta = 0.0;
    double xi = 0.0;  // gamma_alpha / (alpha^2 c1 A)
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.0;
    double rho4 = 0.0;
    double C1 = 0.0;

    static SelfConsistencyPoly from(const StructuralParams& params, double amplitude);

    double value(double g) const;
    double q_of(double g) const;
};

struct GStarSolution {
    double g_star = 0.0;
    double q = 0.0;
    std::vector<double> roots;          // every root found on (0, 1)
    std::vector<std::string> warnings;
};

struct SolverOptions {
    int scan_points = 4096;
    double boundary_rel_tol = 1e-9;
};

/// Root g* in [0, 1) of the self-consistency equation for alpha > 0.
/// Returns g* = 0 when C1 vanishes to tolerance. Throws NoRoot when C1 < 0 or
/// the scan finds no sign change, DegenerateParameters when alpha = 0.
GStarSolution solve_g_star_alpha_pos(const StructuralParams& params, double amplitude,
                                     const SolverOptions& options = {});

struct QStarSolution {
    double q_star = 0.0;
    double g_star = 0.0;
    double p = 0.0;
};

/// alpha = 0: g* = (1 - p)^(1/r) and q* from the linear equation q G = (1 - r) F.
/// Throws InvalidAmplitude when p = c3 A / gamma >= 1.
QStarSolution solve_q_star_alpha_zero(const StructuralParams& params, double amplitude);

/// The two sides of the linear equation for q* (the gothic G and F).
struct LinearQTerms {
    double G = 0.0;
    double F = 0.0;
};
LinearQTerms linear_q_terms(double r, double p);

/// alpha > 0: V = (c3 A / (1 - g*^r) - gamma) / alpha^2.
/// alpha = 0: V = c0 + q gamma c1 / c3 (g_star is ignored).
double wave_velocity(const StructuralParams& params, double amplitude, double g_star, double q);

/// Half profile g(eta) for eta >= 0 on a uniform eta grid.
struct GProfile {
    std::vector<double> eta;
    std::vector<double> g;
    std::vector<double> w;   // 1 - g, accurate where g rounds to 1
    std::vector<double> dg;  // sqrt(F(g))
    double g_star = 0.0;
    double q = 0.0;
    double r = 0.0;
    double tail_tol = 0.0;
};

/// eta(g) = integral_{g*}^{g} ds / sqrt(F(s, q)), tabulated on knots graded
/// geometrically in w = 1 - g and evaluated exactly between knots. Away from
/// the crest the integral is taken in log w, where the integrand tends to the
/// constant 1 / sqrt(r q), so the tail costs a few nodes per decade.
class EtaMap {
public:
    EtaMap(double g_star, double q, double r, double tail_tol);

    double g_star() const noexcept { return g_star_; }
    double g_end() const noexcept { return 1.0 - knots_w_.back(); }
    double eta_end() const noexcept { return knots_eta_.back(); }
    const FPoly& fpoly() const noexcept { return f_; }

    /// F evaluated along the branch (g*, 1) with the best-conditioned formula.
    double F(double g) const { return F_w(1.0 - g); }
    /// Same, parametrised by w = 1 - g (no rounding of w near g = 1).
    double F_w(double w) const;
    double eta_of(double g) const { return eta_of_w(1.0 - g); }
    double eta_of_w(double w) const;
    double g_of(double eta) const { return 1.0 - w_of(eta); }
    double w_of(double eta) const;

private:
    double segment_integral(std::size_t k, double w) const;

    FPoly f_;
    double g_star_;
    double w_star_;
    std::vector<double> knots_w_;    // decreasing
    std::vector<double> knots_eta_;  // increasing
};

/// Requires F(g*, q) = 0, q > 0 and F > 0 on (g*, 1). Throws SingularityError
/// when g* is a double zero of F and QuadratureFailure when F < 0 is met.
/// `n_half` nodes cover [0, eta_max] with eta_max = eta(1 - tail_tol).
GProfile integrate_profile(double g_star, double q, double r, double tail_tol, int n_half);

/// Sampled even profile omega(eta) with omega(0) = 1.
struct Profile {
    std::vector<double> eta;     // symmetric, strictly increasing, contains 0
    std::vector<double> omega;
    std::vector<double> domega;  // d omega / d eta
    double amplitude = 0.0;
    double velocity = 0.0;
    double decay_rate = 0.0;     // fitted exponential rate of omega in eta
    double tail_tol = 0.0;
    double tail_rate = 0.0;      // analytic rate used beyond the grid
    double g_star = 0.0;
    double q = 0.0;
    double p = 0.0;
    bool cusped = false;

    std::size_t center() const noexcept { return eta.size() / 2; }
    double eta_max() const noexcept { return eta.back(); }
    /// Cubic Hermite interpolation on the grid, analytic exponential tail beyond.
    double omega_at(double eta_value) const;
};

/// omega = (1 - g^r) / p mirrored to eta < 0.
Profile profile_to_omega(const GProfile& half, double p, double r, double amplitude, double velocity);

struct ProfileOptions {
    double tail_tol = 1e-10;
    int nodes = 4001;  // odd, symmetric grid
};

/// Full pipeline for a SmoothSoliton WaveSpec.
Profile build_profile(const StructuralParams& params, const WaveSpec& wave,
                      const ProfileOptions& options = {});

/// u(x, t) = A omega(beta (x - V t) / epsilon).
std::vector<double> sample_physical_wave(const Profile& profile, const StructuralParams& params,
                                         std::span<const double> x, double t);

/// Max absolute residual of the traveling-wave equation for omega on the
/// interior grid, derivatives by 4th-order central differences.
double profile_residual(const Profile& profile, const StructuralParams& params,
                        double amplitude, double velocity);

/// Max absolute residual for arbitrary samples on a uniform grid of spacing h.
double profile_residual(std::span<const double> omega, double h, const StructuralParams& params,
                        double amplitude, double velocity);

} // namespace gdp
