#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gdp/diagnostics.hpp"
#include "gdp/params.hpp"
#include "gdp/twave.hpp"

namespace gdp {

/// Uniform periodic grid x_j = j L / N, j = 0..N-1.
struct Grid {
    double length = 0.0;
    int nodes = 0;

    Grid(double length, int nodes);

    double dx() const noexcept { return length / nodes; }
    double x(int j) const noexcept { return j * dx(); }
    std::vector<double> coordinates() const;
    /// x wrapped into [-L/2, L/2).
    double wrap(double x) const noexcept;
};

struct GridState {
    Grid grid;
    double t = 0.0;
    std::vector<double> u;
};

/// Solves (I - alpha^2 eps^2 D_xx) y = rhs with the periodic 3-point D_xx.
/// The cyclic tridiagonal system is factored once and solved by a rank-one
/// (Sherman-Morrison) correction of the Thomas algorithm.
class HelmholtzSolver {
public:
    HelmholtzSolver(double alpha, double epsilon, const Grid& grid);

    void solve(std::span<const double> rhs, std::span<double> out) const;
    bool is_identity() const noexcept { return k_ == 0.0; }

private:
    void thomas(std::span<const double> rhs, std::span<double> out) const;

    int n_;
    double k_;       // alpha^2 eps^2 / dx^2
    double off_;     // off-diagonal entry
    double corner_;  // Sherman-Morrison shift
    std::vector<double> cprime_;
    std::vector<double> inv_denom_;
    std::vector<double> z_;
    double z_factor_ = 0.0;
};

std::vector<double> helmholtz_solve(std::span<const double> rhs, double alpha, double epsilon,
                                    const Grid& grid);

/// du/dt of the divergent form
///   (1 - a^2 e^2 d_xx) u_t = -d_x {c0 u + c1 u^2 - (c2 - c3)(e u_x)^2} - e^2 d_xxx (g u - c3 u^2 / 2)
/// with 2nd-order central differences applied to pointwise-assembled fluxes.
class SemiDiscreteOperator {
public:
    SemiDiscreteOperator(const StructuralParams& params, const Grid& grid);

    void apply(std::span<const double> u, std::span<double> dudt);
    const StructuralParams& params() const noexcept { return params_; }
    const Grid& grid() const noexcept { return grid_; }

private:
    StructuralParams params_;
    Grid grid_;
    HelmholtzSolver helmholtz_;
    std::vector<double> padded_;
    std::vector<double> flux_;
    std::vector<double> rhs_;
};

std::vector<double> semidiscrete_rhs(const GridState& state, const StructuralParams& params);

/// Classical RK4 on the semidiscrete system. `filter_strength` > 0 applies a
/// mass-conserving 4th-difference filter after each step.
class Rk4Stepper {
public:
    Rk4Stepper(const StructuralParams& params, const Grid& grid, double filter_strength = 0.0);

    /// Throws NonFinite (state left at the last finite level) when any value overflows.
    void step(GridState& state, double dt);

private:
    SemiDiscreteOperator op_;
    double filter_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

GridState step(const GridState& state, const StructuralParams& params, double dt);

/// Explicit step limit: cfl * min(dx / v_max, 2.5 / rho) with rho a bound on
/// the spectral radius of the linearised semidiscrete operator.
struct StepLimits {
    double dt = 0.0;
    double v_max = 0.0;
    double spectral_radius = 0.0;
};

StepLimits stable_time_step(const StructuralParams& params, const Grid& grid,
                            std::span<const double> u, double cfl, double wave_speed);

struct WaveSeed {
    double amplitude = 0.0;
    double x0 = 0.0;
    std::string profile_csv;  // optional: sampled omega(eta) instead of the built profile
};

struct SimConfig {
    StructuralParams params;
    Grid grid;
    double t_end = 1.0;
    double cfl = 0.5;
    double snapshot_interval = 0.1;
    std::vector<WaveSeed> waves;
    double filter_strength = 0.0;
    double seam_tol = 1e-8;
    double peak_threshold = 0.0;  // 0: a quarter of the smallest seed amplitude
    ProfileOptions profile;
};

/// One seeded wave after classification.
struct SeededWave {
    WaveSpec spec;
    Profile profile;
    double x0 = 0.0;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double E = 0.0;
    double D = 0.0;
    std::vector<PeakSample> peaks;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;
    DiagnosticsRecord diag;
};

struct Trajectory {
    Grid grid{1.0, 16};
    std::vector<Snapshot> snapshots;
    std::vector<SeededWave> waves;
    double dt = 0.0;
    long steps = 0;
    bool cusped = false;
};

/// Builds u(x, 0) from the seeds. Throws ConfigError when a tail exceeds
/// `seam_tol` at the periodic seam or two waves overlap above it.
GridState initial_state(const SimConfig& config, std::vector<SeededWave>* seeded = nullptr);

DiagnosticsRecord record_diagnostics(const GridState& state, const StructuralParams& params,
                                     double peak_threshold, bool cusped);

using SnapshotSink = std::function<void(const Snapshot&)>;

/// Steps to t_end with a fixed dt (shrunk so that t_end is hit exactly) and
/// records a snapshot every `snapshot_interval`. Snapshots are also handed to
/// `sink` as they are produced.
Trajectory run_simulation(const SimConfig& config, const SnapshotSink& sink = {});

} // namespace gdp
