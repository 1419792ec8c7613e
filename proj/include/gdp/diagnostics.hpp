#pragma once

#include <span>
#include <string>
#include <vector>

#include "gdp/params.hpp"
#include "gdp/twave.hpp"

namespace gdp {

struct Grid;
struct GridState;
struct Trajectory;

/// E = int u^2 + alpha^2 int (eps u_x)^2 and its production
/// D = eps^-1 (c3 - 2 c2) int (eps u_x)^3, so that dE/dt = D.
struct BalanceRecord {
    double t = 0.0;
    double E = 0.0;
    double D = 0.0;
};

BalanceRecord balance_terms(const GridState& state, const StructuralParams& params);

/// Rectangle rule on the periodic grid.
double mass(const GridState& state);

/// Least-squares rate k of omega ~ exp(-k eta) over the final resolved decade
/// of the eta >= 0 half. Throws InsufficientTail when fewer than two decades
/// are available.
double fit_decay_rate(const Profile& profile);
double fit_decay_rate(std::span<const double> eta, std::span<const double> omega);

struct PeakSample {
    double x = 0.0;
    double value = 0.0;
};

/// Local maxima of u above `threshold`, largest first. Smooth peaks are
/// located by a 3-point quadratic fit; cusped peaks by intersecting one-sided
/// linear fits.
std::vector<PeakSample> find_peaks(std::span<const double> u, const Grid& grid, double threshold,
                                   bool cusped, std::size_t max_peaks = 2);

struct WaveTrack {
    double amplitude_pre = 0.0;
    double amplitude_post = 0.0;
    double velocity_pre = 0.0;
    double velocity_post = 0.0;
    double relative_amplitude_change = 0.0;
    double relative_velocity_change = 0.0;
    double phase_shift = 0.0;  // post position minus free propagation of the pre track
};

struct CollisionWindows {
    double pre_begin = 0.0;
    double pre_end = 0.0;
    double post_begin = 0.0;
    double post_end = 0.0;
};

struct CollisionReport {
    CollisionWindows windows;
    WaveTrack waves[2];  // [0] is the larger wave
    double max_relative_amplitude_change() const;
};

/// Windows where the two crests are further apart than `min_separation`:
/// everything before the first close approach and everything after the last.
/// Without any close approach the trajectory is split in halves.
CollisionWindows default_collision_windows(const Trajectory& traj, double min_separation);

/// Interaction threshold: 10 eps / (r beta).
double interaction_separation(const StructuralParams& params);

CollisionReport measure_collision(const Trajectory& traj, const CollisionWindows& windows);

std::string to_text(const CollisionReport& report);

} // namespace gdp
