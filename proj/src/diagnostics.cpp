#include "gdp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "gdp/errors.hpp"
#include "gdp/pdesim.hpp"

namespace gdp {

BalanceRecord balance_terms(const GridState& state, const StructuralParams& params) {
    const auto& u = state.u;
    const std::size_t n = u.size();
    const double dx = state.grid.dx();
    const double eps = params.epsilon();
    const double a2 = params.alpha() * params.alpha();
    double sum_u2 = 0.0, sum_ux2 = 0.0, sum_ux3 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double eux = eps * (u[(j + 1) % n] - u[(j + n - 1) % n]) / (2.0 * dx);
        sum_u2 += u[j] * u[j];
        sum_ux2 += eux * eux;
        sum_ux3 += eux * eux * eux;
    }
    BalanceRecord rec;
    rec.t = state.t;
    rec.E = (sum_u2 + a2 * sum_ux2) * dx;
    rec.D = (params.c3() - 2.0 * params.c2()) / eps * sum_ux3 * dx;
    return rec;
}

double mass(const GridState& state) {
    return std::accumulate(state.u.begin(), state.u.end(), 0.0) * state.grid.dx();
}

double fit_decay_rate(std::span<const double> eta, std::span<const double> omega) {
    if (eta.size() != omega.size() || eta.size() < 3) throw InsufficientTail("need matching samples");
    // eta >= 0 half
    std::size_t c = 0;
    while (c < eta.size() && eta[c] < 0.0) ++c;
    if (eta.size() - c < 3) throw InsufficientTail("fewer than 3 samples with eta >= 0");
    const double top = omega[c];
    const double floor_value = omega.back();
    if (!(floor_value > 0.0) || top / floor_value < 100.0)
        throw InsufficientTail("profile resolves fewer than two decades of decay");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t j = c; j < eta.size(); ++j) {
        if (omega[j] > 10.0 * floor_value || !(omega[j] > 0.0)) continue;
        const double x = eta[j];
        const double y = std::log(omega[j]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3) throw InsufficientTail("fewer than 3 samples in the final decade");
    const double mm = static_cast<double>(m);
    const double slope = (mm * sxy - sx * sy) / (mm * sxx - sx * sx);
    return -slope;
}

double fit_decay_rate(const Profile& profile) {
    return fit_decay_rate(profile.eta, profile.omega);
}

std::vector<PeakSample> find_peaks(std::span<const double> u, const Grid& grid, double threshold,
                                   bool cusped, std::size_t max_peaks) {
    const std::size_t n = u.size();
    const double dx = grid.dx();
    auto at = [&](long j) { return u[static_cast<std::size_t>(((j % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n))]; };
    std::vector<PeakSample> peaks;
    for (std::size_t j = 0; j < n; ++j) {
        const long jj = static_cast<long>(j);
        const double um = at(jj - 1), u0 = u[j], up = at(jj + 1);
        if (!(u0 > threshold && u0 > um && u0 >= up)) continue;
        PeakSample pk{static_cast<double>(j) * dx, u0};
        if (cusped) {
            // lines through j-3..j-1 and j+1..j+3 (least squares), intersected
            auto fit = [&](long from) {
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                for (long k = from; k < from + 3; ++k) {
                    const double x = static_cast<double>(k - jj) * dx;
                    const double y = at(k);
                    sx += x; sy += y; sxx += x * x; sxy += x * y;
                }
                const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
                return std::pair{slope, (sy - slope * sx) / 3};
            };
            const auto [sl, il] = fit(jj - 3);
            const auto [sr, ir] = fit(jj + 1);
            if (sl > 0.0 && sr < 0.0) {
                const double xo = (ir - il) / (sl - sr);
                if (std::abs(xo) <= dx) pk = {pk.x + xo, il + sl * xo};
            }
        } else {
            const double denom = um - 2.0 * u0 + up;
            if (denom < 0.0) {
                const double off = 0.5 * (um - up) / denom;
                pk = {pk.x + off * dx, u0 - 0.25 * (um - up) * off};
            }
        }
        pk.x = std::fmod(pk.x + grid.length, grid.length);
        peaks.push_back(pk);
    }
    std::sort(peaks.begin(), peaks.end(), [](const PeakSample& a, const PeakSample& b) { return a.value > b.value; });
    if (peaks.size() > max_peaks) peaks.resize(max_peaks);
    return peaks;
}

double interaction_separation(const StructuralParams& params) {
    const auto d = derive_constants(params);
    return 10.0 * params.epsilon() / (d.r * d.beta);
}

double CollisionReport::max_relative_amplitude_change() const {
    return std::max(std::abs(waves[0].relative_amplitude_change), std::abs(waves[1].relative_amplitude_change));
}

namespace {

double separation(const Snapshot& s, const Grid& grid) {
    if (s.diag.peaks.size() < 2) return 0.0;
    return std::abs(grid.wrap(s.diag.peaks[0].x - s.diag.peaks[1].x));
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double mean_amplitude = 0.0;
};

// Linear regression of the unwrapped crest position of peak `rank` over the window.
LineFit fit_track(const Trajectory& traj, double t0, double t1, int rank) {
    const Grid& grid = traj.grid;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, amp = 0;
    std::size_t m = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (const auto& s : traj.snapshots) {
        if (s.t < t0 || s.t > t1) continue;
        if (s.diag.peaks.size() < 2) {
            std::ostringstream os;
            os << "only " << s.diag.peaks.size() << " crest(s) at t = " << s.t
               << " outside the interaction window";
            throw TrackingLost(os.str());
        }
        double x = s.diag.peaks[static_cast<std::size_t>(rank)].x;
        if (have_prev) x = prev + grid.wrap(x - prev);
        prev = x;
        have_prev = true;
        sx += s.t; sy += x; sxx += s.t * s.t; sxy += s.t * x;
        amp += s.diag.peaks[static_cast<std::size_t>(rank)].value;
        ++m;
    }
    if (m < 2) throw TrackingLost("window holds fewer than two snapshots");
    const double mm = static_cast<double>(m);
    LineFit f;
    f.slope = (mm * sxy - sx * sy) / (mm * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / mm;
    f.mean_amplitude = amp / mm;
    return f;
}

} // namespace

CollisionWindows default_collision_windows(const Trajectory& traj, double min_separation) {
    const auto& snaps = traj.snapshots;
    if (snaps.size() < 4) throw TrackingLost("trajectory too short");
    std::size_t first = snaps.size(), last = 0;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        if (separation(snaps[i], traj.grid) < min_separation) {
            first = std::min(first, i);
            last = i;
        }
    }
    CollisionWindows w;
    if (first == snaps.size()) {
        const std::size_t mid = snaps.size() / 2;
        w = {snaps.front().t, snaps[mid - 1].t, snaps[mid].t, snaps.back().t};
        return w;
    }
    if (first < 2 || last + 2 >= snaps.size())
        throw TrackingLost("no separated crests before or after the interaction");
    w.pre_begin = snaps.front().t;
    w.pre_end = snaps[first - 1].t;
    w.post_begin = snaps[last + 1].t;
    w.post_end = snaps.back().t;
    return w;
}

CollisionReport measure_collision(const Trajectory& traj, const CollisionWindows& windows) {
    if (!(windows.pre_begin < windows.pre_end && windows.pre_end < windows.post_begin &&
          windows.post_begin < windows.post_end))
        throw ConfigError("collision windows must be ordered and disjoint");
    CollisionReport rep;
    rep.windows = windows;
    const double L = traj.grid.length;
    const double t_ref = 0.5 * (windows.post_begin + windows.post_end);
    for (int rank = 0; rank < 2; ++rank) {
        const auto pre = fit_track(traj, windows.pre_begin, windows.pre_end, rank);
        const auto post = fit_track(traj, windows.post_begin, windows.post_end, rank);
        auto& w = rep.waves[rank];
        w.amplitude_pre = pre.mean_amplitude;
        w.amplitude_post = post.mean_amplitude;
        w.velocity_pre = pre.slope;
        w.velocity_post = post.slope;
        w.relative_amplitude_change = (post.mean_amplitude - pre.mean_amplitude) / pre.mean_amplitude;
        w.relative_velocity_change = (post.slope - pre.slope) / pre.slope;
        const double predicted = pre.intercept + pre.slope * t_ref;
        const double actual = post.intercept + post.slope * t_ref;
        double shift = std::fmod(actual - predicted, L);
        if (shift >= 0.5 * L) shift -= L;
        if (shift < -0.5 * L) shift += L;
        w.phase_shift = shift;
    }
    return rep;
}

std::string to_text(const CollisionReport& report) {
    std::ostringstream os;
    os << std::setprecision(6);
    os << "pre window  [" << report.windows.pre_begin << ", " << report.windows.pre_end << "]\n";
    os << "post window [" << report.windows.post_begin << ", " << report.windows.post_end << "]\n";
    for (int i = 0; i < 2; ++i) {
        const auto& w = report.waves[i];
        os << "wave " << i + 1 << ": amplitude " << w.amplitude_pre << " -> " << w.amplitude_post
           << " (" << 100.0 * w.relative_amplitude_change << "%), velocity " << w.velocity_pre << " -> "
           << w.velocity_post << " (" << 100.0 * w.relative_velocity_change << "%), phase shift "
           << w.phase_shift << "\n";
    }
    return os.str();
}

} // namespace gdp
