#include "gdp/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gdp/errors.hpp"
#include "gdp/io.hpp"
#include "gdp/peakon.hpp"

namespace gdp {

Grid::Grid(double length_, int nodes_) : length(length_), nodes(nodes_) {
    if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("grid length must be > 0");
    if (nodes < 16) throw ConfigError("grid needs at least 16 nodes");
    if (nodes % 2 != 0) throw ConfigError("grid node count must be even");
}

std::vector<double> Grid::coordinates() const {
    std::vector<double> x(static_cast<std::size_t>(nodes));
    for (int j = 0; j < nodes; ++j) x[static_cast<std::size_t>(j)] = this->x(j);
    return x;
}

double Grid::wrap(double x) const noexcept {
    double w = std::fmod(x + 0.5 * length, length);
    if (w < 0.0) w += length;
    return w - 0.5 * length;
}

// ---------------------------------------------------------------------------
// Helmholtz inversion

HelmholtzSolver::HelmholtzSolver(double alpha, double epsilon, const Grid& grid)
    : n_(grid.nodes), k_(alpha * alpha * epsilon * epsilon / (grid.dx() * grid.dx())) {
    if (!(k_ >= 0.0)) throw DomainError("alpha^2 eps^2 must be >= 0");
    if (k_ == 0.0) return;
    const double diag = 1.0 + 2.0 * k_;
    off_ = -k_;
    corner_ = -diag;
    const std::size_t n = static_cast<std::size_t>(n_);
    cprime_.resize(n);
    inv_denom_.resize(n);
    // modified diagonal for the rank-one split of the periodic corners
    auto bb = [&](std::size_t i) {
        if (i == 0) return diag - corner_;
        if (i == n - 1) return diag - off_ * off_ / corner_;
        return diag;
    };
    double denom = bb(0);
    if (denom == 0.0) throw DomainError("singular Helmholtz system");
    inv_denom_[0] = 1.0 / denom;
    cprime_[0] = off_ * inv_denom_[0];
    for (std::size_t i = 1; i < n; ++i) {
        denom = bb(i) - off_ * cprime_[i - 1];
        if (denom == 0.0) throw DomainError("singular Helmholtz system");
        inv_denom_[i] = 1.0 / denom;
        cprime_[i] = off_ * inv_denom_[i];
    }
    std::vector<double> u(n, 0.0);
    u[0] = corner_;
    u[n - 1] = off_;
    z_.resize(n);
    thomas(u, z_);
    z_factor_ = 1.0 / (1.0 + z_[0] + off_ * z_[n - 1] / corner_);
}

void HelmholtzSolver::thomas(std::span<const double> rhs, std::span<double> out) const {
    const std::size_t n = static_cast<std::size_t>(n_);
    out[0] = rhs[0] * inv_denom_[0];
    for (std::size_t i = 1; i < n; ++i) out[i] = (rhs[i] - off_ * out[i - 1]) * inv_denom_[i];
    for (std::size_t i = n - 1; i-- > 0;) out[i] -= cprime_[i] * out[i + 1];
}

void HelmholtzSolver::solve(std::span<const double> rhs, std::span<double> out) const {
    const std::size_t n = static_cast<std::size_t>(n_);
    if (rhs.size() != n || out.size() != n) throw DomainError("Helmholtz size mismatch");
    if (k_ == 0.0) {
        std::copy(rhs.begin(), rhs.end(), out.begin());
        return;
    }
    thomas(rhs, out);
    const double fact = (out[0] + off_ * out[n - 1] / corner_) * z_factor_;
    for (std::size_t i = 0; i < n; ++i) out[i] -= fact * z_[i];
}

std::vector<double> helmholtz_solve(std::span<const double> rhs, double alpha, double epsilon, const Grid& grid) {
    const HelmholtzSolver solver(alpha, epsilon, grid);
    std::vector<double> out(rhs.size());
    solver.solve(rhs, out);
    return out;
}

// ---------------------------------------------------------------------------
// Semidiscrete operator

SemiDiscreteOperator::SemiDiscreteOperator(const StructuralParams& params, const Grid& grid)
    : params_(params),
      grid_(grid),
      helmholtz_(params.alpha(), params.epsilon(), grid),
      padded_(static_cast<std::size_t>(grid.nodes) + 4),
      flux_(static_cast<std::size_t>(grid.nodes) + 2),
      rhs_(static_cast<std::size_t>(grid.nodes)) {}

void SemiDiscreteOperator::apply(std::span<const double> u, std::span<double> dudt) {
    const std::size_t n = static_cast<std::size_t>(grid_.nodes);
    const double dx = grid_.dx();
    const double inv2dx = 0.5 / dx;
    const double invdx2 = 1.0 / (dx * dx);
    const double eps2 = params_.epsilon() * params_.epsilon();
    const double c0 = params_.c0(), c1 = params_.c1();
    const double c23 = params_.c2() - params_.c3();
    const double gamma = params_.gamma(), half_c3 = 0.5 * params_.c3();

    // padded_[i + 2] = u[i], two ghost nodes on each side
    double* P = padded_.data();
    std::copy(u.begin(), u.end(), P + 2);
    P[0] = u[n - 2];
    P[1] = u[n - 1];
    P[n + 2] = u[0];
    P[n + 3] = u[1];

    // total flux at nodes j = -1..N, stored at flux_[j + 1]
    for (std::size_t i = 0; i < n + 2; ++i) {
        const double um = P[i], u0 = P[i + 1], up = P[i + 2];
        const double ux = (up - um) * inv2dx;
        const double hm = gamma * um - half_c3 * um * um;
        const double h0 = gamma * u0 - half_c3 * u0 * u0;
        const double hp = gamma * up - half_c3 * up * up;
        flux_[i] = c0 * u0 + c1 * u0 * u0 - c23 * eps2 * ux * ux + eps2 * (hp - 2.0 * h0 + hm) * invdx2;
    }
    for (std::size_t j = 0; j < n; ++j) rhs_[j] = -(flux_[j + 2] - flux_[j]) * inv2dx;
    helmholtz_.solve(rhs_, dudt);
}

std::vector<double> semidiscrete_rhs(const GridState& state, const StructuralParams& params) {
    SemiDiscreteOperator op(params, state.grid);
    std::vector<double> out(state.u.size());
    op.apply(state.u, out);
    return out;
}

// ---------------------------------------------------------------------------
// Time stepping

Rk4Stepper::Rk4Stepper(const StructuralParams& params, const Grid& grid, double filter_strength)
    : op_(params, grid), filter_(filter_strength) {
    const std::size_t n = static_cast<std::size_t>(grid.nodes);
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
}

void Rk4Stepper::step(GridState& state, double dt) {
    if (!(dt > 0.0)) throw DomainError("time step must be > 0");
    auto& u = state.u;
    const std::size_t n = u.size();
    op_.apply(u, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k1_[i];
    op_.apply(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k2_[i];
    op_.apply(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + dt * k3_[i];
    op_.apply(tmp_, k4_);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        tmp_[i] = u[i] + w * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        if (!std::isfinite(tmp_[i])) {
            double umax = 0.0;
            for (double v : u) umax = std::max(umax, std::abs(v));
            std::ostringstream os;
            os << "non-finite value at node " << i << " stepping from t = " << state.t << " with dt = " << dt
               << " (max|u| before the step = " << umax << ")";
            throw NonFinite(os.str());
        }
    }
    if (filter_ > 0.0) {
        const double s = filter_ / 16.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d4 = tmp_[(i + n - 2) % n] - 4.0 * tmp_[(i + n - 1) % n] + 6.0 * tmp_[i] -
                              4.0 * tmp_[(i + 1) % n] + tmp_[(i + 2) % n];
            u[i] = tmp_[i] - s * d4;
        }
    } else {
        u.swap(tmp_);
    }
    state.t += dt;
}

GridState step(const GridState& state, const StructuralParams& params, double dt) {
    Rk4Stepper stepper(params, state.grid);
    GridState next = state;
    stepper.step(next, dt);
    return next;
}

StepLimits stable_time_step(const StructuralParams& params, const Grid& grid, std::span<const double> u,
                            double cfl, double wave_speed) {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
    const std::size_t n = u.size();
    const double dx = grid.dx();
    double umax = 0.0, uxmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        umax = std::max(umax, std::abs(u[i]));
        uxmax = std::max(uxmax, std::abs(u[(i + 1) % n] - u[(i + n - 1) % n]) / (2.0 * dx));
    }
    const double headroom = 1.25;
    umax *= headroom;
    uxmax *= headroom;
    const double eps2 = params.epsilon() * params.epsilon();
    const double k = params.alpha() * params.alpha() * eps2;

    StepLimits lim;
    lim.v_max = std::max(std::abs(wave_speed), std::abs(params.c0()) + 2.0 * params.c1() * umax);
    lim.v_max = std::max(lim.v_max, 1e-12);
    for (int m = 1; m <= grid.nodes / 2; ++m) {
        const double th = 2.0 * std::numbers::pi * m / grid.nodes;
        const double s1 = std::abs(std::sin(th)) / dx;
        const double s2 = 4.0 * std::sin(0.5 * th) * std::sin(0.5 * th) / (dx * dx);
        const double sym = (std::abs(params.c0()) + 2.0 * params.c1() * umax) * s1 +
                           eps2 * (params.gamma() + params.c3() * umax) * s1 * s2 +
                           2.0 * std::abs(params.c2() - params.c3()) * eps2 * uxmax * s1 * s1;
        lim.spectral_radius = std::max(lim.spectral_radius, sym / (1.0 + k * s2));
    }
    lim.dt = cfl * std::min(dx / lim.v_max, 2.5 / std::max(lim.spectral_radius, 1e-300));
    return lim;
}

// ---------------------------------------------------------------------------
// Initial data and driver

namespace {

Profile seed_profile(const SimConfig& config, const WaveSeed& seed, WaveSpec& spec) {
    spec = classify_wave(config.params, seed.amplitude);
    if (!seed.profile_csv.empty()) {
        if (spec.regime.kind == RegimeKind::NoWave)
            throw ConfigError("no solitary wave exists for amplitude " + std::to_string(seed.amplitude));
        Profile p = read_profile_csv(seed.profile_csv);
        p.amplitude = seed.amplitude;
        p.velocity = spec.velocity;
        p.q = spec.q;
        p.g_star = spec.g_star;
        p.cusped = spec.regime.kind == RegimeKind::Peakon;
        return p;
    }
    switch (spec.regime.kind) {
    case RegimeKind::SmoothSoliton:
        return build_profile(config.params, spec, config.profile);
    case RegimeKind::Peakon: {
        const auto pk = peakon_amplitude(config.params, seed.amplitude);
        const double eta_max = std::log(1.0 / config.profile.tail_tol) / pk.r;
        return peakon_sampled_profile(pk, eta_max, config.profile.nodes);
    }
    default:
        throw ConfigError("amplitude " + std::to_string(seed.amplitude) + " gives regime " +
                          to_string(spec.regime) + "; only solitons and peakons can be seeded");
    }
}

} // namespace

GridState initial_state(const SimConfig& config, std::vector<SeededWave>* seeded) {
    if (config.waves.empty()) throw ConfigError("at least one wave is required");
    const Grid& grid = config.grid;
    const std::size_t n = static_cast<std::size_t>(grid.nodes);
    const double beta = derive_constants(config.params).beta;
    const double eps = config.params.epsilon();

    GridState state{grid, 0.0, std::vector<double>(n, 0.0)};
    std::vector<std::vector<double>> parts;
    std::vector<SeededWave> waves;
    for (const auto& seed : config.waves) {
        SeededWave w;
        w.profile = seed_profile(config, seed, w.spec);
        w.x0 = seed.x0;
        const double seam = seed.amplitude * w.profile.omega_at(beta * 0.5 * grid.length / eps);
        if (seam > config.seam_tol) {
            std::ostringstream os;
            os << "wave of amplitude " << seed.amplitude << " has value " << seam
               << " at the periodic seam (tolerance " << config.seam_tol << "); enlarge the domain";
            throw ConfigError(os.str());
        }
        std::vector<double> u(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double d = grid.wrap(grid.x(static_cast<int>(j)) - seed.x0);
            u[j] = seed.amplitude * w.profile.omega_at(beta * d / eps);
        }
        parts.push_back(std::move(u));
        waves.push_back(std::move(w));
    }
    for (std::size_t a = 0; a < parts.size(); ++a) {
        for (std::size_t b = a + 1; b < parts.size(); ++b) {
            double overlap = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                overlap = std::max(overlap, std::min(std::abs(parts[a][j]), std::abs(parts[b][j])));
            if (overlap > config.seam_tol) {
                std::ostringstream os;
                os << "waves " << a << " and " << b << " overlap: both exceed " << overlap
                   << " somewhere (tolerance " << config.seam_tol << ")";
                throw ConfigError(os.str());
            }
        }
    }
    for (const auto& part : parts)
        for (std::size_t j = 0; j < n; ++j) state.u[j] += part[j];
    if (seeded) *seeded = std::move(waves);
    return state;
}

DiagnosticsRecord record_diagnostics(const GridState& state, const StructuralParams& params,
                                     double peak_threshold, bool cusped) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.mass = mass(state);
    const auto bal = balance_terms(state, params);
    rec.E = bal.E;
    rec.D = bal.D;
    rec.peaks = find_peaks(state.u, state.grid, peak_threshold, cusped);
    return rec;
}

Trajectory run_simulation(const SimConfig& config, const SnapshotSink& sink) {
    if (!(config.t_end > 0.0)) throw ConfigError("t_end must be > 0");
    if (!(config.snapshot_interval > 0.0)) throw ConfigError("snapshot_interval must be > 0");

    Trajectory traj;
    traj.grid = config.grid;
    GridState state = initial_state(config, &traj.waves);

    double wave_speed = 0.0;
    double min_amp = std::numeric_limits<double>::infinity();
    for (const auto& w : traj.waves) {
        wave_speed = std::max(wave_speed, std::abs(w.spec.velocity));
        min_amp = std::min(min_amp, w.spec.amplitude);
        traj.cusped = traj.cusped || w.profile.cusped;
    }
    const double threshold = config.peak_threshold > 0.0 ? config.peak_threshold : 0.25 * min_amp;

    const auto limits = stable_time_step(config.params, config.grid, state.u, config.cfl, wave_speed);
    // When t_end is a whole number of snapshot intervals, dt divides the
    // interval so that snapshots are evenly spaced and the last one is t_end.
    long n_steps = 0;
    long stride = 0;
    const double intervals = config.t_end / config.snapshot_interval;
    if (std::abs(intervals - std::round(intervals)) <= 1e-9 * intervals) {
        stride = std::max(1L, static_cast<long>(std::ceil(config.snapshot_interval / limits.dt)));
        n_steps = stride * std::max(1L, std::lround(intervals));
    } else {
        n_steps = std::max(1L, static_cast<long>(std::ceil(config.t_end / limits.dt)));
        stride = std::max(1L, std::lround(config.snapshot_interval * static_cast<double>(n_steps) / config.t_end));
    }
    traj.dt = config.t_end / static_cast<double>(n_steps);

    auto emit = [&] {
        Snapshot s;
        s.t = state.t;
        s.u = state.u;
        s.diag = record_diagnostics(state, config.params, threshold, traj.cusped);
        if (sink) sink(s);
        traj.snapshots.push_back(std::move(s));
    };

    Rk4Stepper stepper(config.params, config.grid, config.filter_strength);
    emit();
    for (long s = 1; s <= n_steps; ++s) {
        stepper.step(state, traj.dt);
        state.t = static_cast<double>(s) * traj.dt;
        traj.steps = s;
        if (s % stride == 0 || s == n_steps) emit();
    }
    return traj;
}

} // namespace gdp
