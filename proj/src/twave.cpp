#include "gdp/twave.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "gdp/diagnostics.hpp"
#include "gdp/errors.hpp"
#include "gdp/parallel.hpp"

namespace gdp {

namespace {

constexpr int kSeriesTerms = 96;
constexpr double kQuadTol = 1e-12;
constexpr unsigned kQuadDepth = 12;

double one_minus_pow(double g, double r) {
    if (g <= 0.0) return 1.0;
    return -std::expm1(r * std::log(g));
}

std::string str(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Bracket refinement to full double precision.
template <class Fn>
double refine_root(Fn&& f, double a, double b, double fa, double fb) {
    std::uintmax_t iters = 200;
    auto tol = [](double x, double y) {
        return std::abs(x - y) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(std::abs(x), std::abs(y)) ||
               std::abs(x - y) < 1e-300;
    };
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    const double flo = f(lo);
    const double fhi = f(hi);
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

template <class Fn>
double gk_integrate(Fn&& f, double a, double b) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, kQuadDepth, kQuadTol, &err);
}

} // namespace

// ---------------------------------------------------------------------------
// FPoly

FPoly::FPoly(double r, double q) : r_(r), q_(q) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("r must lie in (0, 1)");
    c_ = r * (r - q) / ((1.0 - r) * (2.0 - r));
    a_[0] = 1.0;
    a_[1] = -2.0 * (2.0 - q) / (2.0 - r);
    a_[2] = (1.0 - q) / (1.0 - r);
    e_[0] = 2.0;
    e_[1] = 2.0 - r;
    e_[2] = 2.0 - 2.0 * r;
}

double FPoly::value(double g) const {
    if (!(g > 0.0)) throw DomainError("F(g, q) needs g > 0, got " + str(g));
    return a_[0] * g * g + a_[1] * std::pow(g, e_[1]) + a_[2] * std::pow(g, e_[2]) - c_;
}

double FPoly::slope(double g) const {
    if (!(g > 0.0)) throw DomainError("F_g(g, q) needs g > 0, got " + str(g));
    const double gr = std::pow(g, r_);
    return 2.0 * std::pow(g, 1.0 - 2.0 * r_) * one_minus_pow(g, r_) * ((1.0 - q_) - gr);
}

double FPoly::value_near_one(double w) const {
    if (w > 0.25) return value(1.0 - w);
    if (w <= 0.0) return 0.0;
    // F(1 - w) = sum_{k >= 2} f_k w^k, f_k = (-1)^k sum_i a_i binom(e_i, k); f_2 = r q.
    double binom[3] = {1.0, 1.0, 1.0};
    for (int i = 0; i < 3; ++i) binom[i] = e_[i] * (e_[i] - 1.0) / 2.0;
    double sum = r_ * q_ * w * w;
    double wk = w * w;
    for (int k = 3; k < kSeriesTerms; ++k) {
        double fk = 0.0;
        for (int i = 0; i < 3; ++i) {
            binom[i] *= (e_[i] - (k - 1)) / k;
            fk += a_[i] * binom[i];
        }
        wk *= -w;
        const double term = fk * wk;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum) && k > 6) break;
    }
    return sum;
}

double FPoly::increment(double g0, double d) const {
    if (!(g0 > 0.0)) throw DomainError("increment needs g0 > 0");
    const double l = std::log1p(d / g0);
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += a_[i] * std::pow(g0, e_[i]) * std::expm1(e_[i] * l);
    return sum;
}

// ---------------------------------------------------------------------------
// Self-consistency equation, alpha > 0

SelfConsistencyPoly SelfConsistencyPoly::from(const StructuralParams& params, double amplitude) {
    if (!(params.alpha() > 0.0)) throw DegenerateParameters("self-consistency equation needs alpha > 0");
    const auto d = derive_constants(params);
    SelfConsistencyPoly s;
    const double r = d.r;
    s.r = r;
    s.theta = *d.theta;
    s.xi = d.gamma_alpha / (params.alpha() * params.alpha() * params.c1() * amplitude);
    s.rho1 = (1.0 - r) * (2.0 - r + 2.0 * s.xi);
    s.rho2 = 2.0 * (1.0 - r) * (2.0 - s.theta) + (4.0 - 3.0 * r) * s.xi;
    s.rho3 = (2.0 - r) * (1.0 - s.theta + s.xi);
    s.rho4 = r * s.xi;
    s.C1 = r * (r - s.theta + s.xi);
    return s;
}

double SelfConsistencyPoly::value(double g) const {
    if (g <= 0.0) return -C1;
    return rho1 * g * g - rho2 * std::pow(g, 2.0 - r) + rho3 * std::pow(g, 2.0 - 2.0 * r) +
           rho4 * std::pow(g, r) - C1;
}

double SelfConsistencyPoly::q_of(double g) const {
    return theta - xi * one_minus_pow(g, r);
}

GStarSolution solve_g_star_alpha_pos(const StructuralParams& params, double amplitude,
                                     const SolverOptions& options) {
    if (!(params.alpha() > 0.0)) throw DegenerateParameters("solve_g_star_alpha_pos needs alpha > 0");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw InvalidAmplitude("amplitude must be > 0");

    const auto poly = SelfConsistencyPoly::from(params, amplitude);
    GStarSolution out;
    if (peakon_condition_holds(params, amplitude, options.boundary_rel_tol)) {
        out.g_star = 0.0;
        out.q = poly.q_of(0.0);
        out.roots = {0.0};
        return out;
    }
    if (poly.C1 < 0.0) throw NoRoot("C1 = " + str(poly.C1) + " < 0: no root g* in [0, 1)");

    const double r = poly.r;
    const double norm = (1.0 - r) * (2.0 - r);
    // Near g = 1 both the trivial double root and the coupling to q(g) make the
    // closed form cancel; the series about g = 1 keeps the sign reliable there.
    auto G = [&](double g) {
        if (g > 0.75) return norm * FPoly(r, poly.q_of(g)).value_near_one(1.0 - g);
        return poly.value(g);
    };

    const int n = std::max(options.scan_points, 16);
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) values[i] = G(static_cast<double>(i) / n);

    for (int i = 0; i + 1 < n; ++i) {
        const double a = static_cast<double>(i) / n;
        const double b = static_cast<double>(i + 1) / n;
        if (values[i] == 0.0 && i > 0) {
            out.roots.push_back(a);
        } else if ((values[i] < 0.0) != (values[i + 1] < 0.0) && values[i + 1] != 0.0) {
            out.roots.push_back(refine_root(G, a, b, values[i], values[i + 1]));
        }
    }
    if (out.roots.empty()) throw NoRoot("no sign change of F(g, q(g)) on (0, 1)");

    auto chosen = out.roots.end();
    for (auto it = out.roots.begin(); it != out.roots.end(); ++it) {
        if (poly.q_of(*it) > 0.0) {
            chosen = it;
            break;
        }
    }
    if (chosen == out.roots.end()) chosen = out.roots.begin();
    out.g_star = *chosen;
    out.q = poly.q_of(out.g_star);
    for (double root : out.roots) {
        if (root != out.g_star)
            out.warnings.push_back("additional root g* = " + str(root) + " with q = " +
                                   str(poly.q_of(root)) + " ignored");
    }
    const double residual = std::abs(G(out.g_star)) / norm;
    if (residual > 1e-13)
        out.warnings.push_back("|F(g*, q(g*))| = " + str(residual) + " exceeds 1e-13");
    return out;
}

// ---------------------------------------------------------------------------
// alpha = 0

LinearQTerms linear_q_terms(double r, double p) {
    // g*^(2(r-1)) - 1 with g* = (1 - p)^(1/r), kept accurate for small p.
    const double e = std::expm1(2.0 * (r - 1.0) / r * std::log1p(-p));
    LinearQTerms t;
    t.G = 2.0 * p * (1.0 - r) / r - e;
    t.F = -r / (1.0 - r) * e + 2.0 * p + p * p * (2.0 - r) / r;
    return t;
}

QStarSolution solve_q_star_alpha_zero(const StructuralParams& params, double amplitude) {
    if (params.alpha() != 0.0) throw DegenerateParameters("solve_q_star_alpha_zero needs alpha = 0");
    if (!(params.gamma() > 0.0)) throw DegenerateParameters("alpha = 0 needs gamma > 0");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw InvalidAmplitude("amplitude must be > 0");
    const double r = derive_constants(params).r;
    QStarSolution s;
    s.p = params.c3() * amplitude / params.gamma();
    if (s.p >= 1.0)
        throw InvalidAmplitude("p = c3 A / gamma = " + str(s.p) + " >= 1 (peakon or no wave)");
    s.g_star = std::exp(std::log1p(-s.p) / r);
    const auto t = linear_q_terms(r, s.p);
    s.q_star = (1.0 - r) * t.F / t.G;
    if (!(s.q_star > 0.0) || !std::isfinite(s.q_star))
        throw InvalidAmplitude("q* not resolvable in double precision at p = " + str(s.p));
    return s;
}

double wave_velocity(const StructuralParams& params, double amplitude, double g_star, double q) {
    if (params.alpha() > 0.0) {
        if (!(g_star < 1.0)) throw DegenerateParameters("g* = 1 gives an infinite velocity");
        const double a2 = params.alpha() * params.alpha();
        return (params.c3() * amplitude / one_minus_pow(g_star, derive_constants(params).r) -
                params.gamma()) / a2;
    }
    return params.c0() + q * params.gamma() * params.c1() / params.c3();
}

// ---------------------------------------------------------------------------
// eta(g) quadrature

EtaMap::EtaMap(double g_star, double q, double r, double tail_tol)
    : f_(r, q), g_star_(g_star), w_star_(1.0 - g_star) {
    if (!(g_star > 0.0 && g_star < 1.0)) throw DomainError("g* must lie in (0, 1)");
    if (!(q > 0.0)) throw DomainError("profile quadrature needs q > 0");
    if (!(tail_tol > 0.0 && tail_tol < 0.5 * w_star_)) throw DomainError("tail_tol must lie in (0, (1-g*)/2)");

    double scale = 0.0;
    for (double e : {2.0, 2.0 - r, 2.0 - 2.0 * r}) scale += e * std::pow(g_star, e - 1.0);
    if (std::abs(f_.value(g_star)) > 1e-9 * scale)
        throw DomainError("F(g*, q) = " + str(f_.value(g_star)) + " is not zero");
    const double slope = f_.slope(g_star);
    if (std::abs(slope) <= 1e-9 * scale)
        throw SingularityError("g* is a double zero of F (algebraically decaying profile)");
    if (slope < 0.0) throw QuadratureFailure("F < 0 just above g*");

    const double decades = std::log10(w_star_ / tail_tol);
    const int k_max = std::max(16, static_cast<int>(std::ceil(4.0 * decades)));
    knots_w_.resize(k_max + 1);
    knots_eta_.assign(k_max + 1, 0.0);
    knots_w_[0] = w_star_;
    for (int k = 1; k <= k_max; ++k)
        knots_w_[k] = w_star_ * std::pow(tail_tol / w_star_, static_cast<double>(k) / k_max);
    knots_w_[k_max] = tail_tol;
    for (int k = 1; k <= k_max; ++k) {
        if (!(F_w(knots_w_[k]) > 0.0))
            throw QuadratureFailure("F <= 0 inside (g*, 1) at g = " + str(1.0 - knots_w_[k]));
    }
    for (int k = 0; k < k_max; ++k)
        knots_eta_[k + 1] = knots_eta_[k] + segment_integral(k, knots_w_[k + 1]);
}

double EtaMap::F_w(double w) const {
    const double d = w_star_ - w;
    if (d < w) return f_.increment(g_star_, d);
    return f_.value_near_one(w);
}

double EtaMap::segment_integral(std::size_t k, double w) const {
    const double a = knots_w_[k];
    if (w >= a) return 0.0;
    if (k == 0) {
        // s = g* + (g - g*) tau^2 removes the inverse square-root endpoint singularity.
        const double delta = w_star_ - w;
        auto integrand = [&](double tau) {
            const double v = f_.increment(g_star_, delta * tau * tau);
            if (!(v > 0.0)) throw QuadratureFailure("F <= 0 next to g*");
            return 2.0 * delta * tau / std::sqrt(v);
        };
        return gk_integrate(integrand, 0.0, 1.0);
    }
    // d eta = -dw / sqrt(F) = -w dt / sqrt(F) with t = log w.
    auto integrand = [this](double t) {
        const double s = std::exp(t);
        const double v = F_w(s);
        if (!(v > 0.0)) throw QuadratureFailure("F <= 0 inside (g*, 1) at g = " + str(1.0 - s));
        return s / std::sqrt(v);
    };
    return gk_integrate(integrand, std::log(w), std::log(a));
}

double EtaMap::eta_of_w(double w) const {
    if (w >= w_star_) return 0.0;
    if (w <= knots_w_.back()) return knots_eta_.back();
    // first knot with knots_w_[k] < w, minus one
    const auto it = std::upper_bound(knots_w_.begin(), knots_w_.end(), w, std::greater<double>());
    const std::size_t k = static_cast<std::size_t>(it - knots_w_.begin()) - 1;
    return knots_eta_[k] + segment_integral(k, w);
}

double EtaMap::w_of(double eta) const {
    if (eta <= 0.0) return w_star_;
    if (eta >= knots_eta_.back()) return knots_w_.back();
    const auto it = std::upper_bound(knots_eta_.begin(), knots_eta_.end(), eta);
    const std::size_t k = static_cast<std::size_t>(it - knots_eta_.begin()) - 1;
    const double fa = knots_eta_[k] - eta;
    const double fb = knots_eta_[k + 1] - eta;
    if (fa == 0.0) return knots_w_[k];
    if (fb == 0.0) return knots_w_[k + 1];
    if (k == 0) {
        auto phi = [&](double w) { return segment_integral(0, w) - eta; };
        return refine_root(phi, knots_w_[1], knots_w_[0], fb, fa);
    }
    auto phi = [&](double t) { return knots_eta_[k] + segment_integral(k, std::exp(t)) - eta; };
    return std::exp(refine_root(phi, std::log(knots_w_[k + 1]), std::log(knots_w_[k]), fb, fa));
}

GProfile integrate_profile(double g_star, double q, double r, double tail_tol, int n_half) {
    if (n_half < 3) throw DomainError("integrate_profile needs at least 3 nodes");
    const EtaMap map(g_star, q, r, tail_tol);
    GProfile out;
    out.g_star = g_star;
    out.q = q;
    out.r = r;
    out.tail_tol = tail_tol;
    const std::size_t n = static_cast<std::size_t>(n_half);
    const double eta_max = map.eta_end();
    const double h = eta_max / static_cast<double>(n - 1);
    out.eta.resize(n);
    out.g.resize(n);
    out.w.resize(n);
    out.dg.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.eta[j] = static_cast<double>(j) * h;
    out.eta.back() = eta_max;
    parallel_for(n, [&](std::size_t j) {
        const double w = j == 0 ? 1.0 - g_star : map.w_of(out.eta[j]);
        out.w[j] = w;
        out.g[j] = 1.0 - w;
        out.dg[j] = j == 0 ? 0.0 : std::sqrt(std::max(0.0, map.F_w(w)));
    });
    return out;
}

// ---------------------------------------------------------------------------
// omega(eta)

double Profile::omega_at(double eta_value) const {
    const double s = std::abs(eta_value);
    const std::size_t c = center();
    const double emax = eta.back();
    if (s >= emax) return omega.back() * std::exp(-tail_rate * (s - emax));
    const double h = eta[c + 1] - eta[c];
    std::size_t i = static_cast<std::size_t>(s / h);
    i = std::min(i, eta.size() - c - 2);
    const std::size_t j0 = c + i;
    const double x0 = eta[j0];
    const double hh = eta[j0 + 1] - x0;
    const double t = (s - x0) / hh;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * omega[j0] + h10 * hh * domega[j0] + h01 * omega[j0 + 1] + h11 * hh * domega[j0 + 1];
}

Profile profile_to_omega(const GProfile& half, double p, double r, double amplitude, double velocity) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("profile_to_omega needs p in (0, 1)");
    const std::size_t m = half.eta.size();
    const std::size_t n = 2 * m - 1;
    Profile out;
    out.eta.resize(n);
    out.omega.resize(n);
    out.domega.resize(n);
    out.amplitude = amplitude;
    out.velocity = velocity;
    out.tail_tol = half.tail_tol;
    out.tail_rate = std::sqrt(r * half.q);
    out.g_star = half.g_star;
    out.q = half.q;
    out.p = p;
    const std::size_t c = m - 1;
    for (std::size_t j = 0; j < m; ++j) {
        const double g = half.g[j];
        // 1 - g^r from w = 1 - g directly
        const double om = j == 0 ? 1.0 : -std::expm1(r * std::log1p(-half.w[j])) / p;
        const double dom = j == 0 ? 0.0 : -(r / p) * std::pow(g, r - 1.0) * half.dg[j];
        out.eta[c + j] = half.eta[j];
        out.eta[c - j] = -half.eta[j];
        out.omega[c + j] = out.omega[c - j] = om;
        out.domega[c + j] = dom;
        out.domega[c - j] = -dom;
    }
    try {
        out.decay_rate = fit_decay_rate(out);
    } catch (const InsufficientTail&) {
        out.decay_rate = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

Profile build_profile(const StructuralParams& params, const WaveSpec& wave, const ProfileOptions& options) {
    if (wave.regime.kind != RegimeKind::SmoothSoliton)
        throw DomainError("build_profile needs a SmoothSoliton, got " + to_string(wave.regime));
    if (options.nodes < 5 || options.nodes % 2 == 0) throw DomainError("profile nodes must be odd and >= 5");
    const double r = derive_constants(params).r;
    const auto half = integrate_profile(wave.g_star, wave.q, r, options.tail_tol, (options.nodes + 1) / 2);
    return profile_to_omega(half, one_minus_pow(wave.g_star, r), r, wave.amplitude, wave.velocity);
}

std::vector<double> sample_physical_wave(const Profile& profile, const StructuralParams& params,
                                         std::span<const double> x, double t) {
    const double beta = derive_constants(params).beta;
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double eta = beta * (x[i] - profile.velocity * t) / params.epsilon();
        u[i] = profile.amplitude * profile.omega_at(eta);
    }
    return u;
}

double profile_residual(std::span<const double> omega, double h, const StructuralParams& params,
                        double amplitude, double velocity) {
    const double P = params.gamma() + params.alpha() * params.alpha() * velocity;
    const double c1 = params.c1(), c2 = params.c2(), c3 = params.c3();
    const double k_lhs = c3 * amplitude / P;
    const double k_grad = c2 * amplitude / P;
    const double k_src = c3 * c3 / (c1 * (c2 + c3) * P);
    double worst = 0.0;
    for (std::size_t j = 2; j + 2 < omega.size(); ++j) {
        const double w = omega[j];
        const double d1 = (-omega[j + 2] + 8.0 * omega[j + 1] - 8.0 * omega[j - 1] + omega[j - 2]) / (12.0 * h);
        const double d2 = (-omega[j + 2] + 16.0 * omega[j + 1] - 30.0 * w + 16.0 * omega[j - 1] - omega[j - 2]) /
                          (12.0 * h * h);
        const double res = (1.0 - k_lhs * w) * d2 - k_grad * d1 * d1 -
                           k_src * ((velocity - params.c0()) * w - c1 * amplitude * w * w);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

double profile_residual(const Profile& profile, const StructuralParams& params, double amplitude,
                        double velocity) {
    const double h = profile.eta[1] - profile.eta[0];
    return profile_residual(profile.omega, h, params, amplitude, velocity);
}

} // namespace gdp
