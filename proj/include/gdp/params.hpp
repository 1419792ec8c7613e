#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gdp {

/// Raw coefficients of the general Degasperis-Procesi model
///
///   d/dt (u - a^2 e^2 u_xx) + d/dx (c0 u + c1 u^2 - c2 e^2 u_x^2 + e^2 (g - c3 u) u_xx) = 0
///
/// with a = alpha, g = gamma and e = epsilon.
struct ModelCoefficients {
    double alpha = 0.0;
    double gamma = 0.0;
    double c0 = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    double epsilon = 0.1;
};

/// Validated, immutable model identity. Construction throws ValidationError
/// unless alpha >= 0, gamma >= 0, alpha + gamma > 0, c0 >= 0, c1, c2, c3 > 0
/// and epsilon > 0.
class StructuralParams {
public:
    explicit StructuralParams(const ModelCoefficients& c);

    double alpha() const noexcept { return c_.alpha; }
    double gamma() const noexcept { return c_.gamma; }
    double c0() const noexcept { return c_.c0; }
    double c1() const noexcept { return c_.c1; }
    double c2() const noexcept { return c_.c2; }
    double c3() const noexcept { return c_.c3; }
    double epsilon() const noexcept { return c_.epsilon; }
    const ModelCoefficients& coefficients() const noexcept { return c_; }

    StructuralParams with_epsilon(double epsilon) const;

    /// Camassa-Holm: c2 = c3/2, c1 = 3 c3 / (2 alpha^2), gamma = 0.
    static StructuralParams camassa_holm(double alpha, double c3, double c0, double epsilon = 0.1);
    /// Degasperis-Procesi: c2 = c3, c1 = 2 c3 / alpha^2, c0 = gamma = 0.
    static StructuralParams degasperis_procesi(double alpha, double c3, double epsilon = 0.1);

private:
    ModelCoefficients c_;
};

struct DerivedConstants {
    double r = 0.0;           // c3 / (c2 + c3)
    double beta = 0.0;        // sqrt(c1 (c2 + c3)) / c3
    double gamma_alpha = 0.0; // gamma + alpha^2 c0
    std::optional<double> theta; // c3 / (alpha^2 c1), alpha > 0 only
};

DerivedConstants derive_constants(const StructuralParams& params);

/// Same scale as DerivedConstants::beta written as sqrt(c1 / (r c3)).
double peakon_scale(const StructuralParams& params);

enum class RegimeKind { SmoothSoliton, Peakon, AlgebraicDecay, NoWave };

struct Regime {
    RegimeKind kind = RegimeKind::NoWave;
    bool arbitrary_amplitude = false; // Peakon only

    friend bool operator==(const Regime&, const Regime&) = default;
};

std::string_view to_string(RegimeKind kind);
std::string to_string(const Regime& regime);

/// Classified solitary wave. Scalars are NaN when they do not exist for the
/// regime (e.g. velocity of NoWave).
struct WaveSpec {
    Regime regime;
    double amplitude = 0.0;
    double velocity = 0.0;
    double p = 0.0;       // c3 A / (gamma + alpha^2 V)
    double q = 0.0;
    double g_star = 0.0;
    std::string criterion;              // which test decided the regime
    std::vector<std::string> warnings;  // cross-check disagreements, extra roots
};

struct ClassifyOptions {
    /// Relative tolerance for the measure-zero boundaries p = 1, C1 = 0 and Psi(A) = A.
    double boundary_rel_tol = 1e-9;
};

/// Constructive classification: solve the self-consistency problem for A and
/// inspect the root. The closed inequalities of the existence theory are only
/// used as cross-checks and produce warnings when they disagree.
WaveSpec classify_wave(const StructuralParams& params, double amplitude,
                       const ClassifyOptions& options = {});

/// Psi(A) = gamma_alpha (1 - g*(A)^r) / c3. For alpha = 0 this equals A.
/// Throws NoRoot when g*(A) does not exist.
double psi(const StructuralParams& params, double amplitude);

/// True when the condition c3 A - gamma_alpha = r c1 A alpha^2 holds to the
/// given relative tolerance.
bool peakon_condition_holds(const StructuralParams& params, double amplitude, double rel_tol = 1e-9);

/// True when c3 = r alpha^2 c1 and gamma_alpha = 0 (peakons of any amplitude).
bool arbitrary_peakon_condition_holds(const StructuralParams& params, double rel_tol = 1e-9);

} // namespace gdp
