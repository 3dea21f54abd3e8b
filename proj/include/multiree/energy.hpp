#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "multiree/matrix.hpp"

namespace multiree {

struct OscillatorSpec {
    int modes = 1;
    std::vector<double> omegas;
    double hbar = 1.0;
};

// Nondecreasing eigenvalue list, possibly generated from an oscillator
// descriptor truncated to a level cap.
struct HamiltonianSpec {
    std::vector<double> eigenvalues;
    std::optional<OscillatorSpec> oscillator;

    static HamiltonianSpec from_levels(std::vector<double> levels);
    static HamiltonianSpec from_oscillator(const OscillatorSpec& osc, int truncation);

    double e0() const { return eigenvalues.front(); }
    int levels() const { return static_cast<int>(eigenvalues.size()); }
    // Diagonal matrix on a space of dimension dim (dim <= levels).
    CMatrix as_operator(int dim) const;
};

// Sorted sums of the given sorted level lists, capped. The smallest `cap`
// sums are exact as long as every input list is itself nondecreasing.
std::vector<double> sum_spectrum(const std::vector<std::vector<double>>& parts, size_t cap = 100000);

struct GibbsResult {
    std::vector<double> probs;
    double beta = 0.0;
    double mean_energy = 0.0;
    double entropy = 0.0;
    bool clamped = false;     // E at/above the uniform mean of the truncation
    double tail_bound = 0.0;  // crude remainder estimate when the level cap binds
};

// Maximum-entropy level distribution at mean energy E (E > E0). E at or above
// the uniform mean yields the flat distribution, flagged clamped.
GibbsResult gibbs_state(const HamiltonianSpec& h, double e);

// Entropy cap under mean energy <= E: Gibbs entropy, clamped to ln(levels).
double max_entropy_F(const HamiltonianSpec& h, double e);

enum class OscVariant { F, FBar };

// Closed forms l ln((E + E0)/(l E*)) + l and the shifted variant with E + 2 E0.
double oscillator_F(int modes, const std::vector<double>& omegas, double e, OscVariant v,
                    double hbar = 1.0);

// Entropy-cap function handle used by the continuity bounds: either the
// numeric Gibbs form on a concrete spectrum or the oscillator closed form.
struct FFunction {
    enum class Kind { NumericGibbs, OscillatorClosedForm };
    Kind kind = Kind::NumericGibbs;
    HamiltonianSpec spectrum;  // NumericGibbs
    OscillatorSpec osc;        // OscillatorClosedForm (FBar variant)

    static FFunction numeric(HamiltonianSpec h);
    static FFunction oscillator_bar(OscillatorSpec o);

    // Evaluates the Fbar form: numeric kind uses F(e + E0), closed form uses
    // the shifted expression.
    double operator()(double e) const;
};

struct TailModel {
    enum class Kind { None, Geometric, PowerLaw, LogCorrected };
    Kind kind = Kind::None;
    double p0 = 0.0;  // Geometric: ratio; PowerLaw/LogCorrected: alpha
    double p1 = 0.0;  // LogCorrected: q
};

enum class Verdict { Holds, Fails, Inconclusive };
std::string verdict_name(Verdict v);

struct FaCheckResult {
    double energy = 0.0;  // sum lambda_i g_i (+infinity if divergent)
    bool energy_finite = false;
    Verdict hcond = Verdict::Inconclusive;  // [sum exp(-beta g_i)]^beta -> 1
    Verdict overall = Verdict::Inconclusive;
    std::vector<std::pair<double, double>> beta_trace;  // (beta, beta ln S(beta))
};

// Numerical test of the weighted-energy condition and the small-beta limit on
// truncated sequences with declared tail models.
FaCheckResult fa_check(const std::vector<double>& spectrum, const TailModel& spectrum_tail,
                       const std::vector<double>& weights, const TailModel& weights_tail);

// Model-generated sequences for the CLI and tests.
std::vector<double> spectrum_from_model(const TailModel& m, int terms);
std::vector<double> weights_from_model(const std::string& kind, double q, int terms);

// epsilon ln(prod dims) + g(epsilon)
double cb_finite_dim(double epsilon, const std::vector<int>& dims);

// C_m sqrt(2 eps) Fbar_sum(m Ebar / eps) + g(sqrt(2 eps)) on the summed
// spectrum of the per-party Hamiltonians; epsilon > 1 requires `fhat`.
double cb_energy(double epsilon, double e, int m, int n,
                 const std::vector<HamiltonianSpec>& party_hams, const FFunction* fhat = nullptr);

// Identical-subsystem refinement with free parameter t in (0, 1/eps).
double cb_energy_iid(double epsilon, double e, int m, int n, double t, const FFunction& fhat,
                     double e0 = std::numeric_limits<double>::quiet_NaN());

struct OptimizedT {
    double t = 0.0;
    double value = 0.0;
};
OptimizedT optimize_t(double epsilon, double e, int m, int n, const FFunction& fhat,
                      double e0 = std::numeric_limits<double>::quiet_NaN(), int grid = 200);

struct OscCbTerms {
    double term1 = 0.0;  // (eps + eps^2 t^2) branch
    double term2 = 0.0;  // sqrt(2 eps t) branch
    double g1 = 0.0;
    double g2 = 0.0;
    double total = 0.0;
};

// Oscillator specialization of cb_energy_iid with the two logarithmic terms
// reported separately.
OscCbTerms cb_oscillator(double epsilon, double e, double t, int modes,
                         const std::vector<double>& omegas, int m, int n, double hbar = 1.0);

}  // namespace multiree
