#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "multiree/entropy.hpp"
#include "multiree/states.hpp"

namespace multiree {

// Rank-r orthogonal projector onto the top-r eigenvectors of a marginal,
// under the deterministic eigenvalue tie-break.
CMatrix spectral_projector(const CMatrix& marginal, int r);

struct TruncationResult {
    CMatrix state;            // renormalized Q rho Q / c_r
    double c_r = 0.0;         // Tr Q rho
    std::vector<int> subset;  // 0-based party indices
    int r = 0;
};

// Compresses rho by rank-r spectral projectors of the selected marginals and
// renormalizes. Throws numerical_error when the compression annihilates rho.
TruncationResult approx_map(const CMatrix& rho, const SubsystemLayout& layout,
                            const std::vector<int>& subset, int r);

// sqrt(sum_j tail mass of marginal s_j beyond its top r eigenvalues)
double truncation_delta(const CMatrix& rho, const SubsystemLayout& layout,
                        const std::vector<int>& subset, int r);

// Default weight sequence: w_1 = 0, w_i = ln^3(i) for i >= 2.
std::vector<double> default_fa_weights(int dim);

struct FaHamiltonian {
    CMatrix op;                   // sum_i w_i |phi_i><phi_i| in the marginal eigenbasis
    std::vector<double> weights;  // its spectrum (nondecreasing)
    double energy = 0.0;          // Tr op * marginal
};

// Diagonal operator in the marginal's eigenbasis with nondecreasing weights,
// w_1 = 0 required.
FaHamiltonian build_fa_hamiltonian(const CMatrix& marginal, const std::vector<double>& weights);

struct TruncErrorBound {
    double l_class = 0.0;
    double n_class = 0.0;
};

// C sqrt(2 delta) Fbar(4 E_S / (3 delta)) + D g(sqrt(2 delta)); the n_class
// value substitutes delta' = sqrt(delta (2 - delta)). delta in [0, 1/2];
// delta = 0 returns the limit value 0.
TruncErrorBound truncation_error_bound(double delta, double e_s, double c_coeff, double d_coeff,
                                       const std::function<double(double)>& fbar);

enum class Functional { Entropy, Qmi, Ree, Cond };

Functional functional_from_name(const std::string& name);
std::string functional_name(Functional f);

struct SolveOptions;  // ree.hpp

struct ExperimentRow {
    int r = 0;
    double c_r = 0.0;
    double delta_r = 0.0;
    double value = 0.0;
    double bound = 0.0;  // NaN outside the valid regime
    bool valid_regime = false;
};

struct ExperimentTable {
    std::vector<ExperimentRow> rows;
    double full_value = 0.0;  // f(rho)
    int r0 = 0;               // minimal r with delta_r <= 1/2
};

ExperimentTable truncation_experiment(const CMatrix& rho, const SubsystemLayout& layout,
                                      const std::vector<int>& subset, Functional f, int rmax,
                                      const SolveOptions& solver_opts);

}  // namespace multiree
