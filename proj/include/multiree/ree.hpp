#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multiree/energy.hpp"
#include "multiree/separable.hpp"

namespace multiree {

struct SolveOptions {
    double tol = 1e-3;
    int max_iter = 300;
    int restarts = 16;
    uint64_t seed = 0;
    int jobs = 1;
};

struct SolveResult {
    double value = 0.0;  // H(rho || sigma_final), an upper bound on the optimum
    double gap = 0.0;    // duality-gap certificate: optimum >= value - gap
    ProductEnsemble ensemble;
    int iterations = 0;
    bool converged = false;
};

// Derivative of sigma -> H(rho || sigma) via divided differences in sigma's
// eigenbasis; valid against traceless directions (the trace-1 manifold).
// Requires sigma of full numerical rank.
CMatrix rel_entropy_gradient(const CMatrix& rho, const CMatrix& sigma);

struct LmoResult {
    std::vector<PureState> parts;  // one unit vector per party
    PureState product;             // their tensor product
    double value = 0.0;            // <phi| G |phi>
};

// Approximate linear minimization over product vectors by alternating
// per-party eigenvector sweeps, best over seeded restarts.
LmoResult lmo_product(const CMatrix& g, const SubsystemLayout& layout, int restarts, uint64_t seed);

SolveResult estimate_ree(const CMatrix& rho, const SubsystemLayout& layout, const SolveOptions& opts);

// max(0, -H(A|B), -H(B|A)) for a bipartite layout; with `group` a 0-based
// party subset forming side A of a grouped bipartition. Returns 0 for n > 2
// when no grouping is given.
double ree_lower_bounds(const CMatrix& rho, const SubsystemLayout& layout,
                        const std::vector<int>* group = nullptr);

// Frank-Wolfe restricted to separable states with sum-Hamiltonian energy at
// most `energy`. Pass +infinity to recover the unconstrained solver.
SolveResult energy_constrained_ree(const CMatrix& rho, const SubsystemLayout& layout,
                                   const std::vector<HamiltonianSpec>& party_hams, double energy,
                                   const SolveOptions& opts);

struct AuditRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs, bracket-adjusted
    bool pass = false;
};

struct AuditReport {
    std::vector<AuditRecord> records;
    bool all_pass() const {
        for (const auto& r : records)
            if (!r.pass) return false;
        return true;
    }
};

// Runs every inequality applicable to rho (upper/lower bounds, mixing
// inequality against a seeded random separable state), certified by the
// solver's duality gaps.
AuditReport audit_state(const CMatrix& rho, const SubsystemLayout& layout, const SolveOptions& opts);

}  // namespace multiree
