#pragma once

#include "multiree/states.hpp"

namespace multiree {

// All entropies are in nats.

double eta(double x);             // -x ln x, eta(0) = 0
double binary_entropy(double p);  // p in [0, 1]
double g_func(double x);          // (x+1)ln(x+1) - x ln x, x >= 0

double von_neumann_entropy(const CMatrix& rho);

// Lindblad extension: defined for positive operators of any trace, evaluated
// in rho's eigenbasis. Returns +infinity when supp rho is not contained in
// supp sigma (per the 1e-12 rank rule).
double relative_entropy(const CMatrix& rho, const CMatrix& sigma);

// H(A|B) = H(rho_A) - H(rho || rho_A x rho_B) on a bipartite layout.
double conditional_entropy_ext(const CMatrix& rho, const SubsystemLayout& layout);

// H(rho || rho_{A_1} x ... x rho_{A_n}), n >= 2.
double mutual_information(const CMatrix& rho, const SubsystemLayout& layout);

// Internal fast path: relative entropy with rho's eigensystem precomputed.
double relative_entropy_given_eig(const EigSystem& rho_eig, const CMatrix& sigma);

}  // namespace multiree
