#pragma once

#include <vector>

#include "multiree/matrix.hpp"

namespace multiree {

// Eigenvalues sorted nonincreasing; vectors.column(j) is the unit eigenvector
// of values[j]. Degenerate eigenvalues keep the order of the working columns
// they converged in (stable sort), so repeated runs agree exactly.
struct EigSystem {
    std::vector<double> values;
    CMatrix vectors;

    std::vector<cd> column(int j) const {
        std::vector<cd> v(vectors.rows());
        for (int i = 0; i < vectors.rows(); ++i) v[i] = vectors.at(i, j);
        return v;
    }
};

// Householder tridiagonalization followed by implicit-shift QL.
EigSystem hermitian_eig(const CMatrix& m);

// Eigenvalues below 1e-12 * max(eigenvalue, 0) count as zero everywhere
// (ranks, supports, Schmidt coefficients).
double rank_floor(const std::vector<double>& values);
int numerical_rank(const std::vector<double>& values);

// Reconstruct sum_j values[j] |v_j><v_j| (used by tests and projector code).
CMatrix from_eigensystem(const EigSystem& es);

}  // namespace multiree
