#pragma once

#include <cstdint>
#include <vector>

#include "multiree/eig.hpp"
#include "multiree/matrix.hpp"
#include "multiree/rng.hpp"

namespace multiree {

// Ordered local dimensions of the parties sharing a tensor-product space.
struct SubsystemLayout {
    std::vector<int> dims;

    SubsystemLayout() = default;
    explicit SubsystemLayout(std::vector<int> d) : dims(std::move(d)) {
        if (dims.empty()) throw validation_error("layout: needs at least one party");
        for (int x : dims)
            if (x < 1) throw validation_error("layout: nonpositive local dimension");
    }

    int parties() const { return static_cast<int>(dims.size()); }
    long total_dim() const {
        long p = 1;
        for (int x : dims) p *= x;
        return p;
    }
    void check_operator(const CMatrix& m) const {
        if (!m.square() || m.rows() != total_dim())
            throw validation_error("layout/operator dimension mismatch");
    }
};

struct PureState {
    int dim = 0;
    std::vector<cd> amplitudes;

    PureState() = default;
    explicit PureState(std::vector<cd> a) : dim(static_cast<int>(a.size())), amplitudes(std::move(a)) {}

    void check_normalized(double tol = 1e-12) const;
    CMatrix projector() const { return outer(amplitudes); }
};

struct SchmidtDecomposition {
    std::vector<double> coefficients;  // nonincreasing, nonnegative
    std::vector<std::vector<cd>> left_vectors;
    std::vector<std::vector<cd>> right_vectors;
};

CMatrix tensor(const CMatrix& a, const CMatrix& b);
PureState tensor(const PureState& a, const PureState& b);

// keep: 0-based party indices, any order; result parties keep their original
// relative order.
CMatrix partial_trace(const CMatrix& rho, const SubsystemLayout& layout, const std::vector<int>& keep);
CMatrix marginal(const CMatrix& rho, const SubsystemLayout& layout, int party);

// Reorders parties: new party p is old party perm[p].
CMatrix permute_systems(const CMatrix& rho, const SubsystemLayout& layout, const std::vector<int>& perm);
PureState permute_systems(const PureState& psi, const SubsystemLayout& layout, const std::vector<int>& perm);

// Schmidt split between parties [0, cut) and [cut, n).
SchmidtDecomposition schmidt_decompose(const PureState& psi, const SubsystemLayout& layout, int cut);

// Purification with a reference system of dimension rank(rho); layout of the
// result is (d, rank).
PureState purify(const CMatrix& rho, int* reference_dim = nullptr);

// Half trace norm of the difference.
double trace_distance(const CMatrix& rho, const CMatrix& sigma);

CMatrix random_density(int dim, int rank, RandomStream& rng);
CMatrix random_density(int dim, int rank, uint64_t seed);
PureState random_pure(int dim, RandomStream& rng);
PureState random_pure(int dim, uint64_t seed);

PureState basis_state(int dim, int index);
PureState bell_state();   // (|00> + |11>)/sqrt(2)
PureState ghz_state(int parties);  // qubits

}  // namespace multiree
