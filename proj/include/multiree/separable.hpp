#pragma once

#include <optional>
#include <vector>

#include "multiree/states.hpp"

namespace multiree {

// Finite mixture of product states: sum_i weight_i part_i^1 x ... x part_i^n.
struct ProductEnsemble {
    struct Atom {
        double weight = 0.0;
        std::vector<CMatrix> parts;  // one density operator per party
    };
    SubsystemLayout layout;
    std::vector<Atom> atoms;

    void validate() const;  // weights sum to 1, parts are density operators
};

CMatrix assemble(const ProductEnsemble& e);

// Separable state with the same marginals as a pure state, built from chained
// Schmidt decompositions across the cuts 1|2..n, 2|3..n, ... The relative
// entropy from the pure state to it is at most the sum of the first n-1
// marginal entropies. `order` relabels which party is peeled off at each step
// (default identity).
ProductEnsemble marginal_matching_separable(const PureState& omega, const SubsystemLayout& layout,
                                            const std::vector<int>* order = nullptr);

ProductEnsemble random_separable(const SubsystemLayout& layout, int m, uint64_t seed);
ProductEnsemble random_separable(const SubsystemLayout& layout, int m, RandomStream& rng);

// Moves the ensemble onto the product of the marginal supports of rho without
// increasing H(rho || .). Mass falling outside the support is collected on a
// fixed product state inside it (top marginal eigenvectors).
ProductEnsemble support_compress(const ProductEnsemble& sigma, const CMatrix& rho);

// Splits every atom into pure products (eigendecomposition per party) —
// the extreme-point refinement of the same state.
ProductEnsemble refine_to_pure_atoms(const ProductEnsemble& e);

}  // namespace multiree
