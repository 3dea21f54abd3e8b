#include "multiree/separable.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace multiree {

void ProductEnsemble::validate() const {
    if (atoms.empty()) throw validation_error("ensemble: no atoms");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (a.weight <= 0.0) throw validation_error("ensemble: nonpositive weight");
        total += a.weight;
        if (static_cast<int>(a.parts.size()) != layout.parties())
            throw validation_error("ensemble: atom party count mismatch");
        for (int p = 0; p < layout.parties(); ++p) {
            if (a.parts[p].rows() != layout.dims[p])
                throw validation_error("ensemble: atom dimension mismatch");
            require_density(a.parts[p], "ensemble atom");
        }
    }
    if (std::abs(total - 1.0) > 1e-10) throw validation_error("ensemble: weights do not sum to 1");
}

CMatrix assemble(const ProductEnsemble& e) {
    const int d = static_cast<int>(e.layout.total_dim());
    CMatrix sigma(d, d);
    for (const auto& a : e.atoms) {
        CMatrix prod = a.parts[0];
        for (size_t p = 1; p < a.parts.size(); ++p) prod = tensor(prod, a.parts[p]);
        sigma.axpy(a.weight, prod);
    }
    sigma.hermitize();
    return sigma;
}

ProductEnsemble marginal_matching_separable(const PureState& omega, const SubsystemLayout& layout,
                                            const std::vector<int>* order) {
    omega.check_normalized(1e-10);
    if (static_cast<long>(omega.dim) != layout.total_dim())
        throw validation_error("marginal_matching_separable: layout mismatch");
    const int n = layout.parties();
    if (n < 2) throw validation_error("marginal_matching_separable: needs n >= 2");

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (order) {
        if (static_cast<int>(order->size()) != n)
            throw validation_error("marginal_matching_separable: bad order");
        perm = *order;
    }
    PureState psi = permute_systems(omega, layout, perm);
    std::vector<int> pdims(n);
    for (int p = 0; p < n; ++p) pdims[p] = layout.dims[perm[p]];

    struct Chain {
        double weight;
        std::vector<std::vector<cd>> prefix;  // pure vectors for peeled parties
        PureState rest;
    };
    std::vector<Chain> chains{{1.0, {}, psi}};

    for (int s = 0; s + 1 < n; ++s) {
        SubsystemLayout rest_layout(std::vector<int>(pdims.begin() + s, pdims.end()));
        std::vector<Chain> next;
        for (auto& ch : chains) {
            SchmidtDecomposition sd = schmidt_decompose(ch.rest, rest_layout, 1);
            for (size_t k = 0; k < sd.coefficients.size(); ++k) {
                Chain nc;
                nc.weight = ch.weight * sd.coefficients[k] * sd.coefficients[k];
                nc.prefix = ch.prefix;
                nc.prefix.push_back(sd.left_vectors[k]);
                nc.rest = PureState(sd.right_vectors[k]);
                next.push_back(std::move(nc));
            }
        }
        chains = std::move(next);
    }

    // invert the permutation so atoms are stored in original party order
    std::vector<int> inv(n);
    for (int p = 0; p < n; ++p) inv[perm[p]] = p;

    ProductEnsemble e;
    e.layout = layout;
    double total = 0.0;
    for (auto& ch : chains) total += ch.weight;
    for (auto& ch : chains) {
        ProductEnsemble::Atom a;
        a.weight = ch.weight / total;
        std::vector<CMatrix> parts_perm;
        for (int s = 0; s + 1 < n; ++s) parts_perm.push_back(outer(ch.prefix[s]));
        parts_perm.push_back(outer(ch.rest.amplitudes));
        a.parts.resize(n);
        for (int p = 0; p < n; ++p) a.parts[p] = parts_perm[inv[p]];
        e.atoms.push_back(std::move(a));
    }
    return e;
}

ProductEnsemble random_separable(const SubsystemLayout& layout, int m, RandomStream& rng) {
    if (m < 1) throw validation_error("random_separable: m must be positive");
    ProductEnsemble e;
    e.layout = layout;
    std::vector<double> w(m);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        w[i] = 0.1 + rng.uniform();
        total += w[i];
    }
    for (int i = 0; i < m; ++i) {
        ProductEnsemble::Atom a;
        a.weight = w[i] / total;
        for (int p = 0; p < layout.parties(); ++p) {
            int d = layout.dims[p];
            int rank = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(d)));
            a.parts.push_back(random_density(d, rank, rng));
        }
        e.atoms.push_back(std::move(a));
    }
    return e;
}

ProductEnsemble random_separable(const SubsystemLayout& layout, int m, uint64_t seed) {
    RandomStream rng(seed);
    return random_separable(layout, m, rng);
}

ProductEnsemble support_compress(const ProductEnsemble& sigma, const CMatrix& rho) {
    const SubsystemLayout& layout = sigma.layout;
    layout.check_operator(rho);
    const int n = layout.parties();

    std::vector<CMatrix> proj(n);
    std::vector<CMatrix> tau(n);  // top marginal eigenvector projectors
    bool full_rank = true;
    for (int p = 0; p < n; ++p) {
        EigSystem es = hermitian_eig(marginal(rho, layout, p));
        const double floor = rank_floor(es.values);
        if (es.values.front() <= floor) throw validation_error("support_compress: empty support");
        CMatrix pr(layout.dims[p], layout.dims[p]);
        int rank = 0;
        for (size_t k = 0; k < es.values.size(); ++k)
            if (es.values[k] > floor) {
                pr += outer(es.column(static_cast<int>(k)));
                ++rank;
            }
        pr.hermitize();
        proj[p] = pr;
        tau[p] = outer(es.column(0));
        if (rank < layout.dims[p]) full_rank = false;
    }
    if (full_rank) return sigma;

    ProductEnsemble out;
    out.layout = layout;
    double defect = 0.0;
    for (const auto& a : sigma.atoms) {
        ProductEnsemble::Atom na;
        na.weight = a.weight;
        bool alive = true;
        for (int p = 0; p < n; ++p) {
            CMatrix b = matmul(proj[p], matmul(a.parts[p], proj[p]));
            b.hermitize();
            double t = b.trace_real();
            na.weight *= std::max(0.0, t);
            if (na.weight <= 1e-15) {
                alive = false;
                break;
            }
            na.parts.push_back(b * (1.0 / t));
        }
        if (alive)
            out.atoms.push_back(std::move(na));
        defect += a.weight;
    }
    double kept = 0.0;
    for (const auto& a : out.atoms) kept += a.weight;
    defect -= kept;
    if (defect > 1e-15) {
        ProductEnsemble::Atom d;
        d.weight = defect;
        d.parts = tau;
        out.atoms.push_back(std::move(d));
    } else if (std::abs(1.0 - kept) > 1e-14) {
        for (auto& a : out.atoms) a.weight /= kept;
    }
    return out;
}

ProductEnsemble refine_to_pure_atoms(const ProductEnsemble& e) {
    ProductEnsemble out;
    out.layout = e.layout;
    const int n = e.layout.parties();
    for (const auto& a : e.atoms) {
        std::vector<std::vector<std::pair<double, CMatrix>>> per_party(n);
        for (int p = 0; p < n; ++p) {
            EigSystem es = hermitian_eig(a.parts[p]);
            const double floor = rank_floor(es.values);
            for (size_t k = 0; k < es.values.size(); ++k)
                if (es.values[k] > floor)
                    per_party[p].push_back({es.values[k], outer(es.column(static_cast<int>(k)))});
        }
        std::vector<size_t> idx(n, 0);
        while (true) {
            ProductEnsemble::Atom na;
            na.weight = a.weight;
            for (int p = 0; p < n; ++p) {
                na.weight *= per_party[p][idx[p]].first;
                na.parts.push_back(per_party[p][idx[p]].second);
            }
            if (na.weight > 1e-300) out.atoms.push_back(std::move(na));
            int p = n - 1;
            for (; p >= 0; --p) {
                if (++idx[p] < per_party[p].size()) break;
                idx[p] = 0;
            }
            if (p < 0) break;
        }
    }
    double total = 0.0;
    for (const auto& a : out.atoms) total += a.weight;
    for (auto& a : out.atoms) a.weight /= total;
    return out;
}

}  // namespace multiree
