#include "multiree/approx.hpp"

#include <cmath>
#include <limits>

#include "multiree/io.hpp"
#include "multiree/ree.hpp"

namespace multiree {

CMatrix spectral_projector(const CMatrix& marginal, int r) {
    CMatrix m = marginal;
    require_hermitian(m, 1e-10, "spectral_projector input");
    if (r < 1 || r > m.rows()) throw validation_error("spectral_projector: r out of range");
    EigSystem es = hermitian_eig(m);
    CMatrix p(m.rows(), m.rows());
    for (int k = 0; k < r; ++k) p += outer(es.column(k));
    p.hermitize();
    return p;
}

namespace {

std::vector<bool> subset_mask(const SubsystemLayout& layout, const std::vector<int>& subset) {
    if (subset.empty()) throw validation_error("approx_map: empty subset");
    std::vector<bool> in(layout.parties(), false);
    for (int s : subset) {
        if (s < 0 || s >= layout.parties()) throw validation_error("approx_map: party index out of range");
        if (in[s]) throw validation_error("approx_map: duplicate party index");
        in[s] = true;
    }
    return in;
}

}  // namespace

TruncationResult approx_map(const CMatrix& rho, const SubsystemLayout& layout,
                            const std::vector<int>& subset, int r) {
    layout.check_operator(rho);
    if (r < 1) throw validation_error("approx_map: r must be positive");
    std::vector<bool> in = subset_mask(layout, subset);

    CMatrix q = CMatrix::identity(1);
    for (int p = 0; p < layout.parties(); ++p) {
        if (in[p]) {
            int rp = std::min(r, layout.dims[p]);
            q = tensor(q, spectral_projector(marginal(rho, layout, p), rp));
        } else {
            q = tensor(q, CMatrix::identity(layout.dims[p]));
        }
    }

    CMatrix qrq = matmul(q, matmul(rho, q));
    qrq.hermitize();
    double c = qrq.trace_real();
    if (c <= 1e-300) throw numerical_error("approx_map: compression annihilates the state");

    TruncationResult res;
    res.state = qrq * (1.0 / c);
    res.c_r = c;
    res.subset = subset;
    res.r = r;
    return res;
}

double truncation_delta(const CMatrix& rho, const SubsystemLayout& layout,
                        const std::vector<int>& subset, int r) {
    layout.check_operator(rho);
    subset_mask(layout, subset);
    double tail = 0.0;
    for (int s : subset) {
        EigSystem es = hermitian_eig(marginal(rho, layout, s));
        for (size_t i = static_cast<size_t>(r); i < es.values.size(); ++i) tail += std::max(0.0, es.values[i]);
    }
    return std::sqrt(std::max(0.0, tail));
}

std::vector<double> default_fa_weights(int dim) {
    std::vector<double> w(dim, 0.0);
    for (int i = 2; i <= dim; ++i) w[i - 1] = std::pow(std::log(static_cast<double>(i)), 3.0);
    return w;
}

FaHamiltonian build_fa_hamiltonian(const CMatrix& marg, const std::vector<double>& weights) {
    CMatrix m = marg;
    require_hermitian(m, 1e-10, "build_fa_hamiltonian marginal");
    if (static_cast<int>(weights.size()) != m.rows())
        throw validation_error("build_fa_hamiltonian: weight count != dimension");
    if (!weights.empty() && weights.front() != 0.0)
        throw validation_error("build_fa_hamiltonian: first weight must be 0");
    for (size_t i = 1; i < weights.size(); ++i)
        if (weights[i] < weights[i - 1]) throw validation_error("build_fa_hamiltonian: weights must be nondecreasing");

    EigSystem es = hermitian_eig(m);
    FaHamiltonian fa;
    fa.weights = weights;
    fa.op = CMatrix(m.rows(), m.rows());
    fa.energy = 0.0;
    for (int i = 0; i < m.rows(); ++i) {
        if (weights[i] != 0.0) fa.op.axpy(weights[i], outer(es.column(i)));
        fa.energy += std::max(0.0, es.values[i]) * weights[i];
    }
    fa.op.hermitize();
    return fa;
}

TruncErrorBound truncation_error_bound(double delta, double e_s, double c_coeff, double d_coeff,
                                       const std::function<double(double)>& fbar) {
    if (delta < 0.0 || delta > 0.5) throw validation_error("truncation_error_bound: delta outside [0, 1/2]");
    if (e_s < 0.0) throw validation_error("truncation_error_bound: negative energy");
    auto eval = [&](double d) {
        if (d <= 0.0) return 0.0;
        double arg = 4.0 * e_s / (3.0 * d);
        return c_coeff * std::sqrt(2.0 * d) * fbar(arg) + d_coeff * g_func(std::sqrt(2.0 * d));
    };
    TruncErrorBound b;
    b.l_class = eval(delta);
    b.n_class = eval(std::sqrt(delta * (2.0 - delta)));
    return b;
}

Functional functional_from_name(const std::string& name) {
    if (name == "entropy") return Functional::Entropy;
    if (name == "qmi") return Functional::Qmi;
    if (name == "ree") return Functional::Ree;
    if (name == "cond") return Functional::Cond;
    throw validation_error("unknown functional: " + name);
}

std::string functional_name(Functional f) {
    switch (f) {
        case Functional::Entropy: return "entropy";
        case Functional::Qmi: return "qmi";
        case Functional::Ree: return "ree";
        case Functional::Cond: return "cond";
    }
    return "?";
}

namespace {

double eval_functional(Functional f, const CMatrix& rho, const SubsystemLayout& layout,
                       const SolveOptions& opts) {
    switch (f) {
        case Functional::Entropy: return von_neumann_entropy(rho);
        case Functional::Qmi: return mutual_information(rho, layout);
        case Functional::Ree: return estimate_ree(rho, layout, opts).value;
        case Functional::Cond: return conditional_entropy_ext(rho, layout);
    }
    throw validation_error("bad functional");
}

// Class constants (C, D, m) for the error-bound pipeline.
void functional_class(Functional f, int n, double& c_coeff, double& d_coeff, int& m) {
    switch (f) {
        case Functional::Qmi:
            c_coeff = 2.0;
            d_coeff = static_cast<double>(n);
            m = n - 1;
            return;
        case Functional::Entropy:
            c_coeff = 1.0;
            d_coeff = 1.0;
            m = n;
            return;
        case Functional::Ree:
            c_coeff = 1.0;
            d_coeff = 1.0;
            m = n - 1;
            return;
        case Functional::Cond:
            if (n != 2) throw validation_error("cond functional needs a bipartite layout");
            c_coeff = 2.0;
            d_coeff = 1.0;
            m = 1;
            return;
    }
    throw validation_error("bad functional");
}

}  // namespace

ExperimentTable truncation_experiment(const CMatrix& rho, const SubsystemLayout& layout,
                                      const std::vector<int>& subset, Functional f, int rmax,
                                      const SolveOptions& solver_opts) {
    layout.check_operator(rho);
    subset_mask(layout, subset);
    require_density(rho, "truncation_experiment input");
    if (rmax < 1) throw validation_error("truncation_experiment: rmax must be positive");

    const int n = layout.parties();
    double c_coeff, d_coeff;
    int m;
    functional_class(f, n, c_coeff, d_coeff, m);

    // Weight operators for parties 1..m in the marginal eigenbases; their
    // energies and summed spectrum drive the bound.
    double e_s = 0.0;
    std::vector<std::vector<double>> weight_lists;
    for (int p = 0; p < m; ++p) {
        CMatrix mg = marginal(rho, layout, p);
        std::vector<double> w = default_fa_weights(layout.dims[p]);
        FaHamiltonian fa = build_fa_hamiltonian(mg, w);
        e_s += fa.energy;
        weight_lists.push_back(std::move(w));
    }
    HamiltonianSpec sum_h = HamiltonianSpec::from_levels(sum_spectrum(weight_lists));
    auto fbar = [&](double e) {
        if (e <= sum_h.e0()) return 0.0;
        return max_entropy_F(sum_h, e);
    };

    ExperimentTable table;
    table.full_value = eval_functional(f, rho, layout, solver_opts);

    int max_local = 0;
    for (int s : subset) max_local = std::max(max_local, layout.dims[s]);
    table.r0 = max_local;
    for (int r = 1; r <= max_local; ++r) {
        if (truncation_delta(rho, layout, subset, r) <= 0.5) {
            table.r0 = r;
            break;
        }
    }

    for (int r = 1; r <= rmax; ++r) {
        ExperimentRow row;
        row.r = r;
        row.delta_r = truncation_delta(rho, layout, subset, r);
        TruncationResult tr = approx_map(rho, layout, subset, r);
        row.c_r = tr.c_r;
        row.value = eval_functional(f, tr.state, layout, solver_opts);
        row.valid_regime = row.delta_r <= 0.5;
        if (row.valid_regime) {
            row.bound = truncation_error_bound(row.delta_r, e_s, c_coeff, d_coeff, fbar).l_class;
        } else {
            row.bound = std::numeric_limits<double>::quiet_NaN();
        }
        table.rows.push_back(row);
    }
    log_msg(1, "truncation_experiment: r0 = " + std::to_string(table.r0));
    return table;
}

}  // namespace multiree
