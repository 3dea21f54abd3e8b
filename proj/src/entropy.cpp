#include "multiree/entropy.hpp"

#include <cmath>
#include <limits>

namespace multiree {

double eta(double x) {
    if (x < 0.0) throw validation_error("eta: negative argument");
    return x > 0.0 ? -x * std::log(x) : 0.0;
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw validation_error("binary_entropy: p outside [0,1]");
    return eta(p) + eta(1.0 - p);
}

double g_func(double x) {
    if (x < 0.0) throw validation_error("g_func: negative argument");
    if (x == 0.0) return 0.0;
    return (x + 1.0) * std::log(x + 1.0) - x * std::log(x);
}

double von_neumann_entropy(const CMatrix& rho) {
    require_density(rho);
    EigSystem es = hermitian_eig(rho);
    const double floor = rank_floor(es.values);
    double h = 0.0;
    for (double lam : es.values)
        if (lam > floor) h += eta(lam);
    return h;
}

double relative_entropy_given_eig(const EigSystem& rho_eig, const CMatrix& sigma) {
    EigSystem ses = hermitian_eig(sigma);
    const int d = sigma.rows();
    const double rfloor = rank_floor(rho_eig.values);
    const double sfloor = rank_floor(ses.values);

    double tr_rho = 0.0;
    for (double v : rho_eig.values) tr_rho += v;
    double tr_sigma = 0.0;
    for (double v : ses.values) tr_sigma += v;

    // w(j, i) = <u_j | i> with |i> eigenvectors of rho, |u_j> of sigma
    CMatrix w = matmul(ses.vectors.adjoint(), rho_eig.vectors);
    std::vector<double> lnsig_vals(d, 0.0);
    for (int j = 0; j < d; ++j)
        if (ses.values[j] > sfloor) lnsig_vals[j] = std::log(ses.values[j]);

    double value = tr_sigma - tr_rho;
    for (int i = 0; i < d; ++i) {
        double lam = rho_eig.values[i];
        if (lam <= rfloor) continue;
        value += lam * std::log(lam);
        double outside = 0.0, lnsig = 0.0;
        for (int j = 0; j < d; ++j) {
            double ww = std::norm(w.at(j, i));
            if (ses.values[j] > sfloor)
                lnsig += ww * lnsig_vals[j];
            else
                outside += ww;
        }
        if (outside > 1e-12) return std::numeric_limits<double>::infinity();
        value -= lam * lnsig;
    }
    return value;
}

double relative_entropy(const CMatrix& rho, const CMatrix& sigma) {
    if (rho.rows() != sigma.rows() || !rho.square() || !sigma.square())
        throw validation_error("relative_entropy: dimension mismatch");
    CMatrix r = rho, s = sigma;
    require_hermitian(r, 1e-10, "relative_entropy rho");
    require_hermitian(s, 1e-10, "relative_entropy sigma");
    EigSystem res = hermitian_eig(r);
    if (res.values.back() < -1e-10) throw validation_error("relative_entropy: rho not positive");
    // sigma positivity is checked inside via its eigenvalues
    EigSystem pre = hermitian_eig(s);
    if (pre.values.back() < -1e-10) throw validation_error("relative_entropy: sigma not positive");
    return relative_entropy_given_eig(res, s);
}

double conditional_entropy_ext(const CMatrix& rho, const SubsystemLayout& layout) {
    if (layout.parties() != 2) throw validation_error("conditional_entropy_ext: layout not bipartite");
    layout.check_operator(rho);
    CMatrix ra = marginal(rho, layout, 0);
    CMatrix rb = marginal(rho, layout, 1);
    double ha = von_neumann_entropy(ra);
    double rel = relative_entropy(rho, tensor(ra, rb));
    return ha - rel;
}

double mutual_information(const CMatrix& rho, const SubsystemLayout& layout) {
    if (layout.parties() < 2) throw validation_error("mutual_information: needs n >= 2");
    layout.check_operator(rho);
    CMatrix prod = marginal(rho, layout, 0);
    for (int p = 1; p < layout.parties(); ++p) prod = tensor(prod, marginal(rho, layout, p));
    return relative_entropy(rho, prod);
}

}  // namespace multiree
