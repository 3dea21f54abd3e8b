#include "multiree/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace multiree {

namespace {

// Unitary Householder reduction of a Hermitian matrix to real symmetric
// tridiagonal form. On return `diag` and `offdiag` hold the tridiagonal and
// `u` the accumulated transform (columns of u are the working basis).
void tridiagonalize(CMatrix a, std::vector<double>& diag, std::vector<double>& offdiag, CMatrix& u) {
    const int n = a.rows();
    u = CMatrix::identity(n);
    std::vector<cd> v(n), p(n), w(n);

    for (int k = 0; k + 2 < n; ++k) {
        const int len = n - k - 1;
        double xnorm2 = 0.0;
        for (int i = 0; i < len; ++i) xnorm2 += std::norm(a.at(k + 1 + i, k));
        double xnorm = std::sqrt(xnorm2);
        if (xnorm == 0.0) continue;

        cd x0 = a.at(k + 1, k);
        cd alpha = (std::abs(x0) > 0.0) ? -(x0 / std::abs(x0)) * xnorm : cd(-xnorm, 0.0);

        double vnorm2 = 0.0;
        for (int i = 0; i < len; ++i) {
            v[i] = a.at(k + 1 + i, k);
            if (i == 0) v[i] -= alpha;
            vnorm2 += std::norm(v[i]);
        }
        if (vnorm2 <= 0.0) continue;
        const double tau = 2.0 / vnorm2;

        // p = tau * A22 v ; w = p - (tau/2)(v^dag p) v ; A22 -= v w^dag + w v^dag
        {
            double* are = a.re_data().data();
            double* aim = a.im_data().data();
            const int stride = n;
            for (int i = 0; i < len; ++i) {
                const double* rre = are + static_cast<size_t>(k + 1 + i) * stride + (k + 1);
                const double* rim = aim + static_cast<size_t>(k + 1 + i) * stride + (k + 1);
                double sr = 0.0, si = 0.0;
                for (int j = 0; j < len; ++j) {
                    const double vr = v[j].real(), vi = v[j].imag();
                    sr += rre[j] * vr - rim[j] * vi;
                    si += rre[j] * vi + rim[j] * vr;
                }
                p[i] = tau * cd(sr, si);
            }
            cd vp = 0.0;
            for (int i = 0; i < len; ++i) vp += std::conj(v[i]) * p[i];
            const cd kfac = 0.5 * tau * vp;
            for (int i = 0; i < len; ++i) w[i] = p[i] - kfac * v[i];
            for (int i = 0; i < len; ++i) {
                double* rre = are + static_cast<size_t>(k + 1 + i) * stride + (k + 1);
                double* rim = aim + static_cast<size_t>(k + 1 + i) * stride + (k + 1);
                const double vr = v[i].real(), vi = v[i].imag();
                const double wr = w[i].real(), wi = w[i].imag();
                for (int j = 0; j < len; ++j) {
                    // -(v_i conj(w_j) + w_i conj(v_j))
                    const double wjr = w[j].real(), wji = w[j].imag();
                    const double vjr = v[j].real(), vji = v[j].imag();
                    rre[j] -= vr * wjr + vi * wji + wr * vjr + wi * vji;
                    rim[j] -= vi * wjr - vr * wji + wi * vjr - wr * vji;
                }
            }
        }

        a.set(k + 1, k, alpha);
        a.set(k, k + 1, std::conj(alpha));
        for (int i = 2; i <= len; ++i) {
            a.set(k + i, k, 0.0);
            a.set(k, k + i, 0.0);
        }

        // U <- U (I - tau v v^dag) on trailing columns
        {
            double* ure = u.re_data().data();
            double* uim = u.im_data().data();
            const int stride = n;
            for (int row = 0; row < n; ++row) {
                double* rre = ure + static_cast<size_t>(row) * stride + (k + 1);
                double* rim = uim + static_cast<size_t>(row) * stride + (k + 1);
                double tr = 0.0, ti = 0.0;
                for (int j = 0; j < len; ++j) {
                    const double vr = v[j].real(), vi = v[j].imag();
                    tr += rre[j] * vr - rim[j] * vi;
                    ti += rre[j] * vi + rim[j] * vr;
                }
                const double taur = tau;
                tr *= taur;
                ti *= taur;
                for (int j = 0; j < len; ++j) {
                    const double vr = v[j].real(), vi = -v[j].imag();  // conj(v[j])
                    rre[j] -= tr * vr - ti * vi;
                    rim[j] -= tr * vi + ti * vr;
                }
            }
        }
    }

    // Absorb subdiagonal phases into U so the tridiagonal is real nonnegative.
    std::vector<cd> phase(n, cd(1.0, 0.0));
    for (int k = 0; k + 1 < n; ++k) {
        cd e = a.at(k + 1, k);
        double m = std::abs(e);
        phase[k + 1] = (m > 0.0) ? e * phase[k] / m : phase[k];
    }
    for (int j = 1; j < n; ++j) {
        if (phase[j] == cd(1.0, 0.0)) continue;
        for (int i = 0; i < n; ++i) u.set(i, j, u.at(i, j) * phase[j]);
    }

    diag.resize(n);
    offdiag.assign(n, 0.0);
    for (int i = 0; i < n; ++i) diag[i] = a.re(i, i);
    for (int i = 0; i + 1 < n; ++i) offdiag[i] = std::abs(a.at(i + 1, i));
}

// Implicit-shift QL on a real symmetric tridiagonal, rotations applied to the
// complex columns of u.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, CMatrix& u) {
    const int n = static_cast<int>(d.size());
    if (n <= 1) return;
    const double eps = std::numeric_limits<double>::epsilon();
    e.resize(n, 0.0);  // e[i] couples d[i] and d[i+1]

    // absolute deflation floor: couplings below eps * ||T|| are backward-error
    // noise and would otherwise stall the relative split test on rank-deficient
    // inputs whose trailing block is pure roundoff
    double anorm = 0.0;
    for (int i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(d[i]) + std::abs(e[i]));
    const double tiny = eps * std::max(anorm, 1e-300);

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= tiny) break;
            }
            if (m != l) {
                if (iter++ == 60) throw numerical_error("eigensolver failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, pshift = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= pshift;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - pshift;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    pshift = s * r;
                    d[i + 1] = g + pshift;
                    g = c * r - b;
                    double* ure = u.re_data().data();
                    double* uim = u.im_data().data();
                    const int cols = u.cols();
                    for (int row = 0; row < u.rows(); ++row) {
                        size_t base = static_cast<size_t>(row) * cols;
                        double fr = ure[base + i + 1], fi = uim[base + i + 1];
                        ure[base + i + 1] = s * ure[base + i] + c * fr;
                        uim[base + i + 1] = s * uim[base + i] + c * fi;
                        ure[base + i] = c * ure[base + i] - s * fr;
                        uim[base + i] = c * uim[base + i] - s * fi;
                    }
                }
                if (underflow) continue;
                d[l] -= pshift;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

EigSystem hermitian_eig(const CMatrix& m) {
    if (!m.square()) throw validation_error("hermitian_eig: not square");
    for (double x : m.re_data())
        if (!std::isfinite(x)) throw numerical_error("hermitian_eig: non-finite entries");
    for (double x : m.im_data())
        if (!std::isfinite(x)) throw numerical_error("hermitian_eig: non-finite entries");
    const double guard = 1e-12 * std::max(1.0, m.max_abs());
    if (m.hermiticity_defect() > guard) throw validation_error("hermitian_eig: not Hermitian");
    CMatrix a = m;
    a.hermitize();

    const int n = a.rows();
    EigSystem es;
    if (n == 0) {
        es.vectors = CMatrix(0, 0);
        return es;
    }
    if (n == 1) {
        es.values = {a.re(0, 0)};
        es.vectors = CMatrix::identity(1);
        return es;
    }

    std::vector<double> d, e;
    CMatrix u;
    tridiagonalize(std::move(a), d, e, u);
    tridiag_ql(d, e, u);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d[x] > d[y]; });

    es.values.resize(n);
    es.vectors = CMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        es.values[j] = d[order[j]];
        for (int i = 0; i < n; ++i) es.vectors.set(i, j, u.at(i, order[j]));
    }
    return es;
}

double rank_floor(const std::vector<double>& values) {
    double lmax = 0.0;
    for (double v : values) lmax = std::max(lmax, v);
    return 1e-12 * lmax;
}

int numerical_rank(const std::vector<double>& values) {
    const double floor = rank_floor(values);
    int r = 0;
    for (double v : values)
        if (v > floor) ++r;
    return r;
}

CMatrix from_eigensystem(const EigSystem& es) {
    const int n = es.vectors.rows();
    CMatrix m(n, n);
    for (int j = 0; j < n; ++j) {
        std::vector<cd> col = es.column(j);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                m.set(i, k, m.at(i, k) + es.values[j] * col[i] * std::conj(col[k]));
    }
    m.hermitize();
    return m;
}

}  // namespace multiree
