#include "multiree/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "multiree/eig.hpp"

namespace multiree {

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) {
            r.re_[static_cast<size_t>(j) * rows_ + i] = re_[idx(i, j)];
            r.im_[static_cast<size_t>(j) * rows_ + i] = -im_[idx(i, j)];
        }
    return r;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw validation_error("matrix shape mismatch in +");
    for (size_t k = 0; k < re_.size(); ++k) {
        re_[k] += o.re_[k];
        im_[k] += o.im_[k];
    }
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw validation_error("matrix shape mismatch in -");
    for (size_t k = 0; k < re_.size(); ++k) {
        re_[k] -= o.re_[k];
        im_[k] -= o.im_[k];
    }
    return *this;
}

CMatrix& CMatrix::operator*=(double a) {
    for (size_t k = 0; k < re_.size(); ++k) {
        re_[k] *= a;
        im_[k] *= a;
    }
    return *this;
}

CMatrix& CMatrix::axpy(double a, const CMatrix& x) {
    if (rows_ != x.rows_ || cols_ != x.cols_) throw validation_error("matrix shape mismatch in axpy");
    for (size_t k = 0; k < re_.size(); ++k) {
        re_[k] += a * x.re_[k];
        im_[k] += a * x.im_[k];
    }
    return *this;
}

cd CMatrix::trace() const {
    if (!square()) throw validation_error("trace of non-square matrix");
    double tr = 0.0, ti = 0.0;
    for (int i = 0; i < rows_; ++i) {
        tr += re_[idx(i, i)];
        ti += im_[idx(i, i)];
    }
    return {tr, ti};
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (size_t k = 0; k < re_.size(); ++k)
        m = std::max(m, std::abs(re_[k]) + std::abs(im_[k]));
    return m;
}

double CMatrix::fro_norm() const {
    double s = 0.0;
    for (size_t k = 0; k < re_.size(); ++k) s += re_[k] * re_[k] + im_[k] * im_[k];
    return std::sqrt(s);
}

double CMatrix::hermiticity_defect() const {
    if (!square()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
        for (int j = i; j < cols_; ++j) {
            double dr = re_[idx(i, j)] - re_[idx(j, i)];
            double di = im_[idx(i, j)] + im_[idx(j, i)];
            m = std::max(m, std::hypot(dr, di));
        }
    return m;
}

void CMatrix::hermitize() {
    if (!square()) throw validation_error("hermitize on non-square matrix");
    for (int i = 0; i < rows_; ++i) {
        im_[idx(i, i)] = 0.0;
        for (int j = i + 1; j < cols_; ++j) {
            double ar = 0.5 * (re_[idx(i, j)] + re_[idx(j, i)]);
            double ai = 0.5 * (im_[idx(i, j)] - im_[idx(j, i)]);
            re_[idx(i, j)] = ar;
            im_[idx(i, j)] = ai;
            re_[idx(j, i)] = ar;
            im_[idx(j, i)] = -ai;
        }
    }
}

cd CMatrix::expectation(const std::vector<cd>& v) const {
    if (static_cast<int>(v.size()) != rows_ || !square())
        throw validation_error("expectation dimension mismatch");
    cd acc = 0.0;
    for (int i = 0; i < rows_; ++i) {
        cd row = 0.0;
        for (int j = 0; j < cols_; ++j) row += at(i, j) * v[j];
        acc += std::conj(v[i]) * row;
    }
    return acc;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw validation_error("matmul shape mismatch");
    const int n = a.rows(), k = a.cols(), m = b.cols();
    CMatrix c(n, m);
    const double* ar = a.re_data().data();
    const double* ai = a.im_data().data();
    const double* br = b.re_data().data();
    const double* bi = b.im_data().data();
    double* cr = c.re_data().data();
    double* ci = c.im_data().data();
    for (int i = 0; i < n; ++i) {
        for (int p = 0; p < k; ++p) {
            const double xr = ar[static_cast<size_t>(i) * k + p];
            const double xi = ai[static_cast<size_t>(i) * k + p];
            if (xr == 0.0 && xi == 0.0) continue;
            const double* brow = br + static_cast<size_t>(p) * m;
            const double* birow = bi + static_cast<size_t>(p) * m;
            double* crow = cr + static_cast<size_t>(i) * m;
            double* cirow = ci + static_cast<size_t>(i) * m;
            for (int j = 0; j < m; ++j) {
                crow[j] += xr * brow[j] - xi * birow[j];
                cirow[j] += xr * birow[j] + xi * brow[j];
            }
        }
    }
    return c;
}

CMatrix sandwich(const CMatrix& u, const CMatrix& a) {
    return matmul(u.adjoint(), matmul(a, u));
}

std::vector<cd> mat_vec(const CMatrix& m, const std::vector<cd>& v) {
    if (m.cols() != static_cast<int>(v.size())) throw validation_error("mat_vec shape mismatch");
    std::vector<cd> r(m.rows(), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        cd acc = 0.0;
        for (int j = 0; j < m.cols(); ++j) acc += m.at(i, j) * v[j];
        r[i] = acc;
    }
    return r;
}

cd dot(const std::vector<cd>& a, const std::vector<cd>& b) {
    if (a.size() != b.size()) throw validation_error("dot shape mismatch");
    cd acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double vec_norm(const std::vector<cd>& v) {
    double s = 0.0;
    for (const cd& x : v) s += std::norm(x);
    return std::sqrt(s);
}

CMatrix outer(const std::vector<cd>& v) {
    const int n = static_cast<int>(v.size());
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.set(i, j, v[i] * std::conj(v[j]));
    return m;
}

cd inner_product(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw validation_error("inner_product shape mismatch");
    cd acc = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) acc += std::conj(a.at(i, j)) * b.at(i, j);
    return acc;
}

void require_hermitian(CMatrix& m, double tol, const std::string& what) {
    if (!m.square()) throw validation_error(what + ": not square");
    if (m.hermiticity_defect() > tol) throw validation_error(what + ": not Hermitian");
    m.hermitize();
}

void require_density(const CMatrix& m, const std::string& what) {
    if (!m.is_hermitian(1e-10)) throw validation_error(what + ": not Hermitian");
    cd tr = m.trace();
    if (std::abs(tr - cd(1.0, 0.0)) > 1e-10) throw validation_error(what + ": trace != 1");
    EigSystem es = hermitian_eig(m);
    if (es.values.back() < -1e-10) throw validation_error(what + ": negative eigenvalue");
}

}  // namespace multiree
