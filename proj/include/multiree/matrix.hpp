#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace multiree {

using cd = std::complex<double>;

// Raised on malformed inputs (bad dimensions, invariant violations, file
// problems). The CLI maps it to exit code 2.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an algorithm cannot produce a trustworthy result.
// The CLI maps it to exit code 3 under --strict.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense complex matrix, row-major, real and imaginary parts in separate
// arrays.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols),
          re_(static_cast<size_t>(rows) * cols, 0.0),
          im_(static_cast<size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw validation_error("negative matrix dimension");
    }

    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.re_[static_cast<size_t>(i) * n + i] = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& re(int i, int j) { return re_[idx(i, j)]; }
    double& im(int i, int j) { return im_[idx(i, j)]; }
    double re(int i, int j) const { return re_[idx(i, j)]; }
    double im(int i, int j) const { return im_[idx(i, j)]; }

    cd at(int i, int j) const { return {re_[idx(i, j)], im_[idx(i, j)]}; }
    void set(int i, int j, cd v) {
        re_[idx(i, j)] = v.real();
        im_[idx(i, j)] = v.imag();
    }

    const std::vector<double>& re_data() const { return re_; }
    const std::vector<double>& im_data() const { return im_; }
    std::vector<double>& re_data() { return re_; }
    std::vector<double>& im_data() { return im_; }

    CMatrix adjoint() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(double a);
    CMatrix operator+(const CMatrix& o) const { CMatrix r = *this; r += o; return r; }
    CMatrix operator-(const CMatrix& o) const { CMatrix r = *this; r -= o; return r; }
    CMatrix operator*(double a) const { CMatrix r = *this; r *= a; return r; }

    // this += a * x
    CMatrix& axpy(double a, const CMatrix& x);

    cd trace() const;
    double trace_real() const { return trace().real(); }
    double max_abs() const;
    double fro_norm() const;
    double hermiticity_defect() const;  // max |M[i][j] - conj(M[j][i])|
    bool is_hermitian(double tol = 1e-12) const { return square() && hermiticity_defect() <= tol; }

    // Replaces the matrix by (M + M^dag)/2.
    void hermitize();

    cd expectation(const std::vector<cd>& v) const;  // <v|M|v>

  private:
    size_t idx(int i, int j) const { return static_cast<size_t>(i) * cols_ + j; }

    int rows_ = 0, cols_ = 0;
    std::vector<double> re_, im_;
};

CMatrix matmul(const CMatrix& a, const CMatrix& b);
// U^dag A U
CMatrix sandwich(const CMatrix& u, const CMatrix& a);
std::vector<cd> mat_vec(const CMatrix& m, const std::vector<cd>& v);
cd dot(const std::vector<cd>& a, const std::vector<cd>& b);  // <a|b>
double vec_norm(const std::vector<cd>& v);
CMatrix outer(const std::vector<cd>& v);  // |v><v|
cd inner_product(const CMatrix& a, const CMatrix& b);  // Tr a^dag b

// Checks Hermiticity and replaces the matrix by its Hermitian part.
// `tol` is an absolute bound on the allowed defect.
void require_hermitian(CMatrix& m, double tol = 1e-12, const std::string& what = "operator");

// Density-operator validation: Hermitian, eigenvalues >= -1e-10, |trace-1| <= 1e-10.
void require_density(const CMatrix& m, const std::string& what = "state");

}  // namespace multiree
