#pragma once

#include <cmath>
#include <vector>

#include "multiree/eig.hpp"
#include "multiree/matrix.hpp"
#include "multiree/rng.hpp"
#include "multiree/states.hpp"

namespace multiree::test {

inline CMatrix random_hermitian(int n, RandomStream& rng, double scale = 1.0) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.set(i, j, cd(rng.normal(), rng.normal()) * scale);
    m.hermitize();
    return m;
}

inline double max_entry_diff(const CMatrix& a, const CMatrix& b) { return (a - b).max_abs(); }

inline double min_eigenvalue(const CMatrix& m) {
    return hermitian_eig(m).values.back();
}

// Independent transpose-one-party oracle (necessary separability condition).
inline CMatrix partial_transpose(const CMatrix& rho, const SubsystemLayout& layout, int party) {
    const int n = layout.parties();
    std::vector<long> strides(n);
    long s = 1;
    for (int p = n - 1; p >= 0; --p) {
        strides[p] = s;
        s *= layout.dims[p];
    }
    const long d = layout.total_dim();
    CMatrix out(static_cast<int>(d), static_cast<int>(d));
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) {
            long ip = (i / strides[party]) % layout.dims[party];
            long jp = (j / strides[party]) % layout.dims[party];
            long i2 = i + (jp - ip) * strides[party];
            long j2 = j + (ip - jp) * strides[party];
            out.set(static_cast<int>(i2), static_cast<int>(j2), rho.at(static_cast<int>(i), static_cast<int>(j)));
        }
    return out;
}

inline CMatrix pauli_x() {
    CMatrix m(2, 2);
    m.re(0, 1) = 1.0;
    m.re(1, 0) = 1.0;
    return m;
}

inline CMatrix diag(const std::vector<double>& d) {
    CMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m.re(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

}  // namespace multiree::test
