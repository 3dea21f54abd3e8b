#include "multiree/states.hpp"

#include <algorithm>
#include <cmath>

namespace multiree {

void PureState::check_normalized(double tol) const {
    if (std::abs(vec_norm(amplitudes) - 1.0) > tol)
        throw validation_error("pure state not normalized");
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
    const int ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    CMatrix c(ar * br, ac * bc);
    for (int i = 0; i < ar; ++i)
        for (int j = 0; j < ac; ++j) {
            const double xr = a.re(i, j), xi = a.im(i, j);
            if (xr == 0.0 && xi == 0.0) continue;
            for (int k = 0; k < br; ++k)
                for (int l = 0; l < bc; ++l) {
                    const double yr = b.re(k, l), yi = b.im(k, l);
                    c.re(i * br + k, j * bc + l) = xr * yr - xi * yi;
                    c.im(i * br + k, j * bc + l) = xr * yi + xi * yr;
                }
        }
    return c;
}

PureState tensor(const PureState& a, const PureState& b) {
    std::vector<cd> amp(static_cast<size_t>(a.dim) * b.dim);
    for (int i = 0; i < a.dim; ++i)
        for (int j = 0; j < b.dim; ++j) amp[static_cast<size_t>(i) * b.dim + j] = a.amplitudes[i] * b.amplitudes[j];
    return PureState(std::move(amp));
}

namespace {

std::vector<long> strides_of(const SubsystemLayout& layout) {
    const int n = layout.parties();
    std::vector<long> st(n);
    long s = 1;
    for (int p = n - 1; p >= 0; --p) {
        st[p] = s;
        s *= layout.dims[p];
    }
    return st;
}

}  // namespace

CMatrix partial_trace(const CMatrix& rho, const SubsystemLayout& layout, const std::vector<int>& keep) {
    layout.check_operator(rho);
    const int n = layout.parties();
    if (keep.empty()) throw validation_error("partial_trace: empty keep set");
    std::vector<bool> kept(n, false);
    for (int p : keep) {
        if (p < 0 || p >= n) throw validation_error("partial_trace: party index out of range");
        if (kept[p]) throw validation_error("partial_trace: duplicate party index");
        kept[p] = true;
    }

    std::vector<int> keep_sorted, traced;
    for (int p = 0; p < n; ++p) (kept[p] ? keep_sorted : traced).push_back(p);

    const std::vector<long> st = strides_of(layout);
    long dk = 1, dt = 1;
    for (int p : keep_sorted) dk *= layout.dims[p];
    for (int p : traced) dt *= layout.dims[p];

    // enumerate kept and traced multi-indices as flat offsets
    std::vector<long> keep_offsets(dk, 0), trace_offsets(dt, 0);
    {
        std::vector<int> idx(keep_sorted.size(), 0);
        for (long c = 0; c < dk; ++c) {
            long off = 0;
            for (size_t q = 0; q < keep_sorted.size(); ++q) off += idx[q] * st[keep_sorted[q]];
            keep_offsets[c] = off;
            for (int q = static_cast<int>(keep_sorted.size()) - 1; q >= 0; --q) {
                if (++idx[q] < layout.dims[keep_sorted[q]]) break;
                idx[q] = 0;
            }
        }
    }
    {
        std::vector<int> idx(traced.size(), 0);
        for (long c = 0; c < dt; ++c) {
            long off = 0;
            for (size_t q = 0; q < traced.size(); ++q) off += idx[q] * st[traced[q]];
            trace_offsets[c] = off;
            for (int q = static_cast<int>(traced.size()) - 1; q >= 0; --q) {
                if (++idx[q] < layout.dims[traced[q]]) break;
                idx[q] = 0;
            }
        }
    }

    CMatrix out(static_cast<int>(dk), static_cast<int>(dk));
    for (long i = 0; i < dk; ++i)
        for (long j = 0; j < dk; ++j) {
            double sr = 0.0, si = 0.0;
            for (long t = 0; t < dt; ++t) {
                long row = keep_offsets[i] + trace_offsets[t];
                long col = keep_offsets[j] + trace_offsets[t];
                sr += rho.re(static_cast<int>(row), static_cast<int>(col));
                si += rho.im(static_cast<int>(row), static_cast<int>(col));
            }
            out.re(static_cast<int>(i), static_cast<int>(j)) = sr;
            out.im(static_cast<int>(i), static_cast<int>(j)) = si;
        }
    return out;
}

CMatrix marginal(const CMatrix& rho, const SubsystemLayout& layout, int party) {
    return partial_trace(rho, layout, {party});
}

CMatrix permute_systems(const CMatrix& rho, const SubsystemLayout& layout, const std::vector<int>& perm) {
    layout.check_operator(rho);
    const int n = layout.parties();
    if (static_cast<int>(perm.size()) != n) throw validation_error("permute_systems: bad permutation");
    std::vector<bool> seen(n, false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p]) throw validation_error("permute_systems: bad permutation");
        seen[p] = true;
    }
    const std::vector<long> st_old = strides_of(layout);
    std::vector<int> new_dims(n);
    for (int p = 0; p < n; ++p) new_dims[p] = layout.dims[perm[p]];
    SubsystemLayout new_layout(new_dims);
    const std::vector<long> st_new = strides_of(new_layout);
    const long d = layout.total_dim();

    // map[new flat index] = old flat index
    std::vector<long> map(d, 0);
    std::vector<int> idx(n, 0);
    for (long c = 0; c < d; ++c) {
        long off_new = 0, off_old = 0;
        for (int p = 0; p < n; ++p) {
            off_new += idx[p] * st_new[p];
            off_old += idx[p] * st_old[perm[p]];
        }
        map[off_new] = off_old;
        for (int p = n - 1; p >= 0; --p) {
            if (++idx[p] < new_dims[p]) break;
            idx[p] = 0;
        }
    }

    CMatrix out(static_cast<int>(d), static_cast<int>(d));
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) {
            out.re(static_cast<int>(i), static_cast<int>(j)) = rho.re(static_cast<int>(map[i]), static_cast<int>(map[j]));
            out.im(static_cast<int>(i), static_cast<int>(j)) = rho.im(static_cast<int>(map[i]), static_cast<int>(map[j]));
        }
    return out;
}

PureState permute_systems(const PureState& psi, const SubsystemLayout& layout, const std::vector<int>& perm) {
    CMatrix amp(psi.dim, 1);
    for (int i = 0; i < psi.dim; ++i) amp.set(i, 0, psi.amplitudes[i]);
    const int n = layout.parties();
    const std::vector<long> st_old = strides_of(layout);
    std::vector<int> new_dims(n);
    for (int p = 0; p < n; ++p) new_dims[p] = layout.dims[perm[p]];
    SubsystemLayout new_layout(new_dims);
    const std::vector<long> st_new = strides_of(new_layout);
    std::vector<cd> out(psi.dim);
    std::vector<int> idx(n, 0);
    for (long c = 0; c < psi.dim; ++c) {
        long off_new = 0, off_old = 0;
        for (int p = 0; p < n; ++p) {
            off_new += idx[p] * st_new[p];
            off_old += idx[p] * st_old[perm[p]];
        }
        out[off_new] = psi.amplitudes[off_old];
        for (int p = n - 1; p >= 0; --p) {
            if (++idx[p] < new_dims[p]) break;
            idx[p] = 0;
        }
    }
    return PureState(std::move(out));
}

SchmidtDecomposition schmidt_decompose(const PureState& psi, const SubsystemLayout& layout, int cut) {
    const int n = layout.parties();
    if (cut < 1 || cut >= n) throw validation_error("schmidt_decompose: invalid cut");
    if (static_cast<long>(psi.dim) != layout.total_dim())
        throw validation_error("schmidt_decompose: layout mismatch");
    long dl = 1, dr = 1;
    for (int p = 0; p < cut; ++p) dl *= layout.dims[p];
    for (int p = cut; p < n; ++p) dr *= layout.dims[p];

    // amplitude matrix A[i,j], left marginal = A A^dag
    CMatrix a(static_cast<int>(dl), static_cast<int>(dr));
    for (long i = 0; i < dl; ++i)
        for (long j = 0; j < dr; ++j) a.set(static_cast<int>(i), static_cast<int>(j), psi.amplitudes[i * dr + j]);
    CMatrix gram = matmul(a, a.adjoint());
    gram.hermitize();
    EigSystem es = hermitian_eig(gram);
    const double floor = rank_floor(es.values);

    SchmidtDecomposition sd;
    for (size_t k = 0; k < es.values.size(); ++k) {
        double lam = es.values[k];
        if (lam <= floor) continue;
        double coeff = std::sqrt(lam);
        std::vector<cd> u = es.column(static_cast<int>(k));
        // psi = sum_k c_k u_k (x) v_k requires v = conj(A^dag u) / coeff
        std::vector<cd> v(dr, 0.0);
        for (long j = 0; j < dr; ++j) {
            cd acc = 0.0;
            for (long i = 0; i < dl; ++i) acc += a.at(static_cast<int>(i), static_cast<int>(j)) * std::conj(u[i]);
            v[j] = acc / coeff;
        }
        sd.coefficients.push_back(coeff);
        sd.left_vectors.push_back(std::move(u));
        sd.right_vectors.push_back(std::move(v));
    }
    return sd;
}

PureState purify(const CMatrix& rho, int* reference_dim) {
    CMatrix m = rho;
    require_hermitian(m, 1e-10, "purify input");
    EigSystem es = hermitian_eig(m);
    if (es.values.back() < -1e-10) throw validation_error("purify: input not positive");
    const double floor = rank_floor(es.values);
    const int d = m.rows();
    int rank = 0;
    for (double v : es.values)
        if (v > floor) ++rank;
    if (rank == 0) throw validation_error("purify: zero operator");
    std::vector<cd> amp(static_cast<size_t>(d) * rank, 0.0);
    for (int k = 0; k < rank; ++k) {
        double c = std::sqrt(es.values[k]);
        std::vector<cd> v = es.column(k);
        for (int i = 0; i < d; ++i) amp[static_cast<size_t>(i) * rank + k] = c * v[i];
    }
    if (reference_dim) *reference_dim = rank;
    return PureState(std::move(amp));
}

double trace_distance(const CMatrix& rho, const CMatrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw validation_error("trace_distance: dimension mismatch");
    CMatrix diff = rho - sigma;
    diff.hermitize();
    EigSystem es = hermitian_eig(diff);
    double s = 0.0;
    for (double v : es.values) s += std::abs(v);
    return 0.5 * s;
}

CMatrix random_density(int dim, int rank, RandomStream& rng) {
    if (rank < 1 || rank > dim) throw validation_error("random_density: invalid rank");
    // Ginibre factor G (dim x rank); rho = G G^dag / tr
    CMatrix g(dim, rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j) g.set(i, j, cd(rng.normal(), rng.normal()));
    CMatrix rho = matmul(g, g.adjoint());
    rho.hermitize();
    double tr = rho.trace_real();
    if (tr <= 0.0) throw numerical_error("random_density: degenerate draw");
    rho *= 1.0 / tr;
    return rho;
}

CMatrix random_density(int dim, int rank, uint64_t seed) {
    RandomStream rng(seed);
    return random_density(dim, rank, rng);
}

PureState random_pure(int dim, RandomStream& rng) {
    std::vector<cd> amp(dim);
    for (int i = 0; i < dim; ++i) amp[i] = cd(rng.normal(), rng.normal());
    double nrm = vec_norm(amp);
    for (auto& x : amp) x /= nrm;
    return PureState(std::move(amp));
}

PureState random_pure(int dim, uint64_t seed) {
    RandomStream rng(seed);
    return random_pure(dim, rng);
}

PureState basis_state(int dim, int index) {
    if (index < 0 || index >= dim) throw validation_error("basis_state: index out of range");
    std::vector<cd> amp(dim, 0.0);
    amp[index] = 1.0;
    return PureState(std::move(amp));
}

PureState bell_state() {
    std::vector<cd> amp(4, 0.0);
    amp[0] = amp[3] = 1.0 / std::sqrt(2.0);
    return PureState(std::move(amp));
}

PureState ghz_state(int parties) {
    long d = 1;
    for (int p = 0; p < parties; ++p) d *= 2;
    std::vector<cd> amp(d, 0.0);
    amp[0] = amp[d - 1] = 1.0 / std::sqrt(2.0);
    return PureState(std::move(amp));
}

}  // namespace multiree
