#include "multiree/ree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "multiree/entropy.hpp"
#include "multiree/io.hpp"

namespace multiree {

namespace {

constexpr double kFloorWeight = 1e-9;
const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

CMatrix rel_entropy_gradient(const CMatrix& rho, const CMatrix& sigma) {
    if (rho.rows() != sigma.rows()) throw validation_error("rel_entropy_gradient: dimension mismatch");
    EigSystem ses = hermitian_eig(sigma);
    const double floor = rank_floor(ses.values);
    const int d = sigma.rows();
    for (double mu : ses.values)
        if (mu <= floor) throw numerical_error("rel_entropy_gradient: singular sigma");

    CMatrix rho_t = sandwich(ses.vectors, rho);
    CMatrix t(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double a = ses.values[j], b = ses.values[k];
            double f;
            if (std::abs(a - b) <= 1e-12 * std::max(a, b))
                f = 2.0 / (a + b);
            else
                f = (std::log(a) - std::log(b)) / (a - b);
            t.set(j, k, rho_t.at(j, k) * f);
        }
    CMatrix g = matmul(ses.vectors, matmul(t, ses.vectors.adjoint()));
    g *= -1.0;
    g.hermitize();
    return g;
}

namespace {

// d_s x d_s compression of G against the other parties' unit vectors.
CMatrix contract_against(const CMatrix& g, const SubsystemLayout& layout,
                         const std::vector<PureState>& parts, int party) {
    const int n = layout.parties();
    const long d = layout.total_dim();
    const int ds = layout.dims[party];

    std::vector<long> strides(n);
    long s = 1;
    for (int p = n - 1; p >= 0; --p) {
        strides[p] = s;
        s *= layout.dims[p];
    }

    // weight[I] = prod_{t != party} parts[t][I_t]; row index = I_party
    std::vector<cd> w(d);
    std::vector<int> sub(d);
    for (long i = 0; i < d; ++i) {
        cd acc = 1.0;
        long rem = i;
        int mine = 0;
        for (int p = 0; p < n; ++p) {
            int ip = static_cast<int>(rem / strides[p]);
            rem %= strides[p];
            if (p == party)
                mine = ip;
            else
                acc *= parts[p].amplitudes[ip];
        }
        w[i] = acc;
        sub[i] = mine;
    }

    CMatrix m(ds, ds);
    for (long i = 0; i < d; ++i) {
        if (w[i] == cd(0.0, 0.0)) continue;
        const cd wi = std::conj(w[i]);
        for (long j = 0; j < d; ++j) {
            if (w[j] == cd(0.0, 0.0)) continue;
            m.set(sub[i], sub[j], m.at(sub[i], sub[j]) + wi * g.at(static_cast<int>(i), static_cast<int>(j)) * w[j]);
        }
    }
    m.hermitize();
    return m;
}

struct LmoConfig {
    const std::vector<CMatrix>* hams = nullptr;  // per-party operators
    double lambda = 0.0;
};

LmoResult lmo_run(const CMatrix& g, const SubsystemLayout& layout, int restarts, uint64_t seed,
                  const LmoConfig& cfg) {
    const int n = layout.parties();
    LmoResult best;
    best.value = kInf;

    for (int rs = 0; rs < restarts; ++rs) {
        std::vector<PureState> parts(n);
        if (rs == 0) {
            // greedy start: per-party compression against maximally mixed partners
            for (int p = 0; p < n; ++p) {
                std::vector<cd> flat(layout.dims[p], cd(1.0 / std::sqrt(static_cast<double>(layout.dims[p])), 0.0));
                parts[p] = PureState(flat);
            }
        } else {
            RandomStream rng(mix_seed(seed, static_cast<uint64_t>(rs)));
            for (int p = 0; p < n; ++p) parts[p] = random_pure(layout.dims[p], rng);
        }

        double value = kInf;
        for (int sweep = 0; sweep < 200; ++sweep) {
            double new_value = value;
            for (int p = 0; p < n; ++p) {
                CMatrix m = contract_against(g, layout, parts, p);
                double shift = 0.0;
                if (cfg.hams) {
                    for (int t = 0; t < n; ++t)
                        if (t != p) shift += (*cfg.hams)[t].expectation(parts[t].amplitudes).real();
                    m.axpy(cfg.lambda, (*cfg.hams)[p]);
                }
                EigSystem es = hermitian_eig(m);
                const int last = m.rows() - 1;
                parts[p] = PureState(es.column(last));
                new_value = es.values[last] + cfg.lambda * shift;
            }
            if (std::abs(value - new_value) <= 1e-12 * std::max(1.0, std::abs(new_value))) {
                value = new_value;
                break;
            }
            value = new_value;
        }
        if (value < best.value) {
            best.value = value;
            best.parts = parts;
        }
    }

    best.product = best.parts[0];
    for (int p = 1; p < n; ++p) best.product = tensor(best.product, best.parts[p]);
    return best;
}

}  // namespace

LmoResult lmo_product(const CMatrix& g, const SubsystemLayout& layout, int restarts, uint64_t seed) {
    if (!g.square() || g.rows() != layout.total_dim())
        throw validation_error("lmo_product: dimension mismatch");
    return lmo_run(g, layout, std::max(1, restarts), seed, {});
}

namespace {

struct FwAtom {
    double weight = 0.0;
    std::vector<CMatrix> parts;
    CMatrix assembled;
    double energy = 0.0;
};

double atom_energy(const std::vector<CMatrix>& parts, const std::vector<CMatrix>* hams) {
    if (!hams) return 0.0;
    double e = 0.0;
    for (size_t p = 0; p < parts.size(); ++p) e += inner_product((*hams)[p], parts[p]).real();
    return e;
}

CMatrix assemble_parts(const std::vector<CMatrix>& parts) {
    CMatrix m = parts[0];
    for (size_t p = 1; p < parts.size(); ++p) m = tensor(m, parts[p]);
    return m;
}

// Brent minimizer on [lo, hi] to absolute width `tol`; the objective is
// convex and may be +inf near the right endpoint.
double line_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double cgold = 0.3819660112501051;
    double a = lo, b = hi;
    double x = a + cgold * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < 120; ++it) {
        double xm = 0.5 * (a + b);
        double tol1 = 0.5 * tol + 1e-14 * std::abs(x);
        double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
        bool golden = true;
        if (std::abs(e) > tol1 && std::isfinite(fx) && std::isfinite(fw) && std::isfinite(fv)) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            double etemp = e;
            e = d;
            if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
                golden = false;
            }
        }
        if (golden) {
            e = (x >= xm) ? a - x : b - x;
            d = cgold * e;
        }
        double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
        double fu = f(u);
        if (fu <= fx) {
            if (u >= x)
                a = x;
            else
                b = x;
            v = w;
            w = x;
            x = u;
            fv = fw;
            fw = fx;
            fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w;
                w = u;
                fv = fw;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return x;
}

struct FwState {
    SubsystemLayout layout;
    std::vector<FwAtom> atoms;  // atoms[0] is the full-rank uniform floor atom
    CMatrix sigma;
    double energy = 0.0;

    void push(double w, std::vector<CMatrix> parts, const std::vector<CMatrix>* hams) {
        FwAtom a;
        a.weight = w;
        a.assembled = assemble_parts(parts);
        a.energy = atom_energy(parts, hams);
        a.parts = std::move(parts);
        atoms.push_back(std::move(a));
    }

    void rebuild() {
        sigma = CMatrix(static_cast<int>(layout.total_dim()), static_cast<int>(layout.total_dim()));
        energy = 0.0;
        for (const auto& a : atoms) {
            sigma.axpy(a.weight, a.assembled);
            energy += a.weight * a.energy;
        }
        sigma.hermitize();
    }

    // sigma <- (1-t) sigma + t atoms[k]
    void step(double t, size_t k) {
        for (auto& a : atoms) a.weight *= (1.0 - t);
        atoms[k].weight += t;
        sigma *= (1.0 - t);
        sigma.axpy(t, atoms[k].assembled);
        energy = (1.0 - t) * energy + t * atoms[k].energy;
    }

    // keeps the floor atom at weight >= kFloorWeight, within the energy budget
    void refloor(double energy_cap) {
        double w0 = atoms[0].weight;
        if (w0 >= kFloorWeight) return;
        double delta = (kFloorWeight - w0) / (1.0 - w0);
        if (std::isfinite(energy_cap) && atoms[0].energy > energy) {
            double budget = (energy_cap - energy) / (atoms[0].energy - energy);
            delta = std::min(delta, std::max(0.0, 0.9 * budget));
        }
        if (delta <= 0.0) return;
        for (auto& a : atoms) a.weight *= (1.0 - delta);
        atoms[0].weight += delta;
        sigma *= (1.0 - delta);
        sigma.axpy(delta, atoms[0].assembled);
        energy = (1.0 - delta) * energy + delta * atoms[0].energy;
    }

    void drop_tiny() {
        double removed = 0.0;
        std::vector<FwAtom> kept;
        for (size_t i = 0; i < atoms.size(); ++i) {
            if (i > 0 && atoms[i].weight < 1e-12) {
                removed += atoms[i].weight;
                continue;
            }
            kept.push_back(std::move(atoms[i]));
        }
        if (removed > 0.0) {
            atoms = std::move(kept);
            double scale = 1.0 / (1.0 - removed);
            for (auto& a : atoms) a.weight *= scale;
            rebuild();
        } else {
            atoms = std::move(kept);
        }
    }
};

struct FwProblem {
    const CMatrix& rho;
    const SubsystemLayout& layout;
    const std::vector<CMatrix>* hams = nullptr;
    double energy_cap = kInf;
};

SolveResult fw_solve(const FwProblem& prob, const SolveOptions& opts) {
    const SubsystemLayout& layout = prob.layout;
    const int n = layout.parties();
    const bool constrained = prob.hams != nullptr && std::isfinite(prob.energy_cap);

    EigSystem rho_eig = hermitian_eig(prob.rho);
    auto objective = [&](const CMatrix& s) { return relative_entropy_given_eig(rho_eig, s); };

    FwState st;
    st.layout = layout;

    // floor atom: uniform product state
    std::vector<CMatrix> uniform_parts;
    for (int p = 0; p < n; ++p)
        uniform_parts.push_back(CMatrix::identity(layout.dims[p]) * (1.0 / layout.dims[p]));
    st.push(kFloorWeight, uniform_parts, prob.hams);

    // start: product of marginals; under an active energy cap blend toward the
    // ground product until the budget is met
    std::vector<CMatrix> marg_parts;
    for (int p = 0; p < n; ++p) marg_parts.push_back(marginal(prob.rho, layout, p));
    double marg_energy = atom_energy(marg_parts, prob.hams);
    std::vector<CMatrix> ground_parts;
    if (constrained) {
        for (int p = 0; p < n; ++p) {
            EigSystem hes = hermitian_eig((*prob.hams)[p]);
            ground_parts.push_back(outer(hes.column(layout.dims[p] - 1)));  // min eigenvector
        }
    }
    if (!constrained || marg_energy <= prob.energy_cap) {
        st.push(1.0 - kFloorWeight, marg_parts, prob.hams);
    } else {
        double ground_energy = atom_energy(ground_parts, prob.hams);
        double theta = 0.9 * (prob.energy_cap - ground_energy) /
                       std::max(marg_energy - ground_energy, 1e-300);
        theta = std::min(std::max(theta, 0.0), 1.0);
        if (theta > 0.0) st.push((1.0 - kFloorWeight) * theta, marg_parts, prob.hams);
        st.push((1.0 - kFloorWeight) * (1.0 - theta), ground_parts, prob.hams);
    }
    st.rebuild();
    if (constrained && st.energy > prob.energy_cap) {
        // shrink the floor atom until feasible
        st.atoms[0].weight = 1e-12;
        st.atoms[1].weight = 1.0 - 1e-12;
        st.rebuild();
        if (st.energy > prob.energy_cap + 1e-9)
            throw validation_error("energy_constrained_ree: infeasible energy bound");
    }

    SolveResult res;
    double f_cur = objective(st.sigma);
    double best_gap = kInf;
    int iter = 0;
    int stalled = 0;
    double f_prev = kInf;

    for (;; ++iter) {
        CMatrix g;
        try {
            g = rel_entropy_gradient(prob.rho, st.sigma);
        } catch (const numerical_error&) {
            break;  // sigma lost full rank; report current iterate
        }
        double tr_gs = inner_product(g, st.sigma).real();

        // new atom + duality gap (Lagrangian-certified in the constrained case)
        LmoResult cand;
        double gap;
        if (!constrained) {
            cand = lmo_run(g, layout, opts.restarts, mix_seed(opts.seed, static_cast<uint64_t>(iter)), {});
            gap = tr_gs - cand.value;
        } else {
            gap = kInf;
            LmoConfig cfg;
            cfg.hams = prob.hams;
            cfg.lambda = 0.0;
            uint64_t lmoseed = mix_seed(opts.seed, static_cast<uint64_t>(iter));
            LmoResult at0 = lmo_run(g, layout, opts.restarts, lmoseed, cfg);
            gap = std::min(gap, tr_gs - at0.value);  // lambda = 0 certificate
            auto energy_of = [&](const LmoResult& l) {
                double e = 0.0;
                for (int p = 0; p < n; ++p) e += (*prob.hams)[p].expectation(l.parts[p].amplitudes).real();
                return e;
            };
            double cand_energy = energy_of(at0);
            if (cand_energy <= prob.energy_cap) {
                cand = at0;
            } else {
                double lo = 0.0, hi = 1e6;
                LmoResult feasible;
                bool have_feasible = false;
                for (int it2 = 0; it2 < 60; ++it2) {
                    double lam = (it2 == 0) ? hi : 0.5 * (lo + hi);
                    cfg.lambda = lam;
                    LmoResult l = lmo_run(g, layout, std::max(2, opts.restarts / 2),
                                          mix_seed(lmoseed, static_cast<uint64_t>(it2)), cfg);
                    // v(lam) = <phi|(G + lam H)|phi>; certificate for any lam >= 0
                    gap = std::min(gap, tr_gs - l.value + lam * prob.energy_cap);
                    if (energy_of(l) <= prob.energy_cap) {
                        feasible = l;
                        have_feasible = true;
                        hi = lam;
                    } else {
                        lo = lam;
                    }
                }
                if (!have_feasible) {
                    // the multiplier cap could not tame the gradient; fall back
                    // to the always-feasible ground product direction
                    LmoResult fallback;
                    fallback.parts.clear();
                    for (int p = 0; p < n; ++p) {
                        EigSystem hes = hermitian_eig((*prob.hams)[p]);
                        fallback.parts.push_back(PureState(hes.column(layout.dims[p] - 1)));
                    }
                    fallback.product = fallback.parts[0];
                    for (int p = 1; p < n; ++p)
                        fallback.product = tensor(fallback.product, fallback.parts[p]);
                    fallback.value = g.expectation(fallback.product.amplitudes).real();
                    cand = fallback;
                } else {
                    cand = feasible;
                }
            }
        }

        if (gap <= opts.tol || iter >= opts.max_iter) {
            best_gap = gap;
            break;
        }

        std::vector<CMatrix> cand_parts;
        for (int p = 0; p < n; ++p) cand_parts.push_back(outer(cand.parts[p].amplitudes));
        st.push(0.0, std::move(cand_parts), prob.hams);
        const size_t new_idx = st.atoms.size() - 1;
        const CMatrix& atom_mat = st.atoms[new_idx].assembled;
        const double atom_dir = inner_product(g, atom_mat).real();

        // away atom: the active atom the gradient most wants to shed
        size_t away_idx = 0;
        double away_dir = -kInf;
        for (size_t i = 1; i + 1 < st.atoms.size(); ++i) {
            if (st.atoms[i].weight <= 0.0) continue;
            double d = inner_product(g, st.atoms[i].assembled).real();
            if (d > away_dir) {
                away_dir = d;
                away_idx = i;
            }
        }

        bool pairwise = away_idx != 0 && (away_dir - atom_dir) > (tr_gs - atom_dir);
        if (constrained && st.atoms[new_idx].energy > st.atoms[away_idx].energy) {
            // shifting weight could raise the mixture energy past the cap
            double budget = prob.energy_cap - st.energy;
            double per_unit = st.atoms[new_idx].energy - st.atoms[away_idx].energy;
            if (budget < per_unit * st.atoms[away_idx].weight) pairwise = false;
        }

        double t_star = 0.0;
        if (pairwise) {
            const CMatrix& away_mat = st.atoms[away_idx].assembled;
            const double t_max = st.atoms[away_idx].weight;
            auto line = [&](double t) {
                CMatrix mix = st.sigma;
                mix.axpy(t, atom_mat);
                mix.axpy(-t, away_mat);
                return objective(mix);
            };
            t_star = line_min(line, 0.0, t_max, 1e-12);
            if (t_star < 1e-15) t_star = 0.0;
            st.atoms[new_idx].weight += t_star;
            st.atoms[away_idx].weight -= t_star;
            st.sigma.axpy(t_star, atom_mat);
            st.sigma.axpy(-t_star, away_mat);
            st.energy += t_star * (st.atoms[new_idx].energy - st.atoms[away_idx].energy);
        } else {
            auto line = [&](double t) {
                CMatrix mix = st.sigma * (1.0 - t);
                mix.axpy(t, atom_mat);
                return objective(mix);
            };
            t_star = line_min(line, 0.0, 1.0, 1e-12);
            if (t_star < 1e-15) t_star = 0.0;
            st.step(t_star, new_idx);
        }
        st.refloor(prob.energy_cap);
        f_prev = f_cur;
        f_cur = objective(st.sigma);

        // periodic weight reoptimization over the collected atoms
        if ((iter + 1) % 5 == 0 && st.atoms.size() > 2) {
            st.drop_tiny();
            double eta = 1.0;
            for (int mdstep = 0; mdstep < 25 && eta > 1e-9; ++mdstep) {
                CMatrix gm;
                try {
                    gm = rel_entropy_gradient(prob.rho, st.sigma);
                } catch (const numerical_error&) {
                    break;
                }
                std::vector<double> grad(st.atoms.size());
                double gmin = kInf, gmax = -kInf;
                for (size_t i = 0; i < st.atoms.size(); ++i) {
                    grad[i] = inner_product(gm, st.atoms[i].assembled).real();
                    if (st.atoms[i].weight > 0.0) {
                        gmin = std::min(gmin, grad[i]);
                        gmax = std::max(gmax, grad[i]);
                    }
                }
                const double spread = std::max(gmax - gmin, 1e-300);
                std::vector<double> w(st.atoms.size());
                double total = 0.0;
                for (size_t i = 0; i < st.atoms.size(); ++i) {
                    w[i] = st.atoms[i].weight * std::exp(-eta / spread * (grad[i] - gmin));
                    total += w[i];
                }
                if (!(total > 0.0)) break;
                for (auto& x : w) x /= total;
                if (w[0] < kFloorWeight) {
                    double corr = (kFloorWeight - w[0]) / (1.0 - w[0]);
                    for (auto& x : w) x *= (1.0 - corr);
                    w[0] += corr;
                }
                CMatrix strial(st.sigma.rows(), st.sigma.cols());
                double etrial = 0.0;
                for (size_t i = 0; i < st.atoms.size(); ++i) {
                    strial.axpy(w[i], st.atoms[i].assembled);
                    etrial += w[i] * st.atoms[i].energy;
                }
                strial.hermitize();
                if (constrained && etrial > prob.energy_cap) {
                    eta *= 0.5;
                    continue;
                }
                double ftrial = objective(strial);
                if (ftrial < f_cur - 1e-15) {
                    for (size_t i = 0; i < st.atoms.size(); ++i) st.atoms[i].weight = w[i];
                    st.sigma = std::move(strial);
                    st.energy = etrial;
                    f_cur = ftrial;
                    eta *= 1.5;
                } else {
                    eta *= 0.4;
                }
            }
            st.drop_tiny();
            f_cur = objective(st.sigma);
        }

        // a gap computed at an earlier iterate stays a valid certificate after
        // further descent, so the last one can be reported on a stall
        stalled = (f_prev - f_cur < 1e-13) ? stalled + 1 : 0;
        if (stalled >= 5) {
            best_gap = gap;
            break;
        }
    }

    res.value = objective(st.sigma);
    res.gap = best_gap;
    res.iterations = iter;
    res.converged = best_gap <= opts.tol;
    res.ensemble.layout = layout;
    for (const auto& a : st.atoms) {
        if (a.weight <= 0.0) continue;
        ProductEnsemble::Atom ea;
        ea.weight = a.weight;
        ea.parts = a.parts;
        res.ensemble.atoms.push_back(std::move(ea));
    }
    return res;
}

// Per-party isometries onto the marginal supports; identity when full rank.
struct SupportReduction {
    bool reduced = false;
    std::vector<CMatrix> isometries;  // d_s x k_s
    SubsystemLayout small;
};

SupportReduction marginal_supports(const CMatrix& rho, const SubsystemLayout& layout) {
    SupportReduction sr;
    std::vector<int> dims;
    for (int p = 0; p < layout.parties(); ++p) {
        EigSystem es = hermitian_eig(marginal(rho, layout, p));
        const double floor = rank_floor(es.values);
        int k = 0;
        for (double v : es.values)
            if (v > floor) ++k;
        k = std::max(k, 1);
        CMatrix v(layout.dims[p], k);
        for (int c = 0; c < k; ++c)
            for (int i = 0; i < layout.dims[p]; ++i) v.set(i, c, es.vectors.at(i, c));
        sr.isometries.push_back(std::move(v));
        dims.push_back(k);
        if (k < layout.dims[p]) sr.reduced = true;
    }
    sr.small = SubsystemLayout(dims);
    return sr;
}

}  // namespace

SolveResult estimate_ree(const CMatrix& rho, const SubsystemLayout& layout, const SolveOptions& opts) {
    layout.check_operator(rho);
    require_density(rho, "estimate_ree input");
    if (layout.parties() < 2) throw validation_error("estimate_ree: needs n >= 2");

    SupportReduction sr = marginal_supports(rho, layout);
    if (!sr.reduced) {
        FwProblem prob{rho, layout, nullptr, kInf};
        return fw_solve(prob, opts);
    }

    CMatrix w = sr.isometries[0];
    for (size_t p = 1; p < sr.isometries.size(); ++p) w = tensor(w, sr.isometries[p]);
    CMatrix small = sandwich(w, rho);
    small.hermitize();
    double tr = small.trace_real();
    small *= 1.0 / tr;

    SolveResult res;
    if (sr.small.total_dim() == 1) {
        // rho is a pure product state
        res.value = 0.0;
        res.gap = 0.0;
        res.converged = true;
        res.iterations = 0;
        res.ensemble.layout = layout;
        ProductEnsemble::Atom a;
        a.weight = 1.0;
        for (int p = 0; p < layout.parties(); ++p) {
            CMatrix part = matmul(sr.isometries[p], sr.isometries[p].adjoint());
            part.hermitize();
            a.parts.push_back(std::move(part));
        }
        res.ensemble.atoms.push_back(std::move(a));
        return res;
    }

    FwProblem prob{small, sr.small, nullptr, kInf};
    res = fw_solve(prob, opts);

    // embed the optimizing ensemble back into the ambient space
    ProductEnsemble embedded;
    embedded.layout = layout;
    for (const auto& a : res.ensemble.atoms) {
        ProductEnsemble::Atom ea;
        ea.weight = a.weight;
        for (int p = 0; p < layout.parties(); ++p) {
            CMatrix part = matmul(sr.isometries[p], matmul(a.parts[p], sr.isometries[p].adjoint()));
            part.hermitize();
            ea.parts.push_back(std::move(part));
        }
        embedded.atoms.push_back(std::move(ea));
    }
    res.ensemble = std::move(embedded);
    return res;
}

double ree_lower_bounds(const CMatrix& rho, const SubsystemLayout& layout,
                        const std::vector<int>* group) {
    layout.check_operator(rho);
    const int n = layout.parties();
    CMatrix work = rho;
    SubsystemLayout bip({1, 1});
    if (n == 2 && !group) {
        bip = layout;
    } else if (group && !group->empty()) {
        std::vector<bool> in(n, false);
        for (int p : *group) {
            if (p < 0 || p >= n || in[p]) throw validation_error("ree_lower_bounds: bad group");
            in[p] = true;
        }
        std::vector<int> perm;
        long da = 1, db = 1;
        for (int p = 0; p < n; ++p)
            if (in[p]) {
                perm.push_back(p);
                da *= layout.dims[p];
            }
        for (int p = 0; p < n; ++p)
            if (!in[p]) {
                perm.push_back(p);
                db *= layout.dims[p];
            }
        if (db == 1) throw validation_error("ree_lower_bounds: group must be a proper subset");
        work = permute_systems(rho, layout, perm);
        bip = SubsystemLayout({static_cast<int>(da), static_cast<int>(db)});
    } else {
        return 0.0;
    }
    double hab = conditional_entropy_ext(work, bip);
    CMatrix swapped = permute_systems(work, bip, {1, 0});
    double hba = conditional_entropy_ext(swapped, SubsystemLayout({bip.dims[1], bip.dims[0]}));
    return std::max({0.0, -hab, -hba});
}

SolveResult energy_constrained_ree(const CMatrix& rho, const SubsystemLayout& layout,
                                   const std::vector<HamiltonianSpec>& party_hams, double energy,
                                   const SolveOptions& opts) {
    layout.check_operator(rho);
    require_density(rho, "energy_constrained_ree input");
    if (!std::isfinite(energy)) return estimate_ree(rho, layout, opts);
    if (static_cast<int>(party_hams.size()) != layout.parties())
        throw validation_error("energy_constrained_ree: need one Hamiltonian per party");

    std::vector<CMatrix> ops;
    double ground = 0.0;
    for (int p = 0; p < layout.parties(); ++p) {
        ops.push_back(party_hams[p].as_operator(layout.dims[p]));
        double mn = kInf;
        for (int i = 0; i < layout.dims[p]; ++i) mn = std::min(mn, ops.back().re(i, i));
        ground += mn;
    }
    if (energy < ground - 1e-12)
        throw validation_error("energy_constrained_ree: energy below the product ground energy");

    FwProblem prob{rho, layout, &ops, energy};
    return fw_solve(prob, opts);
}

namespace {

void push_record(AuditReport& rep, const std::string& name, double lhs, double rhs, double tol) {
    AuditRecord r;
    r.name = name;
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.pass = r.slack >= -tol;
    rep.records.push_back(std::move(r));
}

}  // namespace

AuditReport audit_state(const CMatrix& rho, const SubsystemLayout& layout, const SolveOptions& opts) {
    layout.check_operator(rho);
    require_density(rho, "audit_state input");
    const int n = layout.parties();
    AuditReport rep;

    SolveResult main = estimate_ree(rho, layout, opts);
    std::vector<double> marg_ent(n);
    double sum_all = 0.0;
    for (int p = 0; p < n; ++p) {
        marg_ent[p] = von_neumann_entropy(marginal(rho, layout, p));
        sum_all += marg_ent[p];
    }

    // upper bound via the best choice of n-1 marginals
    double best_drop = 0.0;
    for (int p = 0; p < n; ++p) best_drop = std::max(best_drop, marg_ent[p]);
    double er_ub = sum_all - best_drop;
    push_record(rep, "er_ub", main.value - main.gap, er_ub, 1e-9);
    push_record(rep, "er_ub_plus", main.value - main.gap, (n - 1.0) / n * sum_all, 1e-9);

    double qmi = mutual_information(rho, layout);
    push_record(rep, "mi_ub", qmi, 2.0 * er_ub, 1e-9);

    if (n == 2) {
        double lb = ree_lower_bounds(rho, layout);
        push_record(rep, "lb_conditional", lb, main.value, 1e-9);
    }

    // pure tripartite pair bounds
    if (n == 3) {
        EigSystem es = hermitian_eig(rho);
        if (numerical_rank(es.values) == 1) {
            const std::vector<std::pair<int, int>> pairs{{0, 1}, {1, 2}, {2, 0}};
            for (auto [i, j] : pairs) {
                CMatrix red = partial_trace(rho, layout, {std::min(i, j), std::max(i, j)});
                SubsystemLayout rl({layout.dims[std::min(i, j)], layout.dims[std::max(i, j)]});
                SolveResult pairres = estimate_ree(red, rl, opts);
                double hpair = von_neumann_entropy(red);
                std::string nm = "lb_pure_" + std::to_string(i + 1) + std::to_string(j + 1);
                push_record(rep, nm, pairres.value - pairres.gap + hpair, main.value, 1e-9);
            }
        }
    }

    // mixing inequality against a seeded random separable state at p = 1/2
    {
        ProductEnsemble sep = random_separable(layout, 3, mix_seed(opts.seed, 0xA0D17));
        CMatrix sig = assemble(sep);
        CMatrix mixst = rho * 0.5;
        mixst.axpy(0.5, sig);
        mixst.hermitize();
        SolveResult mixres = estimate_ree(mixst, layout, opts);
        push_record(rep, "mixing_h2", 0.5 * (main.value - main.gap),
                    mixres.value + binary_entropy(0.5), 1e-9);
    }

    return rep;
}

}  // namespace multiree
