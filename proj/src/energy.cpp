#include "multiree/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "multiree/entropy.hpp"
#include "multiree/io.hpp"

namespace multiree {

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

HamiltonianSpec HamiltonianSpec::from_levels(std::vector<double> levels) {
    if (levels.empty()) throw validation_error("hamiltonian: empty spectrum");
    for (size_t i = 1; i < levels.size(); ++i)
        if (levels[i] < levels[i - 1]) throw validation_error("hamiltonian: eigenvalues must be nondecreasing");
    HamiltonianSpec h;
    h.eigenvalues = std::move(levels);
    return h;
}

HamiltonianSpec HamiltonianSpec::from_oscillator(const OscillatorSpec& osc, int truncation) {
    if (osc.modes < 1 || static_cast<int>(osc.omegas.size()) != osc.modes)
        throw validation_error("oscillator: modes/frequencies mismatch");
    for (double w : osc.omegas)
        if (w <= 0.0) throw validation_error("oscillator: nonpositive frequency");
    if (truncation < 1) throw validation_error("oscillator: truncation must be positive");

    // lazily expand sorted sums of hbar w_i (k_i + 1/2) with a min-heap
    using Node = std::pair<double, std::vector<int>>;
    auto cmp = [](const Node& a, const Node& b) { return a.first > b.first; };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
    std::set<std::vector<int>> seen;
    double e0 = 0.0;
    for (double w : osc.omegas) e0 += 0.5 * osc.hbar * w;
    std::vector<int> zero(osc.modes, 0);
    heap.push({e0, zero});
    seen.insert(zero);

    std::vector<double> levels;
    while (!heap.empty() && static_cast<int>(levels.size()) < truncation) {
        auto [e, k] = heap.top();
        heap.pop();
        levels.push_back(e);
        // children: increment coordinate j when all earlier coordinates are 0
        for (int j = 0; j < osc.modes; ++j) {
            std::vector<int> nk = k;
            ++nk[j];
            if (seen.insert(nk).second) heap.push({e + osc.hbar * osc.omegas[j], nk});
            if (k[j] != 0) break;
        }
    }
    HamiltonianSpec h = from_levels(std::move(levels));
    h.oscillator = osc;
    return h;
}

CMatrix HamiltonianSpec::as_operator(int dim) const {
    if (dim < 1 || dim > levels())
        throw validation_error("hamiltonian: dimension exceeds available levels");
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) m.re(i, i) = eigenvalues[i];
    return m;
}

std::vector<double> sum_spectrum(const std::vector<std::vector<double>>& parts, size_t cap) {
    if (parts.empty()) throw validation_error("sum_spectrum: no parts");
    std::vector<double> acc = parts[0];
    if (acc.size() > cap) acc.resize(cap);
    for (size_t q = 1; q < parts.size(); ++q) {
        const std::vector<double>& b = parts[q];
        // smallest `cap` pairwise sums of two sorted lists
        using Node = std::pair<double, std::pair<size_t, size_t>>;
        auto cmp = [](const Node& x, const Node& y) { return x.first > y.first; };
        std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
        heap.push({acc[0] + b[0], {0, 0}});
        std::vector<double> out;
        while (!heap.empty() && out.size() < cap) {
            auto [e, ij] = heap.top();
            heap.pop();
            auto [i, j] = ij;
            out.push_back(e);
            if (j + 1 < b.size()) heap.push({acc[i] + b[j + 1], {i, j + 1}});
            if (j == 0 && i + 1 < acc.size()) heap.push({acc[i + 1] + b[0], {i + 1, 0}});
        }
        acc = std::move(out);
    }
    return acc;
}

namespace {

// mean energy and entropy of p_i ~ exp(-beta g_i), computed against shifted
// levels for stability
void gibbs_stats(const std::vector<double>& g, double beta, std::vector<double>* probs, double* mean,
                 double* entropy) {
    const size_t n = g.size();
    const double shift = (beta >= 0.0) ? g.front() : g.back();
    double z = 0.0, ez = 0.0;
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i) {
        w[i] = std::exp(-beta * (g[i] - shift));
        z += w[i];
        ez += g[i] * w[i];
    }
    double mu = ez / z;
    if (mean) *mean = mu;
    if (probs || entropy) {
        double h = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double p = w[i] / z;
            if (p > 0.0) h -= p * std::log(p);
            if (probs) (*probs)[i] = p;
        }
        if (entropy) *entropy = h;
    }
}

}  // namespace

GibbsResult gibbs_state(const HamiltonianSpec& h, double e) {
    const std::vector<double>& g = h.eigenvalues;
    const size_t n = g.size();
    if (e <= h.e0()) throw validation_error("gibbs_state: energy at or below the ground level");

    GibbsResult res;
    res.probs.resize(n);
    double uniform_mean = 0.0;
    for (double x : g) uniform_mean += x;
    uniform_mean /= static_cast<double>(n);

    if (e >= uniform_mean) {
        // finite truncations make the entropy cap flat beyond the uniform mean
        std::fill(res.probs.begin(), res.probs.end(), 1.0 / static_cast<double>(n));
        res.beta = 0.0;
        res.mean_energy = uniform_mean;
        res.entropy = std::log(static_cast<double>(n));
        res.clamped = e > uniform_mean;
        if (res.clamped) log_msg(2, "gibbs_state: energy above the truncated uniform mean, clamped");
        return res;
    }

    // beta range must resolve ground-state concentration: scale by the
    // smallest positive level gap, not the full spectral width
    double min_gap = kInf;
    for (size_t i = 1; i < n; ++i) {
        double d = g[i] - g[i - 1];
        if (d > 0.0) min_gap = std::min(min_gap, d);
    }
    if (!std::isfinite(min_gap)) min_gap = std::max(g.back() - g.front(), 1e-300);
    double lo = 0.0, hi = 50.0 / min_gap;
    for (int it = 0; it < 200; ++it) {
        double beta = 0.5 * (lo + hi);
        double mean;
        gibbs_stats(g, beta, nullptr, &mean, nullptr);
        if (mean > e)
            lo = beta;
        else
            hi = beta;
    }
    res.beta = 0.5 * (lo + hi);
    gibbs_stats(g, res.beta, &res.probs, &res.mean_energy, &res.entropy);
    if (n >= 100000) {  // default level cap; the truncation may be binding
        double pl = res.probs.back();
        res.tail_bound = pl * (1.0 + std::abs(std::log(std::max(pl, 1e-300))));
    }
    return res;
}

double max_entropy_F(const HamiltonianSpec& h, double e) {
    return gibbs_state(h, e).entropy;
}

double oscillator_F(int modes, const std::vector<double>& omegas, double e, OscVariant v, double hbar) {
    if (modes < 1 || static_cast<int>(omegas.size()) != modes)
        throw validation_error("oscillator_F: modes/frequencies mismatch");
    double e0 = 0.0, logprod = 0.0;
    for (double w : omegas) {
        if (w <= 0.0) throw validation_error("oscillator_F: nonpositive frequency");
        e0 += 0.5 * hbar * w;
        logprod += std::log(hbar * w);
    }
    const double estar = std::exp(logprod / modes);
    const double l = static_cast<double>(modes);
    const double shift = (v == OscVariant::F) ? e0 : 2.0 * e0;
    if (e + shift <= 0.0) throw validation_error("oscillator_F: energy argument out of range");
    return l * std::log((e + shift) / (l * estar)) + l;
}

FFunction FFunction::numeric(HamiltonianSpec h) {
    FFunction f;
    f.kind = Kind::NumericGibbs;
    f.spectrum = std::move(h);
    return f;
}

FFunction FFunction::oscillator_bar(OscillatorSpec o) {
    FFunction f;
    f.kind = Kind::OscillatorClosedForm;
    f.osc = std::move(o);
    return f;
}

double FFunction::operator()(double e) const {
    if (kind == Kind::NumericGibbs) {
        if (e <= 0.0) {
            // entropy of the ground multiplicity
            int mult = 0;
            for (double x : spectrum.eigenvalues)
                if (x <= spectrum.e0() + 1e-12) ++mult;
            return std::log(static_cast<double>(std::max(mult, 1)));
        }
        return max_entropy_F(spectrum, e + spectrum.e0());
    }
    return oscillator_F(osc.modes, osc.omegas, e, OscVariant::FBar, osc.hbar);
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

// Weight value beyond the truncation, anchored at the last entries.
double weight_tail_value(const std::vector<double>& w, const TailModel& t, long i /* 1-based */) {
    const long n = static_cast<long>(w.size());
    const double last = w.back();
    switch (t.kind) {
        case TailModel::Kind::None:
            return last;
        case TailModel::Kind::Geometric:
            return last * std::pow(t.p0, static_cast<double>(i - n));
        case TailModel::Kind::PowerLaw:
            return last * std::pow(static_cast<double>(i) / n, t.p0);
        case TailModel::Kind::LogCorrected:
            return t.p0 * std::pow(std::log(static_cast<double>(i)), t.p1);
    }
    return last;
}

double spectrum_tail_value(const std::vector<double>& s, const TailModel& t, long i) {
    const long n = static_cast<long>(s.size());
    const double last = s.back();
    switch (t.kind) {
        case TailModel::Kind::None:
            return 0.0;
        case TailModel::Kind::Geometric:
            return last * std::pow(t.p0, static_cast<double>(i - n));
        case TailModel::Kind::PowerLaw:
            return last * std::pow(static_cast<double>(n) / i, t.p0);
        case TailModel::Kind::LogCorrected:
            return last * std::pow(static_cast<double>(n) / i, t.p0) *
                   std::pow(std::log(static_cast<double>(n)) / std::log(static_cast<double>(i)), t.p1);
    }
    return 0.0;
}

// Convergence of sum_i lambda_i g_i for the declared tail pair; +1 converges,
// -1 diverges, 0 unknown.
int energy_tail_class(const TailModel& st, const TailModel& wt) {
    using K = TailModel::Kind;
    if (st.kind == K::None) return +1;
    if (st.kind == K::Geometric) {
        if (wt.kind == K::Geometric) return st.p0 * wt.p0 < 1.0 ? +1 : -1;
        return +1;  // polylog or power growth under a geometric envelope
    }
    // power-law or log-corrected spectrum: lambda_i ~ i^-alpha ln^-qs
    double alpha = st.p0;
    double qs = (st.kind == K::LogCorrected) ? st.p1 : 0.0;
    if (wt.kind == K::Geometric) return -1;
    if (wt.kind == K::PowerLaw) {
        double p = wt.p0;
        if (alpha - p > 1.0) return +1;
        if (alpha - p < 1.0) return -1;
        return qs > 1.0 ? +1 : -1;
    }
    double qw = (wt.kind == K::LogCorrected) ? wt.p1 : 0.0;
    if (wt.kind == K::None) qw = 0.0;
    if (alpha > 1.0) return +1;
    if (alpha < 1.0) return -1;
    return (qs - qw > 1.0) ? +1 : (qs - qw < 1.0 ? -1 : 0);
}

// Direct summation of the modeled tail; the classifier has already declared
// convergence, so the relative-term cutoff terminates.
double energy_tail_sum(const std::vector<double>& s, const TailModel& st, const std::vector<double>& w,
                       const TailModel& wt) {
    const long n = static_cast<long>(std::max(s.size(), w.size()));
    double acc = 0.0;
    long i = n + 1;
    const long hard_cap = 2000000;
    for (; i < hard_cap; ++i) {
        double term = spectrum_tail_value(s, st, i) * weight_tail_value(w, wt, i);
        acc += term;
        if (term <= 1e-16 * std::max(acc, 1e-300) && i > n + 16) break;
    }
    return acc;
}

// ln of integral_{u0}^{inf} exp(u - beta * c * u^q) du for q > 1, by scanning
// past the stationary point.
double log_tail_integral_lnpow(double u0, double beta, double c, double q) {
    double ustar = std::pow(1.0 / (beta * c * q), 1.0 / (q - 1.0));
    double uhi = std::max(u0, ustar) * 2.0 + 50.0;
    auto phi = [&](double u) { return u - beta * c * std::pow(u, q); };
    // expand until the integrand has fallen far below the peak
    double phimax = std::max(phi(u0), phi(std::max(u0, ustar)));
    while (phi(uhi) > phimax - 60.0) uhi *= 1.5;
    const int steps = 4000;
    const double h = (uhi - u0) / steps;
    double acc = 0.0;
    for (int k = 0; k <= steps; ++k) {
        double u = u0 + k * h;
        double wgt = (k == 0 || k == steps) ? 0.5 : 1.0;
        acc += wgt * std::exp(phi(u) - phimax);
    }
    return phimax + std::log(acc * h);
}

// ln S(beta) with S = sum_i exp(-beta g_i) over the truncation plus tail;
// returns +inf when the tail diverges.
double log_partition(const std::vector<double>& w, const TailModel& wt, double beta) {
    double lse = -kInf;
    auto add = [&](double lnterm) {
        if (lnterm == -kInf) return;
        if (lse == -kInf) {
            lse = lnterm;
        } else {
            double hi = std::max(lse, lnterm), lo = std::min(lse, lnterm);
            lse = hi + std::log1p(std::exp(lo - hi));
        }
    };
    for (double g : w) add(-beta * g);

    const long n = static_cast<long>(w.size());
    using K = TailModel::Kind;
    switch (wt.kind) {
        case K::None:
            break;
        case K::Geometric: {  // g_i = g_n r^(i-n), r > 1: double-exponential decay
            for (long i = n + 1; i < n + 2000000; ++i) {
                double term = -beta * weight_tail_value(w, wt, i);
                add(term);
                if (term < lse - 40.0) break;
            }
            break;
        }
        case K::PowerLaw: {  // g_i ~ g_n (i/n)^p: tail ~ n * int_1^inf exp(-c x^p) dx
            double p = wt.p0;
            if (p <= 0.0) return kInf;
            double c = beta * w.back();
            double xmax = std::pow(60.0 / std::max(c, 1e-300), 1.0 / p);
            if (xmax > 1.0) {
                const int steps = 4000;
                const double h = (xmax - 1.0) / steps;
                double acc = 0.0;
                for (int k = 0; k <= steps; ++k) {
                    double x = 1.0 + k * h;
                    double wgt = (k == 0 || k == steps) ? 0.5 : 1.0;
                    acc += wgt * std::exp(-c * std::pow(x, p));
                }
                add(std::log(static_cast<double>(n)) + std::log(std::max(acc * h, 1e-300)));
            }
            break;
        }
        case K::LogCorrected: {  // g_i = c ln^q i
            double c = wt.p0, q = wt.p1;
            if (q < 1.0 || (q == 1.0 && beta * c <= 1.0)) return kInf;
            if (q == 1.0) {
                // sum i^(-beta c), convergent for beta c > 1
                double a = beta * c;
                double tail = std::pow(static_cast<double>(n), 1.0 - a) / (a - 1.0);
                add(std::log(tail));
                break;
            }
            add(log_tail_integral_lnpow(std::log(static_cast<double>(n + 1)), beta, c, q));
            break;
        }
    }
    return lse;
}

}  // namespace

FaCheckResult fa_check(const std::vector<double>& spectrum, const TailModel& spectrum_tail,
                       const std::vector<double>& weights, const TailModel& weights_tail) {
    if (spectrum.empty() || weights.empty()) throw validation_error("fa_check: empty sequence");
    double mass = 0.0;
    for (size_t i = 0; i < spectrum.size(); ++i) {
        if (spectrum[i] < -1e-15) throw validation_error("fa_check: negative spectrum entry");
        if (i > 0 && spectrum[i] > spectrum[i - 1] + 1e-12)
            throw validation_error("fa_check: spectrum must be nonincreasing");
        mass += spectrum[i];
    }
    if (mass > 1.0 + 1e-6) throw validation_error("fa_check: spectrum mass exceeds 1");
    for (size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw validation_error("fa_check: negative weight");
        if (i > 0 && weights[i] < weights[i - 1] - 1e-12)
            throw validation_error("fa_check: weights must be nondecreasing");
    }

    FaCheckResult res;

    // weighted energy: truncation part plus modeled tail
    const size_t common = std::min(spectrum.size(), weights.size());
    double partial = 0.0;
    for (size_t i = 0; i < common; ++i) partial += spectrum[i] * weights[i];
    int cls = energy_tail_class(spectrum_tail, weights_tail);
    if (cls > 0) {
        res.energy = partial + energy_tail_sum(spectrum, spectrum_tail, weights, weights_tail);
        res.energy_finite = true;
    } else {
        res.energy = kInf;
        res.energy_finite = false;
    }

    // beta grid for [S(beta)]^beta -> 1
    bool divergent = false;
    for (int k = 1; k <= 20; ++k) {
        double beta = std::pow(2.0, -k);
        double lns = log_partition(weights, weights_tail, beta);
        if (!std::isfinite(lns)) {
            divergent = true;
            res.beta_trace.push_back({beta, kInf});
            continue;
        }
        res.beta_trace.push_back({beta, beta * lns});
    }
    if (divergent) {
        res.hcond = Verdict::Fails;
    } else {
        double y_mid = res.beta_trace[11].second;   // beta = 2^-12
        double y_last = res.beta_trace[19].second;  // beta = 2^-20
        bool tail_decreasing = true;
        for (size_t k = 12; k < 20; ++k)
            if (res.beta_trace[k].second > res.beta_trace[k - 1].second + 1e-12) tail_decreasing = false;
        if (tail_decreasing && y_last < 0.02 && (y_mid <= 0.0 || y_last < 0.5 * y_mid))
            res.hcond = Verdict::Holds;
        else if (!tail_decreasing || y_last > 0.1)
            res.hcond = Verdict::Fails;
        else
            res.hcond = Verdict::Inconclusive;
    }

    if (res.energy_finite && res.hcond == Verdict::Holds)
        res.overall = Verdict::Holds;
    else if (cls < 0 || res.hcond == Verdict::Fails)
        res.overall = Verdict::Fails;
    else
        res.overall = Verdict::Inconclusive;
    return res;
}

std::vector<double> spectrum_from_model(const TailModel& m, int terms) {
    if (terms < 1) throw validation_error("spectrum_from_model: terms must be positive");
    std::vector<double> s(terms);
    using K = TailModel::Kind;
    switch (m.kind) {
        case K::Geometric: {
            double r = m.p0;
            if (r <= 0.0 || r >= 1.0) throw validation_error("geometric spectrum needs ratio in (0,1)");
            for (int i = 0; i < terms; ++i) s[i] = (1.0 - r) * std::pow(r, i);
            return s;
        }
        case K::PowerLaw: {
            double a = m.p0;
            for (int i = 0; i < terms; ++i) s[i] = std::pow(static_cast<double>(i + 1), -a);
            break;
        }
        case K::LogCorrected: {
            double a = m.p0, q = m.p1;
            for (int i = 0; i < terms; ++i)
                s[i] = std::pow(static_cast<double>(i + 2), -a) * std::pow(std::log(static_cast<double>(i + 2)), -q);
            break;
        }
        case K::None:
            throw validation_error("spectrum_from_model: needs a model kind");
    }
    // normalize over the truncation plus a crude tail estimate
    double total = 0.0;
    for (double x : s) total += x;
    double tail = 0.0;
    for (long i = terms + 1; i < terms + 2000000; ++i) {
        double t = spectrum_tail_value(s, m, i);
        tail += t;
        if (t < 1e-16 * std::max(total + tail, 1e-300)) break;
    }
    total += tail;
    for (double& x : s) x /= total;
    return s;
}

std::vector<double> weights_from_model(const std::string& kind, double q, int terms) {
    if (terms < 1) throw validation_error("weights_from_model: terms must be positive");
    std::vector<double> w(terms, 0.0);
    if (kind == "zero") return w;
    if (kind == "lnpow") {
        for (int i = 2; i <= terms; ++i) w[i - 1] = std::pow(std::log(static_cast<double>(i)), q);
        return w;
    }
    if (kind == "linear") {
        for (int i = 0; i < terms; ++i) w[i] = q * i;
        return w;
    }
    throw validation_error("weights_from_model: unknown kind " + kind);
}

double cb_finite_dim(double epsilon, const std::vector<int>& dims) {
    if (epsilon < 0.0) throw validation_error("cb_finite_dim: negative epsilon");
    double lndim = 0.0;
    for (int d : dims) {
        if (d < 1) throw validation_error("cb_finite_dim: bad dimension");
        lndim += std::log(static_cast<double>(d));
    }
    return epsilon * lndim + g_func(epsilon);
}

double cb_energy(double epsilon, double e, int m, int n,
                 const std::vector<HamiltonianSpec>& party_hams, const FFunction* fhat) {
    if (n < 2 || (m != n - 1 && m != n)) throw validation_error("cb_energy: m must be n-1 or n");
    if (epsilon < 0.0) throw validation_error("cb_energy: negative epsilon");
    if (epsilon == 0.0) return 0.0;
    if (epsilon > 1.0 && !fhat)
        throw validation_error("cb_energy: epsilon > 1 requires an upper-bound F function");
    if (static_cast<int>(party_hams.size()) != m) throw validation_error("cb_energy: need m Hamiltonians");

    double e0_total = 0.0;
    for (const auto& h : party_hams) e0_total += h.e0();
    const double ebar = e - e0_total / m;
    if (ebar <= 0.0) throw validation_error("cb_energy: energy at or below the mean ground energy");

    const double cm = static_cast<double>(n - 1) / m;
    const double arg = m * ebar / epsilon;
    double fval;
    if (fhat) {
        fval = (*fhat)(arg);
    } else {
        std::vector<std::vector<double>> lists;
        for (const auto& h : party_hams) lists.push_back(h.eigenvalues);
        HamiltonianSpec sum_h = HamiltonianSpec::from_levels(sum_spectrum(lists));
        fval = FFunction::numeric(sum_h)(arg);
    }
    return cm * std::sqrt(2.0 * epsilon) * fval + g_func(std::sqrt(2.0 * epsilon));
}

double cb_energy_iid(double epsilon, double e, int m, int n, double t, const FFunction& fhat,
                     double e0) {
    if (n < 2 || (m != n - 1 && m != n)) throw validation_error("cb_energy_iid: m must be n-1 or n");
    if (epsilon <= 0.0) return 0.0;
    if (t <= 0.0 || t >= 1.0 / epsilon) throw validation_error("cb_energy_iid: t outside (0, 1/epsilon)");
    double ground = e0;
    if (std::isnan(e0)) {
        ground = 0.0;
        if (fhat.kind == FFunction::Kind::NumericGibbs) ground = fhat.spectrum.e0();
        if (fhat.kind == FFunction::Kind::OscillatorClosedForm)
            for (double w : fhat.osc.omegas) ground += 0.5 * fhat.osc.hbar * w;
    }
    const double ebar = e - ground;
    if (ebar <= 0.0) throw validation_error("cb_energy_iid: energy at or below the ground energy");

    const double cm = static_cast<double>(n - 1) / m;
    const double a = epsilon + epsilon * epsilon * t * t;
    const double b = std::sqrt(2.0 * epsilon * t);
    return m * cm * (a * fhat(m * ebar / (epsilon * epsilon * t * t)) + 2.0 * b * fhat(ebar / (epsilon * t))) +
           g_func(a) + 2.0 * g_func(b);
}

OptimizedT optimize_t(double epsilon, double e, int m, int n, const FFunction& fhat, double e0,
                      int grid) {
    if (epsilon <= 0.0) throw validation_error("optimize_t: needs epsilon > 0");
    OptimizedT best;
    best.value = kInf;
    const double lo = 1e-4 / epsilon, hi = 0.9999 / epsilon;
    for (int k = 0; k < grid; ++k) {
        double t = lo * std::pow(hi / lo, static_cast<double>(k) / (grid - 1));
        double v = cb_energy_iid(epsilon, e, m, n, t, fhat, e0);
        if (v < best.value) {
            best.value = v;
            best.t = t;
        }
    }
    return best;
}

OscCbTerms cb_oscillator(double epsilon, double e, double t, int modes,
                         const std::vector<double>& omegas, int m, int n, double hbar) {
    if (n < 2 || (m != n - 1 && m != n)) throw validation_error("cb_oscillator: m must be n-1 or n");
    if (epsilon <= 0.0) throw validation_error("cb_oscillator: needs epsilon > 0");
    if (t <= 0.0 || t >= 1.0 / epsilon) throw validation_error("cb_oscillator: t outside (0, 1/epsilon)");
    double e0 = 0.0, logprod = 0.0;
    for (double w : omegas) {
        if (w <= 0.0) throw validation_error("cb_oscillator: nonpositive frequency");
        e0 += 0.5 * hbar * w;
        logprod += std::log(hbar * w);
    }
    if (e <= e0) throw validation_error("cb_oscillator: energy at or below the ground energy");
    const double l = static_cast<double>(modes);
    const double estar = std::exp(logprod / modes);
    const double ebar = e - e0;
    const double cm = static_cast<double>(n - 1) / m;
    const double eps_t = epsilon * t;

    OscCbTerms out;
    out.term1 = m * cm * (epsilon + eps_t * eps_t) * l *
                std::log((m * ebar / (eps_t * eps_t) + 2.0 * e0) / (std::exp(-1.0) * l * estar));
    out.term2 = 2.0 * m * cm * std::sqrt(2.0 * eps_t) * l *
                std::log((ebar / eps_t + 2.0 * e0) / (std::exp(-1.0) * l * estar));
    out.g1 = g_func(epsilon + eps_t * eps_t);
    out.g2 = 2.0 * g_func(std::sqrt(2.0 * eps_t));
    out.total = out.term1 + out.term2 + out.g1 + out.g2;
    return out;
}

}  // namespace multiree
