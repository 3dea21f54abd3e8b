#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "multiree/approx.hpp"
#include "multiree/ree.hpp"

using namespace multiree;
using namespace multiree::test;

namespace {
const double ln2 = std::log(2.0);

std::vector<int> all_subsets_tripartite(int k) {
    // nonempty subsets of {0,1,2} encoded by bitmask k
    std::vector<int> s;
    for (int p = 0; p < 3; ++p)
        if (k & (1 << p)) s.push_back(p);
    return s;
}
}  // namespace

TEST_CASE("spectral projector: full rank, diagonal, and degenerate tie-break") {
    CMatrix m = diag({0.5, 0.3, 0.2});
    CHECK(max_entry_diff(spectral_projector(m, 3), CMatrix::identity(3)) < 1e-12);
    CHECK(max_entry_diff(spectral_projector(m, 2), diag({1.0, 1.0, 0.0})) < 1e-12);

    CMatrix half = CMatrix::identity(2) * 0.5;
    CMatrix p = spectral_projector(half, 1);
    CHECK(max_entry_diff(p, diag({1.0, 0.0})) < 1e-12);
    // determinism across repeated runs
    CHECK(max_entry_diff(p, spectral_projector(half, 1)) == 0.0);

    CHECK_THROWS_AS(spectral_projector(m, 0), validation_error);
    CHECK_THROWS_AS(spectral_projector(m, 4), validation_error);

    // idempotence on a random marginal
    CMatrix rho = random_density(5, 5, uint64_t{4});
    CMatrix pr = spectral_projector(rho, 2);
    CHECK(max_entry_diff(matmul(pr, pr), pr) < 1e-10);
}

TEST_CASE("approx_map: identity at full rank") {
    SubsystemLayout ly({2, 2});
    CMatrix rho = random_density(4, 4, uint64_t{9});
    TruncationResult tr = approx_map(rho, ly, {0, 1}, 2);
    CHECK(tr.c_r == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(max_entry_diff(tr.state, rho) < 1e-9);
}

TEST_CASE("approx_map: Bell state, single-party rank-1 compression") {
    SubsystemLayout ly({2, 2});
    CMatrix bell = bell_state().projector();
    TruncationResult tr = approx_map(bell, ly, {0}, 1);
    CHECK(tr.c_r == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(max_entry_diff(tr.state, basis_state(4, 0).projector()) < 1e-10);
}

TEST_CASE("approx_map: trace bound and marginal domination on a tripartite corpus") {
    SubsystemLayout ly({2, 2, 2});
    for (uint64_t seed = 0; seed < 200; ++seed) {
        RandomStream rng(seed);
        CMatrix rho = random_density(8, 1 + static_cast<int>(rng.below(8)), rng);
        for (int mask = 1; mask < 8; ++mask) {
            std::vector<int> subset = all_subsets_tripartite(mask);
            int r = 1;
            TruncationResult tr;
            try {
                tr = approx_map(rho, ly, subset, r);
            } catch (const numerical_error&) {
                continue;  // fully truncated; nothing to check
            }
            double delta = truncation_delta(rho, ly, subset, r);

            // c_r >= 1 - sum of marginal tails
            CHECK(tr.c_r >= 1.0 - delta * delta - 1e-10);

            // gentle-measurement bound in half-norm form
            CHECK(trace_distance(rho, tr.state) <= std::sqrt(1.0 - tr.c_r) + 1e-9);

            // marginal domination for every party
            for (int p = 0; p < 3; ++p) {
                CMatrix dom = marginal(rho, ly, p);
                dom.axpy(-tr.c_r, marginal(tr.state, ly, p));
                dom.hermitize();
                CHECK(min_eigenvalue(dom) >= -1e-9);
            }
        }
    }
}

TEST_CASE("approx_map rejects annihilating compressions") {
    SubsystemLayout ly({2, 2});
    // state orthogonal to the top marginal eigenvector product does not arise
    // for r=1 on |01><01| with subset {0}: P keeps |0>, state survives
    CMatrix rho = tensor(basis_state(2, 0).projector(), basis_state(2, 1).projector());
    CHECK_NOTHROW(approx_map(rho, ly, {0}, 1));
    CHECK_THROWS_AS(approx_map(rho, ly, {0}, 0), validation_error);
}

TEST_CASE("build_fa_hamiltonian: energies") {
    CMatrix m = diag({0.7, 0.2, 0.1});
    SUBCASE("zero weights") {
        FaHamiltonian fa = build_fa_hamiltonian(m, {0.0, 0.0, 0.0});
        CHECK(fa.energy == doctest::Approx(0.0));
        CHECK(fa.op.max_abs() < 1e-14);
    }
    SUBCASE("dot product") {
        FaHamiltonian fa = build_fa_hamiltonian(m, {0.0, 1.0, 2.0});
        CHECK(fa.energy == doctest::Approx(0.4));
        EigSystem es = hermitian_eig(fa.op);
        CHECK(es.values[0] == doctest::Approx(2.0));
        CHECK(es.values[2] == doctest::Approx(0.0));
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(build_fa_hamiltonian(m, {0.0, 1.0}), validation_error);
        CHECK_THROWS_AS(build_fa_hamiltonian(m, {1.0, 2.0, 3.0}), validation_error);
        CHECK_THROWS_AS(build_fa_hamiltonian(m, {0.0, 2.0, 1.0}), validation_error);
    }
    SUBCASE("default log-cubed weights stay finite on geometric spectra") {
        std::vector<double> lam(64), w = default_fa_weights(64);
        double z = 0.0;
        for (int i = 0; i < 64; ++i) z += std::pow(0.5, i + 1);
        double energy = 0.0;
        for (int i = 0; i < 64; ++i) energy += std::pow(0.5, i + 1) / z * w[i];
        CHECK(energy < 10.0);
        CHECK(w[0] == 0.0);
        CHECK(w[1] == doctest::Approx(std::pow(ln2, 3.0)));
    }
}

TEST_CASE("truncation_error_bound: direct arithmetic and limits") {
    auto fbar = [](double e) { return std::log(e + 1.0) + 1.0; };
    TruncErrorBound b = truncation_error_bound(0.5, 1.0, 1.0, 1.0, fbar);
    double expected = std::log(11.0 / 3.0) + 1.0 + g_func(1.0);
    CHECK(b.l_class == doctest::Approx(expected).epsilon(1e-12));
    CHECK(b.l_class == doctest::Approx(3.685).epsilon(1e-3));
    CHECK(b.n_class >= b.l_class);  // delta' >= delta and the bound is monotone

    // vanishing-delta limit
    double prev = 1e300;
    for (double d = 0.5; d > 1e-12; d *= 0.25) {
        double v = truncation_error_bound(d, 1.0, 1.0, 1.0, fbar).l_class;
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-3);
    CHECK(truncation_error_bound(0.0, 1.0, 1.0, 1.0, fbar).l_class == 0.0);
    CHECK_THROWS_AS(truncation_error_bound(0.6, 1.0, 1.0, 1.0, fbar), validation_error);
}

TEST_CASE("truncation_experiment: qmi on a product state is zero") {
    SubsystemLayout ly({2, 2});
    RandomStream rng(3);
    CMatrix rho = tensor(random_density(2, 2, rng), random_density(2, 2, rng));
    SolveOptions opts;
    ExperimentTable t = truncation_experiment(rho, ly, {0, 1}, Functional::Qmi, 2, opts);
    CHECK(t.full_value == doctest::Approx(0.0).epsilon(1e-9));
    for (const auto& row : t.rows) CHECK(row.value <= 1e-8);
}

TEST_CASE("truncation_experiment: entropy exact from the rank on") {
    SubsystemLayout ly({2, 2});
    CMatrix rho = random_density(4, 2, uint64_t{21});
    SolveOptions opts;
    ExperimentTable t = truncation_experiment(rho, ly, {0, 1}, Functional::Entropy, 2, opts);
    CHECK(t.rows.back().value == doctest::Approx(t.full_value).epsilon(1e-8));
    // c_r nondecreasing toward 1
    double prev = 0.0;
    for (const auto& row : t.rows) {
        CHECK(row.c_r >= prev - 1e-12);
        prev = row.c_r;
    }
    CHECK(t.rows.back().c_r == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("truncation_experiment: qmi bound dominates on random states") {
    SubsystemLayout ly({2, 2, 2});
    SolveOptions opts;
    for (uint64_t seed = 0; seed < 50; ++seed) {
        CMatrix rho = random_density(8, 8, seed);
        ExperimentTable t = truncation_experiment(rho, ly, {0, 1, 2}, Functional::Qmi, 2, opts);
        for (const auto& row : t.rows) {
            if (!row.valid_regime) continue;
            CHECK(std::abs(row.value - t.full_value) <= row.bound + 1e-9);
        }
    }
}
