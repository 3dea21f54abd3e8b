#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "multiree/states.hpp"

using namespace multiree;
using namespace multiree::test;

TEST_CASE("tensor: identities and diagonal case") {
    CMatrix i4 = tensor(CMatrix::identity(2), CMatrix::identity(2));
    CHECK(max_entry_diff(i4, CMatrix::identity(4)) < 1e-15);

    CMatrix a = diag({1.0, 0.0});
    CMatrix b = diag({0.0, 1.0});
    CMatrix ab = tensor(a, b);
    CHECK(max_entry_diff(ab, diag({0.0, 1.0, 0.0, 0.0})) < 1e-15);
}

TEST_CASE("partial trace: Bell marginal is maximally mixed") {
    CMatrix bell = bell_state().projector();
    SubsystemLayout ly({2, 2});
    CMatrix m = marginal(bell, ly, 0);
    CHECK(max_entry_diff(m, CMatrix::identity(2) * 0.5) < 1e-14);
    CHECK(m.trace_real() == doctest::Approx(1.0));
}

TEST_CASE("partial trace: product state returns factor") {
    RandomStream rng(5);
    CMatrix rho = random_density(2, 2, rng);
    CMatrix sig = random_density(3, 2, rng);
    CMatrix prod = tensor(rho, sig);
    SubsystemLayout ly({2, 3});
    CHECK(max_entry_diff(partial_trace(prod, ly, {0}), rho) < 1e-13);
    CHECK(max_entry_diff(partial_trace(prod, ly, {1}), sig) < 1e-13);
}

TEST_CASE("partial trace: composition consistency on random tripartite states") {
    SubsystemLayout ly({2, 2, 2});
    for (uint64_t seed = 0; seed < 200; ++seed) {
        RandomStream rng(seed);
        CMatrix rho = random_density(8, 1 + static_cast<int>(rng.below(8)), rng);
        CMatrix a = partial_trace(partial_trace(rho, ly, {0, 1}), SubsystemLayout({2, 2}), {0});
        CMatrix b = partial_trace(rho, ly, {0});
        CHECK(max_entry_diff(a, b) < 1e-12);
    }
}

TEST_CASE("partial trace: keep-all returns input, bad index throws") {
    RandomStream rng(6);
    CMatrix rho = random_density(4, 4, rng);
    SubsystemLayout ly({2, 2});
    CHECK(max_entry_diff(partial_trace(rho, ly, {0, 1}), rho) < 1e-14);
    CHECK_THROWS_AS(partial_trace(rho, ly, {2}), validation_error);
    CHECK_THROWS_AS(partial_trace(rho, ly, {}), validation_error);
}

TEST_CASE("permute_systems: swap matches manual Bell invariance") {
    CMatrix bell = bell_state().projector();
    SubsystemLayout ly({2, 2});
    CMatrix sw = permute_systems(bell, ly, {1, 0});
    CHECK(max_entry_diff(sw, bell) < 1e-14);  // Bell is swap-symmetric

    RandomStream rng(8);
    CMatrix rho = random_density(6, 3, rng);
    SubsystemLayout ly23({2, 3});
    CMatrix perm = permute_systems(rho, ly23, {1, 0});
    SubsystemLayout ly32({3, 2});
    CHECK(max_entry_diff(permute_systems(perm, ly32, {1, 0}), rho) < 1e-14);
    CHECK(max_entry_diff(marginal(perm, ly32, 0), marginal(rho, ly23, 1)) < 1e-13);
}

TEST_CASE("schmidt: Bell and product states") {
    SubsystemLayout ly({2, 2});
    SchmidtDecomposition sd = schmidt_decompose(bell_state(), ly, 1);
    REQUIRE(sd.coefficients.size() == 2);
    CHECK(sd.coefficients[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(sd.coefficients[1] == doctest::Approx(1.0 / std::sqrt(2.0)));

    PureState plus(std::vector<cd>{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
    PureState zero(std::vector<cd>{1.0, 0.0});
    SchmidtDecomposition sp = schmidt_decompose(tensor(zero, plus), ly, 1);
    REQUIRE(sp.coefficients.size() == 1);
    CHECK(sp.coefficients[0] == doctest::Approx(1.0));
}

TEST_CASE("schmidt: reconstruction oracle on random states") {
    SubsystemLayout ly({3, 4});
    for (uint64_t seed = 0; seed < 20; ++seed) {
        PureState psi = random_pure(12, seed);
        SchmidtDecomposition sd = schmidt_decompose(psi, ly, 1);
        double s2 = 0.0;
        std::vector<cd> rec(12, 0.0);
        for (size_t k = 0; k < sd.coefficients.size(); ++k) {
            s2 += sd.coefficients[k] * sd.coefficients[k];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 4; ++j)
                    rec[i * 4 + j] += sd.coefficients[k] * sd.left_vectors[k][i] * sd.right_vectors[k][j];
        }
        CHECK(s2 == doctest::Approx(1.0).epsilon(1e-10));
        // global phase must match because right vectors are derived, not free
        double err = 0.0;
        for (int i = 0; i < 12; ++i) err += std::norm(rec[i] - psi.amplitudes[i]);
        CHECK(std::sqrt(err) < 1e-9);
    }
}

TEST_CASE("schmidt coefficients equal marginal eigenvalue roots") {
    SubsystemLayout ly({2, 2, 3});
    PureState psi = random_pure(12, 77);
    SchmidtDecomposition sd = schmidt_decompose(psi, ly, 2);
    CMatrix red = partial_trace(psi.projector(), ly, {0, 1});
    EigSystem es = hermitian_eig(red);
    for (size_t k = 0; k < sd.coefficients.size(); ++k)
        CHECK(sd.coefficients[k] == doctest::Approx(std::sqrt(std::max(0.0, es.values[k]))).epsilon(1e-8));
}

TEST_CASE("purify: round trips the state") {
    SUBCASE("pure input") {
        CMatrix rho = basis_state(2, 0).projector();
        int ref = 0;
        PureState psi = purify(rho, &ref);
        CHECK(ref == 1);
        CMatrix back = partial_trace(psi.projector(), SubsystemLayout({2, ref}), {0});
        CHECK(max_entry_diff(back, rho) < 1e-12);
    }
    SUBCASE("maximally mixed qubit") {
        CMatrix rho = CMatrix::identity(2) * 0.5;
        int ref = 0;
        PureState psi = purify(rho, &ref);
        CHECK(ref == 2);
        CMatrix back = partial_trace(psi.projector(), SubsystemLayout({2, 2}), {0});
        CHECK(max_entry_diff(back, rho) < 1e-12);
    }
    SUBCASE("random rank-3 state in d=4") {
        CMatrix rho = random_density(4, 3, uint64_t{11});
        int ref = 0;
        PureState psi = purify(rho, &ref);
        CHECK(ref == 3);
        CMatrix back = partial_trace(psi.projector(), SubsystemLayout({4, ref}), {0});
        CHECK(max_entry_diff(back, rho) < 1e-9);
    }
}

TEST_CASE("trace_distance basics") {
    CMatrix z0 = basis_state(2, 0).projector();
    CMatrix z1 = basis_state(2, 1).projector();
    CHECK(trace_distance(z0, z0) == doctest::Approx(0.0));
    CHECK(trace_distance(z0, z1) == doctest::Approx(1.0));
    CHECK(trace_distance(z0, CMatrix::identity(2) * 0.5) == doctest::Approx(0.5));
}

TEST_CASE("trace_distance: symmetry and triangle inequality on random triples") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
        RandomStream rng(seed);
        CMatrix a = random_density(3, 1 + static_cast<int>(rng.below(3)), rng);
        CMatrix b = random_density(3, 1 + static_cast<int>(rng.below(3)), rng);
        CMatrix c = random_density(3, 1 + static_cast<int>(rng.below(3)), rng);
        double ab = trace_distance(a, b), ba = trace_distance(b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-10);
    }
}

TEST_CASE("random_density: determinism and statistics") {
    CMatrix a = random_density(4, 2, uint64_t{123});
    CMatrix b = random_density(4, 2, uint64_t{123});
    CHECK(a.re_data() == b.re_data());
    CHECK(a.im_data() == b.im_data());

    RandomStream rng(0);
    for (int i = 0; i < 1000; ++i) {
        CMatrix rho = random_density(4, 1 + static_cast<int>(rng.below(4)), rng);
        CHECK(rho.trace_real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(min_eigenvalue(rho) >= -1e-12);
    }
}

TEST_CASE("random_density: rank-1 draw is a pure projector") {
    CMatrix rho = random_density(5, 1, uint64_t{3});
    EigSystem es = hermitian_eig(rho);
    CHECK(es.values[0] == doctest::Approx(1.0));
    CHECK(std::abs(es.values[1]) < 1e-12);
    CHECK_THROWS_AS(random_density(3, 4, uint64_t{0}), validation_error);
}
