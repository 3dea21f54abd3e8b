#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "multiree/entropy.hpp"

using namespace multiree;
using namespace multiree::test;

namespace {
const double ln2 = std::log(2.0);
}

TEST_CASE("scalar helpers") {
    CHECK(binary_entropy(0.5) == doctest::Approx(ln2));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(g_func(0.0) == 0.0);
    CHECK(g_func(1.0) == doctest::Approx(2.0 * ln2));
    CHECK_THROWS_AS(binary_entropy(1.5), validation_error);
    CHECK_THROWS_AS(g_func(-0.1), validation_error);

    // the two closed forms agree
    for (double x = 0.1; x <= 10.0; x += 0.3) {
        double via_h2 = (1.0 + x) * binary_entropy(x / (1.0 + x));
        CHECK(g_func(x) == doctest::Approx(via_h2).epsilon(1e-12));
    }
}

TEST_CASE("von Neumann entropy") {
    CHECK(von_neumann_entropy(basis_state(2, 0).projector()) == doctest::Approx(0.0));
    CHECK(von_neumann_entropy(CMatrix::identity(4) * 0.25) == doctest::Approx(std::log(4.0)));
    CHECK(von_neumann_entropy(diag({0.75, 0.25})) == doctest::Approx(binary_entropy(0.75)));
    CHECK(binary_entropy(0.75) == doctest::Approx(0.5623).epsilon(1e-4));
    CHECK_THROWS_AS(von_neumann_entropy(CMatrix::identity(2)), validation_error);
}

TEST_CASE("relative entropy: basics and the trace correction") {
    CMatrix z0 = basis_state(2, 0).projector();
    CHECK(relative_entropy(z0, z0) == doctest::Approx(0.0));
    CHECK(relative_entropy(z0, CMatrix::identity(2) * 0.5) == doctest::Approx(ln2));

    // trace-2 sigma exercises the +Tr sigma - Tr rho term: 1 - ln 2
    CHECK(relative_entropy(CMatrix::identity(2) * 0.5, CMatrix::identity(2)) ==
          doctest::Approx(1.0 - ln2));

    // support violation
    PureState plus(std::vector<cd>{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
    CHECK(std::isinf(relative_entropy(plus.projector(), z0)));

    CHECK_THROWS_AS(relative_entropy(diag({1.5, -0.5}), z0), validation_error);
}

TEST_CASE("relative entropy: nonnegative and zero iff equal for states") {
    for (uint64_t seed = 0; seed < 30; ++seed) {
        RandomStream rng(seed);
        CMatrix rho = random_density(3, 3, rng);
        CMatrix sig = random_density(3, 3, rng);
        double h = relative_entropy(rho, sig);
        CHECK(h >= -1e-10);
        CHECK(relative_entropy(rho, rho) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("relative entropy: unitary conjugation invariance") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        RandomStream rng(seed + 1000);
        CMatrix rho = random_density(4, 4, rng);
        CMatrix sig = random_density(4, 4, rng);
        CMatrix u = hermitian_eig(random_hermitian(4, rng)).vectors;
        CMatrix rho_u = sandwich(u, rho);
        CMatrix sig_u = sandwich(u, sig);
        rho_u.hermitize();
        sig_u.hermitize();
        CHECK(relative_entropy(rho_u, sig_u) ==
              doctest::Approx(relative_entropy(rho, sig)).epsilon(1e-9));
    }
}

TEST_CASE("relative entropy: joint convexity spot-check") {
    for (uint64_t seed = 0; seed < 200; ++seed) {
        RandomStream rng(seed + 5000);
        CMatrix r1 = random_density(3, 3, rng);
        CMatrix r2 = random_density(3, 3, rng);
        CMatrix s1 = random_density(3, 3, rng);
        CMatrix s2 = random_density(3, 3, rng);
        CMatrix rm = r1 * 0.5;
        rm.axpy(0.5, r2);
        CMatrix sm = s1 * 0.5;
        sm.axpy(0.5, s2);
        double lhs = relative_entropy(rm, sm);
        double rhs = 0.5 * relative_entropy(r1, s1) + 0.5 * relative_entropy(r2, s2);
        CHECK(lhs <= rhs + 1e-9);
    }
}

TEST_CASE("relative entropy: data processing under projective instruments") {
    for (uint64_t seed = 0; seed < 200; ++seed) {
        RandomStream rng(seed + 9000);
        CMatrix rho = random_density(4, 4, rng);
        CMatrix sig = random_density(4, 4, rng);
        // random two-outcome projective instrument from a random eigenbasis
        EigSystem basis = hermitian_eig(random_hermitian(4, rng));
        CMatrix p1(4, 4);
        for (int k = 0; k < 2; ++k) p1 += outer(basis.column(k));
        p1.hermitize();
        CMatrix p2 = CMatrix::identity(4) - p1;

        double total = 0.0;
        for (const CMatrix* p : {&p1, &p2}) {
            CMatrix ri = matmul(*p, matmul(rho, *p));
            CMatrix si = matmul(*p, matmul(sig, *p));
            ri.hermitize();
            si.hermitize();
            double pi = ri.trace_real(), qi = si.trace_real();
            if (pi < 1e-14) continue;
            ri *= 1.0 / pi;
            si *= 1.0 / std::max(qi, 1e-300);
            total += pi * relative_entropy(ri, si);
        }
        CHECK(total <= relative_entropy(rho, sig) + 1e-9);
    }
}

TEST_CASE("entropy concavity with mixing correction") {
    for (uint64_t seed = 0; seed < 100; ++seed) {
        RandomStream rng(seed + 100);
        CMatrix rho = random_density(3, 3, rng);
        CMatrix sig = random_density(3, 3, rng);
        double p = 0.1 + 0.8 * rng.uniform();
        CMatrix mix = rho * p;
        mix.axpy(1.0 - p, sig);
        double lhs = von_neumann_entropy(mix);
        CHECK(lhs >= p * von_neumann_entropy(rho) + (1.0 - p) * von_neumann_entropy(sig) - 1e-9);
        CHECK(lhs <= p * von_neumann_entropy(rho) + (1.0 - p) * von_neumann_entropy(sig) +
                         binary_entropy(p) + 1e-9);
    }
}

TEST_CASE("conditional entropy: pure, product, and cross-check") {
    SubsystemLayout ly({2, 2});
    CMatrix bell = bell_state().projector();
    CHECK(conditional_entropy_ext(bell, ly) == doctest::Approx(-ln2).epsilon(1e-9));

    RandomStream rng(17);
    CMatrix a = random_density(2, 2, rng);
    CMatrix b = random_density(2, 2, rng);
    CHECK(conditional_entropy_ext(tensor(a, b), ly) ==
          doctest::Approx(von_neumann_entropy(a)).epsilon(1e-9));

    for (uint64_t seed = 0; seed < 50; ++seed) {
        CMatrix rho = random_density(4, 4, seed);
        double via_rel = conditional_entropy_ext(rho, ly);
        double direct = von_neumann_entropy(rho) - von_neumann_entropy(marginal(rho, ly, 1));
        CHECK(via_rel == doctest::Approx(direct).epsilon(1e-9));
        double ha = von_neumann_entropy(marginal(rho, ly, 0));
        CHECK(via_rel <= ha + 1e-9);
        CHECK(via_rel >= -ha - 1e-9);
    }
}

TEST_CASE("mutual information: product, GHZ, and the marginal-sum bound") {
    SubsystemLayout ly2({2, 2});
    RandomStream rng(23);
    CMatrix a = random_density(2, 2, rng);
    CMatrix b = random_density(2, 2, rng);
    CHECK(mutual_information(tensor(a, b), ly2) == doctest::Approx(0.0).epsilon(1e-9));

    SubsystemLayout ly3({2, 2, 2});
    CMatrix ghz = ghz_state(3).projector();
    CHECK(mutual_information(ghz, ly3) == doctest::Approx(3.0 * ln2).epsilon(1e-9));

    for (uint64_t seed = 0; seed < 50; ++seed) {
        CMatrix rho = random_density(8, 8, seed);
        double mi = mutual_information(rho, ly3);
        CHECK(mi >= -1e-9);

        // two-formula agreement
        double sum_h = 0.0;
        for (int p = 0; p < 3; ++p) sum_h += von_neumann_entropy(marginal(rho, ly3, p));
        CHECK(mi == doctest::Approx(sum_h - von_neumann_entropy(rho)).epsilon(1e-9));

        // upper bound holds for every choice of n-1 marginals
        for (int drop = 0; drop < 3; ++drop) {
            double bound = 0.0;
            for (int p = 0; p < 3; ++p)
                if (p != drop) bound += von_neumann_entropy(marginal(rho, ly3, p));
            CHECK(mi <= 2.0 * bound + 1e-9);
        }
    }
}
