#include <doctest.h>

#include <cmath>

#include "prusim/experiments.hpp"

using namespace prusim;

TEST_CASE("Haar samples are unitary and reproducible") {
    for (int N : {2, 4, 16}) {
        CounterRng a(1, 2), b(1, 2);
        const Eigen::MatrixXcd U = sample_haar(N, a);
        CHECK(unitarity_residual(U) < 1e-12);
        CHECK((U - sample_haar(N, b)).norm() == 0.0);
    }
}

TEST_CASE("one forward query to a Haar oracle leaves A maximally mixed on average") {
    const int N = 4, samples = 4000;
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(N, N);
    for (int s = 0; s < samples; ++s) {
        CounterRng rng(9, s);
        const Eigen::VectorXcd col = sample_haar(N, rng).col(0);
        avg += col * col.adjoint();
    }
    avg /= samples;
    // per-entry standard error is below 1/sqrt(N * samples)
    const double tol = 3.0 / std::sqrt(double(N) * samples);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            CHECK(std::abs(avg(i, j) - (i == j ? 1.0 / N : 0.0)) < tol);
}

TEST_CASE("adversaries are unitary and named") {
    for (const char* name : {"identity", "random", "random-dense", "attack", "distinguishing"}) {
        const AdversarySpec a = adversary_by_name(name, 4, name[0] == 'a' || name[0] == 'd' ? 2 : 1, 1, 0);
        CHECK_NOTHROW(a.validate());
        CHECK(a.A.size() == std::size_t(4 * a.t));
    }
    CHECK_THROWS(adversary_by_name("nope", 4, 1, 1, 0));
}

TEST_CASE("exact hybrids are Hermitian, positive and at most trace one") {
    HybridConfig cfg;
    cfg.N = 4;
    cfg.adv = identity_adversary(4, 1);
    for (int i = 2; i <= 5; ++i) {
        const HybridResult r = hybrid(i, cfg);
        CHECK(r.exact);
        CHECK(r.check.hermitian_residual < 1e-10);
        CHECK(r.check.min_eigenvalue > -1e-9);
        CHECK(r.check.trace <= 1 + 1e-9);
        if (i <= 3) CHECK(r.check.trace == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("key symmetry reproduces the sum over every key triple") {
    HybridConfig cfg;
    cfg.N = 4;
    cfg.adv = identity_adversary(4, 1);
    for (int i : {4, 5}) {
        cfg.use_key_symmetry = true;
        const HybridResult sym = hybrid(i, cfg);
        cfg.use_key_symmetry = false;
        const HybridResult all = hybrid(i, cfg);
        CHECK((sym.rho - all.rho).norm() < 1e-10);
    }
}

TEST_CASE("hybrids six and seven coincide under the coupling") {
    for (const char* adv : {"identity", "random"}) {
        const CouplingReport c = h6_h7_coupled(4, adversary_by_name(adv, 4, 1, 1, 2), 20, 0);
        CHECK(c.samples == 20);
        CHECK(c.max_frobenius_gap < 1e-9);
        CHECK(c.td < 1e-9);
    }
}

TEST_CASE("the insecure variant leaks its key") {
    for (int N : {2, 4, 8, 16}) {
        const AttackReport r = attack_insecure_variant(N, 200, 1);
        CHECK(r.insecure_success == 1.0);
        CHECK(r.insecure_pass);
        CHECK(r.chance == doctest::Approx(1.0 / N));
    }
    const AttackReport s = attack_insecure_variant(16, 200, 1, 2);
    CHECK(s.key_bits == 2);
    CHECK(s.insecure_success == 1.0);
}

TEST_CASE("curve helpers") {
    std::vector<int> N{4, 8, 16};
    std::vector<double> y;
    for (int n : N) y.push_back(3 / std::sqrt(double(n)));
    CHECK(loglog_slope(N, y) == doctest::Approx(-0.5));
    CHECK(strictly_decreasing(y));
    CHECK_FALSE(strictly_decreasing({1.0, 1.0}));
}
