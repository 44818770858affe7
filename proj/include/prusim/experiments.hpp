#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "prusim/norm.hpp"
#include "prusim/rng.hpp"
#include "prusim/state.hpp"

namespace prusim {

// Haar unitary from the QR factorization of a complex Ginibre matrix, with the
// phases of R's diagonal moved into Q.
Eigen::MatrixXcd sample_haar(int N, CounterRng& rng);
double unitarity_residual(const Eigen::MatrixXcd& U);

// Adversary (A_1 .. A_4t) on A (x) B; queries run in the order O1, O2, O1^dag, O2^dag.
struct AdversarySpec {
    std::string name;
    int N = 4;
    int t = 1;
    int dB = 1;
    std::vector<Eigen::MatrixXcd> A;
    // Every A_i commutes with x -> Mx on register A for M in GL(n,2), which lets
    // the keyed hybrids be computed from one key triple per GL orbit.
    bool gl_equivariant = false;
    // Register B holds a value of [N] that the key symmetry must also relabel.
    bool b_carries_value = false;

    void validate() const;
};

AdversarySpec identity_adversary(int N, int t, int dB = 1);
// Random permutation times random phases on A (x) B. Exact hybrids stay sparse.
AdversarySpec random_monomial_adversary(int N, int t, int dB, std::uint64_t seed);
// Haar unitaries on A (x) B; only practical for exact hybrids at the smallest N.
AdversarySpec random_dense_adversary(int N, int t, int dB, std::uint64_t seed);
// Two rounds that route O1^dag, O2, O1^dag onto the working register and park
// the other queries on a junk value in B (dimension N).
AdversarySpec attack_adversary(int N);
// Same routing, started from and finished with a Hadamard layer on A.
AdversarySpec distinguishing_adversary(int N);
AdversarySpec adversary_by_name(const std::string& name, int N, int t, int dB,
                                std::uint64_t seed);

struct HybridConfig {
    int N = 4;
    AdversarySpec adv;
    int samples = 10000;  // Monte Carlo hybrids 1, 6, 7
    std::uint64_t seed = 0;
    bool use_key_symmetry = true;
    Budget budget;
};

struct HybridResult {
    int index = 0;
    DensityMatrix rho;
    bool exact = true;
    int samples = 0;
    double td_sigma = 0;  // conservative one-sigma bound on TD error from sampling
    std::size_t max_support = 0;
    int key_classes = 0;
    double seconds = 0;
    DensityCheck check;
};

HybridResult hybrid(int index, const HybridConfig& cfg);

struct CouplingReport {
    int samples = 0;
    double max_frobenius_gap = 0;
    double td = 0;
};
// Hybrids 6 and 7 driven by the same (U, k) through U' = X^k3 U X^k1,
// k2' = k1 ^ k2 ^ k3.
CouplingReport h6_h7_coupled(int N, const AdversarySpec& adv, int samples, std::uint64_t seed);

struct CurvePoint {
    int N = 0;
    double td = 0;
    double sigma = 0;
    double seconds = 0;
};
struct CurveReport {
    int i = 0, j = 0;
    std::string adversary;
    std::vector<CurvePoint> points;
    bool monotone = false;
    double slope = 0;
};
// TD(rho_i, rho_j) over the N grid.
CurveReport hybrid_distance_curve(int i, int j, const std::vector<int>& N_grid,
                                  const std::string& adversary, int t, int dB, int samples,
                                  std::uint64_t seed, const Budget& budget = {});

struct AttackReport {
    int N = 0;
    int trials = 0;
    int key_bits = 0;
    double insecure_success = 0;
    double full_success = 0;
    double chance = 0;
    double full_sigma = 0;
    bool insecure_pass = false;
    bool full_pass = false;
};
// Key recovery by U^dag, then U X^k U, then U^dag. key_bits < n selects the
// short-key construction where masks act on the top key_bits bits.
AttackReport attack_insecure_variant(int N, int trials, std::uint64_t seed, int key_bits = -1);

// Least-squares slope of log(y) against log(N).
double loglog_slope(const std::vector<int>& N, const std::vector<double>& y);
bool strictly_decreasing(const std::vector<double>& y);

}  // namespace prusim
