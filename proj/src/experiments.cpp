#include "prusim/experiments.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "prusim/path_oracles.hpp"

namespace prusim {

Eigen::MatrixXcd sample_haar(int N, CounterRng& rng) {
    Eigen::MatrixXcd Z(N, N);
    const double s = std::sqrt(0.5);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            Z(i, j) = cplx(s * re, s * im);
        }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
    Eigen::MatrixXcd Q = qr.householderQ();
    const Eigen::MatrixXcd& R = qr.matrixQR();
    for (int j = 0; j < N; ++j) {
        const cplx d = R(j, j);
        const double m = std::abs(d);
        if (m > 0) Q.col(j) *= d / m;
    }
    return Q;
}

double unitarity_residual(const Eigen::MatrixXcd& U) {
    return (U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
}

void AdversarySpec::validate() const {
    if (!is_power_of_two(N) || N < 2) throw std::invalid_argument("adversary N must be a power of two >= 2");
    if (t < 1 || dB < 1) throw std::invalid_argument("adversary needs t >= 1 and dB >= 1");
    if (int(A.size()) != 4 * t) throw std::invalid_argument("adversary needs 4t unitaries");
    for (const auto& M : A) {
        if (M.rows() != N * dB || M.cols() != N * dB)
            throw std::invalid_argument("adversary unitary has the wrong dimension");
        if (unitarity_residual(M) > 1e-9) throw std::invalid_argument("adversary map is not unitary");
    }
}

double loglog_slope(const std::vector<int>& N, const std::vector<double>& y) {
    const std::size_t n = std::min(N.size(), y.size());
    if (n < 2) return 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(double(N[i]));
        const double ly = std::log(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool strictly_decreasing(const std::vector<double>& y) {
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] < y[i - 1])) return false;
    return y.size() >= 2;
}

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& Y) {
    Eigen::MatrixXcd K(X.rows() * Y.rows(), X.cols() * Y.cols());
    for (int i = 0; i < X.rows(); ++i)
        for (int j = 0; j < X.cols(); ++j)
            K.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) = X(i, j) * Y;
    return K;
}

Eigen::MatrixXcd swap_AB(int N) {
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N * N, N * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) S(b * N + a, a * N + b) = 1;
    return S;
}

Eigen::MatrixXcd hadamard(int N) {
    Eigen::MatrixXcd H(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            H(i, j) = (__builtin_popcount(unsigned(i & j)) & 1 ? -1.0 : 1.0) / std::sqrt(double(N));
    return H;
}

// Routing used by the attack and distinguishing adversaries; B has dimension N.
// Round 1 runs O1^dag on the working value, round 2 runs O2 then O1^dag.
std::vector<Eigen::MatrixXcd> attack_routing(int N) {
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N * N, N * N);
    const Eigen::MatrixXcd S = swap_AB(N);
    return {S, I, S, S, I, S, I, S};
}

}  // namespace

AdversarySpec identity_adversary(int N, int t, int dB) {
    AdversarySpec a{"identity", N, t, dB, {}, true, false};
    a.A.assign(4 * t, Eigen::MatrixXcd::Identity(N * dB, N * dB));
    return a;
}

AdversarySpec random_monomial_adversary(int N, int t, int dB, std::uint64_t seed) {
    AdversarySpec a{"random", N, t, dB, {}, false, false};
    const int d = N * dB;
    for (int i = 0; i < 4 * t; ++i) {
        CounterRng rng(seed, 0x10000u + std::uint64_t(i));
        std::vector<int> perm(d);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
        for (int c = 0; c < d; ++c) M(perm[c], c) = std::polar(1.0, 2 * M_PI * rng.uniform());
        a.A.push_back(M);
    }
    return a;
}

AdversarySpec random_dense_adversary(int N, int t, int dB, std::uint64_t seed) {
    AdversarySpec a{"random-dense", N, t, dB, {}, false, false};
    for (int i = 0; i < 4 * t; ++i) {
        CounterRng rng(seed, 0x20000u + std::uint64_t(i));
        a.A.push_back(sample_haar(N * dB, rng));
    }
    return a;
}

AdversarySpec attack_adversary(int N) {
    AdversarySpec a{"attack", N, 2, N, attack_routing(N), true, true};
    return a;
}

AdversarySpec distinguishing_adversary(int N) {
    AdversarySpec a{"distinguishing", N, 2, N, attack_routing(N), false, true};
    const Eigen::MatrixXcd HA = kron(hadamard(N), Eigen::MatrixXcd::Identity(N, N));
    a.A.front() = a.A.front() * HA;  // prepare the uniform superposition first
    return a;
}

AdversarySpec adversary_by_name(const std::string& name, int N, int t, int dB,
                                std::uint64_t seed) {
    if (name == "identity") return identity_adversary(N, t, dB);
    if (name == "random") return random_monomial_adversary(N, t, dB, seed);
    if (name == "random-dense") return random_dense_adversary(N, t, dB, seed);
    if (name == "attack") return attack_adversary(N);
    if (name == "distinguishing") return distinguishing_adversary(N);
    throw std::invalid_argument("unknown adversary '" + name + "'");
}

// ---- Monte Carlo hybrids -------------------------------------------------------

namespace {

struct DensityAccumulator {
    Eigen::MatrixXcd sum, comp, sq;
    int n = 0;
    explicit DensityAccumulator(int d)
        : sum(Eigen::MatrixXcd::Zero(d, d)), comp(Eigen::MatrixXcd::Zero(d, d)),
          sq(Eigen::MatrixXcd::Zero(d, d)) {}

    void add(const Eigen::MatrixXcd& x) {
        // Kahan summation keeps the average independent of sample count drift.
        Eigen::MatrixXcd y = x - comp;
        Eigen::MatrixXcd t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        sq.real() += x.real().cwiseAbs2();
        sq.imag() += x.imag().cwiseAbs2();
        ++n;
    }
    Eigen::MatrixXcd mean() const { return sum / double(n); }
    // 0.5 * sqrt(d) * ||entrywise standard error||_F bounds the TD error.
    double td_sigma() const {
        if (n < 2) return 0;
        const Eigen::MatrixXcd m = mean();
        double f = 0;
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) {
                const double vr = sq(i, j).real() / n - m(i, j).real() * m(i, j).real();
                const double vi = sq(i, j).imag() / n - m(i, j).imag() * m(i, j).imag();
                f += (std::max(vr, 0.0) + std::max(vi, 0.0)) / (n - 1);
            }
        return 0.5 * std::sqrt(double(m.rows())) * std::sqrt(f);
    }
};

Eigen::MatrixXcd xmat(int N, Value k) {
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(N, N);
    for (int x = 0; x < N; ++x) X(x ^ k, x) = 1;
    return X;
}

// Runs the adversary against explicit N x N oracles and returns |psi><psi| on A (x) B.
Eigen::MatrixXcd run_matrix_oracles(const AdversarySpec& adv, const Eigen::MatrixXcd& O1,
                                    const Eigen::MatrixXcd& O2) {
    const Eigen::MatrixXcd IB = Eigen::MatrixXcd::Identity(adv.dB, adv.dB);
    const Eigen::MatrixXcd Q1 = kron(O1, IB), Q2 = kron(O2, IB);
    const Eigen::MatrixXcd Q1d = Q1.adjoint(), Q2d = Q2.adjoint();
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(adv.N * adv.dB);
    psi[0] = 1;
    for (int i = 0; i < adv.t; ++i) {
        psi = Q1 * (adv.A[4 * i] * psi);
        psi = Q2 * (adv.A[4 * i + 1] * psi);
        psi = Q1d * (adv.A[4 * i + 2] * psi);
        psi = Q2d * (adv.A[4 * i + 3] * psi);
    }
    return psi * psi.adjoint();
}

struct SampleOracles {
    Eigen::MatrixXcd O1, O2;
};

SampleOracles sample_oracles(int index, int N, CounterRng& rng) {
    if (index == 1) {
        Eigen::MatrixXcd U1 = sample_haar(N, rng);
        Eigen::MatrixXcd U2 = sample_haar(N, rng);
        return {U1, U2};
    }
    Eigen::MatrixXcd U = sample_haar(N, rng);
    const Value k1 = Value(rng.below(N)), k2 = Value(rng.below(N)), k3 = Value(rng.below(N));
    if (index == 6) return {xmat(N, k3) * U * xmat(N, k1), U * xmat(N, k2) * U};
    return {U, xmat(N, k3) * U * xmat(N, k2) * U * xmat(N, k1)};
}

HybridResult monte_carlo_hybrid(int index, const HybridConfig& cfg) {
    const auto& adv = cfg.adv;
    DensityAccumulator acc(adv.N * adv.dB);
    for (int s = 0; s < cfg.samples; ++s) {
        CounterRng rng(cfg.seed, std::uint64_t(s));
        auto o = sample_oracles(index, adv.N, rng);
        acc.add(run_matrix_oracles(adv, o.O1, o.O2));
        if ((s & 255) == 0) cfg.budget.check("Monte Carlo hybrid");
    }
    HybridResult r;
    r.index = index;
    r.exact = false;
    r.samples = cfg.samples;
    r.rho = acc.mean();
    r.td_sigma = acc.td_sigma();
    return r;
}

// ---- exact hybrids --------------------------------------------------------------

struct OracleSet {
    OpPtr O1, O2, O1d, O2d;
};

State run_adversary(const State& init, const OracleSet& o, const AdversarySpec& adv,
                    const Budget& budget, std::size_t& max_support) {
    std::vector<OpPtr> A;
    for (const auto& M : adv.A) A.push_back(make_unitary_AB(M, adv.dB));
    SupportLimitScope limit(budget.max_state_entries());
    State s = init;
    auto step = [&](const OpPtr& op) {
        s = apply(*op, s);
        max_support = std::max(max_support, s.size());
        budget.check("exact hybrid");
    };
    for (int i = 0; i < adv.t; ++i) {
        step(A[4 * i]);
        step(o.O1);
        step(A[4 * i + 1]);
        step(o.O2);
        step(A[4 * i + 2]);
        step(o.O1d);
        step(A[4 * i + 3]);
        step(o.O2d);
    }
    return s;
}

OpPtr oracle(int index, int N, RegPair rp) {
    return (index == 2 || index == 5) ? make_V(N, rp) : make_F(N, rp);
}

// Linear maps on F_2^n given by the images of the unit vectors.
struct Gl {
    std::vector<Value> col;
    Value operator()(Value v) const {
        Value r = 0;
        for (std::size_t j = 0; j < col.size(); ++j)
            if (v >> j & 1) r ^= col[j];
        return r;
    }
};

// Echelon representative of a key triple and a map M with M(rep_i) = k_i.
std::pair<KeyTriple, Gl> key_orbit(const KeyTriple& k, int n) {
    std::vector<Value> basis;
    std::array<Value, 3> rep{};
    const std::array<Value, 3> in{k.k1, k.k2, k.k3};
    for (int i = 0; i < 3; ++i) {
        bool found = false;
        for (unsigned m = 0; m < (1u << basis.size()) && !found; ++m) {
            Value x = 0;
            for (std::size_t j = 0; j < basis.size(); ++j)
                if (m >> j & 1) x ^= basis[j];
            if (x == in[i]) {
                rep[i] = Value(m);
                found = true;
            }
        }
        if (!found) {
            rep[i] = Value(1u << basis.size());
            basis.push_back(in[i]);
        }
    }
    // Complete the basis with unit vectors.
    Gl g{basis};
    for (int u = 0; u < n && int(g.col.size()) < n; ++u) {
        std::vector<Value> trial = g.col;
        trial.push_back(Value(1u << u));
        // independent iff the span doubles
        std::vector<char> span(1u << n, 0);
        for (unsigned m = 0; m < (1u << trial.size()); ++m) {
            Value x = 0;
            for (std::size_t j = 0; j < trial.size(); ++j)
                if (m >> j & 1) x ^= trial[j];
            span[x] = 1;
        }
        if (std::count(span.begin(), span.end(), 1) == (1 << trial.size())) g.col = trial;
    }
    return {KeyTriple{rep[0], rep[1], rep[2]}, g};
}

Eigen::MatrixXcd relabel_density(const Eigen::MatrixXcd& rho, const Gl& g, int dB,
                                 bool b_value) {
    const int d = int(rho.rows());
    std::vector<int> p(d);
    for (int i = 0; i < d; ++i) {
        const int a = i / dB, b = i % dB;
        p[i] = int(g(Value(a))) * dB + (b_value ? int(g(Value(b))) : b);
    }
    Eigen::MatrixXcd out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(p[i], p[j]) = rho(i, j);
    return out;
}

HybridResult exact_hybrid(int index, const HybridConfig& cfg) {
    const auto& adv = cfg.adv;
    const int N = adv.N;
    HybridResult r;
    r.index = index;
    Label init;
    if (index == 2 || index == 3) {
        OpPtr O1 = oracle(index, N, kFirstPair), O2 = oracle(index, N, kSecondPair);
        OracleSet o{O1, O2, adjoint(O1), adjoint(O2)};
        State s = run_adversary(State(init), o, adv, cfg.budget, r.max_support);
        r.rho = reduced_density(s, N, adv.dB);
        r.key_classes = 1;
        return r;
    }

    // Hybrids 4 and 5: keys are classical and orthogonal, so the key register
    // can be traced first and each key triple simulated with literal masks.
    auto run_key = [&](const KeyTriple& k) {
        OpPtr F = oracle(index, N, kFirstPair);
        OpPtr O1 = product({make_X_literal(k.k3), F, make_X_literal(k.k1)});
        OpPtr O2 = product({F, make_X_literal(k.k2), F});
        OracleSet o{O1, O2, adjoint(O1), adjoint(O2)};
        State s = run_adversary(State(init), o, adv, cfg.budget, r.max_support);
        return reduced_density(s, N, adv.dB);
    };

    const int d = N * adv.dB;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    const double w = 1.0 / (double(N) * N * N);
    if (cfg.use_key_symmetry && adv.gl_equivariant) {
        const int n = log2_exact(N);
        std::map<std::array<Value, 3>, std::vector<Gl>> classes;
        for (int k1 = 0; k1 < N; ++k1)
            for (int k2 = 0; k2 < N; ++k2)
                for (int k3 = 0; k3 < N; ++k3) {
                    auto [rep, g] = key_orbit(KeyTriple{Value(k1), Value(k2), Value(k3)}, n);
                    classes[{rep.k1, rep.k2, rep.k3}].push_back(g);
                }
        for (const auto& [rep, maps] : classes) {
            const Eigen::MatrixXcd base = run_key(KeyTriple{rep[0], rep[1], rep[2]});
            for (const auto& g : maps) rho += w * relabel_density(base, g, adv.dB, adv.b_carries_value);
        }
        r.key_classes = int(classes.size());
    } else {
        for (int k1 = 0; k1 < N; ++k1)
            for (int k2 = 0; k2 < N; ++k2)
                for (int k3 = 0; k3 < N; ++k3)
                    rho += w * run_key(KeyTriple{Value(k1), Value(k2), Value(k3)});
        r.key_classes = N * N * N;
    }
    r.rho = rho;
    return r;
}

}  // namespace

HybridResult hybrid(int index, const HybridConfig& cfg) {
    if (index < 1 || index > 7) throw std::invalid_argument("hybrid index must be in 1..7");
    if (!is_power_of_two(cfg.adv.N)) throw std::invalid_argument("N must be a power of two");
    cfg.adv.validate();
    HybridResult r = (index == 1 || index == 6 || index == 7) ? monte_carlo_hybrid(index, cfg)
                                                              : exact_hybrid(index, cfg);
    r.check = check_density(r.rho);
    r.seconds = cfg.budget.elapsed();
    return r;
}

CouplingReport h6_h7_coupled(int N, const AdversarySpec& adv, int samples, std::uint64_t seed) {
    adv.validate();
    CouplingReport rep;
    rep.samples = samples;
    const int d = N * adv.dB;
    Eigen::MatrixXcd s6 = Eigen::MatrixXcd::Zero(d, d), s7 = s6;
    for (int s = 0; s < samples; ++s) {
        CounterRng rng(seed, std::uint64_t(s));
        Eigen::MatrixXcd U = sample_haar(N, rng);
        const Value k1 = Value(rng.below(N)), k2 = Value(rng.below(N)), k3 = Value(rng.below(N));
        // Hybrid 6 with (U, k)
        const Eigen::MatrixXcd r6 =
            run_matrix_oracles(adv, xmat(N, k3) * U * xmat(N, k1), U * xmat(N, k2) * U);
        // Hybrid 7 with the coupled (U', k')
        const Eigen::MatrixXcd Up = xmat(N, k3) * U * xmat(N, k1);
        const Value k2p = Value(k1 ^ k2 ^ k3);
        const Eigen::MatrixXcd r7 =
            run_matrix_oracles(adv, Up, xmat(N, k3) * Up * xmat(N, k2p) * Up * xmat(N, k1));
        rep.max_frobenius_gap = std::max(rep.max_frobenius_gap, (r6 - r7).norm());
        s6 += r6;
        s7 += r7;
    }
    rep.td = trace_distance(s6 / samples, s7 / samples);
    return rep;
}

CurveReport hybrid_distance_curve(int i, int j, const std::vector<int>& N_grid,
                                  const std::string& adversary, int t, int dB, int samples,
                                  std::uint64_t seed, const Budget& budget) {
    CurveReport c;
    c.i = i;
    c.j = j;
    c.adversary = adversary;
    std::vector<double> ys;
    for (int N : N_grid) {
        HybridConfig cfg;
        cfg.N = N;
        cfg.adv = adversary_by_name(adversary, N, t, dB, seed);
        cfg.samples = samples;
        cfg.seed = seed;
        cfg.budget = budget;
        const auto ri = hybrid(i, cfg);
        const auto rj = hybrid(j, cfg);
        CurvePoint p;
        p.N = N;
        p.td = trace_distance(ri.rho, rj.rho);
        p.sigma = ri.td_sigma + rj.td_sigma;
        p.seconds = budget.elapsed();
        c.points.push_back(p);
        ys.push_back(p.td);
    }
    c.monotone = strictly_decreasing(ys);
    c.slope = loglog_slope(N_grid, ys);
    return c;
}

// ---- attack --------------------------------------------------------------------

AttackReport attack_insecure_variant(int N, int trials, std::uint64_t seed, int key_bits) {
    const int n = log2_exact(N);
    if (key_bits < 0 || key_bits > n) key_bits = n;
    const int shift = n - key_bits;
    const int K = 1 << key_bits;
    AttackReport rep;
    rep.N = N;
    rep.trials = trials;
    rep.key_bits = key_bits;
    int ok_insecure = 0, ok_full = 0;
    for (int s = 0; s < trials; ++s) {
        CounterRng rng(seed, std::uint64_t(s));
        const Eigen::MatrixXcd U = sample_haar(N, rng);
        const Value k = Value(rng.below(K) << shift);
        const Value k1 = Value(rng.below(K) << shift), k3 = Value(rng.below(K) << shift);
        const Value x = Value(rng.below(N));
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(N);
        psi[x] = 1;

        auto measure = [&](const Eigen::VectorXcd& v) {
            const double u = rng.uniform();
            double acc = 0;
            for (int i = 0; i < N; ++i) {
                acc += std::norm(v[i]);
                if (u < acc) return i;
            }
            return N - 1;
        };
        // O2 = U X^k U
        Eigen::VectorXcd v = U.adjoint() * psi;
        v = U * (xmat(N, k) * (U * v));
        v = U.adjoint() * v;
        if (Value(measure(v) ^ x) == k) ++ok_insecure;

        // O2 = X^k3 U X^k U X^k1 with the middle key as the target
        Eigen::VectorXcd w = U.adjoint() * psi;
        w = xmat(N, k3) * (U * (xmat(N, k) * (U * (xmat(N, k1) * w))));
        w = U.adjoint() * w;
        if (Value(measure(w) ^ x) == k) ++ok_full;
    }
    rep.insecure_success = double(ok_insecure) / trials;
    rep.full_success = double(ok_full) / trials;
    rep.chance = 1.0 / N;
    rep.full_sigma = std::sqrt(rep.chance * (1 - rep.chance) / trials);
    rep.insecure_pass = rep.insecure_success == 1.0;
    rep.full_pass = std::abs(rep.full_success - rep.chance) <= 3 * rep.full_sigma;
    return rep;
}

}  // namespace prusim
