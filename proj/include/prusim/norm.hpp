#pragma once

#include <chrono>
#include <functional>
#include <stdexcept>
#include <vector>

#include "prusim/operators.hpp"

namespace prusim {

// Wall-clock and size limits shared by the long-running computations.
struct Budget {
    double seconds = 600;
    std::size_t max_columns = 20'000'000;
    std::size_t max_bytes = std::size_t(4) << 30;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    void check(const char* what) const;
    // State entries that fit in max_bytes while an operator is being applied.
    std::size_t max_state_entries() const;
};

// ---- truncated domains ---------------------------------------------------

enum class Truncation { Sum, PerRegister };

// How a class of values may be relabelled without changing the norm.
//   Rigid:  no symmetry, every value enumerated.
//   Perm:   any permutation of [N] acting on this class alone.
//   Affine: a translation per class plus one GL(n,2) map shared by all
//           affine classes.
enum class SymKind { Rigid, Perm, Affine };

struct RegSlot {
    int reg = 0;
    bool i_distinct = true;  // false means D-distinct
    int x_cls = 0;
    int y_cls = 0;
};

struct DomainSpec {
    int N = 4;
    int t = 1;
    Truncation trunc = Truncation::Sum;
    int a_cls = -1;  // -1: register A is fixed to 0
    std::vector<RegSlot> regs;
    std::vector<SymKind> classes;
    int key_mask = 0;  // bit 0: k1, bit 1: k2, bit 2: k3; all values enumerated
    int dB = 1;
};

bool in_domain(const DomainSpec& d, const Label& l);
// Every basis label of the domain, or a set of labels meeting every symmetry orbit.
std::vector<Label> enumerate_domain(const DomainSpec& d, bool reps_only);

// Domain of single-pair oracles: (A, S, T) with |L|+|R| <= t or per-register.
DomainSpec single_pair_domain(int N, int t, Truncation tr = Truncation::Sum);
// Four registers (S1,T1,S2,T2) each of size <= t, optionally with register A.
DomainSpec four_register_domain(int N, int t, bool with_a);

// ---- restricted operator norm -------------------------------------------

struct NormOptions {
    std::size_t dense_max = 2000;
    double tol = 1e-8;
    int max_iter = 100000;
    bool spectrum = false;  // also measure how far M^dag M is from a projector
    double amp_floor = 1e-13;
};

struct NormResult {
    double norm = 0;
    std::size_t columns = 0;
    std::size_t components = 0;
    std::size_t largest_component = 0;
    std::size_t power_components = 0;
    // Largest distance of a Gram eigenvalue from {0,1}; dense components use
    // min(|l|, |l-1|), larger ones use ||G^2 - G||.
    double projector_deviation = 0;
    double seconds = 0;
};

using DomainPredicate = std::function<bool(const Label&)>;

// Largest singular value of op restricted to the span of the domain. The seeds
// must meet every connected component of M^dag M up to symmetry; components
// are discovered by alternating forward and adjoint application.
NormResult op_norm_restricted(const Op& op, const std::vector<Label>& seeds,
                              const DomainPredicate& in_dom, const NormOptions& opt = {},
                              const Budget& budget = {});

NormResult op_norm_restricted(const Op& op, const DomainSpec& dom, bool use_symmetry,
                              const NormOptions& opt = {}, const Budget& budget = {});

}  // namespace prusim
