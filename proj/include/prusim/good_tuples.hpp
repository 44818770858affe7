#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prusim/relations.hpp"

namespace prusim {

// Which form of the z_R disjointness condition to use. The literal form
// copies the z_L condition verbatim; it admits tuples whose augmented R is
// not D-distinct (see tests/test_good_tuples.cpp for a witness), so the
// dual form is the default.
enum class ZRRule { Dual, Literal };

struct RelationQuad {
    Relation L1, L2, R1, R2;
    int max_size() const;
};

class GoodTupleChecker {
public:
    explicit GoodTupleChecker(const RelationQuad& q, ZRRule rule = ZRRule::Dual);

    const RelationQuad& quad() const { return q_; }
    ZRRule rule() const { return rule_; }

    bool k1_ok(Value k1) const;
    bool k3_ok(Value k3) const;
    bool k2_ok(Value k1, Value k2, Value k3) const;
    bool zL_ok(const KeyTriple& k, const std::vector<Value>& zL) const;
    bool zR_ok(const KeyTriple& k, const std::vector<Value>& zR) const;
    bool is_good(const KeyTriple& k, const std::vector<Value>& zL,
                 const std::vector<Value>& zR) const;

    // Bad sets. B2 and the z sets follow the staged enumeration order.
    std::vector<Value> B1() const;
    std::vector<Value> B3() const;
    std::vector<Value> B2(Value k1, Value k3) const;
    // Values a single z coordinate must avoid.
    std::vector<Value> zL_forbidden(const KeyTriple& k) const;
    std::vector<Value> zR_forbidden(const KeyTriple& k) const;
    // |B_L| and |B_R| as counts over [N]^{|L2|} and [N]^{|R2|}.
    std::uint64_t BL_size(const KeyTriple& k, int N) const;
    std::uint64_t BR_size(const KeyTriple& k, int N) const;

private:
    RelationQuad q_;
    ZRRule rule_;
    std::vector<Value> dL1_, iL1_, dL2_, iL2_, dR1_, iR1_, dR2_, iR2_;
};

// Number of length-m vectors over [N] that are coordinate-distinct and avoid
// a forbidden set of size f: (N-f)(N-f-1)...(N-f-m+1).
std::uint64_t count_distinct_avoiding(int N, int m, int f);

struct CensusReport {
    int N = 0;
    int t = 0;
    std::string mode;  // "exhaustive" or "sampled"
    std::uint64_t seed = 0;
    std::uint64_t universe = 0;  // |universe| or sample count
    std::uint64_t good = 0;
    double fraction = 0.0;
    double bound = 0.0;       // 1 - 22 t^2 / N
    double sigma = 0.0;       // binomial standard error (sampled mode)
    bool pass = false;
};

struct CensusBudget {
    std::uint64_t max_exhaustive = 1ULL << 28;
};

CensusReport census_exhaustive(const RelationQuad& q, int N, int t,
                               ZRRule rule = ZRRule::Dual,
                               const CensusBudget& budget = {});
CensusReport census_sampled(const RelationQuad& q, int N, int t, std::uint64_t samples,
                            std::uint64_t seed, ZRRule rule = ZRRule::Dual);

// Insert z at position i (0-based) / delete position i.
std::vector<Value> z_insert(const std::vector<Value>& z, int i, Value v);
std::vector<Value> z_delete(const std::vector<Value>& z, int i);
// 0-based rank of y among Im(L2) + {y}.
int insertion_index(const Relation& L2, Value y);

// Exact quantities bounded by the counting lemmas of the first and second
// oracle analysis, computed by exhaustive enumeration.
struct CountReport {
    std::string which;
    int N = 0;
    int t = 0;
    double measured = 0.0;
    double bound = 0.0;
    bool containment = true;  // only meaningful for the set-difference lemmas
    bool pass = false;
    std::uint64_t enumerated = 0;
};

// Fraction of (k,z) admitting no y with (k,z) good for L1 + (x,y).
CountReport lemma_no_y_fraction_L1(const RelationQuad& q, Value x, int N, int t);
// Max over (k,z) with some good y of the number of failing y.
CountReport lemma_failing_y_L1(const RelationQuad& q, Value x, int N, int t);
// |Psi \ Phi| with Psi containing Phi, first-oracle version.
CountReport lemma_tuple_difference_L1(const RelationQuad& q, Value x, int N, int t);
// Second-oracle analogues, with z inserted into z_L.
CountReport lemma_no_y_fraction_L2(const RelationQuad& q, Value x, int N, int t);
CountReport lemma_failing_y_L2(const RelationQuad& q, Value x, int N, int t);
CountReport lemma_tuple_difference_L2(const RelationQuad& q, Value x, int N, int t);

// Both monotonicity items, exhaustively. Returns true if no counterexample.
bool monotonicity_check(const RelationQuad& q, Value x, int N, std::string* witness = nullptr);

// Calls f(k, zL, zR) for every element of [N]^3 x [N]^|L2| x [N]^|R2|.
template <class F>
void for_each_tuple(int N, int lenL, int lenR, F&& f) {
    std::vector<Value> zL(lenL), zR(lenR);
    auto step = [&](std::vector<Value>& z) {
        for (size_t i = 0; i < z.size(); ++i) {
            if (++z[i] < N) return true;
            z[i] = 0;
        }
        return false;
    };
    for (int k1 = 0; k1 < N; ++k1)
        for (int k2 = 0; k2 < N; ++k2)
            for (int k3 = 0; k3 < N; ++k3) {
                KeyTriple k{Value(k1), Value(k2), Value(k3)};
                std::fill(zL.begin(), zL.end(), 0);
                do {
                    std::fill(zR.begin(), zR.end(), 0);
                    do {
                        f(k, zL, zR);
                    } while (step(zR));
                } while (step(zL));
            }
}

}  // namespace prusim
