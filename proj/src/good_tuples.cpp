#include "prusim/good_tuples.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "prusim/rng.hpp"

namespace prusim {

namespace {

bool contains(const std::vector<Value>& s, Value v) {
    return std::find(s.begin(), s.end(), v) != s.end();
}

// v in (A ^ B) without materializing the set.
bool in_xor(const std::vector<Value>& a, const std::vector<Value>& b, Value v) {
    for (auto x : a)
        if (contains(b, static_cast<Value>(x ^ v))) return true;
    return false;
}

std::vector<Value> shifted_union(const std::vector<Value>& a, Value s,
                                 const std::vector<Value>& b) {
    return set_union(xor_shift(a, s), b);
}

bool distinct(const std::vector<Value>& z) {
    for (size_t i = 0; i < z.size(); ++i)
        for (size_t j = i + 1; j < z.size(); ++j)
            if (z[i] == z[j]) return false;
    return true;
}

}  // namespace

int RelationQuad::max_size() const {
    return std::max({L1.size(), L2.size(), R1.size(), R2.size()});
}

GoodTupleChecker::GoodTupleChecker(const RelationQuad& q, ZRRule rule)
    : q_(q),
      rule_(rule),
      dL1_(q.L1.dom()),
      iL1_(q.L1.im()),
      dL2_(q.L2.dom()),
      iL2_(q.L2.im()),
      dR1_(q.R1.dom()),
      iR1_(q.R1.im()),
      dR2_(q.R2.dom()),
      iR2_(q.R2.im()) {
    if (!q.L1.i_distinct() || !q.L2.i_distinct() || !q.R1.d_distinct() || !q.R2.d_distinct())
        throw std::invalid_argument("good tuples: relations violate distinctness");
}

bool GoodTupleChecker::k1_ok(Value k1) const {
    return !in_xor(dL1_, dL2_, k1) && !in_xor(dR1_, dR2_, k1);
}

bool GoodTupleChecker::k3_ok(Value k3) const {
    return !in_xor(iL1_, iL2_, k3) && !in_xor(iR1_, iR2_, k3);
}

bool GoodTupleChecker::k2_ok(Value k1, Value k2, Value k3) const {
    auto dl = shifted_union(dL1_, k1, dL2_);
    auto il = shifted_union(iL1_, k3, iL2_);
    if (in_xor(dl, il, k2)) return false;
    auto dr = shifted_union(dR1_, k1, dR2_);
    auto ir = shifted_union(iR1_, k3, iR2_);
    return !in_xor(dr, ir, k2);
}

std::vector<Value> GoodTupleChecker::zL_forbidden(const KeyTriple& k) const {
    auto s = shifted_union(iL1_, k.k3, iL2_);
    return set_union(s, xor_shift(shifted_union(dL1_, k.k1, dL2_), k.k2));
}

std::vector<Value> GoodTupleChecker::zR_forbidden(const KeyTriple& k) const {
    if (rule_ == ZRRule::Literal) {
        auto s = shifted_union(iR1_, k.k3, iR2_);
        return set_union(s, xor_shift(shifted_union(dR1_, k.k1, dR2_), k.k2));
    }
    auto s = shifted_union(dR1_, k.k1, dR2_);
    return set_union(s, xor_shift(shifted_union(iR1_, k.k3, iR2_), k.k2));
}

bool GoodTupleChecker::zL_ok(const KeyTriple& k, const std::vector<Value>& zL) const {
    if (static_cast<int>(zL.size()) != q_.L2.size())
        throw std::invalid_argument("good tuples: |zL| != |L2|");
    if (!distinct(zL)) return false;
    if (zL.empty()) return true;
    auto f = zL_forbidden(k);
    for (auto z : zL)
        if (std::binary_search(f.begin(), f.end(), z)) return false;
    return true;
}

bool GoodTupleChecker::zR_ok(const KeyTriple& k, const std::vector<Value>& zR) const {
    if (static_cast<int>(zR.size()) != q_.R2.size())
        throw std::invalid_argument("good tuples: |zR| != |R2|");
    if (!distinct(zR)) return false;
    if (zR.empty()) return true;
    auto f = zR_forbidden(k);
    for (auto z : zR)
        if (std::binary_search(f.begin(), f.end(), z)) return false;
    return true;
}

bool GoodTupleChecker::is_good(const KeyTriple& k, const std::vector<Value>& zL,
                               const std::vector<Value>& zR) const {
    return k1_ok(k.k1) && k3_ok(k.k3) && k2_ok(k.k1, k.k2, k.k3) && zL_ok(k, zL) &&
           zR_ok(k, zR);
}

std::vector<Value> GoodTupleChecker::B1() const {
    return set_union(xor_sets(dL1_, dL2_), xor_sets(dR1_, dR2_));
}

std::vector<Value> GoodTupleChecker::B3() const {
    return set_union(xor_sets(iL1_, iL2_), xor_sets(iR1_, iR2_));
}

std::vector<Value> GoodTupleChecker::B2(Value k1, Value k3) const {
    if (!k1_ok(k1) || !k3_ok(k3)) throw std::invalid_argument("B2: (k1,k3) is bad");
    return set_union(xor_sets(shifted_union(dL1_, k1, dL2_), shifted_union(iL1_, k3, iL2_)),
                     xor_sets(shifted_union(dR1_, k1, dR2_), shifted_union(iR1_, k3, iR2_)));
}

std::uint64_t count_distinct_avoiding(int N, int m, int f) {
    std::uint64_t c = 1;
    for (int i = 0; i < m; ++i) {
        int avail = N - f - i;
        if (avail <= 0) return 0;
        c *= static_cast<std::uint64_t>(avail);
    }
    return c;
}

static std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

std::uint64_t GoodTupleChecker::BL_size(const KeyTriple& k, int N) const {
    const int m = q_.L2.size();
    auto f = static_cast<int>(zL_forbidden(k).size());
    return ipow(N, m) - count_distinct_avoiding(N, m, m ? f : 0);
}

std::uint64_t GoodTupleChecker::BR_size(const KeyTriple& k, int N) const {
    const int m = q_.R2.size();
    auto f = static_cast<int>(zR_forbidden(k).size());
    return ipow(N, m) - count_distinct_avoiding(N, m, m ? f : 0);
}

CensusReport census_exhaustive(const RelationQuad& q, int N, int t, ZRRule rule,
                               const CensusBudget& budget) {
    const int lenL = q.L2.size(), lenR = q.R2.size();
    std::uint64_t universe = ipow(N, 3 + lenL + lenR);
    if (universe > budget.max_exhaustive)
        throw std::length_error("census: exhaustive universe exceeds budget");
    GoodTupleChecker g(q, rule);
    CensusReport r;
    r.N = N;
    r.t = t;
    r.mode = "exhaustive";
    r.universe = universe;
    for_each_tuple(N, lenL, lenR, [&](const KeyTriple& k, const auto& zL, const auto& zR) {
        r.good += g.is_good(k, zL, zR);
    });
    r.fraction = double(r.good) / double(universe);
    r.bound = 1.0 - 22.0 * t * t / N;
    r.pass = r.fraction >= r.bound;
    return r;
}

CensusReport census_sampled(const RelationQuad& q, int N, int t, std::uint64_t samples,
                            std::uint64_t seed, ZRRule rule) {
    GoodTupleChecker g(q, rule);
    const int lenL = q.L2.size(), lenR = q.R2.size();
    CensusReport r;
    r.N = N;
    r.t = t;
    r.mode = "sampled";
    r.seed = seed;
    r.universe = samples;
    std::vector<Value> zL(lenL), zR(lenR);
    for (std::uint64_t s = 0; s < samples; ++s) {
        CounterRng rng(seed, s);
        KeyTriple k{Value(rng.below(N)), Value(rng.below(N)), Value(rng.below(N))};
        for (auto& z : zL) z = Value(rng.below(N));
        for (auto& z : zR) z = Value(rng.below(N));
        r.good += g.is_good(k, zL, zR);
    }
    r.fraction = samples ? double(r.good) / double(samples) : 0.0;
    r.sigma = samples ? std::sqrt(r.fraction * (1 - r.fraction) / double(samples)) : 0.0;
    r.bound = 1.0 - 22.0 * t * t / N;
    // Pass unless the bound is exceeded by more than three standard errors.
    r.pass = r.fraction + 3 * r.sigma >= r.bound;
    return r;
}

std::vector<Value> z_insert(const std::vector<Value>& z, int i, Value v) {
    std::vector<Value> out(z);
    out.insert(out.begin() + i, v);
    return out;
}

std::vector<Value> z_delete(const std::vector<Value>& z, int i) {
    std::vector<Value> out(z);
    out.erase(out.begin() + i);
    return out;
}

int insertion_index(const Relation& L2, Value y) {
    int i = 0;
    for (auto v : L2.im()) i += (v < y);
    return i;
}

namespace {

RelationQuad with_L1(const RelationQuad& q, Value x, Value y) {
    RelationQuad r = q;
    r.L1.insert(Pair{x, y});
    return r;
}

RelationQuad with_L2(const RelationQuad& q, Value x, Value y) {
    RelationQuad r = q;
    r.L2.insert(Pair{x, y});
    return r;
}

// Checkers for L1 + (x,y), one per y not in Im(L1); null entries elsewhere.
std::vector<std::unique_ptr<GoodTupleChecker>> extended_checkers(const RelationQuad& q, Value x,
                                                                 int N, bool second) {
    std::vector<std::unique_ptr<GoodTupleChecker>> v(N);
    const Relation& base = second ? q.L2 : q.L1;
    for (int y = 0; y < N; ++y) {
        if (base.in_im(Value(y))) continue;
        v[y] = std::make_unique<GoodTupleChecker>(second ? with_L2(q, x, Value(y))
                                                         : with_L1(q, x, Value(y)));
    }
    return v;
}

}  // namespace

CountReport lemma_no_y_fraction_L1(const RelationQuad& q, Value x, int N, int t) {
    auto ext = extended_checkers(q, x, N, false);
    CountReport r{"no_y_fraction_L1", N, t};
    std::uint64_t bad = 0;
    for_each_tuple(N, q.L2.size(), q.R2.size(), [&](const KeyTriple& k, const auto& zL,
                                                    const auto& zR) {
        ++r.enumerated;
        for (int y = 0; y < N; ++y)
            if (ext[y] && ext[y]->is_good(k, zL, zR)) return;
        ++bad;
    });
    r.measured = double(bad) / double(r.enumerated);
    r.bound = t * (22.0 * t + 4) / N;
    r.pass = r.measured <= r.bound + 1e-12;
    return r;
}

CountReport lemma_failing_y_L1(const RelationQuad& q, Value x, int N, int t) {
    auto ext = extended_checkers(q, x, N, false);
    CountReport r{"failing_y_L1", N, t};
    int worst = 0;
    for_each_tuple(N, q.L2.size(), q.R2.size(), [&](const KeyTriple& k, const auto& zL,
                                                    const auto& zR) {
        ++r.enumerated;
        int good = 0, fail = 0;
        for (int y = 0; y < N; ++y) {
            if (!ext[y]) continue;
            if (ext[y]->is_good(k, zL, zR))
                ++good;
            else
                ++fail;
        }
        if (good > 0) worst = std::max(worst, fail);
    });
    r.measured = worst;
    r.bound = 4.0 * t;
    r.pass = r.measured <= r.bound;
    return r;
}

CountReport lemma_tuple_difference_L1(const RelationQuad& q, Value x, int N, int t) {
    GoodTupleChecker base(q);
    auto ext = extended_checkers(q, x, N, false);
    CountReport r{"tuple_difference_L1", N, t};
    std::uint64_t diff = 0;
    for_each_tuple(N, q.L2.size(), q.R2.size(), [&](const KeyTriple& k, const auto& zL,
                                                    const auto& zR) {
        const bool good = base.is_good(k, zL, zR);
        Relation l2aug = good ? augment(q.L2, AugKind::L2, k, zL) : Relation{};
        for (int y = 0; y < N; ++y) {
            ++r.enumerated;
            const bool in_phi = ext[y] && ext[y]->is_good(k, zL, zR);
            const bool in_psi =
                good && !q.L1.in_im(Value(y)) && !l2aug.in_im(Value(y ^ k.k3));
            if (in_phi && !in_psi) r.containment = false;
            if (in_psi && !in_phi) ++diff;
        }
    });
    const int m = q.L2.size() + q.R2.size();
    r.measured = double(diff);
    r.bound = t * (22.0 * t + 8) * std::pow(double(N), m + 3);
    r.pass = r.containment && r.measured <= r.bound;
    return r;
}

CountReport lemma_no_y_fraction_L2(const RelationQuad& q, Value x, int N, int t) {
    auto ext = extended_checkers(q, x, N, true);
    CountReport r{"no_y_fraction_L2", N, t};
    std::uint64_t bad = 0;
    for_each_tuple(N, q.L2.size(), q.R2.size(), [&](const KeyTriple& k, const auto& zL,
                                                    const auto& zR) {
        for (int z = 0; z < N; ++z) {
            ++r.enumerated;
            bool found = false;
            for (int y = 0; y < N && !found; ++y) {
                if (!ext[y]) continue;
                auto zz = z_insert(zL, insertion_index(q.L2, Value(y)), Value(z));
                found = ext[y]->is_good(k, zz, zR);
            }
            bad += !found;
        }
    });
    r.measured = double(bad) / double(r.enumerated);
    r.bound = (22.0 * t * t + 10.0 * t + 1) / N;
    r.pass = r.measured <= r.bound + 1e-12;
    return r;
}

CountReport lemma_failing_y_L2(const RelationQuad& q, Value x, int N, int t) {
    auto ext = extended_checkers(q, x, N, true);
    CountReport r{"failing_y_L2", N, t};
    int worst = 0;
    for_each_tuple(N, q.L2.size(), q.R2.size(), [&](const KeyTriple& k, const auto& zL,
                                                    const auto& zR) {
        for (int z = 0; z < N; ++z) {
            ++r.enumerated;
            int good = 0, fail = 0;
            for (int y = 0; y < N; ++y) {
                if (!ext[y]) continue;
                auto zz = z_insert(zL, insertion_index(q.L2, Value(y)), Value(z));
                if (ext[y]->is_good(k, zz, zR))
                    ++good;
                else
                    ++fail;
            }
            if (good > 0) worst = std::max(worst, fail);
        }
    });
    r.measured = worst;
    r.bound = 4.0 * t + 1;
    r.pass = r.measured <= r.bound;
    return r;
}

CountReport lemma_tuple_difference_L2(const RelationQuad& q, Value x, int N, int t) {
    GoodTupleChecker base(q);
    auto ext = extended_checkers(q, x, N, true);
    CountReport r{"tuple_difference_L2", N, t};
    std::uint64_t diff = 0;
    for_each_tuple(N, q.L2.size(), q.R2.size(), [&](const KeyTriple& k, const auto& zL,
                                                    const auto& zR) {
        const bool good = base.is_good(k, zL, zR);
        Relation laug;
        if (good)
            laug = augment(q.L1, AugKind::L1, k).united(augment(q.L2, AugKind::L2, k, zL));
        for (int z = 0; z < N; ++z) {
            for (int y = 0; y < N; ++y) {
                ++r.enumerated;
                bool in_phi = false;
                if (ext[y]) {
                    auto zz = z_insert(zL, insertion_index(q.L2, Value(y)), Value(z));
                    in_phi = ext[y]->is_good(k, zz, zR);
                }
                const bool in_psi = good && !laug.in_im(Value(z)) && !laug.in_im(Value(y)) &&
                                    y != z;
                if (in_phi && !in_psi) r.containment = false;
                if (in_psi && !in_phi) ++diff;
            }
        }
    });
    const int m = q.L2.size() + q.R2.size();
    r.measured = double(diff);
    r.bound = (22.0 * t * t + 14.0 * t + 2) * std::pow(double(N), m + 4);
    r.pass = r.containment && r.measured <= r.bound;
    return r;
}

bool monotonicity_check(const RelationQuad& q, Value x, int N, std::string* witness) {
    GoodTupleChecker base(q);
    auto ext1 = extended_checkers(q, x, N, false);
    auto ext2 = extended_checkers(q, x, N, true);
    bool ok = true;
    for_each_tuple(N, q.L2.size(), q.R2.size(), [&](const KeyTriple& k, const auto& zL,
                                                    const auto& zR) {
        if (!ok || base.is_good(k, zL, zR)) return;
        for (int y = 0; y < N && ok; ++y) {
            if (ext1[y] && ext1[y]->is_good(k, zL, zR)) {
                ok = false;
                if (witness) {
                    std::ostringstream os;
                    os << "item1 y=" << y << " k=(" << int(k.k1) << ',' << int(k.k2) << ','
                       << int(k.k3) << ')';
                    *witness = os.str();
                }
            }
            if (!ext2[y]) continue;
            const int i = insertion_index(q.L2, Value(y));
            for (int z = 0; z < N && ok; ++z) {
                if (ext2[y]->is_good(k, z_insert(zL, i, Value(z)), zR)) {
                    ok = false;
                    if (witness) {
                        std::ostringstream os;
                        os << "item2 y=" << y << " z=" << z;
                        *witness = os.str();
                    }
                }
            }
        }
    });
    return ok;
}

}  // namespace prusim
