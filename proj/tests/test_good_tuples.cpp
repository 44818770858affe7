#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <set>

#include "prusim/decoder.hpp"
#include "prusim/good_tuples.hpp"
#include "prusim/rng.hpp"

using namespace prusim;

namespace {

using VSet = std::set<int>;

VSet dom(const Relation& r) {
    VSet s;
    for (auto p : r) s.insert(p.x);
    return s;
}
VSet im(const Relation& r) {
    VSet s;
    for (auto p : r) s.insert(p.y);
    return s;
}
VSet shift(const VSet& a, int k) {
    VSet s;
    for (int v : a) s.insert(v ^ k);
    return s;
}
VSet pairwise(const VSet& a, const VSet& b) {
    VSet s;
    for (int u : a)
        for (int v : b) s.insert(u ^ v);
    return s;
}
VSet unite(VSet a, const VSet& b) {
    a.insert(b.begin(), b.end());
    return a;
}
bool distinct(const std::vector<Value>& z) {
    return VSet(z.begin(), z.end()).size() == z.size();
}
bool avoids(const std::vector<Value>& z, const VSet& bad) {
    return std::none_of(z.begin(), z.end(), [&](Value v) { return bad.count(v); });
}

// The six conditions written out with std::set, one line per item.
bool good_by_definition(const RelationQuad& q, const KeyTriple& k, const std::vector<Value>& zL,
                        const std::vector<Value>& zR, ZRRule rule) {
    const auto &L1 = q.L1, &L2 = q.L2, &R1 = q.R1, &R2 = q.R2;
    if (unite(pairwise(dom(L1), dom(L2)), pairwise(dom(R1), dom(R2))).count(k.k1)) return false;
    const VSet dl = unite(shift(dom(L1), k.k1), dom(L2)), il = unite(shift(im(L1), k.k3), im(L2));
    const VSet dr = unite(shift(dom(R1), k.k1), dom(R2)), ir = unite(shift(im(R1), k.k3), im(R2));
    if (unite(pairwise(dl, il), pairwise(dr, ir)).count(k.k2)) return false;
    if (unite(pairwise(im(L1), im(L2)), pairwise(im(R1), im(R2))).count(k.k3)) return false;
    if (!distinct(zL) || !distinct(zR)) return false;
    if (!avoids(zL, unite(il, shift(dl, k.k2)))) return false;
    const VSet badR = rule == ZRRule::Literal ? unite(ir, shift(dr, k.k2)) : unite(dr, shift(ir, k.k2));
    return avoids(zR, badR);
}

Relation random_relation(CounterRng& rng, int N, int size, bool i_dist) {
    for (;;) {
        Relation r;
        for (int i = 0; i < size; ++i) r.insert({Value(rng.below(N)), Value(rng.below(N))});
        if (i_dist ? r.i_distinct() : r.d_distinct()) return r;
    }
}

RelationQuad random_quad(CounterRng& rng, int N, int s1, int s2, int s3, int s4) {
    return {random_relation(rng, N, s1, true), random_relation(rng, N, s2, true),
            random_relation(rng, N, s3, false), random_relation(rng, N, s4, false)};
}

}  // namespace

TEST_CASE("is_good examples") {
    GoodTupleChecker empty(RelationQuad{});
    for (int k = 0; k < 64; ++k) CHECK(empty.is_good({Value(k & 3), Value((k >> 2) & 3), Value(k >> 4)}, {}, {}));
    RelationQuad q;
    q.L1 = Relation{{0, 0}};
    q.L2 = Relation{{0, 1}};
    GoodTupleChecker g(q);
    for (int k2 = 0; k2 < 4; ++k2)
        for (int k3 = 0; k3 < 4; ++k3)
            for (int z = 0; z < 4; ++z) CHECK_FALSE(g.is_good({0, Value(k2), Value(k3)}, {Value(z)}, {}));
}

TEST_CASE("is_good matches the definition on random quads at N = 4 and N = 8") {
    for (ZRRule rule : {ZRRule::Dual, ZRRule::Literal})
        for (int trial = 0; trial < 40; ++trial) {
            CounterRng rng(17, trial);
            const int N = trial % 2 ? 8 : 4;
            const int cap = N == 4 ? 1 : 2;
            const RelationQuad q =
                random_quad(rng, N, int(rng.below(cap + 1)), int(rng.below(2)), int(rng.below(cap + 1)),
                            int(rng.below(2)));
            GoodTupleChecker g(q, rule);
            int mismatches = 0;
            for_each_tuple(N, q.L2.size(), q.R2.size(), [&](const KeyTriple& k, const auto& zL, const auto& zR) {
                if (g.is_good(k, zL, zR) != good_by_definition(q, k, zL, zR, rule)) ++mismatches;
            });
            CHECK(mismatches == 0);
        }
}

TEST_CASE("staged bad sets describe the same tuples") {
    for (int trial = 0; trial < 30; ++trial) {
        CounterRng rng(29, trial);
        const int N = 8;
        const RelationQuad q = random_quad(rng, N, 1, 1, 1, 1);
        GoodTupleChecker g(q);
        auto in = [](const std::vector<Value>& s, Value v) { return std::binary_search(s.begin(), s.end(), v); };
        for_each_tuple(N, 1, 1, [&](const KeyTriple& k, const auto& zL, const auto& zR) {
            bool staged = !in(g.B1(), k.k1) && !in(g.B3(), k.k3);
            if (staged) staged = !in(g.B2(k.k1, k.k3), k.k2);
            if (staged) staged = g.zL_ok(k, zL) && g.zR_ok(k, zR);
            CHECK(staged == g.is_good(k, zL, zR));
        });
    }
}

TEST_CASE("bad-set sizes stay within their fractions") {
    for (int trial = 0; trial < 50; ++trial) {
        CounterRng rng(31, trial);
        const int N = 16, t = 1 + int(rng.below(2));
        const RelationQuad q = random_quad(rng, N, t, t, t, t);
        GoodTupleChecker g(q);
        CHECK(g.B1().size() <= std::size_t(2 * t * t));
        CHECK(g.B3().size() <= std::size_t(2 * t * t));
        CHECK(GoodTupleChecker(RelationQuad{}).B1().empty());
        for (Value k1 = 0; k1 < N; ++k1)
            for (Value k3 = 0; k3 < N; ++k3)
                if (g.k1_ok(k1) && g.k3_ok(k3)) CHECK(g.B2(k1, k3).size() <= std::size_t(8 * t * t));
    }
}

TEST_CASE("good-tuple membership ignores the order of z") {
    for (int trial = 0; trial < 20; ++trial) {
        CounterRng rng(37, trial);
        const int N = 8;
        const RelationQuad q = random_quad(rng, N, 1, 2, 1, 2);
        GoodTupleChecker g(q);
        for (int s = 0; s < 400; ++s) {
            const KeyTriple k{Value(rng.below(N)), Value(rng.below(N)), Value(rng.below(N))};
            std::vector<Value> zL{Value(rng.below(N)), Value(rng.below(N))};
            std::vector<Value> zR{Value(rng.below(N)), Value(rng.below(N))};
            const bool a = g.is_good(k, zL, zR);
            std::reverse(zL.begin(), zL.end());
            std::reverse(zR.begin(), zR.end());
            CHECK(g.is_good(k, zL, zR) == a);
        }
    }
}

TEST_CASE("the literal z_R rule admits an undecodable tuple") {
    RelationQuad q;
    q.R2 = Relation{{0, 1}};
    const KeyTriple k{0, 2, 0};
    GoodTupleChecker literal(q, ZRRule::Literal), dual(q, ZRRule::Dual);
    int witnesses = 0;
    for (Value z = 0; z < 4; ++z) {
        if (!literal.is_good(k, {}, {z}) || dual.is_good(k, {}, {z})) continue;
        const Merged m = merge(q, k, {{}, {z}});
        const auto d = dec(m.L, m.R, m.keys);
        if (!d || !(*d == expected_output(q, k, {{}, {z}}))) ++witnesses;
    }
    CHECK(witnesses > 0);
}

TEST_CASE("count_distinct_avoiding matches enumeration") {
    for (int N : {4, 8})
        for (int m = 0; m <= 3; ++m)
            for (int f = 0; f <= N; ++f) {
                std::uint64_t brute = 0;
                std::vector<Value> z(m);
                std::function<void(int)> rec = [&](int i) {
                    if (i == m) {
                        brute += distinct(z) && std::all_of(z.begin(), z.end(), [&](Value v) { return v >= f; });
                        return;
                    }
                    for (int v = 0; v < N; ++v) {
                        z[i] = Value(v);
                        rec(i + 1);
                    }
                };
                rec(0);
                CHECK(count_distinct_avoiding(N, m, f) == brute);
            }
}

TEST_CASE("exhaustive census agrees with a direct count") {
    for (int trial = 0; trial < 6; ++trial) {
        CounterRng rng(41, trial);
        const int N = 4;
        const RelationQuad q = random_quad(rng, N, 1, 1, 1, int(trial % 2));
        const CensusReport r = census_exhaustive(q, N, 1);
        std::uint64_t good = 0, total = 0;
        for_each_tuple(N, q.L2.size(), q.R2.size(), [&](const KeyTriple& k, const auto& zL, const auto& zR) {
            ++total;
            good += good_by_definition(q, k, zL, zR, ZRRule::Dual);
        });
        CHECK(r.universe == total);
        CHECK(r.good == good);
        CHECK(r.fraction == doctest::Approx(double(good) / double(total)));
        CHECK(r.bound == doctest::Approx(1 - 22.0 / N));
    }
    const CensusReport e = census_exhaustive(RelationQuad{}, 4, 1);
    CHECK(e.fraction == 1.0);
    CHECK(e.pass);
}

TEST_CASE("census refuses universes beyond the budget") {
    RelationQuad q;
    q.L2 = Relation{{0, 1}, {1, 2}, {2, 3}};
    q.R2 = Relation{{0, 1}, {1, 2}, {2, 3}};
    CHECK_THROWS(census_exhaustive(q, 64, 3));
}

TEST_CASE("sampled census at N = 64 clears 1 - 22/64") {
    CounterRng rng(0, 99);
    const RelationQuad q = random_quad(rng, 64, 1, 1, 1, 1);
    const CensusReport r = census_sampled(q, 64, 1, 100000, 0);
    CHECK(r.universe == 100000);
    CHECK(r.fraction >= 1 - 22.0 / 64);
    CHECK(r.pass);
    CHECK(census_sampled(q, 64, 1, 100000, 0).good == r.good);
}

TEST_CASE("census at N = 8 with one pair in L1 and R1 matches its baseline") {
    std::ifstream in(PRUSIM_SOURCE_DIR "/tests/baselines/census.json");
    REQUIRE(in);
    const auto base = nlohmann::json::parse(in);
    RelationQuad q;
    q.L1 = Relation{{1, 2}};
    q.R1 = Relation{{3, 5}};
    const CensusReport r = census_exhaustive(q, 8, 1);
    CHECK(r.good == base.at("n8_l1_r1").at("good").get<std::uint64_t>());
    CHECK(r.universe == base.at("n8_l1_r1").at("universe").get<std::uint64_t>());
}

TEST_CASE("z insertion and deletion") {
    CHECK(z_insert({1, 2}, 1, 7) == std::vector<Value>{1, 7, 2});
    CHECK(z_delete({1, 7, 2}, 1) == std::vector<Value>{1, 2});
    CHECK(insertion_index(Relation{{0, 1}, {0, 5}}, 3) == 1);
    CHECK(insertion_index(Relation{}, 3) == 0);
}

TEST_CASE("counting lemmas at N = 8") {
    RelationQuad a;
    a.L1 = Relation{{2, 3}};
    const CountReport fy = lemma_failing_y_L1(a, 0, 8, 1);
    CHECK(fy.measured <= 4);
    CHECK(fy.pass);
    CHECK(lemma_no_y_fraction_L1(a, 0, 8, 1).pass);
    const CountReport d1 = lemma_tuple_difference_L1(a, 0, 8, 1);
    CHECK(d1.containment);
    CHECK(d1.pass);

    RelationQuad b;
    b.L2 = Relation{{2, 3}};
    const CountReport fy2 = lemma_failing_y_L2(b, 0, 8, 1);
    CHECK(fy2.measured <= 5);
    CHECK(fy2.pass);
    CHECK(lemma_no_y_fraction_L2(b, 0, 8, 1).pass);
    CHECK(lemma_tuple_difference_L2(b, 0, 8, 1).pass);

    // With nothing recorded, the new pair alone forbids k2 = x ^ k1 ^ y ^ k3,
    // so each key triple loses exactly one y.
    for (int N : {4, 8}) {
        const CountReport e = lemma_tuple_difference_L1(RelationQuad{}, 0, N, 1);
        CHECK(e.measured == double(N) * N * N);
        CHECK(e.containment);
        CHECK(e.pass);
    }
}

TEST_CASE("monotonicity at N = 4") {
    CHECK(monotonicity_check(RelationQuad{}, 0, 4));
    for (int trial = 0; trial < 4; ++trial) {
        CounterRng rng(43, trial);
        RelationQuad q = random_quad(rng, 4, 1, 0, 0, 0);
        std::string w;
        CHECK_MESSAGE(monotonicity_check(q, Value(trial), 4, &w), w);
        q = random_quad(rng, 4, 0, 1, 0, 0);
        CHECK_MESSAGE(monotonicity_check(q, Value(trial), 4, &w), w);
    }
}
