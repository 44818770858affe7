#include <doctest.h>

#include <algorithm>
#include <random>

#include "prusim/relations.hpp"

using namespace prusim;

TEST_CASE("canonical form sorts and keeps multiplicity") {
    Relation r = Relation::from_pairs({{3, 1}, {0, 2}, {3, 1}}, 4);
    CHECK(r.size() == 3);
    CHECK(r[0] == Pair{0, 2});
    CHECK(r[1] == Pair{3, 1});
    CHECK(r[2] == Pair{3, 1});
    CHECK(r.count({3, 1}) == 2);
    CHECK(Relation::from_pairs({}, 4).empty());
    CHECK_THROWS(Relation::from_pairs({{4, 0}}, 4));
}

TEST_CASE("canonical form ignores input order") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<int, int>> v;
        const int n = int(gen() % 6);
        for (int i = 0; i < n; ++i) v.emplace_back(int(gen() % 8), int(gen() % 8));
        const Relation a = Relation::from_pairs(v, 8);
        std::shuffle(v.begin(), v.end(), gen);
        CHECK(Relation::from_pairs(v, 8) == a);
        CHECK(Relation::from_pairs(a.to_vector(), 8) == a);
    }
}

TEST_CASE("dom, im and distinctness") {
    Relation r{{1, 2}, {1, 3}, {0, 2}};
    CHECK(r.dom() == std::vector<Value>{0, 1});
    CHECK(r.im() == std::vector<Value>{2, 3});
    CHECK_FALSE(r.i_distinct());
    CHECK_FALSE(r.d_distinct());
    Relation s{{0, 1}, {2, 3}};
    CHECK(s.i_distinct());
    CHECK(s.d_distinct());
    CHECK(s.by_image(3)->x == 2);
    CHECK_FALSE(s.by_domain(1).has_value());
    Relation e;
    CHECK(e.erase({0, 0}) == false);
    s.insert({5, 5});
    CHECK(s.erase({5, 5}));
    CHECK(s == Relation{{0, 1}, {2, 3}});
}

TEST_CASE("augment examples") {
    CHECK(augment(Relation{{1, 2}}, AugKind::L1, {4, 0, 1}) == Relation{{5, 3}});
    CHECK(augment(Relation{}, AugKind::L2, {1, 2, 3}, {}).empty());
    CHECK(augment(Relation{{1, 3}}, AugKind::L2, {0, 4, 0}, {2}) == Relation{{1, 2}, {6, 3}});
    CHECK_THROWS(augment(Relation{{1, 3}}, AugKind::L2, {0, 4, 0}, {}));
    CHECK_THROWS(augment(Relation{{1, 3}, {2, 3}}, AugKind::L2, {0, 4, 0}, {0, 1}));
}

TEST_CASE("augment L2 pairs z with ascending images") {
    // images 1 < 5; z[0] goes with the pair whose image is 1
    const Relation L2{{7, 5}, {2, 1}};
    const Relation out = augment(L2, AugKind::L2, {0, 3, 0}, {4, 6});
    CHECK(out == Relation{{2, 4}, {4 ^ 3, 1}, {7, 6}, {6 ^ 3, 5}});
}

TEST_CASE("L1 augmentation is an involution and L2 doubles the size") {
    std::mt19937 gen(11);
    for (int trial = 0; trial < 300; ++trial) {
        const int N = 8;
        Relation r;
        std::vector<Value> ys;
        for (int i = 0; i < int(gen() % 4); ++i) {
            Value y = Value(gen() % N);
            if (std::find(ys.begin(), ys.end(), y) != ys.end()) continue;
            ys.push_back(y);
            r.insert({Value(gen() % N), y});
        }
        const KeyTriple k{Value(gen() % N), Value(gen() % N), Value(gen() % N)};
        CHECK(augment(augment(r, AugKind::L1, k), AugKind::L1, k) == r);
        std::vector<Value> z(r.size());
        for (auto& v : z) v = Value(gen() % N);
        CHECK(augment(r, AugKind::L2, k, z).size() == 2 * r.size());
    }
}

TEST_CASE("graph decomposition examples") {
    auto g = induced_graph_decompose(Relation{{1, 2}, {6, 3}}, 4, Side::Left);
    REQUIRE(g.has_value());
    CHECK(g->isolate.empty());
    CHECK(g->source == Relation{{1, 2}});
    CHECK(g->target == Relation{{6, 3}});
    CHECK_FALSE(induced_graph_decompose(Relation{{1, 2}}, 3, Side::Left).has_value());
    auto e = induced_graph_decompose(Relation{}, 5, Side::Right);
    REQUIRE(e.has_value());
    CHECK(e->isolate.empty());
    CHECK(e->matching.empty());
}

TEST_CASE("repeated vertices never decompose once an edge touches them") {
    // (0,1) twice, k2 = 1: both copies point at (0, .) themselves
    CHECK_FALSE(induced_graph_decompose(Relation{{1, 0}, {1, 0}, {1, 5}}, 1, Side::Left).has_value());
    auto g = induced_graph_decompose(Relation{{1, 0}, {1, 0}}, 2, Side::Left);
    REQUIRE(g.has_value());
    CHECK(g->isolate.size() == 2);
}

// Independent check of the decomposition against its definition on random relations.
TEST_CASE("decomposition agrees with a brute-force edge count") {
    std::mt19937 gen(3);
    for (int trial = 0; trial < 2000; ++trial) {
        const int N = 8;
        std::vector<Pair> v;
        for (int i = 0; i < int(gen() % 5); ++i) v.push_back({Value(gen() % N), Value(gen() % N)});
        Relation r;
        for (auto p : v) r.insert(p);
        const Value k2 = Value(gen() % N);
        const Side side = gen() % 2 ? Side::Left : Side::Right;
        auto edge = [&](Pair a, Pair b) {
            return side == Side::Left ? b.x == (a.y ^ k2) : b.y == (a.x ^ k2);
        };
        const int n = r.size();
        std::vector<int> out_deg(n), in_deg(n);
        bool loop = false;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (!edge(r[i], r[j])) continue;
                if (i == j) loop = true;
                ++out_deg[i];
                ++in_deg[j];
            }
        bool ok = !loop;
        for (int i = 0; i < n; ++i)
            if (out_deg[i] + in_deg[i] > 1) ok = false;
        auto g = induced_graph_decompose(r, k2, side);
        CHECK(g.has_value() == ok);
        if (g) {
            int iso = 0;
            for (int i = 0; i < n; ++i) iso += out_deg[i] + in_deg[i] == 0;
            CHECK(g->isolate.size() == iso);
            CHECK(g->source.size() == g->target.size());
            for (auto [s, t] : g->matching) CHECK(edge(s, t));
        }
    }
}

TEST_CASE("set helpers") {
    CHECK(is_power_of_two(16));
    CHECK_FALSE(is_power_of_two(12));
    CHECK(log2_exact(64) == 6);
    CHECK(xor_sets({1, 2}, {0, 3}) == std::vector<Value>{1, 2});
    CHECK(xor_sets({1, 2}, {0, 4}) == std::vector<Value>{1, 2, 5, 6});
    CHECK(xor_sets({}, {1}).empty());
    CHECK(xor_shift({1, 2}, 3) == std::vector<Value>{1, 2});
    CHECK(set_union({1, 4}, {2, 4}) == std::vector<Value>{1, 2, 4});
}
