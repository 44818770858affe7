#include <doctest.h>

#include <set>

#include "prusim/decoder.hpp"
#include "prusim/isometry_s.hpp"
#include "prusim/rng.hpp"

using namespace prusim;

namespace {

Relation random_relation(CounterRng& rng, int N, int size, bool i_dist) {
    for (;;) {
        Relation r;
        for (int i = 0; i < size; ++i) r.insert({Value(rng.below(N)), Value(rng.below(N))});
        if (i_dist ? r.i_distinct() : r.d_distinct()) return r;
    }
}

}  // namespace

TEST_CASE("dec examples") {
    const auto e = dec({}, {}, {1, 2, 3});
    REQUIRE(e.has_value());
    CHECK(e->L_isolate.empty());
    CHECK(e->mL.empty());
    CHECK(e->mR.empty());

    const auto d = dec(Relation{{1, 2}, {6, 3}}, {}, {0, 4, 0});
    REQUIRE(d.has_value());
    CHECK(d->L_isolate.empty());
    CHECK(d->L_pair == Relation{{1, 3}});
    CHECK(d->mL == std::vector<Value>{2});

    CHECK_FALSE(dec(Relation{{1, 2}}, {}, {0, 3, 0}).has_value());
}

TEST_CASE("enc examples") {
    DecOutput empty;
    empty.keys = {1, 2, 3};
    const Merged m = enc(empty);
    CHECK(m.L.empty());
    CHECK(m.R.empty());
    CHECK(m.keys == KeyTriple{1, 2, 3});

    DecOutput d;
    d.L_pair = Relation{{1, 3}};
    d.mL = {2};
    d.keys = {0, 4, 0};
    CHECK(enc(d).L == Relation{{1, 2}, {6, 3}});

    DecOutput bad = d;
    bad.mL = {3};  // collides with Im(L_pair)
    CHECK_FALSE(valid_dec_output(bad));
    CHECK_THROWS(enc(bad));
}

TEST_CASE("enc(dec) is the identity and dec is injective on its support") {
    const int N = 4;
    std::set<std::string> seen;
    std::uint64_t decodable = 0;
    for (int ls = 0; ls <= 2; ++ls)
        for (int rs = 0; ls + rs <= 2; ++rs)
            for (const auto& L : all_relations(N, ls))
                for (const auto& R : all_relations(N, rs))
                    for (int k = 0; k < 64; ++k) {
                        const KeyTriple key{Value(k & 3), Value((k >> 2) & 3), Value(k >> 4)};
                        const auto d = dec(L, R, key);
                        if (!d) continue;
                        ++decodable;
                        CHECK(valid_dec_output(*d));
                        const Merged m = enc(*d);
                        CHECK(m.L == L);
                        CHECK(m.R == R);
                        CHECK(m.keys == key);
                        CHECK(seen.insert(to_string(*d)).second);
                    }
    CHECK(decodable > 0);
}

TEST_CASE("roundtrip report at N = 4, size <= 2") {
    const RoundtripReport r = dec_roundtrip_exhaustive(4, 2);
    CHECK(r.enc_dec_failures == 0);
    CHECK(r.decodable == 16960);
    // Structural validity does not imply membership in the image of dec.
    CHECK(r.outputs_checked == 36928);
    CHECK(r.in_image == 20032);
    CHECK(r.outside_image == 16896);
    CHECK(r.failure_count - r.enc_dec_failures == 3072);
    CHECK_FALSE(r.pass());
}

TEST_CASE("sampled roundtrip is reproducible") {
    const RoundtripReport a = dec_roundtrip_sampled(16, 3, 2000, 5);
    const RoundtripReport b = dec_roundtrip_sampled(16, 3, 2000, 5);
    CHECK(a.enc_dec_failures == 0);
    CHECK(a.decodable == b.decodable);
    CHECK(a.in_image == b.in_image);
    CHECK(a.mode == "sampled");
}

TEST_CASE("good tuples decode to their inputs at N = 16") {
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        CounterRng rng(53, trial);
        const int N = 16;
        RelationQuad q{random_relation(rng, N, 1 + int(rng.below(2)), true),
                       random_relation(rng, N, int(rng.below(3)), true),
                       random_relation(rng, N, 1 + int(rng.below(2)), false),
                       random_relation(rng, N, int(rng.below(3)), false)};
        GoodTupleChecker g(q);
        for (int s = 0; s < 50; ++s) {
            const KeyTriple k{Value(rng.below(N)), Value(rng.below(N)), Value(rng.below(N))};
            ZVectors z;
            for (int i = 0; i < q.L2.size(); ++i) z.zL.push_back(Value(rng.below(N)));
            for (int i = 0; i < q.R2.size(); ++i) z.zR.push_back(Value(rng.below(N)));
            if (!g.is_good(k, z.zL, z.zR)) continue;
            ++checked;
            const Merged m = merge(q, k, z);
            const auto d = dec(m.L, m.R, m.keys);
            REQUIRE(d.has_value());
            CHECK(*d == expected_output(q, k, z));
            CHECK(robust_probe(q, k, z).robust());
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("robust probe on empty relations and on N = 8 single pairs") {
    CHECK(robust_probe(RelationQuad{}, {1, 2, 3}, {}).robust());
    RelationQuad q;
    q.L1 = Relation{{1, 6}};
    q.L2 = Relation{{4, 2}};
    GoodTupleChecker g(q);
    int good = 0;
    for_each_tuple(8, 1, 0, [&](const KeyTriple& k, const auto& zL, const auto& zR) {
        if (!g.is_good(k, zL, zR)) return;
        ++good;
        const RobustReport r = robust_probe(q, k, {zL, zR});
        CHECK(r.robust());
        CHECK(r.deletions_checked == 3);
    });
    CHECK(good > 0);
}

TEST_CASE("a decodable but not good tuple can fail on deletion") {
    const int N = 4;
    std::string witness;
    for (const auto& L1 : all_relations(N, 1))
        for (const auto& L2 : all_relations(N, 1)) {
            if (!witness.empty()) break;
            RelationQuad q{L1, L2, {}, {}};
            GoodTupleChecker g(q);
            for_each_tuple(N, 1, 0, [&](const KeyTriple& k, const auto& zL, const auto& zR) {
                if (!witness.empty() || g.is_good(k, zL, zR)) return;
                const RobustReport r = robust_probe(q, k, {zL, zR});
                if (r.decodable && !r.failures.empty()) witness = r.failures.front();
            });
        }
    CHECK_FALSE(witness.empty());
}

TEST_CASE("exhaustive soundness at N = 2") {
    const SoundnessReport r = good_tuple_soundness(2, 1);
    CHECK(r.quads > 0);
    CHECK(r.pass());
}

TEST_CASE("D is a partial isometry and D^dag undoes it on the support") {
    const SpectrumReport s = partial_isometry_witness("D", 4, 1);
    CHECK(s.pass);
    CHECK(s.deviation <= 1e-9);

    Label l;
    l.reg[0] = Relation{{1, 2}, {6, 3}};
    l.k = {0, 4, 0};
    l.present = kHasKeys;
    const State in(l);
    const State out = apply_stage(Stage::D, in, 8);
    CHECK(out.size() == 1);
    CHECK(max_abs_difference(apply_stage(Stage::Ddag, out, 8), in) < 1e-15);

    Label bot = l;
    bot.reg[0] = Relation{{1, 2}};
    bot.k = {0, 3, 0};
    CHECK(apply_stage(Stage::D, State(bot), 8).size() == 0);
}
