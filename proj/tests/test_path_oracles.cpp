#include <doctest.h>

#include <cmath>
#include <map>

#include "prusim/bounds.hpp"
#include "prusim/experiments.hpp"
#include "prusim/norm.hpp"
#include "prusim/path_oracles.hpp"

using namespace prusim;

namespace {

Label pair_label(Value a, const Relation& L, const Relation& R = {}) {
    Label l;
    l.a = a;
    l.reg[0] = L;
    l.reg[1] = R;
    return l;
}

}  // namespace

TEST_CASE("V^L on an empty record is uniform over y") {
    const int N = 8;
    const State out = apply(*make_VL(N), State(pair_label(3, {})));
    CHECK(out.size() == N);
    for (Value y = 0; y < N; ++y)
        CHECK(std::abs(out.at(pair_label(y, Relation{{3, y}})) - 1 / std::sqrt(8.0)) < 1e-12);
}

TEST_CASE("V^L skips recorded images and renormalises") {
    const int N = 4;
    const State out = apply(*make_VL(N), State(pair_label(0, Relation{{1, 2}}, Relation{{3, 0}})));
    CHECK(out.size() == 2);
    CHECK(out.norm() == doctest::Approx(1.0));
    CHECK(std::abs(out.at(pair_label(1, Relation{{0, 1}, {1, 2}}, Relation{{3, 0}})) -
                   1 / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("F on an empty record matches F^L") {
    const int N = 8;
    const State f = apply(*make_F(N), State(pair_label(5, {})));
    const State fl = apply(*make_FL(N), State(pair_label(5, {})));
    CHECK(max_abs_difference(f, fl) < 1e-12);
    for (Value y = 0; y < N; ++y)
        CHECK(std::abs(f.at(pair_label(y, Relation{{5, y}})) - 1 / std::sqrt(8.0)) < 1e-12);
}

TEST_CASE("F^L adjoint removes the pair holding the image") {
    const int N = 4;
    const State out = apply_adjoint(*make_FL(N), State(pair_label(2, Relation{{1, 2}})));
    CHECK(out.size() == 1);
    CHECK(std::abs(out.at(pair_label(1, {})) - 0.5) < 1e-12);
    CHECK(apply_adjoint(*make_FL(N), State(pair_label(3, Relation{{1, 2}}))).size() == 0);
}

TEST_CASE("X masks are involutions") {
    const int N = 8;
    State psi;
    for (Value a = 0; a < N; ++a) psi.add(pair_label(a, Relation{{a, 1}}), cplx(a, 1));
    for (Value k = 0; k < N; ++k) {
        auto X = make_X_literal(k);
        CHECK(max_abs_difference(apply(*X, apply(*X, psi)), psi) < 1e-15);
    }
    Label keyed = pair_label(1, {});
    keyed.k = {2, 4, 6};
    keyed.present = kHasKeys;
    const State o = apply(*make_X_key(KeySource::K3), State(keyed));
    Label want = keyed;
    want.a = 1 ^ 6;
    CHECK(std::abs(o.at(want) - cplx(1)) < 1e-15);
}

TEST_CASE("V^L preserves the norm while the record has room") {
    const int N = 8;
    CounterRng rng(5, 0);
    const auto labels = enumerate_domain(single_pair_domain(N, 2), false);
    auto V = make_VL(N);
    for (int trial = 0; trial < 20; ++trial) {
        State psi;
        for (int i = 0; i < 6; ++i)
            psi.add(labels[rng.below(labels.size())], cplx(rng.normal(), rng.normal()));
        CHECK(apply(*V, psi).norm() == doctest::Approx(psi.norm()).epsilon(1e-10));
    }
}

TEST_CASE("F^L images of distinct domain labels are orthogonal") {
    const int N = 4;
    auto FL = make_FL(N);
    for (int t = 1; t <= 2; ++t) {
        const auto labels = enumerate_domain(single_pair_domain(N, t), false);
        // Gram matrix of the images, accumulated through shared output labels.
        absl::flat_hash_map<Label, std::vector<std::pair<int, cplx>>> hits;
        for (int i = 0; i < int(labels.size()); ++i) {
            const State img = apply(*FL, State(labels[i]));
            for (const auto& [o, c] : img.map()) hits[o].push_back({i, c});
        }
        std::map<std::pair<int, int>, cplx> gram;
        for (const auto& [o, v] : hits)
            for (auto [i, ci] : v)
                for (auto [j, cj] : v) gram[{i, j}] += std::conj(ci) * cj;
        double off = 0;
        for (const auto& [ij, g] : gram)
            if (ij.first != ij.second) off = std::max(off, std::abs(g));
        CHECK(off < 1e-12);
    }
}

TEST_CASE("norm engine: identity, scaling and the t/N lemma") {
    const DomainSpec d = single_pair_domain(4, 2);
    CHECK(op_norm_restricted(*identity_op(), d, false).norm == doctest::Approx(1.0));
    CHECK(op_norm_restricted(*scaled(identity_op(), 0.25), d, true).norm == doctest::Approx(0.25));
    auto FL = make_FL(4);
    auto M = difference(product({adjoint(FL), FL}), identity_op());
    CHECK(op_norm_restricted(*M, d, false).norm == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("symmetry representatives give the exhaustive norm") {
    for (int t = 1; t <= 2; ++t) {
        const DomainSpec d = single_pair_domain(4, t);
        for (auto op : {difference(make_VL(4), make_FL(4)), difference(make_V(4), make_F(4))}) {
            const double full = op_norm_restricted(*op, d, false).norm;
            const double sym = op_norm_restricted(*op, d, true).norm;
            CHECK(sym == doctest::Approx(full).epsilon(1e-9));
        }
    }
}

TEST_CASE("power iteration agrees with the dense path") {
    const DomainSpec d = single_pair_domain(8, 2);
    auto op = difference(make_V(8), make_F(8));
    NormOptions dense, power;
    dense.dense_max = 1 << 20;
    power.dense_max = 0;
    const NormResult a = op_norm_restricted(*op, d, true, dense);
    const NormResult b = op_norm_restricted(*op, d, true, power);
    CHECK(b.power_components > 0);
    CHECK(a.norm == doctest::Approx(b.norm).epsilon(1e-6));
}

TEST_CASE("F-family singular values stay at or below one") {
    for (int N : {4, 8}) {
        const DomainSpec d = single_pair_domain(N, 2);
        for (auto op : {make_FL(N), make_FR(N), make_F(N)})
            CHECK(op_norm_restricted(*op, d, true).norm <= 1 + 1e-12);
    }
}

TEST_CASE("V restricted to the truncated domain is a partial isometry") {
    NormOptions o;
    o.spectrum = true;
    const NormResult r = op_norm_restricted(*make_V(8), single_pair_domain(8, 2), true, o);
    CHECK(r.projector_deviation <= 1e-9);
}

TEST_CASE("extract isometry is a partial isometry on F^L images") {
    const int N = 4;
    auto E = make_FL_extract();
    NormOptions o;
    o.spectrum = true;
    CHECK(op_norm_restricted(*E, single_pair_domain(N, 2), false, o).projector_deviation <= 1e-9);
    // extract after F^L hands back the pair it recorded
    for (Value x = 0; x < N; ++x) {
        const State img = apply(*make_FL(N), State(pair_label(x, {})));
        const State out = apply(*E, img);
        CHECK(out.norm() == doctest::Approx(1.0));
        for (const auto& [l, c] : out.map()) {
            CHECK(l.a2_set == 1);
            CHECK(l.reg[0].empty());
        }
    }
}

TEST_CASE("V^L - F^L stays under its stated bound at N = 16") {
    BoundSpec s = builtin_catalog().front();
    REQUIRE(s.id == "VL_FL");
    const BoundCheck c = verify_bound(s, 16, 1);
    CHECK(c.bound == doctest::Approx(std::sqrt(3.0 / 16)));
    CHECK(c.measured <= c.bound + 1e-9);
}

TEST_CASE("monogamy bound at N = 16, t = 2 over five Haar unitaries") {
    BoundSpec s;
    for (const auto& b : builtin_catalog())
        if (b.id == "FLdag_U_FR") s = b;
    REQUIRE(s.unitaries == 5);
    const BoundCheck c = verify_bound(s, 16, 2);
    CHECK(c.bound == doctest::Approx(3 * std::sqrt(0.5)));
    CHECK(c.pass);
}
