#include <doctest.h>

#include <cmath>

#include "prusim/isometry_s.hpp"

using namespace prusim;

TEST_CASE("stage names round-trip") {
    for (Stage s : {Stage::Sk1k3, Stage::Sk2, Stage::Sz, Stage::D, Stage::Ddag, Stage::Full,
                    Stage::TildeSk1k3, Stage::TildeSk2, Stage::TildeSz, Stage::Tilde, Stage::Direct})
        CHECK(stage_from_name(stage_name(s)) == s);
    CHECK_THROWS(stage_from_name("S_nope"));
}

TEST_CASE("S on empty registers is the uniform key superposition") {
    const int N = 4;
    const State s = s_action_direct(RelationQuad{}, N);
    CHECK(s.size() == std::size_t(N * N * N));
    for (const auto& [l, c] : s.map()) {
        CHECK(std::abs(c - cplx(std::pow(N, -1.5))) < 1e-12);
        CHECK(l.present == kHasKeys);
        CHECK(l.reg[0].empty());
    }
    const State staged = apply_stage(Stage::Full, State(four_register_label({})), N);
    CHECK(max_abs_difference(s, staged) < 1e-12);
}

TEST_CASE("quad_of inverts four_register_label") {
    RelationQuad q{Relation{{0, 1}}, Relation{{2, 3}}, Relation{{1, 1}}, Relation{{3, 0}}};
    const RelationQuad back = quad_of(four_register_label(q, 2));
    CHECK(back.L1 == q.L1);
    CHECK(back.L2 == q.L2);
    CHECK(back.R1 == q.R1);
    CHECK(back.R2 == q.R2);
}

TEST_CASE("stage composition equals the closed form") {
    const EquivalenceReport e = s_equivalence(2, 1);
    CHECK(e.mode == "exhaustive");
    CHECK(e.inputs > 0);
    CHECK(e.pass);
    const EquivalenceReport r = s_equivalence(4, 1, 400, 3);
    CHECK(r.inputs == 400);
    CHECK(r.max_discrepancy < 1e-10);
}

TEST_CASE("S columns are orthonormal on the per-register domain at N = 4") {
    NormOptions o;
    o.spectrum = true;
    const NormResult r = op_norm_restricted(*make_stage(Stage::Direct, 4),
                                            four_register_domain(4, 1, false), true, o);
    CHECK(r.norm == doctest::Approx(1.0));
}

TEST_CASE("tilde stages are partial isometries at N = 4") {
    for (const char* w : {"S~k1k3", "S~k2", "S~z"}) {
        const SpectrumReport s = partial_isometry_witness(w, 4, 1);
        CHECK_MESSAGE(s.pass, w << " deviation " << s.deviation);
    }
    CHECK(partial_isometry_witness("V", 4, 2).pass);
    CHECK_THROWS(partial_isometry_witness("W", 4, 1));
}

TEST_CASE("keyed tilde stages: symmetry representatives agree with every column") {
    struct Case {
        Stage stage;
        int key_mask;
    };
    for (Case c : {Case{Stage::TildeSk2, 5}, Case{Stage::TildeSz, 7}}) {
        DomainSpec d = four_register_domain(4, 1, false);
        d.key_mask = c.key_mask;
        NormOptions o;
        o.spectrum = true;
        const NormResult full = op_norm_restricted(*make_stage(c.stage, 4), d, false, o);
        const NormResult sym = op_norm_restricted(*make_stage(c.stage, 4), d, true, o);
        CHECK(sym.norm == doctest::Approx(full.norm).epsilon(1e-9));
        CHECK(sym.projector_deviation == doctest::Approx(full.projector_deviation).epsilon(1e-9));
        CHECK(sym.columns < full.columns);
    }
}

TEST_CASE("closed-form tilde gap matches the engine at N = 4") {
    const BoundReport r = commuting_norm("tilde", 4, 1);
    CHECK(r.measured == doctest::Approx(tilde_gap_closed_form(4, 1)).epsilon(1e-9));
}

TEST_CASE("catalog layout") {
    int trend = 0;
    for (const auto& e : commuting_catalog()) {
        trend += e.trend_checked;
        CHECK(catalog_entry(e.id).id == e.id);
    }
    CHECK(trend == 5);
    CHECK_THROWS(catalog_entry("nope"));
}

TEST_CASE("punctured S stays within sqrt(delta) at N = 4") {
    const PuncturedReport r = punctured_distance(second_oracle_puncture(), 4, 1);
    CHECK(r.inputs > 0);
    CHECK(r.bound == doctest::Approx(std::sqrt(r.delta)));
    CHECK(r.pass);
}

TEST_CASE("image-lemma probe only accepts kernel states") {
    const ImageProbeReport r = image_lemma_probe("F1L", 4, 1, 8, 0);
    CHECK(r.kernel_dim > 0);
    CHECK(r.max_kernel_residual < 1e-9);
    CHECK(r.max_norm <= 1 + 1e-12);
    // |y>|{(x,y)}> has a nonzero F^{L,dag} image
    Label l = four_register_label({Relation{{1, 2}}, {}, {}, {}}, 2);
    CHECK_THROWS(image_lemma_value("F1L", 4, State(l)));
}
