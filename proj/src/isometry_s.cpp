#include "prusim/isometry_s.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

#include "prusim/decoder.hpp"
#include "prusim/path_oracles.hpp"
#include "prusim/rng.hpp"

namespace prusim {

namespace {

constexpr std::uint8_t kK13 = kHasK1 | kHasK3;

bool quad_valid(const RelationQuad& q) {
    return q.L1.i_distinct() && q.L2.i_distinct() && q.R1.d_distinct() && q.R2.d_distinct();
}

bool four_register_input(const Label& l) {
    return !l.a2_set && l.zl == 0 && l.zr == 0;
}

// Calls f(v) for every coordinate-distinct vector of length m over [N] \ forbidden.
template <class F>
void for_each_distinct(int N, int m, const std::vector<Value>& forbidden, F&& f) {
    std::vector<char> used(N, 0);
    for (Value v : forbidden) used[v] = 1;
    std::vector<Value> z(m);
    auto rec = [&](auto&& self, int i) -> void {
        if (i == m) {
            f(z);
            return;
        }
        for (int v = 0; v < N; ++v) {
            if (used[v]) continue;
            used[v] = 1;
            z[i] = Value(v);
            self(self, i + 1);
            used[v] = 0;
        }
    };
    rec(rec, 0);
}

Label merged_label(const Label& in, const Merged& m) {
    Label o;
    o.a = in.a;
    o.b = in.b;
    o.reg[0] = m.L;
    o.reg[1] = m.R;
    o.k = m.keys;
    o.present = kHasKeys;
    return o;
}

class Sk1k3Op final : public Op {
public:
    Sk1k3Op(int N, bool tilde, ZRRule rule) : N_(N), tilde_(tilde), rule_(rule) {}

    void apply(const Label& in, cplx c, Terms& out) const override {
        if (in.present != 0 || !four_register_input(in)) return;
        const RelationQuad q = quad_of(in);
        if (!quad_valid(q)) return;
        GoodTupleChecker g(q, rule_);
        std::vector<Value> ok1, ok3;
        for (int v = 0; v < N_; ++v) {
            if (g.k1_ok(Value(v))) ok1.push_back(Value(v));
            if (g.k3_ok(Value(v))) ok3.push_back(Value(v));
        }
        if (ok1.empty() || ok3.empty()) return;
        const double coef = tilde_ ? 1.0 / std::sqrt(double(ok1.size()) * double(ok3.size()))
                                   : 1.0 / N_;
        for (Value k1 : ok1)
            for (Value k3 : ok3) {
                Label o = in;
                o.k = KeyTriple{k1, 0, k3};
                o.present = kK13;
                out.emplace_back(o, c * coef);
            }
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        if (in.present != kK13 || in.k.k2 != 0 || !four_register_input(in)) return;
        const RelationQuad q = quad_of(in);
        if (!quad_valid(q)) return;
        GoodTupleChecker g(q, rule_);
        if (!g.k1_ok(in.k.k1) || !g.k3_ok(in.k.k3)) return;
        double coef = 1.0 / N_;
        if (tilde_) {
            int n1 = 0, n3 = 0;
            for (int v = 0; v < N_; ++v) {
                n1 += g.k1_ok(Value(v));
                n3 += g.k3_ok(Value(v));
            }
            coef = 1.0 / std::sqrt(double(n1) * n3);
        }
        Label o = in;
        o.k = KeyTriple{};
        o.present = 0;
        out.emplace_back(o, c * coef);
    }
    std::string name() const override { return tilde_ ? "S~k1k3" : "Sk1k3"; }

private:
    int N_;
    bool tilde_;
    ZRRule rule_;
};

class Sk2Op final : public Op {
public:
    Sk2Op(int N, bool tilde, ZRRule rule) : N_(N), tilde_(tilde), rule_(rule) {}

    void apply(const Label& in, cplx c, Terms& out) const override {
        if (in.present != kK13 || in.k.k2 != 0 || !four_register_input(in)) return;
        const RelationQuad q = quad_of(in);
        if (!quad_valid(q)) return;
        GoodTupleChecker g(q, rule_);
        if (!g.k1_ok(in.k.k1) || !g.k3_ok(in.k.k3)) return;
        std::vector<Value> ok2;
        for (int v = 0; v < N_; ++v)
            if (g.k2_ok(in.k.k1, Value(v), in.k.k3)) ok2.push_back(Value(v));
        if (ok2.empty()) return;
        const double coef = 1.0 / std::sqrt(tilde_ ? double(ok2.size()) : double(N_));
        for (Value k2 : ok2) {
            Label o = in;
            o.k.k2 = k2;
            o.present = kHasKeys;
            out.emplace_back(o, c * coef);
        }
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        if (in.present != kHasKeys || !four_register_input(in)) return;
        const RelationQuad q = quad_of(in);
        if (!quad_valid(q)) return;
        GoodTupleChecker g(q, rule_);
        const KeyTriple& k = in.k;
        if (!g.k1_ok(k.k1) || !g.k3_ok(k.k3) || !g.k2_ok(k.k1, k.k2, k.k3)) return;
        double n2 = N_;
        if (tilde_) {
            n2 = 0;
            for (int v = 0; v < N_; ++v) n2 += g.k2_ok(k.k1, Value(v), k.k3);
        }
        Label o = in;
        o.k.k2 = 0;
        o.present = kK13;
        out.emplace_back(o, c / std::sqrt(n2));
    }
    std::string name() const override { return tilde_ ? "S~k2" : "Sk2"; }

private:
    int N_;
    bool tilde_;
    ZRRule rule_;
};

class SzOp final : public Op {
public:
    SzOp(int N, bool tilde, ZRRule rule) : N_(N), tilde_(tilde), rule_(rule) {}

    void apply(const Label& in, cplx c, Terms& out) const override {
        if (in.present != kHasKeys || !four_register_input(in)) return;
        const RelationQuad q = quad_of(in);
        if (!quad_valid(q)) return;
        GoodTupleChecker g(q, rule_);
        const KeyTriple& k = in.k;
        if (!g.k1_ok(k.k1) || !g.k3_ok(k.k3) || !g.k2_ok(k.k1, k.k2, k.k3)) return;
        const int l = q.L2.size(), r = q.R2.size();
        const auto fL = g.zL_forbidden(k), fR = g.zR_forbidden(k);
        const double nL = double(count_distinct_avoiding(N_, l, int(fL.size())));
        const double nR = double(count_distinct_avoiding(N_, r, int(fR.size())));
        if (nL == 0 || nR == 0) return;
        const double coef =
            tilde_ ? 1.0 / std::sqrt(nL * nR) : std::pow(double(N_), -0.5 * (l + r));
        for_each_distinct(N_, l, fL, [&](const std::vector<Value>& zL) {
            for_each_distinct(N_, r, fR, [&](const std::vector<Value>& zR) {
                Label o = in;
                o.set_z(zL, zR);
                o.present = kHasKeys | kHasZ;
                out.emplace_back(o, c * coef);
            });
        });
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        if (in.present != (kHasKeys | kHasZ) || in.a2_set) return;
        const RelationQuad q = quad_of(in);
        if (!quad_valid(q) || in.zl != q.L2.size() || in.zr != q.R2.size()) return;
        GoodTupleChecker g(q, rule_);
        if (!g.is_good(in.k, in.zL(), in.zR())) return;
        const int l = q.L2.size(), r = q.R2.size();
        double coef = std::pow(double(N_), -0.5 * (l + r));
        if (tilde_) {
            const double nL =
                double(count_distinct_avoiding(N_, l, int(g.zL_forbidden(in.k).size())));
            const double nR =
                double(count_distinct_avoiding(N_, r, int(g.zR_forbidden(in.k).size())));
            coef = 1.0 / std::sqrt(nL * nR);
        }
        Label o = in;
        o.set_z({}, {});
        o.present = kHasKeys;
        out.emplace_back(o, c * coef);
    }
    std::string name() const override { return tilde_ ? "S~z" : "Sz"; }

private:
    int N_;
    bool tilde_;
    ZRRule rule_;
};

// Coherent Dec: merged (L, R, k) -> (L1, R1, L2, R2, zL, zR, k).
class DOp final : public Op {
public:
    void apply(const Label& in, cplx c, Terms& out) const override {
        if (in.present != kHasKeys || !four_register_input(in)) return;
        if (!in.reg[2].empty() || !in.reg[3].empty()) return;
        auto d = dec(in.reg[0], in.reg[1], in.k);
        if (!d) return;
        if (d->mL.size() + d->mR.size() > 8) throw std::length_error("D: z registers overflow");
        Label o = in;
        o.reg = {d->L_isolate, d->R_isolate, d->L_pair, d->R_pair};
        o.set_z(d->mL, d->mR);
        o.present = kHasKeys | kHasZ;
        out.emplace_back(o, c);
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        if (in.present != (kHasKeys | kHasZ) || in.a2_set) return;
        DecOutput d{in.reg[0], in.reg[1], in.reg[2], in.reg[3], in.zL(), in.zR(), in.k};
        if (!valid_dec_output(d)) return;
        const Merged m = enc(d);
        auto back = dec(m.L, m.R, m.keys);
        if (!back || !(*back == d)) return;
        out.emplace_back(merged_label(in, m), c);
    }
    std::string name() const override { return "D"; }
};

// Closed-form S restricted to good tuples outside P.
class DirectOp final : public Op {
public:
    DirectOp(int N, PunctureSet P, ZRRule rule) : N_(N), P_(std::move(P)), rule_(rule) {}

    void apply(const Label& in, cplx c, Terms& out) const override {
        if (in.present != 0 || !four_register_input(in)) return;
        const RelationQuad q = quad_of(in);
        if (!quad_valid(q)) return;
        GoodTupleChecker g(q, rule_);
        const int l = q.L2.size(), r = q.R2.size();
        const double coef = std::pow(double(N_), -0.5 * (l + r + 3));
        for (int k1 = 0; k1 < N_; ++k1) {
            if (!g.k1_ok(Value(k1))) continue;
            for (int k3 = 0; k3 < N_; ++k3) {
                if (!g.k3_ok(Value(k3))) continue;
                for (int k2 = 0; k2 < N_; ++k2) {
                    if (!g.k2_ok(Value(k1), Value(k2), Value(k3))) continue;
                    const KeyTriple k{Value(k1), Value(k2), Value(k3)};
                    const auto fL = g.zL_forbidden(k), fR = g.zR_forbidden(k);
                    for_each_distinct(N_, l, fL, [&](const std::vector<Value>& zL) {
                        for_each_distinct(N_, r, fR, [&](const std::vector<Value>& zR) {
                            const ZVectors z{zL, zR};
                            if (P_ && P_(in.a, q, k, z)) return;
                            out.emplace_back(merged_label(in, merge(q, k, z)), c * coef);
                        });
                    });
                }
            }
        }
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        if (in.present != kHasKeys || !four_register_input(in)) return;
        if (!in.reg[2].empty() || !in.reg[3].empty()) return;
        auto d = dec(in.reg[0], in.reg[1], in.k);
        if (!d) return;
        const RelationQuad q{d->L_isolate, d->L_pair, d->R_isolate, d->R_pair};
        if (!quad_valid(q)) return;
        GoodTupleChecker g(q, rule_);
        const ZVectors z{d->mL, d->mR};
        if (!g.is_good(in.k, z.zL, z.zR)) return;
        if (P_ && P_(in.a, q, in.k, z)) return;
        Label o = four_register_label(q, in.a);
        o.b = in.b;
        out.emplace_back(o, c * std::pow(double(N_), -0.5 * (q.L2.size() + q.R2.size() + 3)));
    }
    std::string name() const override { return P_ ? "S*" : "S"; }

private:
    int N_;
    PunctureSet P_;
    ZRRule rule_;
};

}  // namespace

Label four_register_label(const RelationQuad& q, Value a) {
    Label l;
    l.a = a;
    l.reg = {q.L1, q.R1, q.L2, q.R2};
    return l;
}

RelationQuad quad_of(const Label& l) { return RelationQuad{l.reg[0], l.reg[2], l.reg[1], l.reg[3]}; }

Stage stage_from_name(const std::string& name) {
    static const std::map<std::string, Stage> m{
        {"Sk1k3", Stage::Sk1k3},     {"Sk2", Stage::Sk2},         {"Sz", Stage::Sz},
        {"D", Stage::D},             {"Ddag", Stage::Ddag},       {"S", Stage::Full},
        {"S~k1k3", Stage::TildeSk1k3}, {"S~k2", Stage::TildeSk2}, {"S~z", Stage::TildeSz},
        {"S~", Stage::Tilde},        {"S_direct", Stage::Direct}};
    auto it = m.find(name);
    if (it == m.end()) throw std::invalid_argument("unknown stage '" + name + "'");
    return it->second;
}

std::string stage_name(Stage s) {
    switch (s) {
        case Stage::Sk1k3: return "Sk1k3";
        case Stage::Sk2: return "Sk2";
        case Stage::Sz: return "Sz";
        case Stage::D: return "D";
        case Stage::Ddag: return "Ddag";
        case Stage::Full: return "S";
        case Stage::TildeSk1k3: return "S~k1k3";
        case Stage::TildeSk2: return "S~k2";
        case Stage::TildeSz: return "S~z";
        case Stage::Tilde: return "S~";
        case Stage::Direct: return "S_direct";
    }
    return "?";
}

OpPtr make_stage(Stage s, int N, ZRRule rule) {
    if (!is_power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    switch (s) {
        case Stage::Sk1k3: return std::make_shared<Sk1k3Op>(N, false, rule);
        case Stage::Sk2: return std::make_shared<Sk2Op>(N, false, rule);
        case Stage::Sz: return std::make_shared<SzOp>(N, false, rule);
        case Stage::D: return std::make_shared<DOp>();
        case Stage::Ddag: return adjoint(std::make_shared<DOp>());
        case Stage::TildeSk1k3: return std::make_shared<Sk1k3Op>(N, true, rule);
        case Stage::TildeSk2: return std::make_shared<Sk2Op>(N, true, rule);
        case Stage::TildeSz: return std::make_shared<SzOp>(N, true, rule);
        case Stage::Full:
            return product({make_stage(Stage::Ddag, N, rule), make_stage(Stage::Sz, N, rule),
                            make_stage(Stage::Sk2, N, rule), make_stage(Stage::Sk1k3, N, rule)});
        case Stage::Tilde:
            return product({make_stage(Stage::Ddag, N, rule),
                            make_stage(Stage::TildeSz, N, rule),
                            make_stage(Stage::TildeSk2, N, rule),
                            make_stage(Stage::TildeSk1k3, N, rule)});
        case Stage::Direct: return std::make_shared<DirectOp>(N, nullptr, rule);
    }
    throw std::invalid_argument("unknown stage");
}

State apply_stage(Stage s, const State& in, int N) { return apply(*make_stage(s, N), in); }

State s_action_direct(const RelationQuad& q, int N, Value a, ZRRule rule) {
    return apply(*make_stage(Stage::Direct, N, rule), State(four_register_label(q, a)));
}

OpPtr make_S_punctured(int N, PunctureSet P, ZRRule rule) {
    return std::make_shared<DirectOp>(N, std::move(P), rule);
}

PunctureSet second_oracle_puncture() {
    return [](Value y, const RelationQuad& q, const KeyTriple& k, const ZVectors& z) {
        const Relation aug = augment(q.L2, AugKind::L2, k, z.zL);
        return aug.in_im(Value(y ^ k.k3));
    };
}

PuncturedReport punctured_distance(const PunctureSet& P, int N, int t, const Budget& budget) {
    PuncturedReport rep;
    rep.N = N;
    rep.t = t;
    const DomainSpec dom = four_register_domain(N, t, true);
    const auto inputs = enumerate_domain(dom, false);
    rep.inputs = inputs.size();
    // delta: worst fraction of the tuple universe that is good and punctured.
    for (const auto& l : inputs) {
        budget.check("punctured distance");
        const RelationQuad q = quad_of(l);
        GoodTupleChecker g(q);
        std::uint64_t hit = 0;
        const int lz = q.L2.size(), rz = q.R2.size();
        for_each_tuple(N, lz, rz, [&](const KeyTriple& k, const std::vector<Value>& zL,
                                      const std::vector<Value>& zR) {
            if (g.is_good(k, zL, zR) && P && P(l.a, q, k, ZVectors{zL, zR})) ++hit;
        });
        rep.delta = std::max(rep.delta, double(hit) / std::pow(double(N), lz + rz + 3));
    }
    OpPtr diff = difference(make_S_punctured(N, P), make_stage(Stage::Direct, N));
    rep.distance = op_norm_restricted(*diff, inputs, [&](const Label& l) { return in_domain(dom, l); },
                                      {}, budget)
                       .norm;
    rep.bound = std::sqrt(rep.delta);
    rep.pass = rep.distance <= rep.bound + 1e-9;
    return rep;
}

// ---- catalog -------------------------------------------------------------------

namespace {

// Input-side value classes of the four-register domain.
constexpr int kDom1 = 0, kIm1 = 1, kDom2 = 2, kIm2 = 3;

const std::vector<CatalogEntry> kCatalog = {
    {"tilde", "(S~ - S)", -1, 0, -0.5, true},
    {"tilde_k1k3", "(Sk1k3 - S~k1k3)", -1, 0, -0.5, false},
    {"tilde_k2", "(Sk2 - S~k2)", -1, kHasK1 | kHasK3, -0.5, false},
    {"tilde_z", "(Sz - S~z)", -1, kHasKeys, -0.5, false},
    {"first_forward", "X^k3 F X^k1 S - S F1", kDom1, 0, -0.5, true},
    {"first_inverse", "X^k1 F^dag X^k3 S - S F1^dag", kIm1, 0, -0.5, true},
    {"second_forward", "F X^k2 F S - S F2", kDom2, 0, -0.5, true},
    {"second_inverse", "F^dag X^k2 F^dag S - S F2^dag", kIm2, 0, -0.5, true},
    {"first_L_forward", "X^k3 F^L X^k1 S - S F1^L", kDom1, 0, -0.5, false},
    {"first_R_forward", "X^k1 F^R X^k3 S - S F1^R", kIm1, 0, -0.5, false},
    {"first_L_inverse", "X^k1 F^L,dag X^k3 S - S F1^L,dag", kIm1, 0, -0.5, false},
    {"first_R_inverse", "X^k3 F^R,dag X^k1 S - S F1^R,dag", kDom1, 0, -0.5, false},
    {"second_L_forward", "F^L X^k2 F^L S - S F2^L", kDom2, 0, -0.5, false},
    {"second_R_forward", "F^R X^k2 F^R S - S F2^R", kIm2, 0, -0.5, false},
    {"second_L_inverse", "F^L,dag X^k2 F^L,dag S - S F2^L,dag", kIm2, 0, -0.5, false},
    {"second_R_inverse", "F^R,dag X^k2 F^R,dag S - S F2^R,dag", kDom2, 0, -0.5, false},
    {"second_L_projector", "F^L F^L,dag S - S F2^L F2^L,dag", kIm2, 0, -0.5, false},
    {"second_R_projector", "F^R F^R,dag S - S F2^R F2^R,dag", kDom2, 0, -0.5, false},
};

OpPtr X(int which) { return make_X_key(which); }

}  // namespace

const std::vector<CatalogEntry>& commuting_catalog() { return kCatalog; }

const CatalogEntry& catalog_entry(const std::string& id) {
    for (const auto& e : kCatalog)
        if (e.id == id) return e;
    throw std::invalid_argument("unknown bound id '" + id + "'");
}

OpPtr catalog_operator(const std::string& id, int N) {
    // The closed form equals the stage composition and skips the transient z registers.
    const OpPtr S = make_stage(Stage::Direct, N);
    const OpPtr F = make_F(N), FL = make_FL(N), FR = make_FR(N);
    const OpPtr F1 = make_F(N, kFirstPair), F1L = make_FL(N, kFirstPair),
                F1R = make_FR(N, kFirstPair);
    const OpPtr F2 = make_F(N, kSecondPair), F2L = make_FL(N, kSecondPair),
                F2R = make_FR(N, kSecondPair);
    const int K1 = KeySource::K1, K2 = KeySource::K2, K3 = KeySource::K3;
    auto comm = [&](std::vector<OpPtr> left, OpPtr right) {
        left.push_back(S);
        return difference(product(std::move(left)), product({S, std::move(right)}));
    };
    if (id == "tilde") return difference(make_stage(Stage::Tilde, N), S);
    if (id == "tilde_k1k3")
        return difference(make_stage(Stage::Sk1k3, N), make_stage(Stage::TildeSk1k3, N));
    if (id == "tilde_k2") return difference(make_stage(Stage::Sk2, N), make_stage(Stage::TildeSk2, N));
    if (id == "tilde_z") return difference(make_stage(Stage::Sz, N), make_stage(Stage::TildeSz, N));
    if (id == "first_forward") return comm({X(K3), F, X(K1)}, F1);
    if (id == "first_inverse") return comm({X(K1), adjoint(F), X(K3)}, adjoint(F1));
    if (id == "second_forward") return comm({F, X(K2), F}, F2);
    if (id == "second_inverse") return comm({adjoint(F), X(K2), adjoint(F)}, adjoint(F2));
    if (id == "first_L_forward") return comm({X(K3), FL, X(K1)}, F1L);
    if (id == "first_R_forward") return comm({X(K1), FR, X(K3)}, F1R);
    if (id == "first_L_inverse") return comm({X(K1), adjoint(FL), X(K3)}, adjoint(F1L));
    if (id == "first_R_inverse") return comm({X(K3), adjoint(FR), X(K1)}, adjoint(F1R));
    if (id == "second_L_forward") return comm({FL, X(K2), FL}, F2L);
    if (id == "second_R_forward") return comm({FR, X(K2), FR}, F2R);
    if (id == "second_L_inverse") return comm({adjoint(FL), X(K2), adjoint(FL)}, adjoint(F2L));
    if (id == "second_R_inverse") return comm({adjoint(FR), X(K2), adjoint(FR)}, adjoint(F2R));
    if (id == "second_L_projector") return comm({FL, adjoint(FL)}, product({F2L, adjoint(F2L)}));
    if (id == "second_R_projector") return comm({FR, adjoint(FR)}, product({F2R, adjoint(F2R)}));
    throw std::invalid_argument("unknown bound id '" + id + "'");
}

DomainSpec catalog_domain(const std::string& id, int N, int t) {
    const CatalogEntry& e = catalog_entry(id);
    DomainSpec d = four_register_domain(N, t, e.a_cls >= 0);
    d.a_cls = e.a_cls;
    d.key_mask = e.key_mask;
    // Keys are enumerated in full next to the relation representatives, which
    // still meets every orbit of the joint relabelling.
    return d;
}

BoundReport commuting_norm(const std::string& id, int N, int t, bool use_symmetry,
                           const NormOptions& opt, const Budget& budget) {
    BoundReport r;
    r.id = id;
    r.N = N;
    r.t = t;
    const DomainSpec dom = catalog_domain(id, N, t);
    const OpPtr op = catalog_operator(id, N);
    const NormResult n = op_norm_restricted(*op, dom, use_symmetry, opt, budget);
    r.measured = n.norm;
    r.projector_deviation = n.projector_deviation;
    r.columns = n.columns;
    r.largest_component = n.largest_component;
    r.seconds = n.seconds;
    return r;
}

double tilde_gap_closed_form(int N, int t) {
    const DomainSpec dom = four_register_domain(N, t, false);
    double worst = 0;
    for (const auto& l : enumerate_domain(dom, true)) {
        const RelationQuad q = quad_of(l);
        GoodTupleChecker g(q);
        const int lz = q.L2.size(), rz = q.R2.size();
        const double c = std::pow(double(N), -0.5 * (lz + rz + 3));
        int n1 = 0, n3 = 0;
        for (int v = 0; v < N; ++v) {
            n1 += g.k1_ok(Value(v));
            n3 += g.k3_ok(Value(v));
        }
        double sq = 0;
        for (int k1 = 0; k1 < N; ++k1) {
            if (!g.k1_ok(Value(k1))) continue;
            for (int k3 = 0; k3 < N; ++k3) {
                if (!g.k3_ok(Value(k3))) continue;
                int n2 = 0;
                for (int v = 0; v < N; ++v) n2 += g.k2_ok(Value(k1), Value(v), Value(k3));
                for (int k2 = 0; k2 < N; ++k2) {
                    if (!g.k2_ok(Value(k1), Value(k2), Value(k3))) continue;
                    const KeyTriple k{Value(k1), Value(k2), Value(k3)};
                    const double nL =
                        double(count_distinct_avoiding(N, lz, int(g.zL_forbidden(k).size())));
                    const double nR =
                        double(count_distinct_avoiding(N, rz, int(g.zR_forbidden(k).size())));
                    if (nL == 0 || nR == 0) continue;
                    const double ct = 1.0 / std::sqrt(double(n1) * n3 * n2 * nL * nR);
                    sq += nL * nR * (ct - c) * (ct - c);
                }
            }
        }
        worst = std::max(worst, std::sqrt(sq));
    }
    return worst;
}

// ---- image lemma ---------------------------------------------------------------

namespace {

RegPair image_pair(const std::string& which) {
    if (which == "F1L") return kFirstPair;
    if (which == "F2L") return kSecondPair;
    throw std::invalid_argument("image probe: which must be F1L or F2L");
}

OpPtr image_composite(const std::string& which, int N) {
    const OpPtr S = make_stage(Stage::Direct, N);
    if (which == "F1L") return product({adjoint(make_FL(N)), make_X_key(KeySource::K3), S});
    return product({adjoint(make_FL(N)), S});
}

// Uniform-ish draw from the truncated four-register domain with register A.
Label random_domain_label(int N, int t, CounterRng& rng) {
    while (true) {
        Label l;
        l.a = Value(rng.below(N));
        bool ok = true;
        for (int r = 0; r < 4 && ok; ++r) {
            const int n = int(rng.below(t + 1));
            for (int i = 0; i < n; ++i)
                l.reg[r].insert(Pair{Value(rng.below(N)), Value(rng.below(N))});
            ok = (r % 2 == 0) ? l.reg[r].i_distinct() : l.reg[r].d_distinct();
        }
        if (ok) return l;
    }
}

// Labels that F^L,dag on pair rp sends to the same output as l: the pair
// (x, A) of L is swapped for (x, y') with A = y', over every y' that keeps L
// I-distinct. Returns just {l} when A is not in Im(L), where F^L,dag is zero.
std::vector<Label> kernel_group(const Label& l, RegPair rp, int N, bool& merged) {
    const Relation& L = l.reg[rp.s];
    auto p = L.by_image(l.a);
    merged = bool(p);
    if (!p) return {l};
    Relation rest = L;
    rest.erase(*p);
    std::vector<Label> g;
    for (int y = 0; y < N; ++y) {
        if (rest.in_im(Value(y))) continue;
        Label m = l;
        m.a = Value(y);
        m.reg[rp.s] = rest;
        m.reg[rp.s].insert(Pair{p->x, Value(y)});
        g.push_back(m);
    }
    return g;
}

}  // namespace

double image_lemma_value(const std::string& which, int N, const State& psi, double tol) {
    const RegPair rp = image_pair(which);
    const State k = apply(*adjoint(make_FL(N, rp)), psi);
    if (k.norm() > tol * std::max(1.0, psi.norm()))
        throw std::invalid_argument("image probe: state is not in the kernel of F^L,dag");
    return apply(*image_composite(which, N), psi).norm();
}

ImageProbeReport image_lemma_probe(const std::string& which, int N, int t, int trials,
                                   std::uint64_t seed, const Budget& budget) {
    const RegPair rp = image_pair(which);
    if (!is_power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    ImageProbeReport rep;
    rep.which = which;
    rep.N = N;
    rep.t = t;
    rep.trials = trials;

    const OpPtr M = image_composite(which, N);
    const OpPtr Fd = adjoint(make_FL(N, rp));
    constexpr int kGroups = 4;  // groups mixed into one random kernel state
    for (int tr = 0; tr < trials; ++tr) {
        budget.check("image probe");
        CounterRng rng(seed, std::uint64_t(tr));
        State psi;
        for (int p = 0; p < kGroups; ++p) {
            const Label l = random_domain_label(N, t, rng);
            bool merged = false;
            const auto members = kernel_group(l, rp, N, merged);
            // Inside a merged group the kernel is the zero-sum subspace.
            if (merged && members.size() < 2) continue;
            std::vector<cplx> c(members.size());
            cplx mean = 0;
            for (auto& v : c) {
                v = cplx(rng.normal(), rng.normal());
                mean += v;
            }
            mean /= double(c.size());
            for (std::size_t i = 0; i < members.size(); ++i)
                psi.add(members[i], merged ? c[i] - mean : c[i]);
            rep.kernel_dim += merged ? members.size() - 1 : 1;
        }
        const double n = psi.norm();
        if (n == 0) continue;
        for (auto& [l, c] : psi.map()) c /= n;
        rep.max_kernel_residual = std::max(rep.max_kernel_residual, apply(*Fd, psi).norm());
        rep.max_norm = std::max(rep.max_norm, apply(*M, psi).norm());
    }
    if (rep.kernel_dim == 0) throw std::runtime_error("image probe: empty kernel");
    return rep;
}

// ---- witnesses -----------------------------------------------------------------

SpectrumReport partial_isometry_witness(const std::string& which, int N, int t,
                                        const Budget& budget) {
    SpectrumReport r;
    r.which = which;
    r.N = N;
    r.t = t;
    NormOptions opt;
    opt.spectrum = true;
    OpPtr op;
    DomainSpec dom;
    bool sym = true;
    if (which == "V") {
        op = make_V(N);
        dom = single_pair_domain(N, t);
    } else if (which == "D") {
        // Merged side: (S,T) of size <= 2t in total with every key triple.
        op = make_stage(Stage::D, N);
        dom = single_pair_domain(N, 2 * t);
        dom.a_cls = -1;
        dom.key_mask = kHasKeys;
        sym = false;
    } else {
        const Stage s = stage_from_name(which);
        op = make_stage(s, N);
        dom = four_register_domain(N, t, false);
        if (s == Stage::TildeSk2) dom.key_mask = kHasK1 | kHasK3;
        if (s == Stage::TildeSz) dom.key_mask = kHasKeys;
        if (s != Stage::Tilde && s != Stage::TildeSk1k3 && s != Stage::TildeSk2 &&
            s != Stage::TildeSz)
            throw std::invalid_argument("witness: not a partial isometry candidate: " + which);
    }
    const NormResult n = op_norm_restricted(*op, dom, sym, opt, budget);
    r.deviation = n.projector_deviation;
    r.norm = n.norm;
    r.columns = n.columns;
    r.pass = r.deviation <= 1e-9;
    return r;
}

EquivalenceReport s_equivalence(int N, int max_size, std::uint64_t samples, std::uint64_t seed,
                                const Budget& budget) {
    EquivalenceReport r;
    r.N = N;
    r.max_size = max_size;
    r.seed = seed;
    const OpPtr full = make_stage(Stage::Full, N);
    auto check = [&](const Label& l) {
        const State a = apply(*full, State(l));
        const State b = s_action_direct(quad_of(l), N);
        r.max_discrepancy = std::max(r.max_discrepancy, max_abs_difference(a, b));
        ++r.inputs;
    };
    const DomainSpec dom = four_register_domain(N, max_size, false);
    if (samples == 0) {
        r.mode = "exhaustive";
        for (const auto& l : enumerate_domain(dom, false)) {
            if ((r.inputs & 1023) == 0) budget.check("s-equivalence");
            check(l);
        }
    } else {
        r.mode = "sampled";
        for (std::uint64_t i = 0; i < samples; ++i) {
            if ((i & 63) == 0) budget.check("s-equivalence");
            CounterRng rng(seed, i);
            Label l = random_domain_label(N, max_size, rng);
            l.a = 0;
            check(l);
        }
    }
    r.pass = r.max_discrepancy < 1e-10;
    return r;
}

}  // namespace prusim
