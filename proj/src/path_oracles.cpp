#include "prusim/path_oracles.hpp"

#include <bitset>
#include <cmath>
#include <stdexcept>

namespace prusim {

namespace {

using Bits = std::bitset<256>;

Bits im_bits(const Relation& r) {
    Bits b;
    for (const auto& p : r) b.set(p.y);
    return b;
}

Bits dom_bits(const Relation& r) {
    Bits b;
    for (const auto& p : r) b.set(p.x);
    return b;
}


// Calls f(p, rest) for each distinct pair p of r, rest = r without one copy of p.
template <typename F>
void for_each_removal(const Relation& r, F&& f) {
    for (int i = 0; i < r.size(); ++i) {
        if (i > 0 && r[i] == r[i - 1]) continue;
        Relation rest = r;
        rest.erase(r[i]);
        f(r[i], rest);
    }
}

class VL final : public Op {
public:
    VL(int N, RegPair rp) : N_(N), rp_(rp) {}
    void apply(const Label& in, cplx c, Terms& out) const override {
        const Relation& L = in.reg[rp_.s];
        const Relation& R = in.reg[rp_.t];
        Bits used = im_bits(L) | im_bits(R);
        if (int(used.count()) >= N_) return;  // no free value: outside the oracle's domain
        const cplx a = c / std::sqrt(double(N_ - int(used.count())));
        for (int y = 0; y < N_; ++y) {
            if (used.test(y)) continue;
            Label o = in;
            o.reg[rp_.s].insert(Pair{in.a, Value(y)});
            o.a = Value(y);
            out.emplace_back(o, a);
        }
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        const Relation& R = in.reg[rp_.t];
        for_each_removal(in.reg[rp_.s], [&](Pair p, const Relation& rest) {
            if (p.y != in.a) return;
            Bits used = im_bits(rest) | im_bits(R);
            if (used.test(p.y)) return;
            Label o = in;
            o.reg[rp_.s] = rest;
            o.a = p.x;
            out.emplace_back(o, c / std::sqrt(double(N_ - int(used.count()))));
        });
    }
    std::string name() const override { return "VL"; }

private:
    int N_;
    RegPair rp_;
};

class VR final : public Op {
public:
    VR(int N, RegPair rp) : N_(N), rp_(rp) {}
    void apply(const Label& in, cplx c, Terms& out) const override {
        const Relation& L = in.reg[rp_.s];
        const Relation& R = in.reg[rp_.t];
        Bits used = dom_bits(L) | dom_bits(R);
        if (int(used.count()) >= N_) return;
        const cplx a = c / std::sqrt(double(N_ - int(used.count())));
        for (int x = 0; x < N_; ++x) {
            if (used.test(x)) continue;
            Label o = in;
            o.reg[rp_.t].insert(Pair{Value(x), in.a});
            o.a = Value(x);
            out.emplace_back(o, a);
        }
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        const Relation& L = in.reg[rp_.s];
        for_each_removal(in.reg[rp_.t], [&](Pair p, const Relation& rest) {
            if (p.x != in.a) return;
            Bits used = dom_bits(L) | dom_bits(rest);
            if (used.test(p.x)) return;
            Label o = in;
            o.reg[rp_.t] = rest;
            o.a = p.y;
            out.emplace_back(o, c / std::sqrt(double(N_ - int(used.count()))));
        });
    }
    std::string name() const override { return "VR"; }

private:
    int N_;
    RegPair rp_;
};

class FL final : public Op {
public:
    FL(int N, RegPair rp) : N_(N), rp_(rp), inv_(1.0 / std::sqrt(double(N))) {}
    void apply(const Label& in, cplx c, Terms& out) const override {
        const Relation& L = in.reg[rp_.s];
        Bits used = im_bits(L);
        for (int y = 0; y < N_; ++y) {
            if (used.test(y)) continue;
            Label o = in;
            o.reg[rp_.s].insert(Pair{in.a, Value(y)});
            o.a = Value(y);
            out.emplace_back(o, c * inv_);
        }
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        for_each_removal(in.reg[rp_.s], [&](Pair p, const Relation& rest) {
            if (p.y != in.a || rest.in_im(p.y)) return;
            Label o = in;
            o.reg[rp_.s] = rest;
            o.a = p.x;
            out.emplace_back(o, c * inv_);
        });
    }
    std::string name() const override { return "FL"; }

private:
    int N_;
    RegPair rp_;
    double inv_;
};

class FR final : public Op {
public:
    FR(int N, RegPair rp) : N_(N), rp_(rp), inv_(1.0 / std::sqrt(double(N))) {}
    void apply(const Label& in, cplx c, Terms& out) const override {
        const Relation& R = in.reg[rp_.t];
        Bits used = dom_bits(R);
        for (int x = 0; x < N_; ++x) {
            if (used.test(x)) continue;
            Label o = in;
            o.reg[rp_.t].insert(Pair{Value(x), in.a});
            o.a = Value(x);
            out.emplace_back(o, c * inv_);
        }
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        for_each_removal(in.reg[rp_.t], [&](Pair p, const Relation& rest) {
            if (p.x != in.a || rest.in_dom(p.x)) return;
            Label o = in;
            o.reg[rp_.t] = rest;
            o.a = p.y;
            out.emplace_back(o, c * inv_);
        });
    }
    std::string name() const override { return "FR"; }

private:
    int N_;
    RegPair rp_;
    double inv_;
};

// |y>_A |L u {(x,y)}> -> |y>_A' |x>_A |L>
class FLExtract final : public Op {
public:
    explicit FLExtract(RegPair rp) : rp_(rp) {}
    void apply(const Label& in, cplx c, Terms& out) const override {
        if (in.a2_set) return;
        for_each_removal(in.reg[rp_.s], [&](Pair p, const Relation& rest) {
            if (p.y != in.a || rest.in_im(p.y)) return;
            Label o = in;
            o.reg[rp_.s] = rest;
            o.a = p.x;
            o.a2 = p.y;
            o.a2_set = 1;
            out.emplace_back(o, c);
        });
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        if (!in.a2_set || in.reg[rp_.s].in_im(in.a2)) return;
        Label o = in;
        o.reg[rp_.s].insert(Pair{in.a, in.a2});
        o.a = in.a2;
        o.a2 = 0;
        o.a2_set = 0;
        out.emplace_back(o, c);
    }
    std::string name() const override { return "FLextract"; }

private:
    RegPair rp_;
};

// |x>_A |R u {(x,y)}> -> |x>_A' |y>_A |R>
class FRExtract final : public Op {
public:
    explicit FRExtract(RegPair rp) : rp_(rp) {}
    void apply(const Label& in, cplx c, Terms& out) const override {
        if (in.a2_set) return;
        for_each_removal(in.reg[rp_.t], [&](Pair p, const Relation& rest) {
            if (p.x != in.a || rest.in_dom(p.x)) return;
            Label o = in;
            o.reg[rp_.t] = rest;
            o.a = p.y;
            o.a2 = p.x;
            o.a2_set = 1;
            out.emplace_back(o, c);
        });
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        if (!in.a2_set || in.reg[rp_.t].in_dom(in.a2)) return;
        Label o = in;
        o.reg[rp_.t].insert(Pair{in.a2, in.a});
        o.a = in.a2;
        o.a2 = 0;
        o.a2_set = 0;
        out.emplace_back(o, c);
    }
    std::string name() const override { return "FRextract"; }

private:
    RegPair rp_;
};

class XMask final : public Op {
public:
    explicit XMask(KeySource k) : k_(k) {}
    void apply(const Label& in, cplx c, Terms& out) const override {
        Label o = in;
        o.a ^= k_.value(in);
        out.emplace_back(o, c);
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override { apply(in, c, out); }
    std::string name() const override {
        switch (k_.kind) {
            case KeySource::K1: return "X^k1";
            case KeySource::K2: return "X^k2";
            case KeySource::K3: return "X^k3";
            default: return "X^" + std::to_string(int(k_.literal));
        }
    }
    State apply_state(const State& s, bool) const override {
        State out;
        out.map().reserve(s.size());
        for (const auto& [l, c] : s.map()) {
            Label o = l;
            o.a ^= k_.value(l);
            out.add(o, c);
        }
        return out;
    }

private:
    KeySource k_;
};

class UnitaryAB final : public Op {
public:
    UnitaryAB(const Eigen::MatrixXcd& U, int dB, std::string name)
        : dB_(dB), name_(std::move(name)) {
        if (U.rows() != U.cols()) throw std::invalid_argument("unitary must be square");
        const int d = int(U.rows());
        fwd_.resize(d);
        bwd_.resize(d);
        // Sparse column lists; monomial adversaries stay cheap this way.
        for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r) {
                if (U(r, c) == cplx{}) continue;
                fwd_[c].emplace_back(r, U(r, c));
                bwd_[r].emplace_back(c, std::conj(U(r, c)));
            }
    }
    void apply(const Label& in, cplx c, Terms& out) const override {
        for (const auto& [r, u] : fwd_.at(index(in))) out.emplace_back(relabel(in, r), c * u);
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        for (const auto& [r, u] : bwd_.at(index(in))) out.emplace_back(relabel(in, r), c * u);
    }
    std::string name() const override { return name_; }

private:
    // dB_ == 0 means the matrix acts on A alone and B is left untouched.
    int index(const Label& l) const { return dB_ ? int(l.a) * dB_ + int(l.b) : int(l.a); }
    Label relabel(const Label& l, int r) const {
        Label o = l;
        if (dB_) {
            o.a = Value(r / dB_);
            o.b = Value(r % dB_);
        } else {
            o.a = Value(r);
        }
        return o;
    }

    int dB_;
    std::string name_;
    std::vector<std::vector<std::pair<int, cplx>>> fwd_, bwd_;
};

}  // namespace

Value KeySource::value(const Label& l) const {
    Value k = 0;
    switch (kind) {
        case Literal: k = literal; break;
        case K1: k = l.k.k1; break;
        case K2: k = l.k.k2; break;
        case K3: k = l.k.k3; break;
    }
    return Value(k << shift);
}

OpPtr make_VL(int N, RegPair rp) { return std::make_shared<VL>(N, rp); }
OpPtr make_VR(int N, RegPair rp) { return std::make_shared<VR>(N, rp); }
OpPtr make_FL(int N, RegPair rp) { return std::make_shared<FL>(N, rp); }
OpPtr make_FR(int N, RegPair rp) { return std::make_shared<FR>(N, rp); }
OpPtr make_FL_extract(RegPair rp) { return std::make_shared<FLExtract>(rp); }
OpPtr make_FR_extract(RegPair rp) { return std::make_shared<FRExtract>(rp); }
OpPtr make_X(KeySource k) { return std::make_shared<XMask>(k); }

namespace {

// L (1 - R R^dag) + (1 - L L^dag) R^dag
OpPtr combine(const OpPtr& L, const OpPtr& R) {
    auto Rd = adjoint(R), Ld = adjoint(L);
    return sum({product({L, difference(identity_op(), product({R, Rd}))}),
                product({difference(identity_op(), product({L, Ld})), Rd})});
}

}  // namespace

OpPtr make_V(int N, RegPair rp) { return combine(make_VL(N, rp), make_VR(N, rp)); }
OpPtr make_F(int N, RegPair rp) { return combine(make_FL(N, rp), make_FR(N, rp)); }

OpPtr make_unitary_A(const Eigen::MatrixXcd& U, std::string name) {
    return std::make_shared<UnitaryAB>(U, 0, std::move(name));
}

OpPtr make_unitary_AB(const Eigen::MatrixXcd& U, int dB, std::string name) {
    return std::make_shared<UnitaryAB>(U, dB, std::move(name));
}

}  // namespace prusim
