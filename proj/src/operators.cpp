#include "prusim/operators.hpp"

#include <stdexcept>

namespace prusim {

void merge_terms(Terms& t) {
    if (t.size() < 2) return;
    absl::flat_hash_map<Label, std::size_t> pos;
    pos.reserve(t.size());
    std::size_t w = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto [it, fresh] = pos.try_emplace(t[i].first, w);
        if (fresh)
            t[w++] = t[i];
        else
            t[it->second].second += t[i].second;
    }
    t.resize(w);
}

State Op::apply_state(const State& s, bool adj) const {
    State out;
    Terms buf;
    for (const auto& [l, c] : s.sorted()) {
        buf.clear();
        if (adj)
            apply_adj(l, c, buf);
        else
            apply(l, c, buf);
        out.add_terms(buf);
    }
    out.prune();
    return out;
}

State apply(const Op& op, const State& s) { return op.apply_state(s, false); }
State apply_adjoint(const Op& op, const State& s) { return op.apply_state(s, true); }

namespace {

class Identity final : public Op {
public:
    void apply(const Label& in, cplx c, Terms& out) const override { out.emplace_back(in, c); }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        out.emplace_back(in, c);
    }
    std::string name() const override { return "id"; }
    State apply_state(const State& s, bool) const override { return s; }
};

class Product final : public Op {
public:
    explicit Product(std::vector<OpPtr> f) : f_(std::move(f)) {}

    void apply(const Label& in, cplx c, Terms& out) const override {
        Terms cur{{in, c}}, next;
        for (auto it = f_.rbegin(); it != f_.rend(); ++it) {
            next.clear();
            for (const auto& [l, a] : cur) (*it)->apply(l, a, next);
            merge_terms(next);
            cur.swap(next);
            if (cur.empty()) return;
        }
        out.insert(out.end(), cur.begin(), cur.end());
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        Terms cur{{in, c}}, next;
        for (const auto& f : f_) {
            next.clear();
            for (const auto& [l, a] : cur) f->apply_adj(l, a, next);
            merge_terms(next);
            cur.swap(next);
            if (cur.empty()) return;
        }
        out.insert(out.end(), cur.begin(), cur.end());
    }
    std::string name() const override {
        std::string s;
        for (const auto& f : f_) s += (s.empty() ? "" : "*") + f->name();
        return "(" + s + ")";
    }
    State apply_state(const State& s, bool adj) const override {
        State cur = s;
        if (adj)
            for (const auto& f : f_) cur = f->apply_state(cur, true);
        else
            for (auto it = f_.rbegin(); it != f_.rend(); ++it) cur = (*it)->apply_state(cur, false);
        return cur;
    }

private:
    std::vector<OpPtr> f_;
};

class Sum final : public Op {
public:
    explicit Sum(std::vector<OpPtr> t) : t_(std::move(t)) {}
    void apply(const Label& in, cplx c, Terms& out) const override {
        for (const auto& t : t_) t->apply(in, c, out);
    }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        for (const auto& t : t_) t->apply_adj(in, c, out);
    }
    std::string name() const override {
        std::string s;
        for (const auto& t : t_) s += (s.empty() ? "" : " + ") + t->name();
        return "(" + s + ")";
    }
    State apply_state(const State& s, bool adj) const override {
        State out;
        for (const auto& t : t_) {
            const State part = t->apply_state(s, adj);
            for (const auto& [l, c] : part.map()) out.add(l, c);
        }
        out.prune();
        return out;
    }

private:
    std::vector<OpPtr> t_;
};

class Scaled final : public Op {
public:
    Scaled(OpPtr op, cplx c) : op_(std::move(op)), c_(c) {}
    void apply(const Label& in, cplx c, Terms& out) const override { op_->apply(in, c * c_, out); }
    void apply_adj(const Label& in, cplx c, Terms& out) const override {
        op_->apply_adj(in, c * std::conj(c_), out);
    }
    std::string name() const override {
        if (c_ == cplx(-1)) return "-" + op_->name();
        return "(" + std::to_string(c_.real()) + ")" + op_->name();
    }

private:
    OpPtr op_;
    cplx c_;
};

class Adjoint final : public Op {
public:
    explicit Adjoint(OpPtr op) : op_(std::move(op)) {}
    void apply(const Label& in, cplx c, Terms& out) const override { op_->apply_adj(in, c, out); }
    void apply_adj(const Label& in, cplx c, Terms& out) const override { op_->apply(in, c, out); }
    std::string name() const override { return op_->name() + "^dag"; }
    State apply_state(const State& s, bool adj) const override {
        return op_->apply_state(s, !adj);
    }

private:
    OpPtr op_;
};

}  // namespace

OpPtr identity_op() {
    static const OpPtr id = std::make_shared<Identity>();
    return id;
}

OpPtr product(std::vector<OpPtr> factors) {
    if (factors.empty()) return identity_op();
    if (factors.size() == 1) return factors.front();
    return std::make_shared<Product>(std::move(factors));
}

OpPtr sum(std::vector<OpPtr> terms) {
    if (terms.empty()) throw std::invalid_argument("sum of no operators");
    if (terms.size() == 1) return terms.front();
    return std::make_shared<Sum>(std::move(terms));
}

OpPtr scaled(OpPtr op, cplx c) { return std::make_shared<Scaled>(std::move(op), c); }
OpPtr adjoint(OpPtr op) { return std::make_shared<Adjoint>(std::move(op)); }
OpPtr difference(OpPtr a, OpPtr b) { return sum({std::move(a), scaled(std::move(b), -1.0)}); }

}  // namespace prusim
