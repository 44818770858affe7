#include "prusim/norm.hpp"

#include <absl/container/flat_hash_set.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace prusim {

void Budget::check(const char* what) const {
    if (elapsed() > seconds)
        throw BudgetExceeded(std::string(what) + ": time budget of " + std::to_string(seconds) +
                             " s exhausted");
}

std::size_t Budget::max_state_entries() const {
    // Input map, its sorted copy and an output map caught mid-rehash coexist.
    return max_bytes / (8 * (sizeof(Label) + sizeof(cplx) + 1));
}

// ---- domains ---------------------------------------------------------------

bool in_domain(const DomainSpec& d, const Label& l) {
    if (l.a2_set || l.zl || l.zr) return false;
    if (d.a_cls < 0 && l.a != 0) return false;
    if (int(l.a) >= d.N || int(l.b) >= d.dB) return false;
    if (l.present != d.key_mask) return false;
    if (!(d.key_mask & 1) && l.k.k1) return false;
    if (!(d.key_mask & 2) && l.k.k2) return false;
    if (!(d.key_mask & 4) && l.k.k3) return false;
    int total = 0;
    std::array<bool, 4> used{};
    for (const auto& s : d.regs) {
        used[s.reg] = true;
        const Relation& r = l.reg[s.reg];
        if (s.i_distinct ? !r.i_distinct() : !r.d_distinct()) return false;
        if (d.trunc == Truncation::PerRegister && r.size() > d.t) return false;
        total += r.size();
    }
    for (int i = 0; i < 4; ++i)
        if (!used[i] && !l.reg[i].empty()) return false;
    if (d.trunc == Truncation::Sum && total > d.t) return false;
    return true;
}

namespace {

struct Enumerator {
    const DomainSpec& d;
    bool reps;
    int n;  // log2 N
    std::vector<int> slot_cls;
    std::vector<Value> val;
    std::vector<int> perm_count;
    std::vector<int> affine_seen;
    int rank = 0;
    std::function<void(const std::vector<Value>&)> emit;

    SymKind kind(int cls) const { return reps ? d.classes.at(cls) : SymKind::Rigid; }

    void run(std::size_t i) {
        if (i == slot_cls.size()) {
            emit(val);
            return;
        }
        const int c = slot_cls[i];
        switch (kind(c)) {
            case SymKind::Rigid:
                for (int v = 0; v < d.N; ++v) {
                    val[i] = Value(v);
                    run(i + 1);
                }
                break;
            case SymKind::Perm: {
                const int used = perm_count[c];
                for (int v = 0; v <= used && v < d.N; ++v) {
                    val[i] = Value(v);
                    if (v == used) ++perm_count[c];
                    run(i + 1);
                    if (v == used) --perm_count[c];
                }
                break;
            }
            case SymKind::Affine: {
                if (!affine_seen[c]) {
                    affine_seen[c] = 1;
                    val[i] = 0;
                    run(i + 1);
                    affine_seen[c] = 0;
                    break;
                }
                const int span = 1 << rank;
                for (int v = 0; v < span; ++v) {
                    val[i] = Value(v);
                    run(i + 1);
                }
                if (rank < n) {
                    val[i] = Value(span);
                    ++rank;
                    run(i + 1);
                    --rank;
                }
                break;
            }
        }
    }
};

void for_each_shape(const DomainSpec& d, std::vector<int>& sizes, std::size_t j, int total,
                    const std::function<void()>& f) {
    if (j == d.regs.size()) {
        f();
        return;
    }
    const int cap = d.trunc == Truncation::Sum ? d.t - total : d.t;
    for (int s = 0; s <= cap; ++s) {
        sizes[j] = s;
        for_each_shape(d, sizes, j + 1, total + s, f);
    }
}

}  // namespace

std::vector<Label> enumerate_domain(const DomainSpec& d, bool reps_only) {
    if (!is_power_of_two(d.N)) throw std::invalid_argument("N must be a power of two");
    absl::flat_hash_set<Label> seen;
    std::vector<Label> out;
    std::vector<int> sizes(d.regs.size());

    for_each_shape(d, sizes, 0, 0, [&] {
        Enumerator e{d, reps_only, log2_exact(d.N), {}, {}, {}, {}, 0, {}};
        if (d.a_cls >= 0) e.slot_cls.push_back(d.a_cls);
        for (std::size_t j = 0; j < d.regs.size(); ++j)
            for (int p = 0; p < sizes[j]; ++p) {
                e.slot_cls.push_back(d.regs[j].x_cls);
                e.slot_cls.push_back(d.regs[j].y_cls);
            }
        e.val.assign(e.slot_cls.size(), 0);
        e.perm_count.assign(d.classes.size(), 0);
        e.affine_seen.assign(d.classes.size(), 0);
        e.emit = [&](const std::vector<Value>& v) {
            Label l;
            std::size_t i = 0;
            if (d.a_cls >= 0) l.a = v[i++];
            for (std::size_t j = 0; j < d.regs.size(); ++j)
                for (int p = 0; p < sizes[j]; ++p, i += 2)
                    l.reg[d.regs[j].reg].insert(Pair{v[i], v[i + 1]});
            for (const auto& s : d.regs) {
                const Relation& r = l.reg[s.reg];
                if (s.i_distinct ? !r.i_distinct() : !r.d_distinct()) return;
            }
            const int K1 = (d.key_mask & 1) ? d.N : 1;
            const int K2 = (d.key_mask & 2) ? d.N : 1;
            const int K3 = (d.key_mask & 4) ? d.N : 1;
            for (int b = 0; b < d.dB; ++b)
                for (int k1 = 0; k1 < K1; ++k1)
                    for (int k2 = 0; k2 < K2; ++k2)
                        for (int k3 = 0; k3 < K3; ++k3) {
                            Label m = l;
                            m.b = Value(b);
                            m.k = KeyTriple{Value(k1), Value(k2), Value(k3)};
                            m.present = std::uint8_t(d.key_mask);
                            if (seen.insert(m).second) out.push_back(m);
                        }
        };
        e.run(0);
    });
    return out;
}

DomainSpec single_pair_domain(int N, int t, Truncation tr) {
    DomainSpec d;
    d.N = N;
    d.t = t;
    d.trunc = tr;
    d.a_cls = 0;
    d.regs = {{0, true, 0, 1}, {1, false, 0, 1}};
    d.classes = {SymKind::Perm, SymKind::Perm};
    return d;
}

DomainSpec four_register_domain(int N, int t, bool with_a) {
    DomainSpec d;
    d.N = N;
    d.t = t;
    d.trunc = Truncation::PerRegister;
    d.a_cls = with_a ? 0 : -1;
    d.regs = {{0, true, 0, 1}, {1, false, 0, 1}, {2, true, 2, 3}, {3, false, 2, 3}};
    d.classes = {SymKind::Affine, SymKind::Affine, SymKind::Affine, SymKind::Affine};
    return d;
}

// ---- norm engine ---------------------------------------------------------------

namespace {

struct Component {
    std::vector<std::vector<std::pair<int, cplx>>> rows;  // row -> (column, amplitude)
    std::size_t cols = 0;
};

// w = G v with G = M^dag M.
void gram_apply(const Component& c, const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
    w.setZero(c.cols);
    for (const auto& row : c.rows) {
        cplx s{};
        for (const auto& [j, a] : row) s += a * v[j];
        for (const auto& [j, a] : row) w[j] += std::conj(a) * s;
    }
}

Eigen::VectorXcd start_vector(std::size_t n) {
    Eigen::VectorXcd v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = 1.0 + 0.37 * double((i * 2654435761ULL) % 1000) / 1000.0;
    return v.normalized();
}

// Top eigenvalue of a PSD operator given by f, by power iteration.
template <typename F>
double power_top(std::size_t n, F&& f, const NormOptions& opt, const Budget& budget) {
    Eigen::VectorXcd v = start_vector(n), w(n);
    double lam = 0;
    for (int it = 0; it < opt.max_iter; ++it) {
        f(v, w);
        const double nl = v.dot(w).real();
        const double wn = w.norm();
        if (wn == 0) return 0;
        v = w / wn;
        if (it > 0 && std::abs(nl - lam) <= opt.tol * std::max(nl, 1e-300)) return nl;
        lam = nl;
        if ((it & 255) == 0) budget.check("power iteration");
    }
    return lam;
}

}  // namespace

NormResult op_norm_restricted(const Op& op, const std::vector<Label>& seeds,
                              const DomainPredicate& in_dom, const NormOptions& opt,
                              const Budget& budget) {
    NormResult res;
    absl::flat_hash_set<Label> visited;
    Terms terms, back;
    std::size_t entries = 0;  // stored matrix entries, for the memory estimate

    for (const auto& seed : seeds) {
        if (visited.contains(seed) || !in_dom(seed)) continue;
        visited.insert(seed);

        Component comp;
        absl::flat_hash_map<Label, int> row_index;
        std::deque<Label> queue{seed};
        std::vector<Label> cols;
        while (!queue.empty()) {
            Label col = queue.front();
            queue.pop_front();
            const int ci = int(cols.size());
            cols.push_back(col);
            terms.clear();
            op.apply(col, 1.0, terms);
            merge_terms(terms);
            for (const auto& [r, a] : terms) {
                if (std::abs(a) < opt.amp_floor) continue;
                ++entries;
                auto [it, fresh] = row_index.try_emplace(r, int(comp.rows.size()));
                if (fresh) {
                    comp.rows.emplace_back();
                    back.clear();
                    op.apply_adj(r, 1.0, back);
                    for (const auto& [c2, b] : back) {
                        if (std::abs(b) < opt.amp_floor) continue;
                        if (!in_dom(c2) || visited.contains(c2)) continue;
                        visited.insert(c2);
                        queue.push_back(c2);
                    }
                }
                comp.rows[it->second].emplace_back(ci, a);
            }
            if (visited.size() > budget.max_columns)
                throw BudgetExceeded("norm engine: more than " +
                                     std::to_string(budget.max_columns) + " basis columns");
            // One column can take a second at the larger N, so check every time.
            budget.check("norm engine");
            const std::size_t labels = visited.size() + row_index.size() + cols.size();
            if (labels * (sizeof(Label) + 24) + entries * 16 > budget.max_bytes)
                throw BudgetExceeded("norm engine: memory budget exceeded");
        }
        comp.cols = cols.size();
        res.columns += comp.cols;
        entries = 0;
        ++res.components;
        res.largest_component = std::max(res.largest_component, comp.cols);
        if (comp.rows.empty()) {
            // op annihilates the whole component
            if (opt.spectrum) res.projector_deviation = std::max(res.projector_deviation, 0.0);
            continue;
        }

        if (comp.cols <= opt.dense_max) {
            Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(comp.cols, comp.cols);
            for (const auto& row : comp.rows)
                for (const auto& [i, ai] : row)
                    for (const auto& [j, aj] : row) G(i, j) += std::conj(ai) * aj;
            double top;
            if (comp.cols == 1) {
                top = G(0, 0).real();
                if (opt.spectrum)
                    res.projector_deviation = std::max(
                        res.projector_deviation, std::min(std::abs(top), std::abs(top - 1)));
            } else {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
                const auto& ev = es.eigenvalues();
                top = ev.maxCoeff();
                if (opt.spectrum)
                    for (int i = 0; i < ev.size(); ++i)
                        res.projector_deviation = std::max(
                            res.projector_deviation, std::min(std::abs(ev[i]), std::abs(ev[i] - 1)));
            }
            res.norm = std::max(res.norm, std::sqrt(std::max(top, 0.0)));
        } else {
            ++res.power_components;
            auto g = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) { gram_apply(comp, v, w); };
            const double top = power_top(comp.cols, g, opt, budget);
            res.norm = std::max(res.norm, std::sqrt(std::max(top, 0.0)));
            if (opt.spectrum) {
                // ||G^2 - G||^2 is the top eigenvalue of (G^2 - G)^2.
                Eigen::VectorXcd t1(comp.cols), t2(comp.cols);
                auto h = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
                    gram_apply(comp, v, t1);
                    gram_apply(comp, t1, t2);
                    t2 -= t1;  // H v
                    gram_apply(comp, t2, t1);
                    gram_apply(comp, t1, w);
                    w -= t1;  // H^2 v
                };
                const double dev2 = power_top(comp.cols, h, opt, budget);
                res.projector_deviation =
                    std::max(res.projector_deviation, std::sqrt(std::max(dev2, 0.0)));
            }
        }
    }
    res.seconds = budget.elapsed();
    return res;
}

NormResult op_norm_restricted(const Op& op, const DomainSpec& dom, bool use_symmetry,
                              const NormOptions& opt, const Budget& budget) {
    auto seeds = enumerate_domain(dom, use_symmetry);
    return op_norm_restricted(
        op, seeds, [&dom](const Label& l) { return in_domain(dom, l); }, opt, budget);
}

}  // namespace prusim
