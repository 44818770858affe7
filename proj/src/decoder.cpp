#include "prusim/decoder.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "prusim/rng.hpp"

namespace prusim {

namespace {

bool has_repeats(std::vector<Value> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

bool meets(const std::vector<Value>& sorted_set, const std::vector<Value>& v) {
    for (auto x : v)
        if (std::binary_search(sorted_set.begin(), sorted_set.end(), x)) return true;
    return false;
}

}  // namespace

std::optional<DecOutput> dec(const Relation& L, const Relation& R, const KeyTriple& k) {
    auto gl = induced_graph_decompose(L, k.k2, Side::Left);
    if (!gl) return std::nullopt;
    auto gr = induced_graph_decompose(R, k.k2, Side::Right);
    if (!gr) return std::nullopt;
    if (!gl->target.i_distinct() || !gr->target.d_distinct()) return std::nullopt;

    DecOutput d;
    d.keys = k;
    d.L_isolate = gl->isolate.xored(k.k1, k.k3);
    d.R_isolate = gr->isolate.xored(k.k1, k.k3);

    // Left: source (x_i, e_i) -> target (e_i ^ k2, y_i), ordered by y ascending.
    auto lm = gl->matching;
    std::sort(lm.begin(), lm.end(), [](const auto& a, const auto& b) {
        return a.second.y < b.second.y;
    });
    for (const auto& [s, t] : lm) {
        d.L_pair.insert(Pair{s.x, t.y});
        d.mL.push_back(s.y);
    }
    // Right: source (f_i, v_i) -> target (u_i, f_i ^ k2), ordered by u ascending.
    auto rm = gr->matching;
    std::sort(rm.begin(), rm.end(), [](const auto& a, const auto& b) {
        return a.second.x < b.second.x;
    });
    for (const auto& [s, t] : rm) {
        d.R_pair.insert(Pair{t.x, s.y});
        d.mR.push_back(s.x);
    }

    if (!d.L_isolate.i_distinct() || !d.L_pair.i_distinct() || !d.R_isolate.d_distinct() ||
        !d.R_pair.d_distinct() || has_repeats(d.mL) || has_repeats(d.mR))
        return std::nullopt;
    if (meets(d.L_pair.im(), d.mL) || meets(d.R_pair.dom(), d.mR)) return std::nullopt;
    return d;
}

bool valid_dec_output(const DecOutput& d) {
    if (!d.L_isolate.i_distinct() || !d.L_pair.i_distinct()) return false;
    if (!d.R_isolate.d_distinct() || !d.R_pair.d_distinct()) return false;
    if (static_cast<int>(d.mL.size()) != d.L_pair.size()) return false;
    if (static_cast<int>(d.mR.size()) != d.R_pair.size()) return false;
    if (has_repeats(d.mL) || has_repeats(d.mR)) return false;
    if (meets(d.L_pair.im(), d.mL) || meets(d.R_pair.dom(), d.mR)) return false;
    return true;
}

Merged enc(const DecOutput& d) {
    if (!valid_dec_output(d)) throw std::invalid_argument("enc: invalid decoder output");
    Merged m;
    m.keys = d.keys;
    m.L = augment(d.L_isolate, AugKind::L1, d.keys)
              .united(augment(d.L_pair, AugKind::L2, d.keys, d.mL));
    m.R = augment(d.R_isolate, AugKind::R1, d.keys)
              .united(augment(d.R_pair, AugKind::R2, d.keys, d.mR));
    return m;
}

std::string to_string(const DecOutput& d) {
    std::ostringstream os;
    auto vec = [&](const std::vector<Value>& v) {
        os << '(';
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << int(v[i]);
        os << ')';
    };
    os << "Liso=" << d.L_isolate.str() << " Riso=" << d.R_isolate.str()
       << " Lpair=" << d.L_pair.str() << " Rpair=" << d.R_pair.str() << " mL=";
    vec(d.mL);
    os << " mR=";
    vec(d.mR);
    os << " k=(" << int(d.keys.k1) << ',' << int(d.keys.k2) << ',' << int(d.keys.k3) << ')';
    return os.str();
}


Merged merge(const RelationQuad& q, const KeyTriple& k, const ZVectors& z) {
    Merged m;
    m.keys = k;
    m.L = augment(q.L1, AugKind::L1, k).united(augment(q.L2, AugKind::L2, k, z.zL));
    m.R = augment(q.R1, AugKind::R1, k).united(augment(q.R2, AugKind::R2, k, z.zR));
    return m;
}

DecOutput expected_output(const RelationQuad& q, const KeyTriple& k, const ZVectors& z) {
    return DecOutput{q.L1, q.R1, q.L2, q.R2, z.zL, z.zR, k};
}

RobustReport robust_probe(const RelationQuad& q, const KeyTriple& k, const ZVectors& z) {
    RobustReport rep;
    const Merged m = merge(q, k, z);
    auto d = dec(m.L, m.R, k);
    rep.decodable = d && *d == expected_output(q, k, z);
    if (!rep.decodable) return rep;

    auto check = [&](const Relation& L, const Relation& R, const DecOutput& want,
                     const std::string& what) {
        ++rep.deletions_checked;
        auto got = dec(L, R, k);
        if (!got)
            rep.failures.push_back(what + ": decoder failed");
        else if (!(*got == want))
            rep.failures.push_back(what + ": got " + to_string(*got) + " want " +
                                   to_string(want));
    };
    auto minus = [](Relation r, Pair p) {
        r.erase(p);
        return r;
    };
    const Value k1 = k.k1, k2 = k.k2, k3 = k.k3;

    for (const auto& p : q.L1) {
        Pair v{Value(p.x ^ k1), Value(p.y ^ k3)};
        DecOutput want = expected_output(q, k, z);
        want.L_isolate.erase(p);
        check(minus(m.L, v), m.R, want, "L isolate " + Relation{{v.x, v.y}}.str());
    }
    std::vector<Pair> l2(q.L2.begin(), q.L2.end());
    std::sort(l2.begin(), l2.end(), [](Pair a, Pair b) { return a.y < b.y; });
    for (size_t i = 0; i < l2.size(); ++i) {
        const Value xi = l2[i].x, yi = l2[i].y, zi = z.zL[i];
        DecOutput base = expected_output(q, k, z);
        base.L_pair.erase(l2[i]);
        base.mL = z_delete(z.zL, int(i));

        DecOutput ws = base;
        ws.L_isolate.insert(Pair{Value(zi ^ k2 ^ k1), Value(yi ^ k3)});
        check(minus(m.L, Pair{xi, zi}), m.R, ws, "L source #" + std::to_string(i));

        DecOutput wt = base;
        wt.L_isolate.insert(Pair{Value(xi ^ k1), Value(zi ^ k3)});
        check(minus(m.L, Pair{Value(zi ^ k2), yi}), m.R, wt, "L target #" + std::to_string(i));
    }

    for (const auto& p : q.R1) {
        Pair u{Value(p.x ^ k1), Value(p.y ^ k3)};
        DecOutput want = expected_output(q, k, z);
        want.R_isolate.erase(p);
        check(m.L, minus(m.R, u), want, "R isolate " + Relation{{u.x, u.y}}.str());
    }
    std::vector<Pair> r2(q.R2.begin(), q.R2.end());  // already ascending by domain
    for (size_t i = 0; i < r2.size(); ++i) {
        const Value xi = r2[i].x, yi = r2[i].y, zi = z.zR[i];
        DecOutput base = expected_output(q, k, z);
        base.R_pair.erase(r2[i]);
        base.mR = z_delete(z.zR, int(i));

        DecOutput ws = base;  // source (z_i, y_i) removed, target becomes isolate
        ws.R_isolate.insert(Pair{Value(xi ^ k1), Value(zi ^ k2 ^ k3)});
        check(m.L, minus(m.R, Pair{zi, yi}), ws, "R source #" + std::to_string(i));

        DecOutput wt = base;  // target (x_i, z_i ^ k2) removed, source becomes isolate
        wt.R_isolate.insert(Pair{Value(zi ^ k1), Value(yi ^ k3)});
        check(m.L, minus(m.R, Pair{xi, Value(zi ^ k2)}), wt, "R target #" + std::to_string(i));
    }
    return rep;
}

}  // namespace prusim

// ---- round trips ---------------------------------------------------------------

namespace prusim {

namespace {

constexpr std::size_t kKeepFailures = 10;

void note_failure(RoundtripReport& r, std::string what) {
    if (r.failures.size() < kKeepFailures) r.failures.push_back(std::move(what));
    ++r.failure_count;
}

void check_merged(RoundtripReport& r, const Relation& L, const Relation& R, const KeyTriple& k) {
    ++r.merged_checked;
    auto d = dec(L, R, k);
    if (!d) return;
    ++r.decodable;
    if (!valid_dec_output(*d)) {
        note_failure(r, "dec output violates invariants: " + to_string(*d));
        return;
    }
    const Merged m = enc(*d);
    if (!(m.L == L && m.R == R && m.keys == k)) {
        ++r.enc_dec_failures;
        note_failure(r, "enc(dec) != id at L=" + L.str() + " R=" + R.str());
    }
}

void check_output(RoundtripReport& r, const DecOutput& d) {
    if (!valid_dec_output(d)) return;
    ++r.outputs_checked;
    const Merged m = enc(d);
    auto back = dec(m.L, m.R, m.keys);
    if (!back) {
        ++r.outside_image;
        return;
    }
    ++r.in_image;
    if (!(*back == d)) note_failure(r, "dec(enc) != id at " + to_string(d));
}

int merged_size(int liso, int riso, int lpair, int rpair) {
    return liso + riso + 2 * (lpair + rpair);
}

// Calls f(v) for every v in [N]^m.
template <class F>
void for_each_vector(int N, int m, F&& f) {
    std::vector<Value> v(m, 0);
    while (true) {
        f(v);
        int i = 0;
        for (; i < m; ++i) {
            if (++v[i] < N) break;
            v[i] = 0;
        }
        if (i == m) return;
    }
}

}  // namespace

std::vector<Relation> all_relations(int N, int size) {
    std::vector<Relation> out;
    std::vector<int> idx(size, 0);
    const int M = N * N;
    auto rec = [&](auto&& self, int i, int from) -> void {
        if (i == size) {
            Relation r;
            for (int c : idx) r.insert(Pair{Value(c / N), Value(c % N)});
            out.push_back(r);
            return;
        }
        for (int c = from; c < M; ++c) {
            idx[i] = c;
            self(self, i + 1, c);
        }
    };
    rec(rec, 0, 0);
    return out;
}

RoundtripReport dec_roundtrip_exhaustive(int N, int max_size) {
    if (!is_power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    if (max_size < 0 || max_size > Relation::kCapacity / 2)
        throw std::invalid_argument("max size out of range");
    RoundtripReport r;
    r.N = N;
    r.max_size = max_size;
    r.mode = "exhaustive";
    std::vector<std::vector<Relation>> rel(max_size + 1);
    for (int s = 0; s <= max_size; ++s) rel[s] = all_relations(N, s);

    for (int k1 = 0; k1 < N; ++k1)
        for (int k2 = 0; k2 < N; ++k2)
            for (int k3 = 0; k3 < N; ++k3) {
                const KeyTriple k{Value(k1), Value(k2), Value(k3)};
                for (int sl = 0; sl <= max_size; ++sl)
                    for (int sr = 0; sl + sr <= max_size; ++sr)
                        for (const auto& L : rel[sl])
                            for (const auto& R : rel[sr]) check_merged(r, L, R, k);

                for (int li = 0; li <= max_size; ++li)
                    for (int ri = 0; merged_size(li, ri, 0, 0) <= max_size; ++ri)
                        for (int lp = 0; merged_size(li, ri, lp, 0) <= max_size; ++lp)
                            for (int rp = 0; merged_size(li, ri, lp, rp) <= max_size; ++rp)
                                for (const auto& Li : rel[li])
                                    for (const auto& Ri : rel[ri])
                                        for (const auto& Lp : rel[lp])
                                            for (const auto& Rp : rel[rp])
                                                for_each_vector(N, lp, [&](const auto& mL) {
                                                    for_each_vector(N, rp, [&](const auto& mR) {
                                                        check_output(r, DecOutput{Li, Ri, Lp, Rp,
                                                                                  mL, mR, k});
                                                    });
                                                });
            }
    return r;
}

RoundtripReport dec_roundtrip_sampled(int N, int max_size, std::uint64_t samples,
                                      std::uint64_t seed) {
    if (!is_power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    if (max_size < 0 || max_size > Relation::kCapacity / 2)
        throw std::invalid_argument("max size out of range");
    RoundtripReport r;
    r.N = N;
    r.max_size = max_size;
    r.mode = "sampled";
    r.seed = seed;
    auto value = [&](CounterRng& g) { return Value(g.below(N)); };
    auto relation = [&](CounterRng& g, int n) {
        Relation rel;
        for (int i = 0; i < n; ++i) rel.insert(Pair{value(g), value(g)});
        return rel;
    };
    auto vec = [&](CounterRng& g, int n) {
        std::vector<Value> v(n);
        for (auto& x : v) x = value(g);
        return v;
    };
    for (std::uint64_t i = 0; i < samples; ++i) {
        CounterRng g(seed, i);
        const KeyTriple k{value(g), value(g), value(g)};
        const int sl = int(g.below(max_size + 1));
        const int sr = int(g.below(max_size - sl + 1));
        check_merged(r, relation(g, sl), relation(g, sr), k);

        // An output shape within the size limit, filled at random.
        int budget = max_size;
        const int lp = int(g.below(budget / 2 + 1));
        budget -= 2 * lp;
        const int rp = int(g.below(budget / 2 + 1));
        budget -= 2 * rp;
        const int li = int(g.below(budget + 1));
        const int ri = int(g.below(budget - li + 1));
        check_output(r, DecOutput{relation(g, li), relation(g, ri), relation(g, lp),
                                  relation(g, rp), vec(g, lp), vec(g, rp), k});
    }
    return r;
}

}  // namespace prusim

namespace prusim {

SoundnessReport good_tuple_soundness(int N, int max_size, ZRRule rule) {
    if (!is_power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    SoundnessReport r;
    r.N = N;
    r.max_size = max_size;
    std::vector<Relation> I, D;  // I-distinct and D-distinct relations up to max_size
    for (int s = 0; s <= max_size; ++s)
        for (const auto& rel : all_relations(N, s)) {
            if (rel.i_distinct()) I.push_back(rel);
            if (rel.d_distinct()) D.push_back(rel);
        }
    auto fail = [&](std::string what) {
        if (r.failures.size() < 10) r.failures.push_back(std::move(what));
    };
    for (const auto& L1 : I)
        for (const auto& L2 : I)
            for (const auto& R1 : D)
                for (const auto& R2 : D) {
                    const RelationQuad q{L1, L2, R1, R2};
                    ++r.quads;
                    GoodTupleChecker g(q, rule);
                    for_each_tuple(N, L2.size(), R2.size(),
                                   [&](const KeyTriple& k, const std::vector<Value>& zL,
                                       const std::vector<Value>& zR) {
                                       if (!g.is_good(k, zL, zR)) return;
                                       ++r.good;
                                       const ZVectors z{zL, zR};
                                       const Merged m = merge(q, k, z);
                                       auto d = dec(m.L, m.R, m.keys);
                                       if (!d || !(*d == expected_output(q, k, z))) {
                                           ++r.decode_failures;
                                           fail("not decodable as expected: L1=" + L1.str() +
                                                " L2=" + L2.str() + " R1=" + R1.str() +
                                                " R2=" + R2.str());
                                           return;
                                       }
                                       const RobustReport rob = robust_probe(q, k, z);
                                       if (!rob.robust()) {
                                           ++r.robust_failures;
                                           fail("deletion mismatch: " +
                                                (rob.failures.empty() ? std::string("?")
                                                                      : rob.failures.front()));
                                       }
                                   });
                }
    return r;
}

}  // namespace prusim
