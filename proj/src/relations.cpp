#include "prusim/relations.hpp"

#include <sstream>

namespace prusim {

Relation::Relation(std::initializer_list<std::pair<int, int>> pairs) {
    for (auto [x, y] : pairs) insert(Pair{static_cast<Value>(x), static_cast<Value>(y)});
}

Relation Relation::from_pairs(const std::vector<std::pair<int, int>>& pairs, int N) {
    Relation r;
    for (auto [x, y] : pairs) {
        if (x < 0 || y < 0 || x >= N || y >= N)
            throw std::out_of_range("relation element out of range [N]");
        r.insert(Pair{static_cast<Value>(x), static_cast<Value>(y)});
    }
    return r;
}

void Relation::insert(Pair q) {
    if (n_ >= kCapacity) throw std::length_error("relation capacity exceeded");
    int i = n_;
    while (i > 0 && q < p_[i - 1]) {
        p_[i] = p_[i - 1];
        --i;
    }
    p_[i] = q;
    ++n_;
}

bool Relation::erase(Pair q) {
    for (int i = 0; i < n_; ++i) {
        if (p_[i] == q) {
            for (int j = i + 1; j < n_; ++j) p_[j - 1] = p_[j];
            --n_;
            p_[n_] = Pair{};
            return true;
        }
    }
    return false;
}

bool Relation::contains(Pair q) const { return count(q) > 0; }

int Relation::count(Pair q) const {
    int c = 0;
    for (const auto& p : *this) c += (p == q);
    return c;
}

std::vector<Value> Relation::dom() const {
    std::vector<Value> v;
    for (const auto& p : *this) v.push_back(p.x);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<Value> Relation::im() const {
    std::vector<Value> v;
    for (const auto& p : *this) v.push_back(p.y);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool Relation::in_dom(Value x) const {
    for (const auto& p : *this)
        if (p.x == x) return true;
    return false;
}

bool Relation::in_im(Value y) const {
    for (const auto& p : *this)
        if (p.y == y) return true;
    return false;
}

std::optional<Pair> Relation::by_image(Value y) const {
    for (const auto& p : *this)
        if (p.y == y) return p;
    return std::nullopt;
}

std::optional<Pair> Relation::by_domain(Value x) const {
    for (const auto& p : *this)
        if (p.x == x) return p;
    return std::nullopt;
}

bool Relation::i_distinct() const { return static_cast<int>(im().size()) == n_; }
bool Relation::d_distinct() const { return static_cast<int>(dom().size()) == n_; }

Relation Relation::united(const Relation& other) const {
    Relation r = *this;
    for (const auto& p : other) r.insert(p);
    return r;
}

Relation Relation::xored(Value kx, Value ky) const {
    Relation r;
    for (const auto& p : *this)
        r.insert(Pair{static_cast<Value>(p.x ^ kx), static_cast<Value>(p.y ^ ky)});
    return r;
}

std::vector<std::pair<int, int>> Relation::to_vector() const {
    std::vector<std::pair<int, int>> v;
    for (const auto& p : *this) v.emplace_back(p.x, p.y);
    return v;
}

std::string Relation::str() const {
    std::ostringstream os;
    os << '{';
    for (int i = 0; i < n_; ++i) {
        if (i) os << ',';
        os << '(' << int(p_[i].x) << ',' << int(p_[i].y) << ')';
    }
    os << '}';
    return os.str();
}

namespace {

// Pairs of an I-distinct (resp. D-distinct) relation ordered by image
// (resp. domain) ascending.
std::vector<Pair> ordered_by(const Relation& rel, bool by_image) {
    std::vector<Pair> v(rel.begin(), rel.end());
    if (by_image)
        std::sort(v.begin(), v.end(), [](Pair a, Pair b) { return a.y < b.y; });
    return v;
}

}  // namespace

Relation augment(const Relation& rel, AugKind kind, const KeyTriple& k,
                 const std::vector<Value>& z) {
    switch (kind) {
        case AugKind::L1:
        case AugKind::R1:
            return rel.xored(k.k1, k.k3);
        case AugKind::L2: {
            if (static_cast<int>(z.size()) != rel.size())
                throw std::invalid_argument("augment L2: z length mismatch");
            if (!rel.i_distinct()) throw std::invalid_argument("augment L2: not I-distinct");
            Relation out;
            auto v = ordered_by(rel, true);
            for (size_t i = 0; i < v.size(); ++i) {
                out.insert(Pair{v[i].x, z[i]});
                out.insert(Pair{static_cast<Value>(z[i] ^ k.k2), v[i].y});
            }
            return out;
        }
        case AugKind::R2: {
            if (static_cast<int>(z.size()) != rel.size())
                throw std::invalid_argument("augment R2: z length mismatch");
            if (!rel.d_distinct()) throw std::invalid_argument("augment R2: not D-distinct");
            Relation out;
            auto v = ordered_by(rel, false);
            for (size_t i = 0; i < v.size(); ++i) {
                out.insert(Pair{v[i].x, static_cast<Value>(z[i] ^ k.k2)});
                out.insert(Pair{z[i], v[i].y});
            }
            return out;
        }
    }
    return {};
}

std::optional<GraphDecomposition> induced_graph_decompose(const Relation& rel, Value k2,
                                                          Side side) {
    const int n = rel.size();
    auto edge = [&](const Pair& u, const Pair& v) {
        return side == Side::Left ? v.x == (u.y ^ k2) : v.y == (u.x ^ k2);
    };
    std::array<int, Relation::kCapacity> out{}, in{}, succ{};
    for (int i = 0; i < n; ++i) succ[i] = -1;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!edge(rel[i], rel[j])) continue;
            if (i == j) return std::nullopt;
            ++out[i];
            ++in[j];
            succ[i] = j;
        }
    }
    for (int i = 0; i < n; ++i)
        if (out[i] + in[i] > 1) return std::nullopt;
    GraphDecomposition g;
    for (int i = 0; i < n; ++i) {
        if (out[i] == 0 && in[i] == 0) g.isolate.insert(rel[i]);
        if (out[i] == 1) {
            g.source.insert(rel[i]);
            g.target.insert(rel[succ[i]]);
            g.matching.emplace_back(rel[i], rel[succ[i]]);
        }
    }
    return g;
}

bool is_power_of_two(int N) { return N >= 1 && (N & (N - 1)) == 0; }

int log2_exact(int N) {
    int n = 0;
    while ((1 << n) < N) ++n;
    return n;
}

std::vector<Value> xor_sets(const std::vector<Value>& a, const std::vector<Value>& b) {
    std::vector<Value> v;
    v.reserve(a.size() * b.size());
    for (auto x : a)
        for (auto y : b) v.push_back(static_cast<Value>(x ^ y));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<Value> xor_shift(const std::vector<Value>& a, Value s) {
    std::vector<Value> v;
    v.reserve(a.size());
    for (auto x : a) v.push_back(static_cast<Value>(x ^ s));
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<Value> set_union(const std::vector<Value>& a, const std::vector<Value>& b) {
    std::vector<Value> v(a);
    v.insert(v.end(), b.begin(), b.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace prusim
