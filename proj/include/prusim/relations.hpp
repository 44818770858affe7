#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prusim {

using Value = std::uint8_t;  // element of [N], N <= 256

struct Pair {
    Value x = 0;
    Value y = 0;
    friend constexpr auto operator<=>(const Pair&, const Pair&) = default;
};

// Canonical multiset of (x,y) pairs with inline storage. Pairs are kept
// sorted lexicographically so structural equality is multiset equality.
class Relation {
public:
    static constexpr int kCapacity = 12;

    Relation() = default;
    Relation(std::initializer_list<std::pair<int, int>> pairs);
    static Relation from_pairs(const std::vector<std::pair<int, int>>& pairs, int N);

    int size() const { return n_; }
    bool empty() const { return n_ == 0; }
    const Pair& operator[](int i) const { return p_[i]; }
    const Pair* begin() const { return p_.data(); }
    const Pair* end() const { return p_.data() + n_; }

    void insert(Pair q);
    // Removes one copy of q; returns false if absent.
    bool erase(Pair q);
    bool contains(Pair q) const;
    int count(Pair q) const;

    // Sorted, duplicate-free domain / image sets.
    std::vector<Value> dom() const;
    std::vector<Value> im() const;
    bool in_dom(Value x) const;
    bool in_im(Value y) const;
    // Pair whose image is y (first in canonical order), if any.
    std::optional<Pair> by_image(Value y) const;
    std::optional<Pair> by_domain(Value x) const;

    bool i_distinct() const;
    bool d_distinct() const;

    Relation united(const Relation& other) const;
    Relation xored(Value kx, Value ky) const;

    std::vector<std::pair<int, int>> to_vector() const;
    std::string str() const;

    friend bool operator==(const Relation& a, const Relation& b) {
        return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
    }
    friend bool operator<(const Relation& a, const Relation& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }

private:
    std::uint8_t n_ = 0;
    std::array<Pair, kCapacity> p_{};
};

struct KeyTriple {
    Value k1 = 0, k2 = 0, k3 = 0;
    friend constexpr auto operator<=>(const KeyTriple&, const KeyTriple&) = default;
};

struct ZVectors {
    std::vector<Value> zL;
    std::vector<Value> zR;
    friend bool operator==(const ZVectors&, const ZVectors&) = default;
};

enum class AugKind { L1, L2, R1, R2 };

// Image values of an I-distinct relation in ascending order; index i of the
// z vector pairs with the i-th entry. Same for domain values on the R side.
Relation augment(const Relation& rel, AugKind kind, const KeyTriple& k,
                 const std::vector<Value>& z = {});

enum class Side { Left, Right };

struct GraphDecomposition {
    Relation isolate;
    Relation source;  // source[i] matches target[i]
    Relation target;
    std::vector<std::pair<Pair, Pair>> matching;
};

// Left: edge (x,y)->(x',y') iff x' = y^k2. Right: edge iff y' = x^k2.
// Returns nullopt when the graph has a self-loop or two edges share a vertex.
std::optional<GraphDecomposition> induced_graph_decompose(const Relation& rel, Value k2,
                                                          Side side);

bool is_power_of_two(int N);
int log2_exact(int N);

// A ^ B for sets, as a sorted duplicate-free vector.
std::vector<Value> xor_sets(const std::vector<Value>& a, const std::vector<Value>& b);
std::vector<Value> xor_shift(const std::vector<Value>& a, Value s);
std::vector<Value> set_union(const std::vector<Value>& a, const std::vector<Value>& b);

}  // namespace prusim
