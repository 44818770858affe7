#pragma once

#include <absl/container/flat_hash_map.h>

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <cstring>
#include <string>
#include <stdexcept>
#include <vector>

#include "prusim/relations.hpp"

namespace prusim {

using cplx = std::complex<double>;

// Basis label of a purified state. Every field is byte-sized so the struct has
// no padding and can be hashed and compared as raw bytes. Unused registers stay
// empty; the experiment decides which ones are meaningful.
inline constexpr std::uint8_t kHasK1 = 1, kHasK2 = 2, kHasK3 = 4, kHasZ = 8;
inline constexpr std::uint8_t kHasKeys = kHasK1 | kHasK2 | kHasK3;

struct Label {
    Value a = 0;   // adversary query register A
    Value b = 0;   // adversary ancilla B
    Value a2 = 0;  // scratch register A' used by the extract isometries
    std::uint8_t a2_set = 0;
    std::array<Relation, 4> reg{};  // (S,T) or (S1,T1,S2,T2)
    KeyTriple k{};
    std::uint8_t present = 0;     // which of K1, K2, K3, Z exist (kHas* bits)
    std::uint8_t zl = 0, zr = 0;  // lengths of the z registers
    std::array<Value, 8> z{};     // zL followed by zR

    std::vector<Value> zL() const { return {z.begin(), z.begin() + zl}; }
    std::vector<Value> zR() const { return {z.begin() + zl, z.begin() + zl + zr}; }
    void set_z(const std::vector<Value>& L, const std::vector<Value>& R);

    friend bool operator==(const Label& x, const Label& y) {
        return std::memcmp(&x, &y, sizeof(Label)) == 0;
    }
    template <typename H>
    friend H AbslHashValue(H h, const Label& l) {
        return H::combine_contiguous(std::move(h), reinterpret_cast<const char*>(&l),
                                     sizeof(Label));
    }

    std::string str() const;
};

static_assert(alignof(Label) == 1, "Label must be padding free");

using Terms = std::vector<std::pair<Label, cplx>>;

inline constexpr double kPrune = 1e-12;

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cap on the number of entries one state may hold; 0 means unlimited.
// Set per thread so long computations can fail cleanly instead of exhausting memory.
std::size_t& support_limit();

class SupportLimitScope {
public:
    explicit SupportLimitScope(std::size_t n) : prev_(support_limit()) { support_limit() = n; }
    ~SupportLimitScope() { support_limit() = prev_; }
    SupportLimitScope(const SupportLimitScope&) = delete;
    SupportLimitScope& operator=(const SupportLimitScope&) = delete;

private:
    std::size_t prev_;
};

class State {
public:
    using Map = absl::flat_hash_map<Label, cplx>;

    State() = default;
    explicit State(const Label& l, cplx amp = 1.0) { amp_[l] = amp; }

    void add(const Label& l, cplx amp) {
        amp_[l] += amp;
        guard();
    }
    void add_terms(const Terms& t, cplx scale = 1.0) {
        for (const auto& [l, c] : t) amp_[l] += scale * c;
        guard();
    }
    void prune(double eps = kPrune);
    cplx at(const Label& l) const;
    double norm() const;
    std::size_t size() const { return amp_.size(); }
    const Map& map() const { return amp_; }
    Map& map() { return amp_; }

    // Entries sorted by label bytes; gives a deterministic iteration order.
    std::vector<std::pair<Label, cplx>> sorted() const;

private:
    void guard() const {
        const std::size_t lim = support_limit();
        if (lim && amp_.size() > lim) throw_support_exceeded(lim);
    }
    [[noreturn]] static void throw_support_exceeded(std::size_t lim);

    Map amp_;
};

cplx inner_product(const State& s1, const State& s2);
double max_abs_difference(const State& s1, const State& s2);

using DensityMatrix = Eigen::MatrixXcd;

// Traces out everything except (A,B); basis index a * dB + b.
DensityMatrix reduced_density(const State& s, int N, int dB);
double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2);

struct DensityCheck {
    double hermitian_residual = 0;
    double trace = 0;
    double min_eigenvalue = 0;
};
DensityCheck check_density(const DensityMatrix& r);

}  // namespace prusim
