#pragma once

#include <Eigen/Dense>

#include "prusim/operators.hpp"

namespace prusim {

// Which (S,T) pair of the label an oracle acts on.
struct RegPair {
    int s = 0;
    int t = 1;
};

inline constexpr RegPair kFirstPair{0, 1};
inline constexpr RegPair kSecondPair{2, 3};

OpPtr make_VL(int N, RegPair rp = kFirstPair);
OpPtr make_VR(int N, RegPair rp = kFirstPair);
OpPtr make_V(int N, RegPair rp = kFirstPair);
OpPtr make_FL(int N, RegPair rp = kFirstPair);
OpPtr make_FR(int N, RegPair rp = kFirstPair);
OpPtr make_F(int N, RegPair rp = kFirstPair);
OpPtr make_FL_extract(RegPair rp = kFirstPair);
OpPtr make_FR_extract(RegPair rp = kFirstPair);

// X^k on register A. A key source is either a literal or one of the key
// registers of the label. shift moves the key to the top bits, which is how
// the short-key construction applies its masks.
struct KeySource {
    enum Kind { Literal, K1, K2, K3 } kind = Literal;
    Value literal = 0;
    int shift = 0;
    Value value(const Label& l) const;
};
OpPtr make_X(KeySource k);
inline OpPtr make_X_literal(Value k) { return make_X({KeySource::Literal, k, 0}); }
inline OpPtr make_X_key(int which, int shift = 0) {
    return make_X({static_cast<KeySource::Kind>(which), 0, shift});
}

// Dense unitaries on A (dimension N) or on A (x) B (index a * dB + b).
OpPtr make_unitary_A(const Eigen::MatrixXcd& U, std::string name = "U");
OpPtr make_unitary_AB(const Eigen::MatrixXcd& U, int dB, std::string name = "A");

}  // namespace prusim
