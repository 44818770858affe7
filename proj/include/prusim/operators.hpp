#pragma once

#include <memory>
#include <string>
#include <vector>

#include "prusim/state.hpp"

namespace prusim {

// A linear map given by its action on basis labels. apply() appends c * op|in>
// to out; apply_adj() does the same for the adjoint.
class Op {
public:
    virtual ~Op() = default;
    virtual void apply(const Label& in, cplx c, Terms& out) const = 0;
    virtual void apply_adj(const Label& in, cplx c, Terms& out) const = 0;
    virtual std::string name() const = 0;
    // State-level application. Composites override this to merge between factors.
    virtual State apply_state(const State& s, bool adjoint = false) const;
};

using OpPtr = std::shared_ptr<const Op>;

OpPtr identity_op();
// product({A, B, C}) is A*B*C, so C acts first.
OpPtr product(std::vector<OpPtr> factors);
OpPtr sum(std::vector<OpPtr> terms);
OpPtr scaled(OpPtr op, cplx c);
OpPtr adjoint(OpPtr op);
OpPtr difference(OpPtr a, OpPtr b);

// Applies op to every term of s, merging and pruning the result.
State apply(const Op& op, const State& s);
State apply_adjoint(const Op& op, const State& s);

// Merges duplicate labels in place, keeping first-appearance order.
void merge_terms(Terms& t);

}  // namespace prusim
