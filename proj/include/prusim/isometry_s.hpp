#pragma once

#include <functional>
#include <string>
#include <vector>

#include "prusim/good_tuples.hpp"
#include "prusim/norm.hpp"
#include "prusim/operators.hpp"

namespace prusim {

// Four-register side: reg (0,1,2,3) = (S1,T1,S2,T2). Merged side: reg (0,1) =
// (S,T) with all three key registers present. Stages check the `present` flags
// and map labels of the wrong schema to zero.
enum class Stage {
    Sk1k3,
    Sk2,
    Sz,
    D,
    Ddag,
    Full,
    TildeSk1k3,
    TildeSk2,
    TildeSz,
    Tilde,
    Direct,
};

Stage stage_from_name(const std::string& name);
std::string stage_name(Stage s);

OpPtr make_stage(Stage s, int N, ZRRule rule = ZRRule::Dual);
inline OpPtr make_S(int N) { return make_stage(Stage::Full, N); }
inline OpPtr make_S_tilde(int N) { return make_stage(Stage::Tilde, N); }

State apply_stage(Stage s, const State& in, int N);

Label four_register_label(const RelationQuad& q, Value a = 0);
RelationQuad quad_of(const Label& l);

// The closed-form action: a sum over good tuples of the merged relations.
State s_action_direct(const RelationQuad& q, int N, Value a = 0, ZRRule rule = ZRRule::Dual);

// ---- punctured S ---------------------------------------------------------------

// Extra condition on a good tuple, given the A register value y.
using PunctureSet = std::function<bool(Value y, const RelationQuad& q, const KeyTriple& k,
                                       const ZVectors& z)>;

// S restricted to good tuples outside P; the A register is carried along.
OpPtr make_S_punctured(int N, PunctureSet P, ZRRule rule = ZRRule::Dual);

// P = {(k,z) : y ^ k3 lands in Im of the augmented L2}.
PunctureSet second_oracle_puncture();

struct PuncturedReport {
    int N = 0;
    int t = 0;
    double delta = 0;     // max over inputs of |P n G| / N^(|L2|+|R2|+3)
    double distance = 0;  // ||(S. - S) Pi||
    double bound = 0;     // sqrt(delta)
    bool pass = false;
    std::size_t inputs = 0;
};
PuncturedReport punctured_distance(const PunctureSet& P, int N, int t,
                                   const Budget& budget = {});

// ---- norm catalog --------------------------------------------------------------

struct CatalogEntry {
    std::string id;
    std::string description;
    int a_cls;          // class of the A register in the input domain, -1 if absent
    int key_mask;       // key registers present on the input side
    double exponent;    // stated decay exponent in N (0 when none is stated)
    bool trend_checked; // part of the decay-trend suite
};

const std::vector<CatalogEntry>& commuting_catalog();
const CatalogEntry& catalog_entry(const std::string& id);
OpPtr catalog_operator(const std::string& id, int N);
DomainSpec catalog_domain(const std::string& id, int N, int t);

struct BoundReport {
    std::string id;
    int N = 0;
    int t = 0;
    double measured = 0;
    double projector_deviation = 0;
    std::size_t columns = 0;
    std::size_t largest_component = 0;
    double seconds = 0;
};

BoundReport commuting_norm(const std::string& id, int N, int t, bool use_symmetry = true,
                           const NormOptions& opt = {}, const Budget& budget = {});

// max over inputs of the per-column norm of S~ - S, computed from bad-set sizes alone.
// Columns of S~ - S are orthogonal, so this equals the operator norm.
double tilde_gap_closed_form(int N, int t);

// ---- image lemma probe -----------------------------------------------------------

struct ImageProbeReport {
    std::string which;
    int N = 0;
    int t = 0;
    int trials = 0;
    std::size_t kernel_dim = 0;  // summed dimension of the kernel blocks sampled
    double max_norm = 0;
    double max_kernel_residual = 0;
};

// which = "F1L" or "F2L". Random unit states in ker F_i^{L,dag} on the truncated
// space, pushed through F^{L,dag} X^k3 S (F1L) or F^{L,dag} S (F2L).
ImageProbeReport image_lemma_probe(const std::string& which, int N, int t, int trials,
                                   std::uint64_t seed, const Budget& budget = {});

// Norm of the image-lemma composite on one state, refusing states outside the kernel.
double image_lemma_value(const std::string& which, int N, const State& psi, double tol = 1e-9);

// ---- partial-isometry witnesses and the stage equivalence --------------------

struct SpectrumReport {
    std::string which;
    int N = 0;
    int t = 0;
    double deviation = 0;  // distance of the spectrum of M^dag M from {0,1}
    double norm = 0;
    std::size_t columns = 0;
    bool pass = false;
};

// which: "V" (single pair, sum truncation), "D" (merged side, total size <= 2t,
// all keys), or one of the tilde stages "S~", "S~k1k3", "S~k2", "S~z".
SpectrumReport partial_isometry_witness(const std::string& which, int N, int t,
                                        const Budget& budget = {});

struct EquivalenceReport {
    int N = 0;
    int max_size = 0;
    std::string mode;
    std::uint64_t seed = 0;
    std::uint64_t inputs = 0;
    double max_discrepancy = 0;
    bool pass = false;
};

// Stage composition against the closed form on every four-register basis
// label with registers of size <= max_size (samples = 0) or on random ones.
EquivalenceReport s_equivalence(int N, int max_size, std::uint64_t samples = 0,
                                std::uint64_t seed = 0, const Budget& budget = {});

}  // namespace prusim
