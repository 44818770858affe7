#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prusim/good_tuples.hpp"
#include "prusim/relations.hpp"

namespace prusim {

struct DecOutput {
    Relation L_isolate, R_isolate, L_pair, R_pair;
    std::vector<Value> mL, mR;
    KeyTriple keys;
    friend bool operator==(const DecOutput&, const DecOutput&) = default;
};

struct Merged {
    Relation L, R;
    KeyTriple keys;
    friend bool operator==(const Merged&, const Merged&) = default;
};

// The seven-step decoder. nullopt plays the role of the failure symbol.
std::optional<DecOutput> dec(const Relation& L, const Relation& R, const KeyTriple& k);

// Checks the structural invariants that every successful dec output has.
bool valid_dec_output(const DecOutput& d);

// Inverse of dec on its support. Throws if d violates the invariants.
Merged enc(const DecOutput& d);

std::string to_string(const DecOutput& d);

// The merged relations a tuple produces, and the decoder output it should map back to.
Merged merge(const RelationQuad& q, const KeyTriple& k, const ZVectors& z);
DecOutput expected_output(const RelationQuad& q, const KeyTriple& k, const ZVectors& z);

struct RobustReport {
    bool decodable = false;
    int deletions_checked = 0;
    std::vector<std::string> failures;  // one entry per failing deletion
    bool robust() const { return decodable && failures.empty(); }
};

// Deletes each element of the merged L and R in turn, reruns dec, and compares
// against the predicted output for isolate, source and target deletions.
RobustReport robust_probe(const RelationQuad& q, const KeyTriple& k, const ZVectors& z);

struct RoundtripReport {
    int N = 0;
    int max_size = 0;
    std::string mode;  // "exhaustive" or "sampled"
    std::uint64_t seed = 0;
    std::uint64_t merged_checked = 0;   // (L, R, k) inputs fed to dec
    std::uint64_t decodable = 0;        // of those, dec succeeded
    std::uint64_t outputs_checked = 0;  // structurally valid outputs fed to enc
    std::uint64_t in_image = 0;         // of those, enc lands in Supp(Dec)
    std::uint64_t outside_image = 0;    // enc produced an undecodable instance
    std::vector<std::string> failures;  // first few counterexamples
    std::uint64_t failure_count = 0;   // enc(dec) mismatches plus dec(enc) aliasing
    std::uint64_t enc_dec_failures = 0;
    // Both identities as stated: undecodable enc(d) counts against dec(enc) = id.
    bool pass() const { return failure_count == 0 && outside_image == 0; }
    // enc(dec) = id on Supp(Dec) and no aliasing inside the image.
    bool pass_on_image() const { return failure_count == 0; }
};

// enc(dec(.)) = id wherever dec succeeds, over merged relations of total size
// <= max_size. For structurally valid outputs of merged size <= max_size,
// dec(enc(d)) must be d whenever it is not a failure; the invariants alone do
// not force enc(d) into Supp(Dec), so those cases are counted separately.
// Every key triple is tried.
RoundtripReport dec_roundtrip_exhaustive(int N, int max_size);
// Same checks on uniformly drawn inputs (samples of each kind).
RoundtripReport dec_roundtrip_sampled(int N, int max_size, std::uint64_t samples,
                                      std::uint64_t seed);

struct SoundnessReport {
    int N = 0;
    int max_size = 0;
    std::uint64_t quads = 0;        // distinctness-respecting inputs
    std::uint64_t good = 0;         // good tuples over all quads
    std::uint64_t decode_failures = 0;
    std::uint64_t robust_failures = 0;
    std::vector<std::string> failures;
    bool pass() const { return decode_failures == 0 && robust_failures == 0; }
};

// Exhaustive: every quad with each register of size <= max_size and every good
// tuple; dec must return exactly the inputs and every deletion must decode as
// predicted.
SoundnessReport good_tuple_soundness(int N, int max_size, ZRRule rule = ZRRule::Dual);

// Every relation with exactly `size` pairs over [N] (as a multiset).
std::vector<Relation> all_relations(int N, int size);

}  // namespace prusim
