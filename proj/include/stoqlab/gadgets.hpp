#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stoqlab/verifier.hpp"

namespace stoqlab {

/// A circuit-distinguishability instance: decide whether some non-negative
/// witness makes C0 and C1 produce close output states (YES, distance <=
/// alpha) or every witness keeps them far (NO, distance >= beta), measured by
/// the squared Hellinger distance 1/2 ||R0 - R1||^2.
struct RCDInstance {
  ReversibleCircuit c0, c1;
  Layout layout;
  double alpha = 0.0;
  double beta = 1.0;

  void validate() const;
};

/// Hardness direction: C0 = V^dagger X_out V, C1 = identity. For every
/// witness, accept_prob(v, w) = 1 - 1/4 ||R0 - R1||^2.
RCDInstance rcd_from_verifier(const StoqVerifier& v, double alpha = 0.0, double beta = 1.0);

/// Containment direction: one fresh |+> control wire (appended last, so it
/// joins the |+> block) runs ctrl-C0, X, ctrl-C1 and becomes the output wire.
StoqVerifier rcd_verifier(const RCDInstance& inst);

/// Pointwise squared Hellinger distance 1/2 ||R0 - R1||^2 at witness w.
double rcd_distance(const RCDInstance& inst, const NonNegState& w, const SimLimits& limits = {});

/// Minimum over witnesses of the unhalved ||R0 - R1||^2, computed as
/// 4 (1 - p*) for p* = max_accept(rcd_verifier(inst)); so p* = 1 - d*/4.
/// Note the factor-2 scale difference from rcd_distance.
double rcd_extremal_distance(const RCDInstance& inst,
                             EigenMethod method = EigenMethod::PowerIteration);

/// Conjunction repetition: width 1 + r*(n_w+n_0+n_+); a fresh |+> control
/// (the new output wire) gates V^dagger X_out V on each of r register
/// copies; copies are interleaved so that all witness wires come first.
StoqVerifier and_repetition(const StoqVerifier& v, int r, const SimLimits& limits = {});

struct AmplifyReport {
  double lambda_base = 0;       // lambda_max(M_V)
  double lambda_repeated = 0;   // lambda_max(M_V') from the repeated circuit
  double lambda_power = 0;      // lambda_base^r
  double rel_error = 0;
};

/// Checks lambda_max(M_{V'}) = lambda_max(M_V)^r with both sides from dense
/// eigendecompositions; M_{V'} comes from simulating the repeated circuit.
AmplifyReport soundness_amplify_check(const StoqVerifier& v, int r);

/// Smallest repetition count r with (2s-1)^r <= 2^{-(n+1)}:
/// ceil((n+1) / log2(1/(2s-1))). This also forces (2s-1)^r / 2 <= 2^{-n}.
int min_conjunction_rounds(double s, int n);

/// Computational-basis verifier produced from a Hadamard-basis one: run V,
/// X on the output wire, then V^dagger; accept iff the measured witness
/// block equals `expected` and the |0> block is clean.
struct MAPredicateVerifier {
  ReversibleCircuit circuit;
  Layout layout;
  BitString expected = 0;
};

MAPredicateVerifier cstoqma_to_ma(const StoqVerifier& v, BitString s);
double ma_predicate_accept(const MAPredicateVerifier& mv);

struct WitnessPair {
  BitString s0 = 0, r0 = 0, s1 = 0, r1 = 0;
};

/// Finds (s0, r0), (s1, r1) over the given witness support with
/// C0(s0, 0^{n_0}, r0) = C1(s1, 0^{n_0}, r1), by indexing C1 images and
/// probing C0 images. Returns the lexicographically smallest pair
/// (ordered by s0, r0, s1, r1); nullopt iff no pair exists.
std::optional<WitnessPair> exact_rcd_witness_search(const RCDInstance& inst,
                                                    const std::vector<BitString>& support,
                                                    int jobs = 0,
                                                    const SimLimits& limits = {});
std::optional<WitnessPair> exact_rcd_witness_search_serial(const RCDInstance& inst,
                                                           const std::vector<BitString>& support,
                                                           const SimLimits& limits = {});

bool verify_witness_pair(const RCDInstance& inst, const WitnessPair& p);

struct NoRandomResult {
  bool distinguishable = false;
  BitString si = 0, sj = 0;  // equal on a diagonal hit
  NonNegState witness;       // support {si, sj}, acceptance exactly 1
};

/// n_+ = 0 analysis: looks for basis strings with C0^dagger C1 mapping
/// (si, 0) and (sj, 0) to each other (si = sj allowed). Such a pair yields a
/// witness (|si> + |sj>)/sqrt(2) accepted with probability exactly 1; if
/// none exists, every classical witness is accepted with probability 1/2.
/// The mutual condition is what makes the returned witness reach 1; for
/// instances derived from a verifier (C1 = identity, C0 an involution) it
/// coincides with a one-sided match.
NoRandomResult no_random_bits_decision(const ReversibleCircuit& c0, const ReversibleCircuit& c1,
                                       const Layout& layout);

RCDInstance parse_rcd_instance(const std::string& text);
std::string serialize_rcd_instance(const RCDInstance& inst);

}  // namespace stoqlab
