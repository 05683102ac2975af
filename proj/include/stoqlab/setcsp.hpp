#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stoqlab/verifier.hpp"

namespace stoqlab {

/// A local set-constraint: k distinct variable indices and pairwise-disjoint
/// groups of allowed k-bit local strings. Local string bit j corresponds to
/// support[j-1].
struct SetConstraint {
  std::vector<int> support;
  std::vector<std::vector<BitString>> groups;

  int arity() const { return static_cast<int>(support.size()); }
  void validate(int n) const;
};

struct SetCSPInstance {
  int n = 0;
  std::vector<SetConstraint> constraints;
  double eps1 = 0.0;
  double eps2 = 1.0;

  void validate() const;
};

BitString restrict_to(BitString s, int n, const std::vector<int>& support);
BitString replace_at(BitString s, int n, const std::vector<int>& support, BitString local);

/// Partition of S into good strings (restriction lies in some group) and bad
/// strings, in sorted order.
std::pair<std::vector<BitString>, std::vector<BitString>> good_bad_strings(
    const SetConstraint& c, const std::vector<BitString>& S, int n);

/// Per-constraint frustration: (|bad| + longing mass) / |S|, with the longing
/// mass computed from the group-by-rest counts |T| - |T|^2 / |Y_j|.
double frustration(const SetConstraint& c, const std::vector<BitString>& S, int n);

/// Same quantity through the local matrix: 1 - <S| M_i (x) I |S>.
double frustration_matrix(const SetConstraint& c, const std::vector<BitString>& S, int n);

/// Experimental combinatorial longing count: good strings s such that some
/// group partner (y, s|_rest) is missing from S. This can differ from the
/// longing mass used by frustration(); kept as a cross-check only.
std::vector<std::uint64_t> longing_counts_experimental(const SetConstraint& c,
                                                       const std::vector<BitString>& S, int n);

double total_frustration(const SetCSPInstance& inst, const std::vector<BitString>& S);

/// Dense 2^k x 2^k local matrix: one all-(1/|Y_j|) block per group.
/// Each block is a rank-1 projector, so the spectrum is {0, 1}.
std::vector<double> local_matrix(const SetConstraint& c);

struct MinFrustrationOptions {
  int exhaustive_cap = 4;     // exact over all subsets for n <= cap
  bool allow_heuristic = false;
  int jobs = 0;
};

struct MinFrustration {
  double value = 0;
  std::vector<BitString> subset;
  bool heuristic = false;
};

MinFrustration min_frustration(const SetCSPInstance& inst, const MinFrustrationOptions& opts = {});
MinFrustration min_frustration_serial(const SetCSPInstance& inst,
                                      const MinFrustrationOptions& opts = {});

/// Membership predicate of the set of strings that are good for every
/// constraint. Any frustration-0 subset consists of good strings, so a
/// frustration-0 instance has a non-empty good set; when the good set itself
/// attains frustration 0 its subset state is an optimal verifier witness.
/// (The good set can carry longing mass even when the minimum is 0, so it is
/// not always optimal.)
SubsetSpec easy_witness(const SetCSPInstance& inst);

/// Measurement gadgets. Both produce a circuit whose output-wire X
/// expectation on |psi>|0...0>(|+>) reproduces a projector-type observable
/// on the psi register.
struct GadgetCircuit {
  ReversibleCircuit circuit;
  int psi_wires = 0;    // psi occupies wires 1..psi_wires
  int n0_added = 0;     // |0> ancillas appended after psi
  int nplus_added = 0;  // |+> ancillas appended last
  int out = 0;
};

/// <psi| |0><0|^k |psi> = <X_out>, using k |0> ancillas and one |+> ancilla.
GadgetCircuit z_to_x_gadget(int k);

/// <psi| X (x) |0><0|^{k-1} |psi> = <X_out>, using k-1 |0> ancillas.
GadgetCircuit x_project_gadget(int k);

/// A compiled instance: for every subset state |S>,
///   accept_prob(verifier, |S>) = c0 + c1 * (1 - set_unsat(inst, S) / 2)
/// exactly, with dyadic c1 = D / 2^{n_sel} <= 1 and c0 = (1 - c1) / 2.
/// c1 = 1 (so the affine map is the identity) whenever every group has at
/// most two strings and the branch weights fill the selection register.
struct CompiledVerifier {
  StoqVerifier verifier;
  double c0 = 0;
  double c1 = 1;
  int n_sel = 0;
  std::uint64_t branch_values = 0;  // selection values carrying a branch
  std::uint64_t pad_values = 0;     // rejecting (accept = 1/2) padding values
};

CompiledVerifier compile_to_stoqma(const SetCSPInstance& inst);

SetCSPInstance parse_setcsp(const std::string& text);
std::string serialize_setcsp(const SetCSPInstance& inst);

}  // namespace stoqlab
