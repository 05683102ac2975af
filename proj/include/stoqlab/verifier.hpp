#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stoqlab/circuit.hpp"
#include "stoqlab/state.hpp"

namespace stoqlab {

/// Register layout: witness wires first, then |0> ancillas, then |+> ancillas.
struct Layout {
  int n_w = 0;
  int n_0 = 0;
  int n_plus = 0;

  int width() const { return n_w + n_0 + n_plus; }
  void validate(int circuit_width) const;
};

enum class Basis { Hadamard, Computational };

/// A verifier: reversible circuit, register layout, output wire, and the
/// basis in which the output wire is measured. Hadamard basis accepts on
/// outcome |+>, computational basis accepts on outcome |0>.
struct StoqVerifier {
  ReversibleCircuit circuit;
  Layout layout;
  int out = 1;
  Basis basis = Basis::Hadamard;

  void validate() const;
};

struct SimLimits {
  std::uint64_t max_entries = std::uint64_t{1} << 22;
};

/// |w> (x) |0>^{n_0} (x) |+>^{n_+}, sparse with support(w) * 2^{n_+} entries.
NonNegState input_state(const Layout& layout, const NonNegState& w,
                        const SimLimits& limits = {});

NonNegState output_state(const StoqVerifier& v, const NonNegState& w,
                         const SimLimits& limits = {});

double accept_prob(const StoqVerifier& v, const NonNegState& w, const SimLimits& limits = {});

/// V^dagger X_out V as a single circuit on the verifier's width.
ReversibleCircuit conjugated_x(const StoqVerifier& v);

/// Dense symmetric 2^{n_w} x 2^{n_w} matrix M with
/// accept_prob(v, w) = 1/2 + 1/2 w^T M w for every normalized witness w.
struct VerifierMatrix {
  int n_w = 0;
  std::vector<double> a;  // row-major, dimension 2^{n_w}

  int dim() const { return 1 << n_w; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * dim() + c]; }
};

VerifierMatrix verifier_matrix(const StoqVerifier& v, int jobs = 0);
VerifierMatrix verifier_matrix_serial(const StoqVerifier& v);

/// y = M x without materializing M; cost 2^{n_w + n_+} per product.
void verifier_matvec(const StoqVerifier& v, const std::vector<double>& x,
                     std::vector<double>& y);

struct PowerIterOptions {
  double tol = 1e-12;       // successive Rayleigh quotient difference
  int max_iters = 100000;
  int restarts = 4;         // seeded random restarts on stagnation
  std::uint64_t seed = 0;
};

struct EigenPair {
  double value = 0;
  std::vector<double> vector;
  int iterations = 0;
};

/// Dominant eigenpair of a symmetric matrix with spectrum in [-1, 1], by
/// power iteration on M + I (the shift removes sign ambiguity).
EigenPair power_iteration(const std::function<void(const std::vector<double>&,
                                                   std::vector<double>&)>& matvec,
                          int dim, const PowerIterOptions& opts = {});

/// Full spectrum of a dense symmetric matrix (cross-check path).
double dense_lambda_max(const VerifierMatrix& m);
EigenPair dense_top_eigenpair(const VerifierMatrix& m);

struct MaxAccept {
  double prob = 0;
  double lambda_max = 0;
  NonNegState witness;
  int iterations = 0;
};

enum class EigenMethod { PowerIteration, Dense };

/// Maximum acceptance probability 1/2 + 1/2 max(lambda_max(M), 0) and a
/// witness achieving it. The clamp at 0 only matters for synthetic matrices;
/// verifier-derived M are entrywise non-negative, so lambda_max >= 0 and any
/// non-negative witness already reaches 1/2. When the top eigenvalue is
/// degenerate, any witness in that eigenspace may be returned; ties are not
/// broken canonically.
MaxAccept max_accept(const StoqVerifier& v, EigenMethod method = EigenMethod::PowerIteration,
                     const PowerIterOptions& opts = {});
MaxAccept max_accept_from_matrix(const VerifierMatrix& m, EigenMethod method,
                                 const PowerIterOptions& opts = {});

/// Best classical (basis-string) witness for a computational-basis verifier.
std::pair<double, BitString> max_accept_computational(const StoqVerifier& v, int jobs = 0);
std::pair<double, BitString> max_accept_computational_serial(const StoqVerifier& v);

/// One computational-basis measurement of V|psi_in>: draws a witness string
/// proportionally to its mass, fills the |+> block with uniform bits, and
/// applies the permutation. The |+> support is never expanded.
BitString sample_output(const StoqVerifier& v, const NonNegState& w, std::mt19937_64& rng);
BitString sample_output(const StoqVerifier& v, const NonNegState& w, std::uint64_t seed);

using MassFn = std::function<double(BitString)>;

/// D(j) for the verifier's output distribution, given query access to the
/// witness distribution D_w: runs the inverse permutation on j and reads off
/// D_w at the witness block when the |0> block is clean.
double query_output_mass(const StoqVerifier& v, const MassFn& witness_mass, BitString j);
double query_output_mass_preinverted(const ReversibleCircuit& inverse_circuit,
                                     const Layout& layout, const MassFn& witness_mass,
                                     BitString j);

StoqVerifier parse_verifier(const std::string& text);
std::string serialize_verifier(const StoqVerifier& v);

}  // namespace stoqlab
