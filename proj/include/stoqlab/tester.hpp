#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stoqlab/verifier.hpp"

namespace stoqlab {

/// Sample-and-query access to one distribution D over width-n bitstrings.
/// sample() draws an independent string; query(j) returns the mass D(j).
/// query_sides(rest) fetches the pair (D(0||rest at the output wire),
/// D(1||rest)) used by one tester loop iteration and is what the query
/// counter counts: one counted access per drawn statistic sample.
class DualOracle {
 public:
  DualOracle(int width, int out_wire, std::function<BitString()> sample, MassFn mass);

  int width() const { return width_; }
  int out_wire() const { return out_wire_; }

  BitString sample();
  double query(BitString j);
  std::pair<double, double> query_sides(BitString rest);

  std::uint64_t sample_calls() const { return sample_calls_; }
  std::uint64_t query_calls() const { return query_calls_; }
  void reset_counters();

 private:
  int width_;
  int out_wire_;
  std::function<BitString()> sample_fn_;
  MassFn mass_fn_;
  std::uint64_t sample_calls_ = 0;
  std::uint64_t query_calls_ = 0;
};

/// A witness with efficient coordinate access: the mass function plus an
/// explicit support listing (enumerable at desk scale) for drawing samples.
struct EasyWitness {
  int width = 0;
  Entries dist;  // sorted, masses sum to 1

  static EasyWitness from_state(const NonNegState& w);
  static EasyWitness from_predicate(int width, const std::function<bool(BitString)>& member);
  NonNegState to_state() const;
  MassFn mass_fn() const;
};

/// Runs independent copies of the verifier for samples; queries run the
/// inverse permutation and read the witness distribution.
DualOracle dual_oracle_from_verifier(const StoqVerifier& v, const EasyWitness& w,
                                     std::uint64_t seed);

struct TesterConfig {
  double a = 0;
  double b = 0;
  double c_m = 8.0;        // m  = ceil(c_m / eps^2)
  double c_m_prime = 8.0;  // m' = ceil(c_m_prime / eps^2)

  double eps() const { return (a - b) / 8.0; }
  std::uint64_t m() const;
  std::uint64_t m_prime() const;
  void validate() const;
};

enum class Verdict { Accept, Reject };

struct TesterReport {
  Verdict verdict = Verdict::Reject;
  double z_hat = 0;
  double x_hat = 0;
  double product = 0;  // clamped to [0, 1 + 4*eps] for reporting
  int heavy_side = 0;
  std::uint64_t samples_used = 0;  // always m' + 2m
  std::uint64_t queries_used = 0;  // always m
  std::uint64_t retained = 0;      // phase-2 samples that landed on the heavy side
};

/// The dual-access estimator of 1/2 || |D0> + |D1> ||^2 with the decision
/// threshold (a+b)/2.
///
/// Call budget is deterministic: m' samples estimate Z (the mass of output
/// bit 1), then exactly 2m further samples are drawn and the first m that
/// land on the heavy side feed the ratio statistic (cycling through the
/// retained ones if fewer than m land there, which keeps the estimator mean
/// unchanged; if none land there the m statistic samples fall back to their
/// own side, which can only happen when Z-hat grossly contradicts phase 2).
/// Each statistic sample makes one counted query access for its (D0, D1)
/// pair, so the totals are m' + 2m samples and m queries, always.
TesterReport run_tester(DualOracle& oracle, const TesterConfig& cfg);

/// Decision driver: wraps the verifier in a dual oracle and runs the tester.
/// Output thresholds are the tester's 9/16 (accept) / 7/16 (reject) rates.
Verdict ema_decide(const StoqVerifier& v, const EasyWitness& w, double a, double b,
                   std::uint64_t seed);

struct TrialStats {
  std::uint64_t accepts = 0;
  std::uint64_t trials = 0;
  double rate() const { return trials ? static_cast<double>(accepts) / trials : 0.0; }
};

/// Seeded independent trials; per-trial seeds derive from (seed, index), so
/// the outcome is independent of the job count.
TrialStats run_trials(const StoqVerifier& v, const EasyWitness& w, const TesterConfig& cfg,
                      std::uint64_t seed, std::uint64_t trials, int jobs = 0,
                      std::vector<Verdict>* verdicts = nullptr);

}  // namespace stoqlab
