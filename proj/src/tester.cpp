#include "stoqlab/tester.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stoqlab {

DualOracle::DualOracle(int width, int out_wire, std::function<BitString()> sample, MassFn mass)
    : width_(width), out_wire_(out_wire), sample_fn_(std::move(sample)), mass_fn_(std::move(mass)) {
  if (out_wire_ < 1 || out_wire_ > width_) throw CircuitError("oracle output wire out of range");
}

BitString DualOracle::sample() {
  ++sample_calls_;
  return sample_fn_();
}

double DualOracle::query(BitString j) {
  ++query_calls_;
  return mass_fn_(j);
}

std::pair<double, double> DualOracle::query_sides(BitString rest) {
  ++query_calls_;
  return {mass_fn_(insert_wire(rest, width_, out_wire_, false)),
          mass_fn_(insert_wire(rest, width_, out_wire_, true))};
}

void DualOracle::reset_counters() { sample_calls_ = query_calls_ = 0; }

EasyWitness EasyWitness::from_state(const NonNegState& w) {
  if (!w.normalized) throw std::invalid_argument("easy witness must be normalized");
  return EasyWitness{w.width, w.entries};
}

EasyWitness EasyWitness::from_predicate(int width, const std::function<bool(BitString)>& member) {
  SubsetSpec spec;
  spec.width = width;
  spec.member = member;
  return from_state(subset_state(spec));
}

NonNegState EasyWitness::to_state() const {
  NonNegState s;
  s.width = width;
  s.entries = dist;
  s.normalized = true;
  return s;
}

MassFn EasyWitness::mass_fn() const {
  Entries d = dist;
  return [d = std::move(d)](BitString key) {
    auto it = std::lower_bound(d.begin(), d.end(), key,
                               [](const Entry& a, BitString k) { return a.key < k; });
    return (it != d.end() && it->key == key) ? it->mass : 0.0;
  };
}

DualOracle dual_oracle_from_verifier(const StoqVerifier& v, const EasyWitness& w,
                                     std::uint64_t seed) {
  v.validate();
  if (w.width != v.layout.n_w) throw CircuitError("witness width does not match layout");
  auto rng = std::make_shared<std::mt19937_64>(seed);
  NonNegState ws = w.to_state();
  StoqVerifier vc = v;
  auto sample = [rng, ws, vc]() { return sample_output(vc, ws, *rng); };
  auto inv = std::make_shared<ReversibleCircuit>(inverse(v.circuit));
  MassFn wmass = w.mass_fn();
  Layout layout = v.layout;
  MassFn mass = [inv, layout, wmass](BitString j) {
    return query_output_mass_preinverted(*inv, layout, wmass, j);
  };
  return DualOracle(v.circuit.width, v.out, std::move(sample), std::move(mass));
}

std::uint64_t TesterConfig::m() const {
  return static_cast<std::uint64_t>(std::ceil(c_m / (eps() * eps())));
}

std::uint64_t TesterConfig::m_prime() const {
  return static_cast<std::uint64_t>(std::ceil(c_m_prime / (eps() * eps())));
}

void TesterConfig::validate() const {
  if (!(0.5 <= b && b < a && a <= 1.0))
    throw std::invalid_argument("tester thresholds must satisfy 1/2 <= b < a <= 1");
  if (!(c_m > 0 && c_m_prime > 0)) throw std::invalid_argument("sample-size constants must be > 0");
}

TesterReport run_tester(DualOracle& oracle, const TesterConfig& cfg) {
  cfg.validate();
  const std::uint64_t m = cfg.m();
  const std::uint64_t mp = cfg.m_prime();
  const int out = oracle.out_wire();
  const int width = oracle.width();

  // Z-hat: m' output-bit samples estimating ||D1||_1.
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < mp; ++i)
    ones += get_wire(oracle.sample(), width, out) ? 1 : 0;
  double z_hat = static_cast<double>(ones) / static_cast<double>(mp);
  int heavy = z_hat >= 0.5 ? 1 : 0;

  // Exactly 2m draws; the statistic uses the first m on the heavy side.
  std::vector<BitString> raw(2 * m);
  for (auto& s : raw) s = oracle.sample();
  std::vector<BitString> retained;
  retained.reserve(m);
  for (BitString s : raw) {
    if (retained.size() == m) break;
    if (get_wire(s, width, out) == (heavy == 1)) retained.push_back(s);
  }

  double x_sum = 0;
  if (!retained.empty()) {
    for (std::uint64_t i = 0; i < m; ++i) {
      BitString s = retained[i % retained.size()];
      BitString rest = drop_wire(s, width, out);
      auto [d0, d1] = oracle.query_sides(rest);
      double own = heavy == 1 ? d1 : d0;
      double other = heavy == 1 ? d0 : d1;
      double ratio = std::sqrt(other / own);  // own > 0: s was drawn on that side
      x_sum += 0.5 * (1.0 + ratio) * (1.0 + ratio);
    }
  } else {
    // No draw landed on the Z-hat side at all; orient each sample by the
    // side it did land on so the ratio denominator stays positive.
    for (std::uint64_t i = 0; i < m; ++i) {
      BitString s = raw[i];
      BitString rest = drop_wire(s, width, out);
      auto [d0, d1] = oracle.query_sides(rest);
      bool one_side = get_wire(s, width, out);
      double own = one_side ? d1 : d0;
      double other = one_side ? d0 : d1;
      double ratio = std::sqrt(other / own);
      x_sum += 0.5 * (1.0 + ratio) * (1.0 + ratio);
    }
  }
  double x_hat = x_sum / static_cast<double>(m);

  double z_heavy = heavy == 1 ? z_hat : 1.0 - z_hat;
  double product = x_hat * z_heavy;

  TesterReport rep;
  rep.verdict = product >= 0.5 * (cfg.a + cfg.b) ? Verdict::Accept : Verdict::Reject;
  rep.z_hat = z_hat;
  rep.x_hat = x_hat;
  rep.product = std::clamp(product, 0.0, 1.0 + 4.0 * cfg.eps());
  rep.heavy_side = heavy;
  rep.samples_used = mp + 2 * m;
  rep.queries_used = m;
  rep.retained = retained.size();
  return rep;
}

Verdict ema_decide(const StoqVerifier& v, const EasyWitness& w, double a, double b,
                   std::uint64_t seed) {
  TesterConfig cfg;
  cfg.a = a;
  cfg.b = b;
  DualOracle oracle = dual_oracle_from_verifier(v, w, seed);
  return run_tester(oracle, cfg).verdict;
}

TrialStats run_trials(const StoqVerifier& v, const EasyWitness& w, const TesterConfig& cfg,
                      std::uint64_t seed, std::uint64_t trials, int jobs,
                      std::vector<Verdict>* verdicts) {
  cfg.validate();
  std::vector<Verdict> out(trials, Verdict::Reject);
  std::int64_t n = static_cast<std::int64_t>(trials);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(jobs > 0 ? jobs : omp_get_max_threads()) if (jobs != 1)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    DualOracle oracle =
        dual_oracle_from_verifier(v, w, mix_seed(seed, static_cast<std::uint64_t>(i)));
    out[static_cast<size_t>(i)] = run_tester(oracle, cfg).verdict;
  }
  TrialStats stats;
  stats.trials = trials;
  for (Verdict vd : out)
    if (vd == Verdict::Accept) ++stats.accepts;
  if (verdicts) *verdicts = std::move(out);
  return stats;
}

}  // namespace stoqlab
