#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stoqlab/setcsp.hpp"
#include "stoqlab/tester.hpp"

using namespace stoqlab;
using namespace testutil;

namespace {

StoqVerifier identity_verifier(int n_w, int n_0, int n_plus) {
  StoqVerifier v;
  v.circuit = ReversibleCircuit(n_w + n_0 + n_plus);
  v.layout = Layout{n_w, n_0, n_plus};
  v.out = 1;
  v.basis = Basis::Hadamard;
  return v;
}

// Exact value of 1/2 || |D0> + |D1> ||^2 for the verifier's output state.
double exact_value(const StoqVerifier& v, const NonNegState& w) { return accept_prob(v, w); }

}  // namespace

TEST_CASE("dual oracle from a verifier") {
  SUBCASE("deterministic instance") {
    StoqVerifier v = identity_verifier(1, 1, 0);
    EasyWitness w = EasyWitness::from_state(subset_state(1, {0}));
    DualOracle o = dual_oracle_from_verifier(v, w, 5);
    for (int i = 0; i < 10; ++i) CHECK(o.sample() == 0b00);
    CHECK(o.query(0b00) == 1.0);
    CHECK(o.query(0b01) == 0.0);
    CHECK(o.sample_calls() == 10);
    CHECK(o.query_calls() == 2);
  }
  SUBCASE("query masses sum to 1 for random verifiers up to n = 8") {
    std::mt19937_64 rng(227);
    for (int trial = 0; trial < 20; ++trial) {
      int width = 1 + static_cast<int>(rng() % 8);
      StoqVerifier v = random_verifier(rng, width, 6);
      EasyWitness w = EasyWitness::from_state(random_witness(rng, v.layout.n_w));
      DualOracle o = dual_oracle_from_verifier(v, w, trial);
      double total = 0;
      for (BitString j = 0; j < (BitString{1} << width); ++j) total += o.query(j);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("sample frequencies match query masses") {
    std::mt19937_64 rng(229);
    for (int trial = 0; trial < 3; ++trial) {
      int width = 2 + static_cast<int>(rng() % 4);
      StoqVerifier v = random_verifier(rng, width, 6);
      EasyWitness w = EasyWitness::from_state(random_witness(rng, v.layout.n_w));
      DualOracle o = dual_oracle_from_verifier(v, w, 1000 + trial);
      const int samples = 100000;
      std::vector<double> freq(size_t{1} << width, 0.0);
      for (int i = 0; i < samples; ++i) freq[o.sample()] += 1.0 / samples;
      double tv = 0;
      for (BitString j = 0; j < freq.size(); ++j) tv += std::abs(freq[j] - o.query(j));
      CHECK(tv / 2 < 0.05);
    }
  }
}

TEST_CASE("easy witnesses") {
  EasyWitness uniform = EasyWitness::from_predicate(3, [](BitString) { return true; });
  CHECK(uniform.dist.size() == 8);
  CHECK(uniform.mass_fn()(5) == doctest::Approx(0.125).epsilon(1e-15));

  EasyWitness even = EasyWitness::from_predicate(3, [](BitString s) { return (s & 1) == 0; });
  CHECK(even.dist.size() == 4);
  CHECK(even.mass_fn()(1) == 0.0);
}

TEST_CASE("tester verdicts on the threshold fixtures") {
  TesterConfig cfg;
  cfg.a = 0.9;
  cfg.b = 0.6;

  SUBCASE("yes side: exact value 1 accepts at least 9/16 of runs") {
    StoqVerifier v = identity_verifier(1, 0, 0);
    EasyWitness w = EasyWitness::from_state(subset_state(1, {0, 1}));
    REQUIRE(exact_value(v, w.to_state()) == 1.0);
    TrialStats stats = run_trials(v, w, cfg, 42, 400);
    // one-sided 99% band around 9/16 at 400 trials: mean - 2.33 * sigma
    double band = 9.0 / 16.0 - 2.33 * std::sqrt(9.0 / 16.0 * 7.0 / 16.0 / 400.0);
    CHECK(stats.rate() >= band);
  }
  SUBCASE("no side: exact value 1/2 accepts at most 7/16 of runs") {
    StoqVerifier v = identity_verifier(1, 0, 0);
    EasyWitness w = EasyWitness::from_state(subset_state(1, {0}));
    REQUIRE(exact_value(v, w.to_state()) == 0.5);
    TrialStats stats = run_trials(v, w, cfg, 43, 400);
    double band = 7.0 / 16.0 + 2.33 * std::sqrt(9.0 / 16.0 * 7.0 / 16.0 / 400.0);
    CHECK(stats.rate() <= band);
  }
  SUBCASE("empty D1 rejects in every run") {
    StoqVerifier v = identity_verifier(1, 1, 0);
    EasyWitness w = EasyWitness::from_state(subset_state(1, {0}));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      DualOracle o = dual_oracle_from_verifier(v, w, seed);
      TesterReport rep = run_tester(o, cfg);
      CHECK(rep.verdict == Verdict::Reject);
      CHECK(rep.heavy_side == 0);
    }
  }
}

TEST_CASE("oracle call budget is exact") {
  TesterConfig cfg;
  cfg.a = 0.9;
  cfg.b = 0.6;
  cfg.c_m = 0.5;
  cfg.c_m_prime = 0.5;
  std::mt19937_64 rng(233);
  for (int trial = 0; trial < 10; ++trial) {
    int width = 1 + static_cast<int>(rng() % 5);
    StoqVerifier v = random_verifier(rng, width, 5);
    EasyWitness w = EasyWitness::from_state(random_witness(rng, v.layout.n_w));
    DualOracle o = dual_oracle_from_verifier(v, w, 100 + trial);
    TesterReport rep = run_tester(o, cfg);
    CHECK(o.sample_calls() == cfg.m_prime() + 2 * cfg.m());
    CHECK(o.query_calls() == cfg.m());
    CHECK(rep.samples_used == o.sample_calls());
    CHECK(rep.queries_used == o.query_calls());
    CHECK(rep.product >= 0.0);
    CHECK(rep.product <= 1.0 + 4.0 * cfg.eps());
  }
}

TEST_CASE("deterministic replay") {
  StoqVerifier v = identity_verifier(2, 1, 1);
  v.circuit.append(make_cnot(1, 3));
  EasyWitness w = EasyWitness::from_state(subset_state(2, {0, 3}));
  TesterConfig cfg;
  cfg.a = 0.95;
  cfg.b = 0.55;
  cfg.c_m = 0.25;
  cfg.c_m_prime = 0.25;
  DualOracle o1 = dual_oracle_from_verifier(v, w, 777);
  DualOracle o2 = dual_oracle_from_verifier(v, w, 777);
  TesterReport r1 = run_tester(o1, cfg);
  TesterReport r2 = run_tester(o2, cfg);
  CHECK(r1.verdict == r2.verdict);
  CHECK(r1.z_hat == r2.z_hat);
  CHECK(r1.x_hat == r2.x_hat);
  CHECK(r1.product == r2.product);
  CHECK(r1.retained == r2.retained);
}

TEST_CASE("estimator mean matches the exact value") {
  // Witness chosen so the output-bit marginal is 3/4: the heavy branch is
  // essentially deterministic and E[X Z] = 1/2 || |D0> + |D1> ||^2 exactly.
  StoqVerifier v = identity_verifier(2, 0, 0);
  NonNegState w = make_state(
      2, {{0b00, 0.125}, {0b01, 0.125}, {0b10, 0.375}, {0b11, 0.375}}, true);
  EasyWitness ew = EasyWitness::from_state(w);
  double exact = exact_value(v, w);
  REQUIRE(exact == doctest::Approx(0.5 + 2.0 * std::sqrt(3.0) / 8.0).epsilon(1e-12));

  TesterConfig cfg;
  cfg.a = 0.95;
  cfg.b = 0.55;
  cfg.c_m = 0.5;
  cfg.c_m_prime = 0.5;
  const int runs = 10000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < runs; ++i) {
    DualOracle o = dual_oracle_from_verifier(v, ew, mix_seed(9000, i));
    TesterReport rep = run_tester(o, cfg);
    double p = rep.x_hat * (rep.heavy_side == 1 ? rep.z_hat : 1.0 - rep.z_hat);
    sum += p;
    sumsq += p * p;
  }
  double mean = sum / runs;
  double var = sumsq / runs - mean * mean;
  double se = std::sqrt(var / runs);
  CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-9);
}

TEST_CASE("Z-hat concentration at the configured sample size") {
  StoqVerifier v = identity_verifier(2, 0, 0);
  NonNegState w = make_state(
      2, {{0b00, 0.125}, {0b01, 0.125}, {0b10, 0.375}, {0b11, 0.375}}, true);
  EasyWitness ew = EasyWitness::from_state(w);
  TesterConfig cfg;
  cfg.a = 0.9;
  cfg.b = 0.6;
  double eps = cfg.eps();
  std::uint64_t mp = cfg.m_prime();
  int hits = 0;
  const int runs = 100;
  for (int i = 0; i < runs; ++i) {
    DualOracle o = dual_oracle_from_verifier(v, ew, mix_seed(1234, i));
    std::uint64_t ones = 0;
    for (std::uint64_t s = 0; s < mp; ++s)
      ones += get_wire(o.sample(), o.width(), o.out_wire()) ? 1 : 0;
    double z = static_cast<double>(ones) / static_cast<double>(mp);
    if (std::abs(z - 0.75) <= eps) ++hits;
  }
  CHECK(hits >= 3 * runs / 4);
}

TEST_CASE("swapping the heavy side leaves verdict rates unchanged") {
  // Mirror the 3/4-heavy instance by flipping the output wire, which forces
  // the Z-hat < 1/2 branch while keeping the tested value identical.
  StoqVerifier v = identity_verifier(2, 0, 0);
  StoqVerifier mirrored = v;
  mirrored.circuit.append(make_x(1));
  NonNegState w = make_state(
      2, {{0b00, 0.125}, {0b01, 0.125}, {0b10, 0.375}, {0b11, 0.375}}, true);
  EasyWitness ew = EasyWitness::from_state(w);
  REQUIRE(exact_value(v, w) == doctest::Approx(exact_value(mirrored, w)).epsilon(1e-14));

  TesterConfig cfg;
  cfg.a = 0.95;
  cfg.b = 0.85;  // cut close to the exact value 0.933 so verdicts are noisy
  cfg.c_m = 0.5;
  cfg.c_m_prime = 0.5;
  TrialStats straight = run_trials(v, ew, cfg, 31337, 400);
  TrialStats flipped = run_trials(mirrored, ew, cfg, 31337, 400);
  CHECK(std::abs(straight.rate() - flipped.rate()) <= 0.09);
}

TEST_CASE("decision driver thresholds") {
  StoqVerifier v = identity_verifier(1, 0, 0);
  SUBCASE("value-1 witness accepts") {
    EasyWitness w = EasyWitness::from_state(subset_state(1, {0, 1}));
    int accepts = 0;
    for (int i = 0; i < 32; ++i)
      accepts += ema_decide(v, w, 1.0, 0.75, mix_seed(5, i)) == Verdict::Accept;
    CHECK(accepts >= 18);  // 9/16 of 32
  }
  SUBCASE("value-1/2 witness rejects") {
    EasyWitness w = EasyWitness::from_state(subset_state(1, {1}));
    int accepts = 0;
    for (int i = 0; i < 32; ++i)
      accepts += ema_decide(v, w, 1.0, 0.75, mix_seed(6, i)) == Verdict::Accept;
    CHECK(accepts <= 14);  // 7/16 of 32
  }
}

TEST_CASE("trials are independent of the job count") {
  StoqVerifier v = identity_verifier(2, 0, 1);
  v.circuit.append(make_cnot(1, 2));
  EasyWitness w = EasyWitness::from_state(subset_state(2, {0, 1, 2}));
  TesterConfig cfg;
  cfg.a = 0.9;
  cfg.b = 0.6;
  cfg.c_m = 0.25;
  cfg.c_m_prime = 0.25;
  std::vector<Verdict> serial, parallel;
  run_trials(v, w, cfg, 99, 64, 1, &serial);
  run_trials(v, w, cfg, 99, 64, 4, &parallel);
  CHECK(serial == parallel);
}

TEST_CASE("end to end: compiled instances drive the tester") {
  // Satisfiable instance: the good-string set attains frustration 0 and the
  // compiled verifier accepts its subset state with probability 1.
  SetCSPInstance sat = parse_setcsp("vars 1\nconstraint J=1 groups=[{0,1}]\n");
  CompiledVerifier cs = compile_to_stoqma(sat);
  EasyWitness wit = EasyWitness::from_predicate(1, easy_witness(sat).member);
  REQUIRE(accept_prob(cs.verifier, wit.to_state()) == 1.0);
  int accepts = 0;
  for (int i = 0; i < 32; ++i)
    accepts += ema_decide(cs.verifier, wit, 0.95, 0.6, mix_seed(400, i)) == Verdict::Accept;
  CHECK(accepts >= 18);

  // Contradictory constraints: every subset stays at frustration >= 1/2, so
  // the best subset-state acceptance is 3/4 and the tester rejects at a = 0.95.
  SetCSPInstance unsat = parse_setcsp(
      "vars 1\nconstraint J=1 groups=[{0}]\nconstraint J=1 groups=[{1}]\n");
  REQUIRE(min_frustration(unsat).value == 0.5);
  CompiledVerifier cu = compile_to_stoqma(unsat);
  EasyWitness zero = EasyWitness::from_state(subset_state(1, {0}));
  REQUIRE(accept_prob(cu.verifier, zero.to_state()) == 0.75);
  int rejects = 0;
  for (int i = 0; i < 32; ++i)
    rejects += ema_decide(cu.verifier, zero, 0.95, 0.75, mix_seed(500, i)) == Verdict::Reject;
  CHECK(rejects >= 18);
}

TEST_CASE("config validation") {
  TesterConfig bad;
  bad.a = 0.6;
  bad.b = 0.7;
  CHECK_THROWS(bad.validate());
  bad.a = 0.7;
  bad.b = 0.4;
  CHECK_THROWS(bad.validate());
  TesterConfig ok;
  ok.a = 0.9;
  ok.b = 0.6;
  CHECK(ok.m() == 5689);
  CHECK(ok.m_prime() == 5689);
}
