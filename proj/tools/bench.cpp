// Wall-clock comparison of the serial reference kernels against their
// OpenMP counterparts. Workloads are sized so a run takes a few seconds.

#include <chrono>
#include <cstdio>
#include <random>

#include "stoqlab/gadgets.hpp"
#include "stoqlab/setcsp.hpp"
#include "stoqlab/tester.hpp"
#include "stoqlab/verifier.hpp"

using namespace stoqlab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Gate random_gate(std::mt19937_64& rng, int width) {
  std::uniform_int_distribution<int> wire(1, width);
  int a = wire(rng), b = wire(rng), c = wire(rng);
  while (b == a) b = wire(rng);
  while (c == a || c == b) c = wire(rng);
  switch (rng() % 3) {
    case 0: return make_x(a);
    case 1: return make_cnot(a, b);
    default: return make_toffoli(a, b, c);
  }
}

ReversibleCircuit random_circuit(std::mt19937_64& rng, int width, int gates) {
  ReversibleCircuit c(width);
  for (int i = 0; i < gates; ++i) c.append(random_gate(rng, width));
  return c;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-24s serial %8.3fs   openmp %8.3fs   speedup %5.2fx\n", name, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main() {
  std::mt19937_64 rng(1);

  {
    StoqVerifier v;
    v.circuit = random_circuit(rng, 14, 60);
    v.layout = Layout{11, 1, 2};
    v.out = 1;
    auto t0 = Clock::now();
    VerifierMatrix a = verifier_matrix_serial(v);
    double ts = seconds_since(t0);
    t0 = Clock::now();
    VerifierMatrix b = verifier_matrix(v, 0);
    double tp = seconds_since(t0);
    if (a.a != b.a) std::fprintf(stderr, "verifier_matrix mismatch!\n");
    report("verifier_matrix", ts, tp);
  }

  {
    RCDInstance inst;
    inst.c0 = random_circuit(rng, 22, 40);
    inst.c1 = random_circuit(rng, 22, 40);
    inst.layout = Layout{18, 2, 2};
    std::vector<BitString> support;
    for (BitString s = 0; s < (BitString{1} << 18); ++s) support.push_back(s);
    SimLimits roomy{std::uint64_t{1} << 24};
    auto t0 = Clock::now();
    auto a = exact_rcd_witness_search_serial(inst, support, roomy);
    double ts = seconds_since(t0);
    t0 = Clock::now();
    auto b = exact_rcd_witness_search(inst, support, 0, roomy);
    double tp = seconds_since(t0);
    if (a.has_value() != b.has_value()) std::fprintf(stderr, "witness search mismatch!\n");
    report("witness_search", ts, tp);
  }

  {
    SetCSPInstance inst;
    inst.n = 4;
    SetConstraint c1{{1, 2}, {{0b00, 0b11}, {0b01}}};
    SetConstraint c2{{3, 4}, {{0b10}, {0b01, 0b00}}};
    SetConstraint c3{{2, 3}, {{0b00, 0b01, 0b10}}};
    inst.constraints = {c1, c2, c3};
    auto t0 = Clock::now();
    MinFrustration a = min_frustration_serial(inst);
    double ts = seconds_since(t0);
    MinFrustrationOptions opts;
    t0 = Clock::now();
    MinFrustration b = min_frustration(inst, opts);
    double tp = seconds_since(t0);
    if (a.value != b.value) std::fprintf(stderr, "min_frustration mismatch!\n");
    report("min_frustration", ts, tp);
  }

  {
    StoqVerifier v;
    v.circuit = random_circuit(rng, 8, 30);
    v.layout = Layout{5, 1, 2};
    v.out = 1;
    EasyWitness w = EasyWitness::from_predicate(5, [](BitString s) { return (s & 1) == 0; });
    TesterConfig cfg;
    cfg.a = 0.9;
    cfg.b = 0.6;
    auto t0 = Clock::now();
    TrialStats a = run_trials(v, w, cfg, 7, 64, 1);
    double ts = seconds_since(t0);
    t0 = Clock::now();
    TrialStats b = run_trials(v, w, cfg, 7, 64, 0);
    double tp = seconds_since(t0);
    if (a.accepts != b.accepts) std::fprintf(stderr, "trial loop mismatch!\n");
    report("tester_trials", ts, tp);
  }

  return 0;
}
