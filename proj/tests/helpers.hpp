#pragma once

// Shared test utilities: random instance generators and independent dense
// reference implementations used as oracles. Everything here recomputes
// results from first principles and stays off the library's sparse path.

#include <cmath>
#include <random>
#include <vector>

#include "stoqlab/gadgets.hpp"
#include "stoqlab/setcsp.hpp"
#include "stoqlab/verifier.hpp"

namespace testutil {

using namespace stoqlab;

inline Gate random_gate(std::mt19937_64& rng, int width) {
  std::uniform_int_distribution<int> kind(0, width >= 3 ? 2 : (width >= 2 ? 1 : 0));
  std::uniform_int_distribution<int> wire(1, width);
  int k = kind(rng);
  int a = wire(rng), b = wire(rng), c = wire(rng);
  while (k >= 1 && b == a) b = wire(rng);
  while (k >= 2 && (c == a || c == b)) c = wire(rng);
  switch (k) {
    case 0: return make_x(a);
    case 1: return make_cnot(a, b);
    default: return make_toffoli(a, b, c);
  }
}

inline ReversibleCircuit random_circuit(std::mt19937_64& rng, int width, int gates) {
  ReversibleCircuit c(width);
  for (int i = 0; i < gates; ++i) c.append(random_gate(rng, width));
  return c;
}

inline Layout random_layout(std::mt19937_64& rng, int width) {
  std::uniform_int_distribution<int> nw(1, width);
  int n_w = nw(rng);
  std::uniform_int_distribution<int> n0(0, width - n_w);
  int n_0 = n0(rng);
  return Layout{n_w, n_0, width - n_w - n_0};
}

inline StoqVerifier random_verifier(std::mt19937_64& rng, int width, int gates,
                                    Basis basis = Basis::Hadamard) {
  StoqVerifier v;
  v.circuit = random_circuit(rng, width, gates);
  v.layout = random_layout(rng, width);
  std::uniform_int_distribution<int> outw(1, width);
  v.out = outw(rng);
  v.basis = basis;
  return v;
}

inline NonNegState random_witness(std::mt19937_64& rng, int n_w) {
  std::uint64_t dim = std::uint64_t{1} << n_w;
  std::uniform_int_distribution<std::uint64_t> size(1, dim);
  std::uint64_t support = size(rng);
  std::vector<BitString> keys(dim);
  for (std::uint64_t i = 0; i < dim; ++i) keys[i] = i;
  std::shuffle(keys.begin(), keys.end(), rng);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  Entries e;
  double total = 0;
  for (std::uint64_t i = 0; i < support; ++i) {
    double m = mass(rng);
    e.push_back({keys[i], m});
    total += m;
  }
  for (auto& x : e) x.mass /= total;
  NonNegState s;
  s.width = n_w;
  s.entries = normalize_entries(std::move(e));
  s.normalized = true;
  return s;
}

// ---- dense reference implementations ----

// Dense amplitude vector of |w> (x) |0^{n_0}> (x) |+^{n_+}>.
inline std::vector<double> dense_input(const Layout& l, const NonNegState& w) {
  std::uint64_t dim = std::uint64_t{1} << l.width();
  std::vector<double> psi(dim, 0.0);
  double plus_amp = std::pow(0.5, l.n_plus / 2.0);
  for (const auto& e : w.entries) {
    double amp = std::sqrt(e.mass) * plus_amp;
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << l.n_plus); ++r)
      psi[(e.key << (l.n_0 + l.n_plus)) | r] = amp;
  }
  return psi;
}

inline std::vector<double> dense_apply(const ReversibleCircuit& c,
                                       const std::vector<double>& psi) {
  std::vector<double> out(psi.size(), 0.0);
  for (std::uint64_t x = 0; x < psi.size(); ++x)
    if (psi[x] != 0) out[c.apply_perm(x)] += psi[x];
  return out;
}

inline double dense_inner(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Acceptance from the dense vector: Hadamard projects the output wire onto
// |+>, computational onto |0>.
inline double dense_accept(const StoqVerifier& v, const NonNegState& w) {
  std::vector<double> psi = dense_apply(v.circuit, dense_input(v.layout, w));
  int width = v.circuit.width;
  double p = 0;
  if (v.basis == Basis::Computational) {
    for (std::uint64_t x = 0; x < psi.size(); ++x)
      if (!get_wire(x, width, v.out)) p += psi[x] * psi[x];
    return p;
  }
  for (std::uint64_t x = 0; x < psi.size(); ++x) {
    if (get_wire(x, width, v.out)) continue;
    double s = psi[x] + psi[flip_wire(x, width, v.out)];
    p += 0.5 * s * s;
  }
  return p;
}

// Exact output distribution D over all 2^n strings.
inline std::vector<double> dense_output_distribution(const StoqVerifier& v,
                                                     const NonNegState& w) {
  std::vector<double> psi = dense_apply(v.circuit, dense_input(v.layout, w));
  for (auto& x : psi) x *= x;
  return psi;
}

// <psi| O (x) I |psi> for a dense local observable O on wires 1..k.
inline double dense_local_expectation(const std::vector<double>& psi, int width, int k,
                                      const std::vector<double>& obs) {
  int rest = width - k;
  std::uint64_t rdim = std::uint64_t{1} << rest;
  int dim = 1 << k;
  double acc = 0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      double o = obs[static_cast<size_t>(a) * dim + b];
      if (o == 0) continue;
      for (std::uint64_t r = 0; r < rdim; ++r)
        acc += o * psi[(static_cast<std::uint64_t>(a) << rest) | r] *
               psi[(static_cast<std::uint64_t>(b) << rest) | r];
    }
  return acc;
}

inline SetCSPInstance random_setcsp(std::mt19937_64& rng, int n, int max_k, int m) {
  SetCSPInstance inst;
  inst.n = n;
  std::uniform_int_distribution<int> arity(1, std::min(max_k, n));
  for (int i = 0; i < m; ++i) {
    SetConstraint c;
    int k = arity(rng);
    std::vector<int> vars(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) vars[static_cast<size_t>(j)] = j + 1;
    std::shuffle(vars.begin(), vars.end(), rng);
    c.support.assign(vars.begin(), vars.begin() + k);
    int dim = 1 << k;
    std::vector<BitString> pool(static_cast<size_t>(dim));
    for (int x = 0; x < dim; ++x) pool[static_cast<size_t>(x)] = static_cast<BitString>(x);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::uniform_int_distribution<int> covered_dist(1, dim);
    int covered = covered_dist(rng);
    size_t at = 0;
    while (at < static_cast<size_t>(covered)) {
      std::uniform_int_distribution<int> gsize(1, covered - static_cast<int>(at));
      int g = gsize(rng);
      c.groups.emplace_back(pool.begin() + static_cast<long>(at),
                            pool.begin() + static_cast<long>(at) + g);
      at += static_cast<size_t>(g);
    }
    inst.constraints.push_back(std::move(c));
  }
  return inst;
}

inline std::vector<std::vector<BitString>> all_nonempty_subsets(int n) {
  std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<std::vector<BitString>> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << dim); ++mask) {
    std::vector<BitString> s;
    for (std::uint64_t x = 0; x < dim; ++x)
      if ((mask >> x) & 1) s.push_back(x);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace testutil
