#include "stoqlab/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stoqlab {

void RCDInstance::validate() const {
  if (c0.width != c1.width) throw CircuitError("RCD circuits have different widths");
  layout.validate(c0.width);
  if (!(alpha >= 0.0 && alpha < beta && beta <= 2.0))
    throw CircuitError("RCD thresholds must satisfy 0 <= alpha < beta <= 2");
}

RCDInstance rcd_from_verifier(const StoqVerifier& v, double alpha, double beta) {
  v.validate();
  if (v.basis != Basis::Hadamard) throw CircuitError("rcd_from_verifier needs Hadamard basis");
  RCDInstance inst;
  inst.c0 = conjugated_x(v);
  inst.c1 = ReversibleCircuit(v.circuit.width);
  inst.layout = v.layout;
  inst.alpha = alpha;
  inst.beta = beta;
  inst.validate();
  return inst;
}

StoqVerifier rcd_verifier(const RCDInstance& inst) {
  inst.validate();
  int n = inst.c0.width;
  int ctrl = n + 1;
  StoqVerifier v;
  v.circuit = ReversibleCircuit(ctrl);
  WireMap id = WireMap::identity(n);
  v.circuit.append(controlled(inst.c0, id, ctrl));
  v.circuit.append(make_x(ctrl));
  v.circuit.append(controlled(inst.c1, id, ctrl));
  v.layout = Layout{inst.layout.n_w, inst.layout.n_0, inst.layout.n_plus + 1};
  v.out = ctrl;
  v.basis = Basis::Hadamard;
  return v;
}

double rcd_distance(const RCDInstance& inst, const NonNegState& w, const SimLimits& limits) {
  inst.validate();
  NonNegState in = input_state(inst.layout, w, limits);
  auto apply = [&](const ReversibleCircuit& c) {
    Entries e;
    e.reserve(in.entries.size());
    for (const auto& x : in.entries) e.push_back({c.apply_perm(x.key), x.mass});
    NonNegState s;
    s.width = in.width;
    s.entries = normalize_entries(std::move(e));
    return s;
  };
  NonNegState r0 = apply(inst.c0);
  NonNegState r1 = apply(inst.c1);
  double d = 1.0 - inner(r0, r1);
  return d < 0 ? 0.0 : d;
}

double rcd_extremal_distance(const RCDInstance& inst, EigenMethod method) {
  MaxAccept best = max_accept(rcd_verifier(inst), method);
  return 4.0 * (1.0 - best.prob);
}

StoqVerifier and_repetition(const StoqVerifier& v, int r, const SimLimits& limits) {
  v.validate();
  if (v.basis != Basis::Hadamard) throw CircuitError("and_repetition needs Hadamard basis");
  if (r < 1) throw CircuitError("repetition count must be >= 1");
  const Layout& l = v.layout;
  int n = l.width();
  long width_l = static_cast<long>(r) * n + 1;
  if (width_l > 62 ||
      (std::uint64_t{1} << (static_cast<unsigned>(r) * l.n_plus + 1)) > limits.max_entries)
    throw CapExceeded("repeated verifier exceeds configured width/support caps");
  int width = static_cast<int>(width_l);
  int ctrl = width;
  ReversibleCircuit conj = conjugated_x(v);
  StoqVerifier rep;
  rep.circuit = ReversibleCircuit(width);
  for (int i = 0; i < r; ++i) {
    WireMap map;
    map.to_outer.resize(static_cast<size_t>(n));
    for (int j = 1; j <= l.n_w; ++j)
      map.to_outer[static_cast<size_t>(j - 1)] = i * l.n_w + j;
    for (int j = 1; j <= l.n_0; ++j)
      map.to_outer[static_cast<size_t>(l.n_w + j - 1)] = r * l.n_w + i * l.n_0 + j;
    for (int j = 1; j <= l.n_plus; ++j)
      map.to_outer[static_cast<size_t>(l.n_w + l.n_0 + j - 1)] =
          r * (l.n_w + l.n_0) + i * l.n_plus + j;
    rep.circuit.append(controlled(conj, map, ctrl));
  }
  rep.layout = Layout{r * l.n_w, r * l.n_0, r * l.n_plus + 1};
  rep.out = ctrl;
  rep.basis = Basis::Hadamard;
  return rep;
}

AmplifyReport soundness_amplify_check(const StoqVerifier& v, int r) {
  AmplifyReport rep;
  rep.lambda_base = dense_lambda_max(verifier_matrix(v));
  rep.lambda_repeated = dense_lambda_max(verifier_matrix(and_repetition(v, r)));
  rep.lambda_power = std::pow(rep.lambda_base, r);
  double denom = std::max(std::abs(rep.lambda_power), 1e-300);
  rep.rel_error = std::abs(rep.lambda_repeated - rep.lambda_power) / denom;
  return rep;
}

int min_conjunction_rounds(double s, int n) {
  if (!(s >= 0.5 && s < 1.0)) throw std::invalid_argument("need 1/2 <= s < 1");
  if (n < 1) throw std::invalid_argument("need n >= 1");
  if (s == 0.5) return 1;  // (2s-1)^r = 0 for any r
  double l = std::log2(1.0 / (2.0 * s - 1.0));
  return static_cast<int>(std::ceil((n + 1) / l - 1e-12));
}

MAPredicateVerifier cstoqma_to_ma(const StoqVerifier& v, BitString s) {
  v.validate();
  if (v.basis != Basis::Hadamard) throw CircuitError("cstoqma_to_ma needs Hadamard basis");
  if (v.layout.n_w < 62 && (s >> v.layout.n_w))
    throw CircuitError("classical witness exceeds the witness register");
  MAPredicateVerifier mv;
  mv.circuit = conjugated_x(v);
  mv.layout = v.layout;
  mv.expected = s;
  return mv;
}

double ma_predicate_accept(const MAPredicateVerifier& mv) {
  const Layout& l = mv.layout;
  if (l.n_plus > 24) throw CapExceeded("|+> enumeration capped at n_+ = 24");
  std::uint64_t plus = std::uint64_t{1} << l.n_plus;
  double unit = std::ldexp(1.0, -l.n_plus);
  double p = 0;
  BitString zero_mask = ((BitString{1} << l.n_0) - 1) << l.n_plus;
  for (std::uint64_t r = 0; r < plus; ++r) {
    BitString in = (mv.expected << (l.n_0 + l.n_plus)) | r;
    BitString out = mv.circuit.apply_perm(in);
    bool witness_ok = (out >> (l.n_0 + l.n_plus)) == mv.expected;
    bool zeros_ok = (out & zero_mask) == 0;
    if (witness_ok && zeros_ok) p += unit;
  }
  return p;
}

namespace {

BitString rcd_input(const Layout& l, BitString s, BitString r) {
  return (s << (l.n_0 + l.n_plus)) | r;
}

struct PairKey {
  BitString s, r;
  bool operator<(const PairKey& o) const { return s != o.s ? s < o.s : r < o.r; }
};

// Image index for C1: image string -> smallest (s1, r1) producing it.
std::unordered_map<BitString, PairKey> build_c1_index(const RCDInstance& inst,
                                                      const std::vector<BitString>& support) {
  std::unordered_map<BitString, PairKey> index;
  std::uint64_t plus = std::uint64_t{1} << inst.layout.n_plus;
  for (BitString s : support) {
    for (std::uint64_t r = 0; r < plus; ++r) {
      BitString img = inst.c1.apply_perm(rcd_input(inst.layout, s, r));
      PairKey k{s, r};
      auto [it, inserted] = index.emplace(img, k);
      if (!inserted && k < it->second) it->second = k;
    }
  }
  return index;
}

}  // namespace

std::optional<WitnessPair> exact_rcd_witness_search_serial(const RCDInstance& inst,
                                                           const std::vector<BitString>& support,
                                                           const SimLimits& limits) {
  inst.validate();
  std::uint64_t plus = std::uint64_t{1} << inst.layout.n_plus;
  if (support.size() * plus > limits.max_entries)
    throw CapExceeded("witness search budget exceeded");
  std::vector<BitString> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  auto index = build_c1_index(inst, sorted);
  for (BitString s0 : sorted) {
    for (std::uint64_t r0 = 0; r0 < plus; ++r0) {
      BitString img = inst.c0.apply_perm(rcd_input(inst.layout, s0, r0));
      auto it = index.find(img);
      if (it != index.end()) return WitnessPair{s0, r0, it->second.s, it->second.r};
    }
  }
  return std::nullopt;
}

std::optional<WitnessPair> exact_rcd_witness_search(const RCDInstance& inst,
                                                    const std::vector<BitString>& support,
                                                    int jobs, const SimLimits& limits) {
  if (jobs == 1) return exact_rcd_witness_search_serial(inst, support, limits);
  inst.validate();
  std::uint64_t plus = std::uint64_t{1} << inst.layout.n_plus;
  if (support.size() * plus > limits.max_entries)
    throw CapExceeded("witness search budget exceeded");
  std::vector<BitString> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  auto index = build_c1_index(inst, sorted);

  std::optional<WitnessPair> best;
  auto better = [](const WitnessPair& a, const WitnessPair& b) {
    if (a.s0 != b.s0) return a.s0 < b.s0;
    if (a.r0 != b.r0) return a.r0 < b.r0;
    if (a.s1 != b.s1) return a.s1 < b.s1;
    return a.r1 < b.r1;
  };
  std::int64_t count = static_cast<std::int64_t>(sorted.size());
#ifdef _OPENMP
#pragma omp parallel num_threads(jobs > 0 ? jobs : omp_get_max_threads())
  {
    std::optional<WitnessPair> local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < count; ++i) {
      BitString s0 = sorted[static_cast<size_t>(i)];
      for (std::uint64_t r0 = 0; r0 < plus; ++r0) {
        BitString img = inst.c0.apply_perm(rcd_input(inst.layout, s0, r0));
        auto it = index.find(img);
        if (it != index.end()) {
          WitnessPair cand{s0, r0, it->second.s, it->second.r};
          if (!local || better(cand, *local)) local = cand;
          break;  // (s0, r0) scanned in order: first hit per s0 is minimal
        }
      }
    }
#pragma omp critical
    {
      if (local && (!best || better(*local, *best))) best = local;
    }
  }
#else
  for (std::int64_t i = 0; i < count; ++i) {
    BitString s0 = sorted[static_cast<size_t>(i)];
    for (std::uint64_t r0 = 0; r0 < plus; ++r0) {
      BitString img = inst.c0.apply_perm(rcd_input(inst.layout, s0, r0));
      auto it = index.find(img);
      if (it != index.end()) {
        WitnessPair cand{s0, r0, it->second.s, it->second.r};
        if (!best || better(cand, *best)) best = cand;
        break;
      }
    }
  }
#endif
  return best;
}

bool verify_witness_pair(const RCDInstance& inst, const WitnessPair& p) {
  inst.validate();
  return inst.c0.apply_perm(rcd_input(inst.layout, p.s0, p.r0)) ==
         inst.c1.apply_perm(rcd_input(inst.layout, p.s1, p.r1));
}

NoRandomResult no_random_bits_decision(const ReversibleCircuit& c0, const ReversibleCircuit& c1,
                                       const Layout& layout) {
  if (layout.n_plus != 0) throw CircuitError("no_random_bits_decision requires n_+ = 0");
  layout.validate(c0.width);
  if (c0.width != c1.width) throw CircuitError("circuit width mismatch");
  if (layout.n_w > 24) throw CapExceeded("witness enumeration capped at n_w = 24");
  ReversibleCircuit c0_inv = inverse(c0);
  std::uint64_t dim = std::uint64_t{1} << layout.n_w;
  // pi := C0^dagger C1 restricted to the clean-|0>-block subcube.
  auto pi = [&](BitString s) -> std::optional<BitString> {
    BitString img = c0_inv.apply_perm(c1.apply_perm(rcd_input(layout, s, 0)));
    BitString zero_mask = (BitString{1} << layout.n_0) - 1;
    if ((img & zero_mask) != 0) return std::nullopt;
    return img >> layout.n_0;
  };
  NoRandomResult res;
  for (std::uint64_t s = 0; s < dim; ++s) {
    auto t = pi(static_cast<BitString>(s));
    if (!t) continue;
    if (*t == s) {
      res.distinguishable = true;
      res.si = res.sj = s;
      res.witness = basis_state(layout.n_w, s);
      return res;
    }
    if (*t > s) continue;  // mutual pairs are found from the larger side
    auto back = pi(*t);
    if (back && *back == s) {
      res.distinguishable = true;
      res.si = *t;
      res.sj = s;
      res.witness = subset_state(layout.n_w, {*t, static_cast<BitString>(s)});
      return res;
    }
  }
  return res;
}

RCDInstance parse_rcd_instance(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int no = 0;
  std::optional<Layout> layout;
  std::optional<double> alpha, beta;
  std::ostringstream block0, block1;
  bool seen_sep = false;
  while (std::getline(in, raw)) {
    ++no;
    std::string stripped = raw;
    if (auto pos = stripped.find('#'); pos != std::string::npos) stripped.erase(pos);
    std::istringstream ls(stripped);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "---") {
      if (seen_sep) throw ParseError(no, "more than one '---' separator");
      seen_sep = true;
    } else if (tok == "layout" && !seen_sep) {
      Layout l;
      if (!(ls >> l.n_w >> l.n_0 >> l.n_plus)) throw ParseError(no, "expected 'layout n_w n_0 n_plus'");
      layout = l;
    } else if (tok == "alpha" && !seen_sep) {
      double a;
      if (!(ls >> a)) throw ParseError(no, "expected 'alpha A'");
      alpha = a;
    } else if (tok == "beta" && !seen_sep) {
      double b;
      if (!(ls >> b)) throw ParseError(no, "expected 'beta B'");
      beta = b;
    } else {
      (seen_sep ? block1 : block0) << raw << "\n";
    }
  }
  if (!layout) throw ParseError(no ? no : 1, "missing 'layout' header");
  if (!seen_sep) throw ParseError(no ? no : 1, "missing '---' separator between circuits");
  RCDInstance inst;
  inst.c0 = parse_circuit(block0.str());
  inst.c1 = parse_circuit(block1.str());
  inst.layout = *layout;
  if (alpha) inst.alpha = *alpha;
  if (beta) inst.beta = *beta;
  try {
    inst.validate();
  } catch (const CircuitError& e) {
    throw ParseError(no, e.what());
  }
  return inst;
}

std::string serialize_rcd_instance(const RCDInstance& inst) {
  std::ostringstream os;
  os << "layout " << inst.layout.n_w << " " << inst.layout.n_0 << " " << inst.layout.n_plus
     << "\n";
  os.precision(17);
  os << "alpha " << inst.alpha << "\nbeta " << inst.beta << "\n"
     << serialize(inst.c0) << "---\n" << serialize(inst.c1);
  return os.str();
}

}  // namespace stoqlab
