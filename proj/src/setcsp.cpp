#include "stoqlab/setcsp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stoqlab {

void SetConstraint::validate(int n) const {
  int k = arity();
  if (k < 1) throw CircuitError("constraint needs at least one variable");
  if (k > 20) throw CircuitError("constraint arity too large");
  std::set<int> seen;
  for (int v : support) {
    if (v < 1 || v > n) throw CircuitError("constraint variable out of range");
    if (!seen.insert(v).second) throw CircuitError("constraint variables must be distinct");
  }
  if (groups.empty()) throw CircuitError("constraint needs at least one group");
  std::set<BitString> used;
  for (const auto& g : groups) {
    if (g.empty()) throw CircuitError("constraint group must be non-empty");
    for (BitString x : g) {
      if (x >> k) throw CircuitError("group string exceeds constraint arity");
      if (!used.insert(x).second) throw CircuitError("constraint groups must be disjoint");
    }
  }
}

void SetCSPInstance::validate() const {
  if (n < 1 || n > 24) throw CircuitError("variable count out of range");
  if (constraints.empty()) throw CircuitError("instance needs at least one constraint");
  if (!(eps1 <= eps2)) throw CircuitError("thresholds must satisfy eps1 <= eps2");
  for (const auto& c : constraints) c.validate(n);
}

BitString restrict_to(BitString s, int n, const std::vector<int>& support) {
  int k = static_cast<int>(support.size());
  BitString local = 0;
  for (int j = 1; j <= k; ++j)
    local = set_wire(local, k, j, get_wire(s, n, support[static_cast<size_t>(j - 1)]));
  return local;
}

BitString replace_at(BitString s, int n, const std::vector<int>& support, BitString local) {
  int k = static_cast<int>(support.size());
  for (int j = 1; j <= k; ++j)
    s = set_wire(s, n, support[static_cast<size_t>(j - 1)], get_wire(local, k, j));
  return s;
}

namespace {

// group index containing `local`, or -1 if bad
int group_of(const SetConstraint& c, BitString local) {
  for (size_t j = 0; j < c.groups.size(); ++j)
    for (BitString x : c.groups[j])
      if (x == local) return static_cast<int>(j);
  return -1;
}

}  // namespace

std::pair<std::vector<BitString>, std::vector<BitString>> good_bad_strings(
    const SetConstraint& c, const std::vector<BitString>& S, int n) {
  std::vector<BitString> good, bad;
  for (BitString s : S)
    (group_of(c, restrict_to(s, n, c.support)) >= 0 ? good : bad).push_back(s);
  std::sort(good.begin(), good.end());
  std::sort(bad.begin(), bad.end());
  return {std::move(good), std::move(bad)};
}

double frustration(const SetConstraint& c, const std::vector<BitString>& S, int n) {
  if (S.empty()) throw std::invalid_argument("frustration of an empty subset");
  std::uint64_t bad = 0;
  // rest-pattern -> per-group count |T_{j,rest}|
  std::map<BitString, std::vector<std::uint64_t>> t_counts;
  for (BitString s : S) {
    int j = group_of(c, restrict_to(s, n, c.support));
    if (j < 0) {
      ++bad;
      continue;
    }
    BitString rest = replace_at(s, n, c.support, 0);
    auto& v = t_counts[rest];
    if (v.empty()) v.assign(c.groups.size(), 0);
    ++v[static_cast<size_t>(j)];
  }
  double longing = 0;
  for (const auto& [rest, v] : t_counts)
    for (size_t j = 0; j < v.size(); ++j) {
      double t = static_cast<double>(v[j]);
      double g = static_cast<double>(c.groups[j].size());
      longing += t - t * t / g;
    }
  return (static_cast<double>(bad) + longing) / static_cast<double>(S.size());
}

double frustration_matrix(const SetConstraint& c, const std::vector<BitString>& S, int n) {
  if (S.empty()) throw std::invalid_argument("frustration of an empty subset");
  std::vector<double> m = local_matrix(c);
  int k = c.arity();
  int dim = 1 << k;
  std::unordered_set<BitString> in_s(S.begin(), S.end());
  double quad = 0;
  for (BitString s : S) {
    BitString y = restrict_to(s, n, c.support);
    for (BitString x = 0; x < static_cast<BitString>(dim); ++x) {
      double mxy = m[static_cast<size_t>(x) * dim + y];
      if (mxy == 0) continue;
      if (in_s.count(replace_at(s, n, c.support, x))) quad += mxy;
    }
  }
  return 1.0 - quad / static_cast<double>(S.size());
}

std::vector<std::uint64_t> longing_counts_experimental(const SetConstraint& c,
                                                       const std::vector<BitString>& S, int n) {
  std::unordered_set<BitString> in_s(S.begin(), S.end());
  std::vector<std::uint64_t> counts(c.groups.size(), 0);
  for (BitString s : S) {
    int j = group_of(c, restrict_to(s, n, c.support));
    if (j < 0) continue;
    for (BitString y : c.groups[static_cast<size_t>(j)]) {
      if (!in_s.count(replace_at(s, n, c.support, y))) {
        ++counts[static_cast<size_t>(j)];
        break;
      }
    }
  }
  return counts;
}

double total_frustration(const SetCSPInstance& inst, const std::vector<BitString>& S) {
  inst.validate();
  double sum = 0;
  for (const auto& c : inst.constraints) sum += frustration(c, S, inst.n);
  return sum / static_cast<double>(inst.constraints.size());
}

std::vector<double> local_matrix(const SetConstraint& c) {
  int dim = 1 << c.arity();
  std::vector<double> m(static_cast<size_t>(dim) * dim, 0.0);
  for (const auto& g : c.groups) {
    double w = 1.0 / static_cast<double>(g.size());
    for (BitString x : g)
      for (BitString y : g) m[static_cast<size_t>(x) * dim + y] = w;
  }
  return m;
}

namespace {

std::vector<BitString> subset_from_mask(std::uint64_t mask) {
  std::vector<BitString> s;
  for (int x = 0; mask; ++x, mask >>= 1)
    if (mask & 1) s.push_back(static_cast<BitString>(x));
  return s;
}

MinFrustration greedy_min_frustration(const SetCSPInstance& inst) {
  int n = inst.n;
  std::uint64_t dim = std::uint64_t{1} << n;
  SubsetSpec good = easy_witness(inst);
  std::set<BitString> s;
  for (BitString x = 0; x < dim; ++x)
    if (good.member(x)) s.insert(x);
  if (s.empty()) s.insert(0);
  auto value = [&](const std::set<BitString>& cur) {
    std::vector<BitString> v(cur.begin(), cur.end());
    return total_frustration(inst, v);
  };
  double best = value(s);
  bool improved = true;
  while (improved) {
    improved = false;
    for (BitString x = 0; x < dim; ++x) {
      std::set<BitString> trial = s;
      if (trial.count(x)) {
        if (trial.size() == 1) continue;
        trial.erase(x);
      } else {
        trial.insert(x);
      }
      double v = value(trial);
      if (v < best - 1e-15) {
        best = v;
        s = std::move(trial);
        improved = true;
      }
    }
  }
  MinFrustration r;
  r.value = best;
  r.subset.assign(s.begin(), s.end());
  r.heuristic = true;
  return r;
}

}  // namespace

MinFrustration min_frustration_serial(const SetCSPInstance& inst,
                                      const MinFrustrationOptions& opts) {
  inst.validate();
  if (inst.n > opts.exhaustive_cap || inst.n > 5) {
    if (!opts.allow_heuristic)
      throw CapExceeded("exhaustive subset search capped at n = " +
                        std::to_string(opts.exhaustive_cap) + "; enable the heuristic");
    return greedy_min_frustration(inst);
  }
  std::uint64_t masks = std::uint64_t{1} << (std::uint64_t{1} << inst.n);
  MinFrustration best;
  best.value = 2.0;
  for (std::uint64_t mask = 1; mask < masks; ++mask) {
    std::vector<BitString> s = subset_from_mask(mask);
    double v = total_frustration(inst, s);
    if (v < best.value) {
      best.value = v;
      best.subset = std::move(s);
    }
  }
  return best;
}

MinFrustration min_frustration(const SetCSPInstance& inst, const MinFrustrationOptions& opts) {
  if (opts.jobs == 1) return min_frustration_serial(inst, opts);
  inst.validate();
  if (inst.n > opts.exhaustive_cap || inst.n > 5) {
    if (!opts.allow_heuristic)
      throw CapExceeded("exhaustive subset search capped at n = " +
                        std::to_string(opts.exhaustive_cap) + "; enable the heuristic");
    return greedy_min_frustration(inst);
  }
  std::int64_t masks = std::int64_t{1} << (std::int64_t{1} << inst.n);
  double best_value = 2.0;
  std::int64_t best_mask = 0;
#ifdef _OPENMP
#pragma omp parallel num_threads(opts.jobs > 0 ? opts.jobs : omp_get_max_threads())
  {
    double lvalue = 2.0;
    std::int64_t lmask = 0;
#pragma omp for schedule(static) nowait
    for (std::int64_t mask = 1; mask < masks; ++mask) {
      std::vector<BitString> s = subset_from_mask(static_cast<std::uint64_t>(mask));
      double v = total_frustration(inst, s);
      if (v < lvalue || (v == lvalue && mask < lmask)) {
        lvalue = v;
        lmask = mask;
      }
    }
#pragma omp critical
    {
      // tie-break on the smallest mask so results match the serial scan
      if (lvalue < best_value || (lvalue == best_value && lmask < best_mask)) {
        best_value = lvalue;
        best_mask = lmask;
      }
    }
  }
#else
  for (std::int64_t mask = 1; mask < masks; ++mask) {
    std::vector<BitString> s = subset_from_mask(static_cast<std::uint64_t>(mask));
    double v = total_frustration(inst, s);
    if (v < best_value) {
      best_value = v;
      best_mask = mask;
    }
  }
#endif
  MinFrustration best;
  best.value = best_value;
  best.subset = subset_from_mask(static_cast<std::uint64_t>(best_mask));
  return best;
}

SubsetSpec easy_witness(const SetCSPInstance& inst) {
  inst.validate();
  SetCSPInstance copy = inst;
  SubsetSpec spec;
  spec.width = inst.n;
  spec.member = [copy](BitString s) {
    for (const auto& c : copy.constraints)
      if (group_of(c, restrict_to(s, copy.n, c.support)) < 0) return false;
    return true;
  };
  return spec;
}

namespace {

// [all src wires read 0] -> flag wire, via X conjugation and a Toffoli
// ladder into the given scratch wires (src.size()-1 of them, left as junk).
// Returns 0 when src is empty (the condition is vacuously true).
int emit_zero_flag(ReversibleCircuit& c, const std::vector<int>& src,
                   const std::vector<int>& ladder) {
  if (src.empty()) return 0;
  for (int w : src) c.append(make_x(w));
  if (src.size() == 1) return src[0];
  c.append(make_toffoli(src[0], src[1], ladder.at(0)));
  for (size_t i = 2; i < src.size(); ++i)
    c.append(make_toffoli(ladder.at(i - 2), src[i], ladder.at(i - 1)));
  return ladder.at(src.size() - 2);
}

// Swap contents of a and b, controlled on `flag` (0 means unconditional).
void emit_swap(ReversibleCircuit& c, int flag, int a, int b) {
  if (flag == 0) {
    c.append(make_cnot(a, b));
    c.append(make_cnot(b, a));
    c.append(make_cnot(a, b));
  } else {
    c.append(make_toffoli(flag, a, b));
    c.append(make_toffoli(flag, b, a));
    c.append(make_toffoli(flag, a, b));
  }
}

// Maps |y> -> |0^k> and |x> -> |10^{k-1}> on the given wires (x != y).
void emit_pair_mapper(ReversibleCircuit& c, const std::vector<int>& wires, BitString x,
                      BitString y) {
  int k = static_cast<int>(wires.size());
  BitString d = x ^ y;
  int pivot = 0;
  for (int j = 1; j <= k; ++j)
    if (get_wire(d, k, j)) {
      pivot = j;
      break;
    }
  for (int j = 1; j <= k; ++j)
    if (get_wire(y, k, j)) c.append(make_x(wires[static_cast<size_t>(j - 1)]));
  for (int j = 1; j <= k; ++j)
    if (j != pivot && get_wire(d, k, j))
      c.append(make_cnot(wires[static_cast<size_t>(pivot - 1)], wires[static_cast<size_t>(j - 1)]));
  if (pivot != 1)
    emit_swap(c, 0, wires[0], wires[static_cast<size_t>(pivot - 1)]);
}

// Maps |x> -> |0^k> on the given wires.
void emit_point_mapper(ReversibleCircuit& c, const std::vector<int>& wires, BitString x) {
  int k = static_cast<int>(wires.size());
  for (int j = 1; j <= k; ++j)
    if (get_wire(x, k, j)) c.append(make_x(wires[static_cast<size_t>(j - 1)]));
}

}  // namespace

GadgetCircuit z_to_x_gadget(int k) {
  if (k < 1) throw std::invalid_argument("gadget arity must be >= 1");
  GadgetCircuit g;
  g.psi_wires = k;
  g.n0_added = k;
  g.nplus_added = 1;
  int width = 2 * k + 1;
  int target = 2 * k;
  int plus = 2 * k + 1;
  g.out = target;
  g.circuit = ReversibleCircuit(width);
  std::vector<int> src, ladder;
  for (int j = 1; j <= k; ++j) src.push_back(j);
  for (int j = k + 1; j <= 2 * k - 1; ++j) ladder.push_back(j);
  int flag = emit_zero_flag(g.circuit, src, ladder);
  emit_swap(g.circuit, flag, plus, target);
  return g;
}

GadgetCircuit x_project_gadget(int k) {
  if (k < 1) throw std::invalid_argument("gadget arity must be >= 1");
  GadgetCircuit g;
  g.psi_wires = k;
  g.n0_added = k - 1;
  g.nplus_added = 0;
  int width = 2 * k - 1;
  g.circuit = ReversibleCircuit(std::max(width, k));
  if (k == 1) {
    g.out = 1;  // the observable is X on the psi wire itself
    return g;
  }
  int target = 2 * k - 1;
  g.out = target;
  std::vector<int> src, ladder;
  for (int j = 2; j <= k; ++j) src.push_back(j);
  for (int j = k + 1; j <= 2 * k - 2; ++j) ladder.push_back(j);
  int flag = emit_zero_flag(g.circuit, src, ladder);
  emit_swap(g.circuit, flag, 1, target);
  return g;
}

namespace {

struct Frac {
  long long num = 0;
  long long den = 1;

  static Frac of(long long n, long long d) {
    long long g = std::gcd(n, d);
    return Frac{n / g, d / g};
  }
};

enum class BranchKind { PointProjector, PairProjector, PairX };

struct Branch {
  BranchKind kind;
  size_t constraint;
  BitString x = 0, y = 0;
  Frac weight;
};

long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

}  // namespace

CompiledVerifier compile_to_stoqma(const SetCSPInstance& inst) {
  inst.validate();
  const long long m = static_cast<long long>(inst.constraints.size());

  // Branch decomposition of the mean local matrix. Singleton groups give one
  // projector branch; two-string groups split the rank-1 group block exactly
  // into a pair subspace projector and a conjugated X (weights summing to the
  // group's full share); larger groups fall back to one projector per string
  // plus one conjugated X per unordered pair.
  std::vector<Branch> branches;
  for (size_t ci = 0; ci < inst.constraints.size(); ++ci) {
    const auto& c = inst.constraints[ci];
    for (const auto& g : c.groups) {
      long long gs = static_cast<long long>(g.size());
      if (gs == 1) {
        branches.push_back({BranchKind::PointProjector, ci, g[0], g[0], Frac::of(1, m)});
      } else if (gs == 2) {
        branches.push_back({BranchKind::PairProjector, ci, g[0], g[1], Frac::of(1, 2 * m)});
        branches.push_back({BranchKind::PairX, ci, g[0], g[1], Frac::of(1, 2 * m)});
      } else {
        for (BitString x : g)
          branches.push_back({BranchKind::PointProjector, ci, x, x, Frac::of(1, m * gs)});
        for (size_t i = 0; i < g.size(); ++i)
          for (size_t j = i + 1; j < g.size(); ++j)
            branches.push_back({BranchKind::PairX, ci, g[i], g[j], Frac::of(1, m * gs)});
      }
    }
  }

  long long d = 1;
  for (const auto& b : branches) d = lcm_ll(d, b.weight.den);
  std::vector<long long> copies;
  long long total = 0;
  for (const auto& b : branches) {
    long long c = b.weight.num * (d / b.weight.den);
    copies.push_back(c);
    total += c;
  }
  int n_sel = 0;
  while ((std::int64_t{1} << n_sel) < total) ++n_sel;
  if (n_sel > 24) throw CapExceeded("selection register exceeds 24 wires");

  int max_k = 0;
  for (const auto& c : inst.constraints) max_k = std::max(max_k, c.arity());
  int branch_ladder = std::max(0, max_k - 1);
  int dispatch_ladder = n_sel >= 2 ? n_sel - 1 : 0;

  const int n = inst.n;
  const int lad0 = n + 1;                              // branch flag scratch
  const int dlad0 = lad0 + branch_ladder;              // dispatch scratch
  const int out_wire = dlad0 + dispatch_ladder;        // shared output target
  const int plus_wire = out_wire + 1;                  // the |+> source
  const int sel0 = plus_wire + 1;                      // selection register
  const int width = sel0 + n_sel - 1;

  std::vector<int> branch_lads, dispatch_lads, sels;
  for (int j = 0; j < branch_ladder; ++j) branch_lads.push_back(lad0 + j);
  for (int j = 0; j < dispatch_ladder; ++j) dispatch_lads.push_back(dlad0 + j);
  for (int j = 0; j < n_sel; ++j) sels.push_back(sel0 + j);

  auto build_branch_ops = [&](const Branch& b) {
    ReversibleCircuit ops(width);
    const auto& c = inst.constraints[b.constraint];
    const std::vector<int>& wires = c.support;
    switch (b.kind) {
      case BranchKind::PointProjector: {
        emit_point_mapper(ops, wires, b.x);
        int flag = emit_zero_flag(ops, wires, branch_lads);
        emit_swap(ops, flag, plus_wire, out_wire);
        break;
      }
      case BranchKind::PairProjector: {
        emit_pair_mapper(ops, wires, b.x, b.y);
        std::vector<int> rest(wires.begin() + 1, wires.end());
        int flag = emit_zero_flag(ops, rest, branch_lads);
        emit_swap(ops, flag, plus_wire, out_wire);
        break;
      }
      case BranchKind::PairX: {
        emit_pair_mapper(ops, wires, b.x, b.y);
        std::vector<int> rest(wires.begin() + 1, wires.end());
        int flag = emit_zero_flag(ops, rest, branch_lads);
        emit_swap(ops, flag, wires[0], out_wire);
        break;
      }
    }
    return ops;
  };

  StoqVerifier v;
  v.circuit = ReversibleCircuit(width);

  // One dispatch per occupied selection value; selection values left over
  // carry no circuit and accept with probability exactly 1/2.
  std::int64_t value = 0;
  for (size_t bi = 0; bi < branches.size(); ++bi) {
    ReversibleCircuit ops = build_branch_ops(branches[bi]);
    for (long long rep = 0; rep < copies[bi]; ++rep, ++value) {
      if (n_sel == 0) {
        for (const auto& e : ops.elements) v.circuit.append(e);
        continue;
      }
      std::vector<int> conj;  // selection wires that must be X-conjugated
      for (int j = 0; j < n_sel; ++j)
        if (!((value >> (n_sel - 1 - j)) & 1)) conj.push_back(sels[static_cast<size_t>(j)]);
      for (int w : conj) v.circuit.append(make_x(w));
      int ctrl;
      std::vector<CircuitElement> ladder_ops;
      if (n_sel == 1) {
        ctrl = sels[0];
      } else {
        ReversibleCircuit lad(width);
        lad.append(make_toffoli(sels[0], sels[1], dispatch_lads.at(0)));
        for (int j = 2; j < n_sel; ++j)
          lad.append(make_toffoli(dispatch_lads.at(static_cast<size_t>(j - 2)),
                                  sels[static_cast<size_t>(j)],
                                  dispatch_lads.at(static_cast<size_t>(j - 1))));
        ladder_ops = lad.elements;
        ctrl = dispatch_lads.at(static_cast<size_t>(n_sel - 2));
      }
      for (const auto& e : ladder_ops) v.circuit.append(e);
      // remap branch ops into the (width-1)-wire space that excludes ctrl
      // (branch ops are plain gates and never touch dispatch wires)
      WireMap skip;
      for (int w = 1; w <= width; ++w)
        if (w != ctrl) skip.to_outer.push_back(w);
      ReversibleCircuit inner(width - 1);
      auto renum = [&](int w) { return w < ctrl ? w : w - 1; };
      for (const auto& e : ops.elements) {
        Gate g = std::get<Gate>(e);
        for (int t = 0; t < g.arity(); ++t)
          g.wires[static_cast<size_t>(t)] = renum(g.wires[static_cast<size_t>(t)]);
        inner.append(g);
      }
      v.circuit.append(ControlledBlock{ctrl, skip,
                                       std::make_shared<const ReversibleCircuit>(std::move(inner))});
      for (auto it = ladder_ops.rbegin(); it != ladder_ops.rend(); ++it) v.circuit.append(*it);
      for (int w : conj) v.circuit.append(make_x(w));
    }
  }

  v.layout = Layout{n, branch_ladder + dispatch_ladder + 1, 1 + n_sel};
  v.out = out_wire;
  v.basis = Basis::Hadamard;

  CompiledVerifier cv;
  cv.verifier = std::move(v);
  cv.n_sel = n_sel;
  cv.branch_values = static_cast<std::uint64_t>(total);
  cv.pad_values = (std::uint64_t{1} << n_sel) - static_cast<std::uint64_t>(total);
  cv.c1 = std::ldexp(static_cast<double>(d), -n_sel);
  cv.c0 = 0.5 * (1.0 - cv.c1);
  return cv;
}

SetCSPInstance parse_setcsp(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int no = 0;
  SetCSPInstance inst;
  bool have_vars = false;
  while (std::getline(in, raw)) {
    ++no;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    std::istringstream ls(raw);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "vars") {
      if (!(ls >> inst.n)) throw ParseError(no, "expected 'vars N'");
      have_vars = true;
    } else if (tok == "eps1") {
      if (!(ls >> inst.eps1)) throw ParseError(no, "expected 'eps1 X'");
    } else if (tok == "eps2") {
      if (!(ls >> inst.eps2)) throw ParseError(no, "expected 'eps2 X'");
    } else if (tok == "constraint") {
      std::string rest, piece;
      while (ls >> piece) rest += piece;
      auto jpos = rest.find("J=");
      auto gpos = rest.find("groups=[");
      if (jpos != 0 || gpos == std::string::npos || rest.back() != ']')
        throw ParseError(no, "expected 'constraint J=i1,i2,... groups=[{..},{..}]'");
      SetConstraint c;
      {
        std::string jlist = rest.substr(2, gpos - 2);
        std::istringstream js(jlist);
        std::string item;
        while (std::getline(js, item, ','))
          if (!item.empty()) c.support.push_back(std::stoi(item));
      }
      int k = c.arity();
      std::string body = rest.substr(gpos + 8, rest.size() - gpos - 9);
      size_t i = 0;
      while (i < body.size()) {
        if (body[i] == ',') {
          ++i;
          continue;
        }
        if (body[i] != '{') throw ParseError(no, "expected '{' in groups");
        auto close = body.find('}', i);
        if (close == std::string::npos) throw ParseError(no, "missing '}' in groups");
        std::vector<BitString> group;
        std::istringstream gs(body.substr(i + 1, close - i - 1));
        std::string item;
        while (std::getline(gs, item, ',')) {
          if (item.empty()) continue;
          if (static_cast<int>(item.size()) != k)
            throw ParseError(no, "group string length must equal the constraint arity");
          try {
            group.push_back(parse_bits(item));
          } catch (const std::exception& e) {
            throw ParseError(no, e.what());
          }
        }
        if (group.empty()) throw ParseError(no, "empty group");
        c.groups.push_back(std::move(group));
        i = close + 1;
      }
      inst.constraints.push_back(std::move(c));
    } else {
      throw ParseError(no, "unrecognized statement '" + tok + "'");
    }
  }
  if (!have_vars) throw ParseError(no ? no : 1, "missing 'vars N' header");
  try {
    inst.validate();
  } catch (const CircuitError& e) {
    throw ParseError(no, e.what());
  }
  return inst;
}

std::string serialize_setcsp(const SetCSPInstance& inst) {
  std::ostringstream os;
  os << "vars " << inst.n << "\n";
  os.precision(17);
  if (inst.eps1 != 0.0) os << "eps1 " << inst.eps1 << "\n";
  if (inst.eps2 != 1.0) os << "eps2 " << inst.eps2 << "\n";
  for (const auto& c : inst.constraints) {
    os << "constraint J=";
    for (size_t i = 0; i < c.support.size(); ++i)
      os << (i ? "," : "") << c.support[i];
    os << " groups=[";
    for (size_t j = 0; j < c.groups.size(); ++j) {
      os << (j ? ",{" : "{");
      for (size_t i = 0; i < c.groups[j].size(); ++i)
        os << (i ? "," : "") << render_bits(c.groups[j][i], c.arity());
      os << "}";
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace stoqlab
