#include "stoqlab/verifier.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stoqlab {

void Layout::validate(int circuit_width) const {
  if (n_w < 1) throw CircuitError("layout needs at least one witness wire");
  if (n_0 < 0 || n_plus < 0) throw CircuitError("negative ancilla count");
  if (width() > 62) throw CircuitError("layout wider than 62 wires");
  if (width() != circuit_width)
    throw CircuitError("layout does not cover circuit width: " + std::to_string(width()) +
                       " vs " + std::to_string(circuit_width));
}

void StoqVerifier::validate() const {
  layout.validate(circuit.width);
  if (out < 1 || out > circuit.width) throw CircuitError("output wire out of range");
}

namespace {

// Witness block occupies wires 1..n_w, the |0> block the next n_0 wires, the
// |+> block the last n_plus wires.
BitString assemble_input(const Layout& l, BitString witness, BitString plus_bits) {
  int n = l.width();
  return (witness << (n - l.n_w)) | plus_bits;
}

BitString witness_block(const Layout& l, BitString x) { return x >> (l.n_0 + l.n_plus); }

bool zero_block_clean(const Layout& l, BitString x) {
  BitString mask = ((BitString{1} << l.n_0) - 1) << l.n_plus;
  return (x & mask) == 0;
}

BitString plus_block(const Layout& l, BitString x) {
  return x & ((BitString{1} << l.n_plus) - 1);
}

}  // namespace

NonNegState input_state(const Layout& layout, const NonNegState& w, const SimLimits& limits) {
  if (w.width != layout.n_w) throw CircuitError("witness width does not match layout");
  std::uint64_t plus = std::uint64_t{1} << layout.n_plus;
  if (w.entries.size() * plus > limits.max_entries)
    throw CapExceeded("input state support " + std::to_string(w.entries.size() * plus) +
                      " exceeds cap " + std::to_string(limits.max_entries));
  double plus_mass = std::ldexp(1.0, -layout.n_plus);
  Entries e;
  e.reserve(w.entries.size() * plus);
  for (const auto& we : w.entries)
    for (std::uint64_t r = 0; r < plus; ++r)
      e.push_back({assemble_input(layout, we.key, r), we.mass * plus_mass});
  NonNegState s;
  s.width = layout.width();
  s.entries = normalize_entries(std::move(e));
  s.normalized = w.normalized;
  return s;
}

NonNegState output_state(const StoqVerifier& v, const NonNegState& w, const SimLimits& limits) {
  v.validate();
  NonNegState in = input_state(v.layout, w, limits);
  Entries e;
  e.reserve(in.entries.size());
  for (const auto& x : in.entries) e.push_back({v.circuit.apply_perm(x.key), x.mass});
  NonNegState s;
  s.width = in.width;
  s.entries = normalize_entries(std::move(e));
  s.normalized = in.normalized;
  return s;
}

double accept_prob(const StoqVerifier& v, const NonNegState& w, const SimLimits& limits) {
  NonNegState out = output_state(v, w, limits);
  auto [d0, d1] = split_by_wire(out, v.out);
  if (v.basis == Basis::Computational) return d0.total_mass();
  // Outcome |+>: 1/2 || |D0> + |D1> ||^2.
  double cross = 0;
  {
    size_t i = 0, j = 0;
    const auto& a = d0.entries;
    const auto& b = d1.entries;
    while (i < a.size() && j < b.size()) {
      if (a[i].key < b[j].key)
        ++i;
      else if (b[j].key < a[i].key)
        ++j;
      else {
        double x = a[i].mass, y = b[j].mass;
        cross += (x == y) ? x : std::sqrt(x * y);
        ++i;
        ++j;
      }
    }
  }
  return 0.5 * (d0.total_mass() + d1.total_mass()) + cross;
}

ReversibleCircuit conjugated_x(const StoqVerifier& v) {
  ReversibleCircuit mid(v.circuit.width);
  mid.append(make_x(v.out));
  return compose(compose(v.circuit, mid), inverse(v.circuit));
}

namespace {

// Accumulates one column of M: for each |+>-block value r', push the input
// through V^dagger X_out V and credit 2^{-n_+} wherever the |0> block comes
// back clean. Counting permutation hits keeps every entry an exact dyadic.
void matrix_column(const ReversibleCircuit& conj, const Layout& l, BitString t, double* col,
                   int dim) {
  std::fill(col, col + dim, 0.0);
  std::uint64_t plus = std::uint64_t{1} << l.n_plus;
  double unit = std::ldexp(1.0, -l.n_plus);
  for (std::uint64_t r = 0; r < plus; ++r) {
    BitString j = conj.apply_perm(assemble_input(l, t, r));
    if (zero_block_clean(l, j)) col[witness_block(l, j)] += unit;
  }
}

}  // namespace

VerifierMatrix verifier_matrix_serial(const StoqVerifier& v) {
  v.validate();
  if (v.basis != Basis::Hadamard) throw CircuitError("verifier matrix needs Hadamard basis");
  if (v.layout.n_w > 12)
    throw CapExceeded("dense verifier matrix capped at n_w = 12; use the implicit product");
  if (v.layout.n_plus > 24) throw CapExceeded("|+> register too large for matrix assembly");
  ReversibleCircuit conj = conjugated_x(v);
  VerifierMatrix m;
  m.n_w = v.layout.n_w;
  int dim = m.dim();
  m.a.assign(static_cast<size_t>(dim) * dim, 0.0);
  std::vector<double> col(static_cast<size_t>(dim));
  for (int t = 0; t < dim; ++t) {
    matrix_column(conj, v.layout, static_cast<BitString>(t), col.data(), dim);
    for (int s = 0; s < dim; ++s) m.a[static_cast<size_t>(s) * dim + t] = col[static_cast<size_t>(s)];
  }
  return m;
}

VerifierMatrix verifier_matrix(const StoqVerifier& v, int jobs) {
  if (jobs == 1) return verifier_matrix_serial(v);
  v.validate();
  if (v.basis != Basis::Hadamard) throw CircuitError("verifier matrix needs Hadamard basis");
  if (v.layout.n_w > 12)
    throw CapExceeded("dense verifier matrix capped at n_w = 12; use the implicit product");
  if (v.layout.n_plus > 24) throw CapExceeded("|+> register too large for matrix assembly");
  ReversibleCircuit conj = conjugated_x(v);
  VerifierMatrix m;
  m.n_w = v.layout.n_w;
  int dim = m.dim();
  m.a.assign(static_cast<size_t>(dim) * dim, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
#endif
  for (int t = 0; t < dim; ++t) {
    std::vector<double> col(static_cast<size_t>(dim));
    matrix_column(conj, v.layout, static_cast<BitString>(t), col.data(), dim);
    for (int s = 0; s < dim; ++s) m.a[static_cast<size_t>(s) * dim + t] = col[static_cast<size_t>(s)];
  }
  return m;
}

namespace {

void matvec_conjugated(const ReversibleCircuit& conj, const Layout& l,
                       const std::vector<double>& x, std::vector<double>& y) {
  int dim = 1 << l.n_w;
  y.assign(static_cast<size_t>(dim), 0.0);
  std::uint64_t plus = std::uint64_t{1} << l.n_plus;
  double unit = std::ldexp(1.0, -l.n_plus);
  for (int t = 0; t < dim; ++t) {
    double xt = x[static_cast<size_t>(t)];
    if (xt == 0) continue;
    for (std::uint64_t r = 0; r < plus; ++r) {
      BitString j = conj.apply_perm(assemble_input(l, static_cast<BitString>(t), r));
      if (zero_block_clean(l, j)) y[witness_block(l, j)] += unit * xt;
    }
  }
}

}  // namespace

void verifier_matvec(const StoqVerifier& v, const std::vector<double>& x,
                     std::vector<double>& y) {
  matvec_conjugated(conjugated_x(v), v.layout, x, y);
}

EigenPair power_iteration(const std::function<void(const std::vector<double>&,
                                                   std::vector<double>&)>& matvec,
                          int dim, const PowerIterOptions& opts) {
  enum class Run { Converged, Stagnated, Collapsed };
  auto run = [&](std::vector<double> x, EigenPair& out) -> Run {
    double nrm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    for (auto& v : x) v /= nrm;
    std::vector<double> y;
    double prev = 2.0;  // outside [-1, 1]
    for (int it = 1; it <= opts.max_iters; ++it) {
      matvec(x, y);
      double rayleigh = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
      // shifted step: z = (M + I) x = y + x
      for (size_t i = 0; i < x.size(); ++i) y[i] += x[i];
      double ynrm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
      if (ynrm < 1e-300) {
        // (M + I) x = 0: start vector lies in the eigenvalue -1 subspace.
        out = {-1.0, x, it};
        return Run::Collapsed;
      }
      for (size_t i = 0; i < x.size(); ++i) x[i] = y[i] / ynrm;
      if (std::abs(rayleigh - prev) < opts.tol) {
        out = {rayleigh, x, it};
        return Run::Converged;
      }
      prev = rayleigh;
    }
    return Run::Stagnated;
  };

  EigenPair result;
  std::vector<double> start(static_cast<size_t>(dim), 1.0);
  bool all_collapsed = true;
  Run status = run(start, result);
  if (status == Run::Converged) return result;
  all_collapsed &= status == Run::Collapsed;
  std::mt19937_64 rng(opts.seed ? opts.seed : 0x5eed);
  for (int r = 0; r < opts.restarts; ++r) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (auto& v : start) v = u(rng);
    status = run(start, result);
    if (status == Run::Converged) return result;
    all_collapsed &= status == Run::Collapsed;
  }
  // Every start, including random ones, annihilated under M + I: M acts as -I.
  if (all_collapsed) return result;
  throw EigensolverError("power iteration did not converge within " +
                         std::to_string(opts.max_iters) + " iterations");
}

double dense_lambda_max(const VerifierMatrix& m) { return dense_top_eigenpair(m).value; }

EigenPair dense_top_eigenpair(const VerifierMatrix& m) {
  int dim = m.dim();
  Eigen::MatrixXd a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = m.at(r, c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw EigensolverError("dense eigensolver failed");
  EigenPair p;
  p.value = solver.eigenvalues()(dim - 1);
  p.vector.resize(static_cast<size_t>(dim));
  for (int r = 0; r < dim; ++r) p.vector[static_cast<size_t>(r)] = solver.eigenvectors()(r, dim - 1);
  return p;
}

namespace {

NonNegState witness_from_eigenvector(int n_w, std::vector<double> vec) {
  // Perron-Frobenius: for an entrywise non-negative M, |v| attains the same
  // Rayleigh quotient as any top eigenvector v, so the witness can always be
  // taken entrywise non-negative.
  double s = std::accumulate(vec.begin(), vec.end(), 0.0);
  if (s < 0)
    for (auto& v : vec) v = -v;
  double min_entry = *std::min_element(vec.begin(), vec.end());
  if (min_entry < -1e-9)
    for (auto& v : vec) v = std::abs(v);  // degenerate top eigenspace
  double nrm2 = 0;
  for (double v : vec)
    if (v > 0) nrm2 += v * v;
  Entries e;
  for (size_t i = 0; i < vec.size(); ++i)
    if (vec[i] > 0) e.push_back({static_cast<BitString>(i), vec[i] * vec[i] / nrm2});
  NonNegState w;
  w.width = n_w;
  w.entries = normalize_entries(std::move(e));
  w.normalized = true;
  return w;
}

}  // namespace

MaxAccept max_accept_from_matrix(const VerifierMatrix& m, EigenMethod method,
                                 const PowerIterOptions& opts) {
  EigenPair p;
  if (method == EigenMethod::Dense) {
    p = dense_top_eigenpair(m);
  } else {
    int dim = m.dim();
    p = power_iteration(
        [&](const std::vector<double>& x, std::vector<double>& y) {
          y.assign(static_cast<size_t>(dim), 0.0);
          for (int r = 0; r < dim; ++r) {
            double acc = 0;
            const double* row = m.a.data() + static_cast<size_t>(r) * dim;
            for (int c = 0; c < dim; ++c) acc += row[c] * x[static_cast<size_t>(c)];
            y[static_cast<size_t>(r)] = acc;
          }
        },
        dim, opts);
  }
  MaxAccept r;
  r.lambda_max = p.value;
  r.prob = 0.5 + 0.5 * std::max(p.value, 0.0);
  r.iterations = p.iterations;
  r.witness = witness_from_eigenvector(m.n_w, std::move(p.vector));
  return r;
}

MaxAccept max_accept(const StoqVerifier& v, EigenMethod method, const PowerIterOptions& opts) {
  v.validate();
  if (v.basis != Basis::Hadamard) throw CircuitError("max_accept needs a Hadamard-basis verifier");
  if (method == EigenMethod::Dense || v.layout.n_w <= 12) {
    VerifierMatrix m = verifier_matrix(v);
    return max_accept_from_matrix(m, method, opts);
  }
  int dim = 1 << v.layout.n_w;
  ReversibleCircuit conj = conjugated_x(v);
  EigenPair p = power_iteration(
      [&](const std::vector<double>& x, std::vector<double>& y) {
        matvec_conjugated(conj, v.layout, x, y);
      },
      dim, opts);
  MaxAccept r;
  r.lambda_max = p.value;
  r.prob = 0.5 + 0.5 * std::max(p.value, 0.0);
  r.iterations = p.iterations;
  r.witness = witness_from_eigenvector(v.layout.n_w, std::move(p.vector));
  return r;
}

namespace {

double classical_accept(const ReversibleCircuit& circuit, const Layout& l, int out,
                        BitString s) {
  std::uint64_t plus = std::uint64_t{1} << l.n_plus;
  double unit = std::ldexp(1.0, -l.n_plus);
  double p = 0;
  int width = l.width();
  for (std::uint64_t r = 0; r < plus; ++r) {
    BitString j = circuit.apply_perm(assemble_input(l, s, r));
    if (!get_wire(j, width, out)) p += unit;
  }
  return p;
}

}  // namespace

std::pair<double, BitString> max_accept_computational_serial(const StoqVerifier& v) {
  v.validate();
  if (v.basis != Basis::Computational)
    throw CircuitError("max_accept_computational needs a computational-basis verifier");
  if (v.layout.n_w + v.layout.n_plus > 30)
    throw CapExceeded("classical witness scan capped at n_w + n_+ = 30");
  std::uint64_t dim = std::uint64_t{1} << v.layout.n_w;
  double best = -1;
  BitString arg = 0;
  for (std::uint64_t s = 0; s < dim; ++s) {
    double p = classical_accept(v.circuit, v.layout, v.out, s);
    if (p > best) {
      best = p;
      arg = s;
    }
  }
  return {best, arg};
}

std::pair<double, BitString> max_accept_computational(const StoqVerifier& v, int jobs) {
  if (jobs == 1) return max_accept_computational_serial(v);
  v.validate();
  if (v.basis != Basis::Computational)
    throw CircuitError("max_accept_computational needs a computational-basis verifier");
  if (v.layout.n_w + v.layout.n_plus > 30)
    throw CapExceeded("classical witness scan capped at n_w + n_+ = 30");
  std::int64_t dim = std::int64_t{1} << v.layout.n_w;
  double best = -1;
  std::int64_t arg = 0;
#ifdef _OPENMP
#pragma omp parallel num_threads(jobs > 0 ? jobs : omp_get_max_threads())
  {
    double lbest = -1;
    std::int64_t larg = 0;
#pragma omp for nowait
    for (std::int64_t s = 0; s < dim; ++s) {
      double p = classical_accept(v.circuit, v.layout, v.out, static_cast<BitString>(s));
      if (p > lbest || (p == lbest && s < larg)) {
        lbest = p;
        larg = s;
      }
    }
#pragma omp critical
    {
      // ties resolve to the smallest witness string for job-count independence
      if (lbest > best || (lbest == best && larg < arg)) {
        best = lbest;
        arg = larg;
      }
    }
  }
#else
  for (std::int64_t s = 0; s < dim; ++s) {
    double p = classical_accept(v.circuit, v.layout, v.out, static_cast<BitString>(s));
    if (p > best) {
      best = p;
      arg = s;
    }
  }
#endif
  return {best, static_cast<BitString>(arg)};
}

BitString sample_output(const StoqVerifier& v, const NonNegState& w, std::mt19937_64& rng) {
  v.validate();
  if (w.width != v.layout.n_w) throw CircuitError("witness width does not match layout");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double total = w.squared_norm();
  double u = unit(rng) * total;
  BitString ws = w.entries.back().key;
  double acc = 0;
  for (const auto& e : w.entries) {
    acc += e.mass;
    if (u < acc) {
      ws = e.key;
      break;
    }
  }
  std::uint64_t r = 0;
  if (v.layout.n_plus > 0) {
    std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << v.layout.n_plus) - 1);
    r = bits(rng);
  }
  return v.circuit.apply_perm(assemble_input(v.layout, ws, r));
}

BitString sample_output(const StoqVerifier& v, const NonNegState& w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_output(v, w, rng);
}

double query_output_mass_preinverted(const ReversibleCircuit& inverse_circuit,
                                     const Layout& layout, const MassFn& witness_mass,
                                     BitString j) {
  BitString pre = inverse_circuit.apply_perm(j);
  if (!zero_block_clean(layout, pre)) return 0.0;
  return witness_mass(witness_block(layout, pre)) * std::ldexp(1.0, -layout.n_plus);
}

double query_output_mass(const StoqVerifier& v, const MassFn& witness_mass, BitString j) {
  return query_output_mass_preinverted(inverse(v.circuit), v.layout, witness_mass, j);
}

StoqVerifier parse_verifier(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::ostringstream circuit_text;
  int no = 0;
  std::optional<Layout> layout;
  int out = 1;
  Basis basis = Basis::Hadamard;
  while (std::getline(in, raw)) {
    ++no;
    std::string stripped = raw;
    if (auto pos = stripped.find('#'); pos != std::string::npos) stripped.erase(pos);
    std::istringstream ls(stripped);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "layout") {
      Layout l;
      if (!(ls >> l.n_w >> l.n_0 >> l.n_plus)) throw ParseError(no, "expected 'layout n_w n_0 n_plus'");
      layout = l;
    } else if (tok == "out") {
      if (!(ls >> out)) throw ParseError(no, "expected 'out Q'");
    } else if (tok == "basis") {
      std::string b;
      if (!(ls >> b)) throw ParseError(no, "expected 'basis hadamard|computational'");
      if (b == "hadamard")
        basis = Basis::Hadamard;
      else if (b == "computational")
        basis = Basis::Computational;
      else
        throw ParseError(no, "unknown basis '" + b + "'");
    } else {
      circuit_text << raw << "\n";
    }
  }
  if (!layout) throw ParseError(no ? no : 1, "missing 'layout' header");
  StoqVerifier v;
  v.circuit = parse_circuit(circuit_text.str());
  v.layout = *layout;
  v.out = out;
  v.basis = basis;
  try {
    v.validate();
  } catch (const CircuitError& e) {
    throw ParseError(no, e.what());
  }
  return v;
}

std::string serialize_verifier(const StoqVerifier& v) {
  std::ostringstream os;
  os << "layout " << v.layout.n_w << " " << v.layout.n_0 << " " << v.layout.n_plus << "\n"
     << "out " << v.out << "\n"
     << "basis " << (v.basis == Basis::Hadamard ? "hadamard" : "computational") << "\n"
     << serialize(v.circuit);
  return os.str();
}

}  // namespace stoqlab
