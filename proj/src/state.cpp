#include "stoqlab/state.hpp"

#include <algorithm>
#include <sstream>

namespace stoqlab {

namespace {

// sqrt(x*y), exact when x == y so that identical masses cancel identically.
inline double geo_mean(double x, double y) { return x == y ? x : std::sqrt(x * y); }

double lookup(const Entries& e, BitString key) {
  auto it = std::lower_bound(e.begin(), e.end(), key,
                             [](const Entry& a, BitString k) { return a.key < k; });
  return (it != e.end() && it->key == key) ? it->mass : 0.0;
}

double sum_mass(const Entries& e) {
  double s = 0;
  for (const auto& x : e) s += x.mass;
  return s;
}

// Walks two sorted entry lists, accumulating sum sqrt(ma*mb) over shared keys.
double cross_term(const Entries& a, const Entries& b) {
  double s = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].key < b[j].key)
      ++i;
    else if (b[j].key < a[i].key)
      ++j;
    else {
      s += geo_mean(a[i].mass, b[j].mass);
      ++i;
      ++j;
    }
  }
  return s;
}

}  // namespace

Entries normalize_entries(Entries raw) {
  std::sort(raw.begin(), raw.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
  Entries out;
  out.reserve(raw.size());
  for (const auto& e : raw) {
    if (!out.empty() && out.back().key == e.key)
      out.back().mass += e.mass;
    else
      out.push_back(e);
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const Entry& e) { return e.mass < kMassFloor; }),
            out.end());
  return out;
}

double NonNegState::mass(BitString key) const { return lookup(entries, key); }
double NonNegState::squared_norm() const { return sum_mass(entries); }
double SubDistribution::mass(BitString key) const { return lookup(entries, key); }
double SubDistribution::total_mass() const { return sum_mass(entries); }

NonNegState make_state(int width, Entries entries, bool normalized) {
  NonNegState s;
  s.width = width;
  s.entries = normalize_entries(std::move(entries));
  s.normalized = normalized;
  if (width < 0 || width > 62) throw std::invalid_argument("state width out of range");
  for (const auto& e : s.entries)
    if (width < 62 && e.key >> width)
      throw std::invalid_argument("state entry exceeds width");
  if (normalized && std::abs(s.squared_norm() - 1.0) > 1e-12)
    throw std::invalid_argument("state is not normalized");
  return s;
}

NonNegState subset_state(int width, const std::vector<BitString>& strings) {
  if (strings.empty()) throw std::invalid_argument("subset state of an empty set");
  if (width < 0 || width > 62) throw std::invalid_argument("state width out of range");
  for (BitString s : strings)
    if (width < 62 && (s >> width)) throw std::invalid_argument("subset string exceeds width");
  Entries e;
  e.reserve(strings.size());
  double m = 1.0 / static_cast<double>(strings.size());
  for (BitString s : strings) e.push_back({s, m});
  Entries merged = normalize_entries(std::move(e));
  if (merged.size() != strings.size())
    throw std::invalid_argument("subset strings are not distinct");
  NonNegState st;
  st.width = width;
  st.entries = std::move(merged);
  st.normalized = true;
  return st;
}

NonNegState subset_state(const SubsetSpec& s) {
  if (s.is_explicit()) return subset_state(s.width, s.strings);
  if (s.width > 24) throw CapExceeded("predicate enumeration capped at width 24");
  std::vector<BitString> members;
  BitString total = BitString{1} << s.width;
  for (BitString x = 0; x < total; ++x)
    if (s.member(x)) members.push_back(x);
  return subset_state(s.width, members);
}

NonNegState basis_state(int width, BitString key) { return subset_state(width, {key}); }

double inner(const NonNegState& a, const NonNegState& b) {
  if (a.width != b.width) throw std::invalid_argument("inner: width mismatch");
  return cross_term(a.entries, b.entries);
}

double hellinger_sq(const SubDistribution& d0, const SubDistribution& d1) {
  if (d0.width != d1.width) throw std::invalid_argument("hellinger_sq: width mismatch");
  double h = 0.5 * (d0.total_mass() + d1.total_mass()) - cross_term(d0.entries, d1.entries);
  return h < 0 ? 0.0 : h;
}

std::pair<SubDistribution, SubDistribution> split_by_wire(const NonNegState& s, int wire) {
  if (wire < 1 || wire > s.width) throw std::invalid_argument("split_by_wire: wire out of range");
  SubDistribution d0, d1;
  d0.width = d1.width = s.width - 1;
  for (const auto& e : s.entries) {
    BitString rest = drop_wire(e.key, s.width, wire);
    (get_wire(e.key, s.width, wire) ? d1 : d0).entries.push_back({rest, e.mass});
  }
  d0.entries = normalize_entries(std::move(d0.entries));
  d1.entries = normalize_entries(std::move(d1.entries));
  return {std::move(d0), std::move(d1)};
}

NonNegState to_amplitudes(const SubDistribution& d) {
  NonNegState s;
  s.width = d.width;
  s.entries = d.entries;
  s.normalized = false;
  return s;
}

double expectation_x(const NonNegState& s, int wire) {
  if (wire < 1 || wire > s.width) throw std::invalid_argument("expectation_x: wire out of range");
  double v = 0;
  for (const auto& e : s.entries) {
    if (get_wire(e.key, s.width, wire)) continue;  // count each pair once
    double partner = s.mass(flip_wire(e.key, s.width, wire));
    if (partner > 0) v += 2.0 * geo_mean(e.mass, partner);
  }
  return v;
}

NonNegState parse_witness(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int no = 0;
  int width = -1;
  Entries entries;
  while (std::getline(in, raw)) {
    ++no;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    std::istringstream ls(raw);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (width < 0) {
      std::string n;
      if (tok != "width" || !(ls >> n)) throw ParseError(no, "expected 'width N' header");
      width = std::stoi(n);
      if (width < 1 || width > 62) throw ParseError(no, "witness width out of range");
      continue;
    }
    std::string wtok;
    if (!(ls >> wtok)) throw ParseError(no, "expected 'bitstring weight'");
    if (static_cast<int>(tok.size()) != width)
      throw ParseError(no, "bitstring length does not match width");
    double w;
    try {
      w = std::stod(wtok);
    } catch (...) {
      throw ParseError(no, "bad weight '" + wtok + "'");
    }
    if (!(w > 0)) throw ParseError(no, "weights must be positive");
    try {
      entries.push_back({parse_bits(tok), w});
    } catch (const std::exception& e) {
      throw ParseError(no, e.what());
    }
  }
  if (width < 0) throw ParseError(no ? no : 1, "missing 'width N' header");
  if (entries.empty()) throw ParseError(no, "witness has no entries");
  double total = 0;
  for (const auto& e : entries) total += e.mass;
  for (auto& e : entries) e.mass /= total;
  NonNegState s;
  s.width = width;
  s.entries = normalize_entries(std::move(entries));
  s.normalized = true;
  return s;
}

std::string serialize_witness(const NonNegState& w) {
  std::ostringstream os;
  os << "width " << w.width << "\n";
  os.precision(17);
  for (const auto& e : w.entries) os << render_bits(e.key, w.width) << " " << e.mass << "\n";
  return os.str();
}

}  // namespace stoqlab
