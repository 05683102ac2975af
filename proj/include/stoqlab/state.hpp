#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "stoqlab/bits.hpp"
#include "stoqlab/errors.hpp"

namespace stoqlab {

/// One sparse coordinate. `mass` is the squared amplitude; masses are the
/// stored representation because circuit actions are permutations and
/// preserve them exactly, while amplitudes like 1/sqrt(2) cannot round-trip
/// through squaring in doubles.
struct Entry {
  BitString key;
  double mass;
};

using Entries = std::vector<Entry>;  // sorted by key, masses > 0

// Entries with mass below this are dropped after arithmetic (amplitude ~1e-15).
inline constexpr double kMassFloor = 1e-30;

Entries normalize_entries(Entries raw);  // sort, merge duplicates, drop dust

/// Sparse non-negative amplitude vector over width-n bitstrings.
struct NonNegState {
  int width = 0;
  Entries entries;
  bool normalized = true;  // false for sub-normalized |D> vectors

  double mass(BitString key) const;
  double amplitude(BitString key) const { return std::sqrt(mass(key)); }
  double squared_norm() const;
  size_t support_size() const { return entries.size(); }
};

/// Sparse mass function with total mass <= 1.
struct SubDistribution {
  int width = 0;
  Entries entries;

  double mass(BitString key) const;
  double total_mass() const;
};

struct SubsetSpec {
  int width = 0;
  std::vector<BitString> strings;  // explicit form
  std::function<bool(BitString)> member;  // predicate form (for easy witnesses)

  bool is_explicit() const { return member == nullptr; }
};

NonNegState make_state(int width, Entries entries, bool normalized = true);
NonNegState subset_state(const SubsetSpec& s);
NonNegState subset_state(int width, const std::vector<BitString>& strings);
NonNegState basis_state(int width, BitString key);

/// <a|b> = sum_i sqrt(mass_a(i) * mass_b(i)).
double inner(const NonNegState& a, const NonNegState& b);

double hellinger_sq(const SubDistribution& d0, const SubDistribution& d1);

/// Splits on the bit of `wire`: D_b(i) collects the mass of strings with
/// value b at `wire`, indexed by the remaining width-1 bits.
std::pair<SubDistribution, SubDistribution> split_by_wire(const NonNegState& s, int wire);

NonNegState to_amplitudes(const SubDistribution& d);

/// <s|X_wire|s> for a non-negative state.
double expectation_x(const NonNegState& s, int wire);

NonNegState parse_witness(const std::string& text);
std::string serialize_witness(const NonNegState& w);

}  // namespace stoqlab
