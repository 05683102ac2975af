#pragma once

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "stoqlab/bits.hpp"
#include "stoqlab/errors.hpp"

namespace stoqlab {

enum class GateKind { X, CNOT, Toffoli };

/// A single self-inverse classical gate on 1-3 distinct wires.
/// wires[0..arity-1] are controls followed by the target.
struct Gate {
  GateKind kind;
  std::array<int, 3> wires{0, 0, 0};

  int arity() const {
    switch (kind) {
      case GateKind::X: return 1;
      case GateKind::CNOT: return 2;
      case GateKind::Toffoli: return 3;
    }
    return 0;
  }
  int target() const { return wires[static_cast<size_t>(arity() - 1)]; }
};

Gate make_x(int t);
Gate make_cnot(int c, int t);
Gate make_toffoli(int c1, int c2, int t);

/// Injective map from the wires of an inner circuit to outer wires.
/// to_outer[j-1] is the outer wire carrying inner wire j.
struct WireMap {
  std::vector<int> to_outer;

  int inner_width() const { return static_cast<int>(to_outer.size()); }
  int at(int inner_wire) const { return to_outer[static_cast<size_t>(inner_wire - 1)]; }
  bool contains_outer(int wire) const;
  void validate(int outer_width) const;

  static WireMap identity(int width);
  static WireMap offset(int width, int shift);  // inner wire j -> j + shift
};

struct ReversibleCircuit;

/// Applies the inner circuit through `map` when the control wire reads 1;
/// identity otherwise. Inner circuits are immutable and shared.
struct ControlledBlock {
  int control = 0;
  WireMap map;
  std::shared_ptr<const ReversibleCircuit> inner;
};

using CircuitElement = std::variant<Gate, ControlledBlock>;

struct ReversibleCircuit {
  int width = 0;
  std::vector<CircuitElement> elements;

  ReversibleCircuit() = default;
  explicit ReversibleCircuit(int width_) : width(width_) {}

  void append(CircuitElement e);  // validates wires against width

  /// Image of a basis string under the circuit's permutation.
  BitString apply_perm(BitString x) const;

  size_t gate_count() const;  // gates, counting block contents once
};

ReversibleCircuit inverse(const ReversibleCircuit& c);
ReversibleCircuit compose(const ReversibleCircuit& a, const ReversibleCircuit& b);
ReversibleCircuit embed(const ReversibleCircuit& c, const WireMap& at, int width);
CircuitElement controlled(const ReversibleCircuit& c, const WireMap& at, int ctrl);

/// Rewrites controlled blocks into plain {X, CNOT, Toffoli} gates on a
/// circuit one wire wider; the extra wire is a borrowed scratch wire whose
/// value is always restored.
ReversibleCircuit flatten(const ReversibleCircuit& c);

bool structurally_equal(const ReversibleCircuit& a, const ReversibleCircuit& b);

ReversibleCircuit parse_circuit(const std::string& text);
std::string serialize(const ReversibleCircuit& c);

}  // namespace stoqlab
