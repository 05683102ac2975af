#include "stoqlab/circuit.hpp"

#include <algorithm>
#include <sstream>

namespace stoqlab {

Gate make_x(int t) { return Gate{GateKind::X, {t, 0, 0}}; }
Gate make_cnot(int c, int t) { return Gate{GateKind::CNOT, {c, t, 0}}; }
Gate make_toffoli(int c1, int c2, int t) { return Gate{GateKind::Toffoli, {c1, c2, t}}; }

bool WireMap::contains_outer(int wire) const {
  return std::find(to_outer.begin(), to_outer.end(), wire) != to_outer.end();
}

void WireMap::validate(int outer_width) const {
  std::vector<int> seen;
  for (int w : to_outer) {
    if (w < 1 || w > outer_width)
      throw CircuitError("wire map target " + std::to_string(w) + " out of range");
    if (std::find(seen.begin(), seen.end(), w) != seen.end())
      throw CircuitError("wire map is not injective at " + std::to_string(w));
    seen.push_back(w);
  }
}

WireMap WireMap::identity(int width) { return offset(width, 0); }

WireMap WireMap::offset(int width, int shift) {
  WireMap m;
  m.to_outer.resize(static_cast<size_t>(width));
  for (int j = 1; j <= width; ++j) m.to_outer[static_cast<size_t>(j - 1)] = j + shift;
  return m;
}

namespace {

void validate_gate(const Gate& g, int width) {
  int n = g.arity();
  for (int i = 0; i < n; ++i) {
    int w = g.wires[static_cast<size_t>(i)];
    if (w < 1 || w > width)
      throw CircuitError("gate wire " + std::to_string(w) + " out of range for width " +
                         std::to_string(width));
    for (int j = i + 1; j < n; ++j)
      if (w == g.wires[static_cast<size_t>(j)])
        throw CircuitError("duplicate wire " + std::to_string(w) + " in gate");
  }
}

void validate_element(const CircuitElement& e, int width) {
  if (const Gate* g = std::get_if<Gate>(&e)) {
    validate_gate(*g, width);
    return;
  }
  const auto& b = std::get<ControlledBlock>(e);
  if (b.control < 1 || b.control > width)
    throw CircuitError("control wire " + std::to_string(b.control) + " out of range");
  if (!b.inner) throw CircuitError("controlled block has no inner circuit");
  if (b.map.inner_width() != b.inner->width)
    throw CircuitError("wire map size does not match inner circuit width");
  b.map.validate(width);
  if (b.map.contains_outer(b.control))
    throw CircuitError("control wire overlaps mapped wires");
}

BitString apply_gate(const Gate& g, BitString x, int width) {
  switch (g.kind) {
    case GateKind::X:
      return flip_wire(x, width, g.wires[0]);
    case GateKind::CNOT:
      return get_wire(x, width, g.wires[0]) ? flip_wire(x, width, g.wires[1]) : x;
    case GateKind::Toffoli:
      return (get_wire(x, width, g.wires[0]) && get_wire(x, width, g.wires[1]))
                 ? flip_wire(x, width, g.wires[2])
                 : x;
  }
  return x;
}

BitString apply_element(const CircuitElement& e, BitString x, int width) {
  if (const Gate* g = std::get_if<Gate>(&e)) return apply_gate(*g, x, width);
  const auto& b = std::get<ControlledBlock>(e);
  if (!get_wire(x, width, b.control)) return x;
  int m = b.map.inner_width();
  BitString in = 0;
  for (int j = 1; j <= m; ++j)
    in = set_wire(in, m, j, get_wire(x, width, b.map.at(j)));
  BitString out = b.inner->apply_perm(in);
  for (int j = 1; j <= m; ++j)
    x = set_wire(x, width, b.map.at(j), get_wire(out, m, j));
  return x;
}

}  // namespace

void ReversibleCircuit::append(CircuitElement e) {
  if (width < 1 || width > 62) throw CircuitError("circuit width out of range");
  validate_element(e, width);
  elements.push_back(std::move(e));
}

BitString ReversibleCircuit::apply_perm(BitString x) const {
  for (const auto& e : elements) x = apply_element(e, x, width);
  return x;
}

size_t ReversibleCircuit::gate_count() const {
  size_t n = 0;
  for (const auto& e : elements) {
    if (std::holds_alternative<Gate>(e))
      ++n;
    else
      n += std::get<ControlledBlock>(e).inner->gate_count();
  }
  return n;
}

ReversibleCircuit inverse(const ReversibleCircuit& c) {
  ReversibleCircuit r(c.width);
  for (auto it = c.elements.rbegin(); it != c.elements.rend(); ++it) {
    if (const Gate* g = std::get_if<Gate>(&*it)) {
      r.elements.push_back(*g);  // X, CNOT, Toffoli are self-inverse
    } else {
      const auto& b = std::get<ControlledBlock>(*it);
      r.elements.push_back(ControlledBlock{
          b.control, b.map, std::make_shared<const ReversibleCircuit>(inverse(*b.inner))});
    }
  }
  return r;
}

ReversibleCircuit compose(const ReversibleCircuit& a, const ReversibleCircuit& b) {
  if (a.width != b.width) throw CircuitError("compose: width mismatch");
  ReversibleCircuit r(a.width);
  r.elements = a.elements;
  r.elements.insert(r.elements.end(), b.elements.begin(), b.elements.end());
  return r;
}

ReversibleCircuit embed(const ReversibleCircuit& c, const WireMap& at, int width) {
  if (at.inner_width() != c.width) throw CircuitError("embed: wire map size mismatch");
  at.validate(width);
  ReversibleCircuit r(width);
  for (const auto& e : c.elements) {
    if (const Gate* g = std::get_if<Gate>(&e)) {
      Gate ng = *g;
      for (int i = 0; i < g->arity(); ++i)
        ng.wires[static_cast<size_t>(i)] = at.at(g->wires[static_cast<size_t>(i)]);
      r.append(ng);
    } else {
      const auto& b = std::get<ControlledBlock>(e);
      WireMap chained;
      for (int j = 1; j <= b.map.inner_width(); ++j)
        chained.to_outer.push_back(at.at(b.map.at(j)));
      r.append(ControlledBlock{at.at(b.control), std::move(chained), b.inner});
    }
  }
  return r;
}

CircuitElement controlled(const ReversibleCircuit& c, const WireMap& at, int ctrl) {
  if (at.inner_width() != c.width) throw CircuitError("controlled: wire map size mismatch");
  if (at.contains_outer(ctrl)) throw CircuitError("control wire overlaps mapped wires");
  return ControlledBlock{ctrl, at, std::make_shared<const ReversibleCircuit>(c)};
}

namespace {

// Multi-controlled X on distinct wires, emitted as {X, CNOT, Toffoli} using
// one borrowed wire per recursion level; borrows are restored. Any wire not
// involved in the gate may serve as a borrow.
void emit_mcx(ReversibleCircuit& out, std::vector<int> controls, int target) {
  size_t n = controls.size();
  if (n == 0) {
    out.append(make_x(target));
    return;
  }
  if (n == 1) {
    out.append(make_cnot(controls[0], target));
    return;
  }
  if (n == 2) {
    out.append(make_toffoli(controls[0], controls[1], target));
    return;
  }
  int borrow = -1;
  for (int w = 1; w <= out.width; ++w) {
    if (w == target) continue;
    if (std::find(controls.begin(), controls.end(), w) != controls.end()) continue;
    borrow = w;
    break;
  }
  if (borrow < 0) throw CircuitError("flatten: no borrow wire available");
  int last = controls.back();
  controls.pop_back();
  // C^n X = C^{n-1}X(->g) CCX(g,c_n->t) C^{n-1}X(->g) CCX(g,c_n->t), g borrowed.
  emit_mcx(out, controls, borrow);
  out.append(make_toffoli(borrow, last, target));
  emit_mcx(out, controls, borrow);
  out.append(make_toffoli(borrow, last, target));
}

void flatten_into(ReversibleCircuit& out, const ReversibleCircuit& c,
                  const std::vector<int>& wire_of, std::vector<int> controls) {
  for (const auto& e : c.elements) {
    if (const Gate* g = std::get_if<Gate>(&e)) {
      std::vector<int> cs = controls;
      for (int i = 0; i + 1 < g->arity(); ++i)
        cs.push_back(wire_of[static_cast<size_t>(g->wires[static_cast<size_t>(i)] - 1)]);
      emit_mcx(out, std::move(cs), wire_of[static_cast<size_t>(g->target() - 1)]);
    } else {
      const auto& b = std::get<ControlledBlock>(e);
      std::vector<int> cs = controls;
      cs.push_back(wire_of[static_cast<size_t>(b.control - 1)]);
      std::vector<int> inner_wires(static_cast<size_t>(b.map.inner_width()));
      for (int j = 1; j <= b.map.inner_width(); ++j)
        inner_wires[static_cast<size_t>(j - 1)] = wire_of[static_cast<size_t>(b.map.at(j) - 1)];
      flatten_into(out, *b.inner, inner_wires, std::move(cs));
    }
  }
}

}  // namespace

ReversibleCircuit flatten(const ReversibleCircuit& c) {
  ReversibleCircuit out(c.width + 1);
  std::vector<int> ident(static_cast<size_t>(c.width));
  for (int j = 1; j <= c.width; ++j) ident[static_cast<size_t>(j - 1)] = j;
  flatten_into(out, c, ident, {});
  return out;
}

bool structurally_equal(const ReversibleCircuit& a, const ReversibleCircuit& b) {
  if (a.width != b.width || a.elements.size() != b.elements.size()) return false;
  for (size_t i = 0; i < a.elements.size(); ++i) {
    const auto& ea = a.elements[i];
    const auto& eb = b.elements[i];
    if (ea.index() != eb.index()) return false;
    if (const Gate* ga = std::get_if<Gate>(&ea)) {
      const Gate& gb = std::get<Gate>(eb);
      if (ga->kind != gb.kind || ga->wires != gb.wires) return false;
    } else {
      const auto& ba = std::get<ControlledBlock>(ea);
      const auto& bb = std::get<ControlledBlock>(eb);
      if (ba.control != bb.control || ba.map.to_outer != bb.map.to_outer) return false;
      if (!structurally_equal(*ba.inner, *bb.inner)) return false;
    }
  }
  return true;
}

namespace {

struct Line {
  int no;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int no = 0;
  while (std::getline(in, raw)) {
    ++no;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    std::istringstream ls(raw);
    Line l{no, {}};
    std::string tok;
    while (ls >> tok) l.tokens.push_back(tok);
    if (!l.tokens.empty()) lines.push_back(std::move(l));
  }
  return lines;
}

int parse_wire(const std::string& tok, int line) {
  try {
    size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size() || v < 1) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ParseError(line, "expected a wire index, got '" + tok + "'");
  }
}

// Parses elements until `}` (if in_block) or end of input.
size_t parse_elements(const std::vector<Line>& lines, size_t i, ReversibleCircuit& c,
                      bool in_block) {
  while (i < lines.size()) {
    const Line& l = lines[i];
    const std::string& op = l.tokens[0];
    try {
      if (op == "}") {
        if (!in_block) throw ParseError(l.no, "unmatched '}'");
        return i + 1;
      }
      if (op == "x" && l.tokens.size() == 2) {
        c.append(make_x(parse_wire(l.tokens[1], l.no)));
      } else if (op == "cx" && l.tokens.size() == 3) {
        c.append(make_cnot(parse_wire(l.tokens[1], l.no), parse_wire(l.tokens[2], l.no)));
      } else if (op == "ccx" && l.tokens.size() == 4) {
        c.append(make_toffoli(parse_wire(l.tokens[1], l.no), parse_wire(l.tokens[2], l.no),
                              parse_wire(l.tokens[3], l.no)));
      } else if (op == "ctrl" && l.tokens.size() == 3 && l.tokens[2] == "{") {
        int ctrl = parse_wire(l.tokens[1], l.no);
        ++i;
        if (i >= lines.size() || lines[i].tokens[0] != "wires")
          throw ParseError(i < lines.size() ? lines[i].no : l.no,
                           "ctrl block must start with a 'wires' line");
        WireMap map;
        for (size_t t = 1; t < lines[i].tokens.size(); ++t)
          map.to_outer.push_back(parse_wire(lines[i].tokens[t], lines[i].no));
        if (map.to_outer.empty()) throw ParseError(lines[i].no, "empty wire list");
        ReversibleCircuit innerc(map.inner_width());
        i = parse_elements(lines, i + 1, innerc, true);
        c.append(ControlledBlock{ctrl, std::move(map),
                                 std::make_shared<const ReversibleCircuit>(std::move(innerc))});
        continue;
      } else {
        throw ParseError(l.no, "unrecognized statement '" + op + "'");
      }
    } catch (const CircuitError& e) {
      throw ParseError(l.no, e.what());
    }
    ++i;
  }
  if (in_block) throw ParseError(lines.empty() ? 0 : lines.back().no, "missing '}'");
  return i;
}

void serialize_elements(std::ostream& os, const ReversibleCircuit& c, int indent) {
  std::string pad(static_cast<size_t>(indent), ' ');
  for (const auto& e : c.elements) {
    if (const Gate* g = std::get_if<Gate>(&e)) {
      switch (g->kind) {
        case GateKind::X: os << pad << "x " << g->wires[0] << "\n"; break;
        case GateKind::CNOT: os << pad << "cx " << g->wires[0] << " " << g->wires[1] << "\n"; break;
        case GateKind::Toffoli:
          os << pad << "ccx " << g->wires[0] << " " << g->wires[1] << " " << g->wires[2] << "\n";
          break;
      }
    } else {
      const auto& b = std::get<ControlledBlock>(e);
      os << pad << "ctrl " << b.control << " {\n" << pad << "  wires";
      for (int w : b.map.to_outer) os << " " << w;
      os << "\n";
      serialize_elements(os, *b.inner, indent + 2);
      os << pad << "}\n";
    }
  }
}

}  // namespace

ReversibleCircuit parse_circuit(const std::string& text) {
  auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(1, "empty circuit file");
  const Line& head = lines[0];
  if (head.tokens[0] != "qubits" || head.tokens.size() != 2)
    throw ParseError(head.no, "expected 'qubits N' header");
  int width = parse_wire(head.tokens[1], head.no);
  if (width > 62) throw ParseError(head.no, "at most 62 qubits are supported");
  ReversibleCircuit c(width);
  parse_elements(lines, 1, c, false);
  return c;
}

std::string serialize(const ReversibleCircuit& c) {
  std::ostringstream os;
  os << "qubits " << c.width << "\n";
  serialize_elements(os, c, 0);
  return os.str();
}

}  // namespace stoqlab
