#include <doctest.h>

#include "helpers.hpp"
#include "stoqlab/circuit.hpp"

using namespace stoqlab;
using namespace testutil;

TEST_CASE("single gates permute basis strings") {
  ReversibleCircuit x1(1);
  x1.append(make_x(1));
  CHECK(x1.apply_perm(0b0) == 0b1);

  ReversibleCircuit cx(2);
  cx.append(make_cnot(1, 2));
  CHECK(cx.apply_perm(0b10) == 0b11);
  CHECK(cx.apply_perm(0b01) == 0b01);

  ReversibleCircuit ccx(3);
  ccx.append(make_toffoli(1, 2, 3));
  CHECK(ccx.apply_perm(0b110) == 0b111);
  CHECK(ccx.apply_perm(0b100) == 0b100);
}

TEST_CASE("gates are self-inverse on all inputs up to width 4") {
  std::mt19937_64 rng(11);
  for (int width = 1; width <= 4; ++width) {
    for (int trial = 0; trial < 20; ++trial) {
      Gate g = random_gate(rng, width);
      ReversibleCircuit c(width);
      c.append(g);
      c.append(g);
      for (BitString x = 0; x < (BitString{1} << width); ++x) CHECK(c.apply_perm(x) == x);
    }
  }
}

TEST_CASE("inverse reverses and round-trips") {
  ReversibleCircuit c(2);
  c.append(make_cnot(1, 2));
  c.append(make_x(1));
  ReversibleCircuit inv = inverse(c);
  REQUIRE(inv.elements.size() == 2);
  CHECK(std::get<Gate>(inv.elements[0]).kind == GateKind::X);
  CHECK(std::get<Gate>(inv.elements[1]).kind == GateKind::CNOT);
  CHECK(structurally_equal(inverse(inv), c));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    int width = 2 + static_cast<int>(rng() % 5);
    ReversibleCircuit r = random_circuit(rng, width, 8);
    ReversibleCircuit rinv = inverse(r);
    BitString x = rng() & ((BitString{1} << width) - 1);
    CHECK(rinv.apply_perm(r.apply_perm(x)) == x);
  }
}

TEST_CASE("bijection holds exhaustively for random circuits") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    int width = 1 + static_cast<int>(rng() % 4);
    ReversibleCircuit c = random_circuit(rng, width, 6);
    std::vector<bool> seen(size_t{1} << width, false);
    for (BitString x = 0; x < (BitString{1} << width); ++x) {
      BitString y = c.apply_perm(x);
      CHECK(!seen[y]);
      seen[y] = true;
    }
  }
}

TEST_CASE("controlled blocks") {
  ReversibleCircuit x1(1);
  x1.append(make_x(1));

  SUBCASE("controlled X equals CNOT") {
    ReversibleCircuit blk(2);
    blk.append(controlled(x1, WireMap{{2}}, 1));
    ReversibleCircuit cx(2);
    cx.append(make_cnot(1, 2));
    for (BitString x = 0; x < 4; ++x) CHECK(blk.apply_perm(x) == cx.apply_perm(x));
  }

  SUBCASE("control bit 0 is the identity") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
      ReversibleCircuit innerc = random_circuit(rng, 3, 5);
      ReversibleCircuit blk(4);
      blk.append(controlled(innerc, WireMap{{1, 2, 3}}, 4));
      for (BitString x = 0; x < 8; ++x) {
        BitString in = x << 1;  // wire 4 = 0
        CHECK(blk.apply_perm(in) == in);
      }
    }
  }

  SUBCASE("controlled CNOT equals Toffoli") {
    ReversibleCircuit cx(2);
    cx.append(make_cnot(1, 2));
    ReversibleCircuit blk(3);
    blk.append(controlled(cx, WireMap{{2, 3}}, 1));
    ReversibleCircuit ccx(3);
    ccx.append(make_toffoli(1, 2, 3));
    for (BitString x = 0; x < 8; ++x) CHECK(blk.apply_perm(x) == ccx.apply_perm(x));
  }

  SUBCASE("control bit 1 applies the embedded permutation, widths up to 6") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      int inner_w = 2 + static_cast<int>(rng() % 4);
      ReversibleCircuit innerc = random_circuit(rng, inner_w, 6);
      int width = inner_w + 1;
      // inner wire j -> outer wire j + 1; control = wire 1
      ReversibleCircuit blk(width);
      blk.append(controlled(innerc, WireMap::offset(inner_w, 1), 1));
      ReversibleCircuit emb = embed(innerc, WireMap::offset(inner_w, 1), width);
      for (BitString x = 0; x < (BitString{1} << width); ++x) {
        if (get_wire(x, width, 1))
          CHECK(blk.apply_perm(x) == emb.apply_perm(x));
        else
          CHECK(blk.apply_perm(x) == x);
      }
    }
  }

  SUBCASE("control overlapping the map is rejected") {
    ReversibleCircuit blk(2);
    CHECK_THROWS_AS(blk.append(controlled(x1, WireMap{{1}}, 1)), CircuitError);
  }
}

TEST_CASE("compose and embed") {
  std::mt19937_64 rng(17);
  SUBCASE("compose with inverse is the identity, widths up to 4") {
    for (int width = 1; width <= 4; ++width) {
      ReversibleCircuit c = random_circuit(rng, width, 6);
      ReversibleCircuit id = compose(c, inverse(c));
      for (BitString x = 0; x < (BitString{1} << width); ++x) CHECK(id.apply_perm(x) == x);
    }
  }
  SUBCASE("compose applies the first argument first") {
    ReversibleCircuit a(2), b(2);
    a.append(make_x(1));
    b.append(make_cnot(1, 2));
    // x=00: a gives 10, then b gives 11
    CHECK(compose(a, b).apply_perm(0b00) == 0b11);
    CHECK(compose(b, a).apply_perm(0b00) == 0b10);
  }
  SUBCASE("double X is the identity") {
    ReversibleCircuit c(1);
    c.append(make_x(1));
    c.append(make_x(1));
    CHECK(c.apply_perm(0) == 0);
    CHECK(c.apply_perm(1) == 1);
  }
  SUBCASE("embed acts as identity off the mapped wires") {
    ReversibleCircuit x1(1);
    x1.append(make_x(1));
    ReversibleCircuit e = embed(x1, WireMap{{3}}, 3);
    CHECK(e.apply_perm(0b000) == 0b001);
    CHECK(e.apply_perm(0b110) == 0b111);
  }
}

TEST_CASE("parser") {
  SUBCASE("basic gates") {
    ReversibleCircuit c = parse_circuit("qubits 2\ncx 1 2\n");
    REQUIRE(c.elements.size() == 1);
    CHECK(c.width == 2);
    CHECK(std::get<Gate>(c.elements[0]).kind == GateKind::CNOT);

    ReversibleCircuit c2 = parse_circuit("qubits 3\nccx 1 2 3\nx 1\n");
    REQUIRE(c2.elements.size() == 2);
    CHECK(std::get<Gate>(c2.elements[0]).kind == GateKind::Toffoli);
    CHECK(std::get<Gate>(c2.elements[1]).kind == GateKind::X);
  }

  SUBCASE("duplicate wires are an error with a line number") {
    try {
      parse_circuit("qubits 1\ncx 1 1\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }

  SUBCASE("out-of-range wire") {
    CHECK_THROWS_AS(parse_circuit("qubits 2\nx 3\n"), ParseError);
  }

  SUBCASE("comments and blank lines") {
    ReversibleCircuit c = parse_circuit("# header\nqubits 2\n\nx 1 # flip\n");
    CHECK(c.elements.size() == 1);
  }

  SUBCASE("nested blocks") {
    std::string text =
        "qubits 4\n"
        "ctrl 4 {\n"
        "  wires 1 2 3\n"
        "  cx 1 2\n"
        "  ctrl 3 {\n"
        "    wires 1\n"
        "    x 1\n"
        "  }\n"
        "}\n";
    ReversibleCircuit c = parse_circuit(text);
    REQUIRE(c.elements.size() == 1);
    const auto& blk = std::get<ControlledBlock>(c.elements[0]);
    CHECK(blk.control == 4);
    CHECK(blk.inner->elements.size() == 2);
  }

  SUBCASE("round trip on random block circuits") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
      int width = 2 + static_cast<int>(rng() % 4);
      ReversibleCircuit c = random_circuit(rng, width, 5);
      if (width >= 3) {
        ReversibleCircuit innerc = random_circuit(rng, width - 1, 3);
        c.append(controlled(innerc, WireMap::offset(width - 1, 1), 1));
      }
      ReversibleCircuit rt = parse_circuit(serialize(c));
      CHECK(structurally_equal(rt, c));
      CHECK(serialize(rt) == serialize(c));
    }
  }
}

TEST_CASE("parser rejects malformed input without crashing") {
  const char* bad[] = {
      "",
      "qubits\n",
      "qubits 0\n",
      "qubits 99\nx 1\n",
      "qubits 2\nh 1\n",
      "qubits 2\nx one\n",
      "qubits 2\nccx 1 2\n",
      "qubits 2\nctrl 1 {\n",
      "qubits 2\nctrl 1 {\nx 1\n}\n",
      "qubits 3\nctrl 1 {\n  wires 2 2\n  x 1\n}\n",
      "qubits 3\nctrl 2 {\n  wires 1 2\n  x 1\n}\n",
      "qubits 2\n}\n",
      "x 1\nqubits 2\n",
  };
  for (const char* text : bad) CHECK_THROWS_AS(parse_circuit(text), ParseError);
}

TEST_CASE("flatten removes blocks and preserves semantics") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    int width = 2 + static_cast<int>(rng() % 3);
    ReversibleCircuit c = random_circuit(rng, width, 3);
    ReversibleCircuit innerc = random_circuit(rng, width - 1, 3);
    c.append(controlled(innerc, WireMap::offset(width - 1, 1), 1));
    if (width >= 3) {
      ReversibleCircuit deep(width - 1);
      deep.append(controlled(random_circuit(rng, width - 2, 2), WireMap::offset(width - 2, 1), 1));
      c.append(controlled(deep, WireMap::identity(width - 1), width));
    }
    ReversibleCircuit flat = flatten(c);
    CHECK(flat.width == c.width + 1);
    for (const auto& e : flat.elements) CHECK(std::holds_alternative<Gate>(e));
    for (BitString x = 0; x < (BitString{1} << width); ++x) {
      for (BitString borrow = 0; borrow <= 1; ++borrow) {
        BitString in = (x << 1) | borrow;
        BitString out = flat.apply_perm(in);
        CHECK((out & 1) == borrow);           // borrowed wire restored
        CHECK((out >> 1) == c.apply_perm(x));  // same permutation on the rest
      }
    }
  }
}
