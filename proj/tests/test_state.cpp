#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stoqlab/state.hpp"

using namespace stoqlab;
using namespace testutil;

TEST_CASE("subset states") {
  NonNegState zero = subset_state(1, {0});
  CHECK(zero.mass(0) == 1.0);
  CHECK(zero.mass(1) == 0.0);

  NonNegState plus = subset_state(1, {0, 1});
  CHECK(plus.amplitude(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(plus.amplitude(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  CHECK_THROWS(subset_state(1, {}));
  CHECK_THROWS(subset_state(2, {1, 1}));

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(rng() % 8);
    NonNegState w = random_witness(rng, n);
    std::vector<BitString> keys;
    for (const auto& e : w.entries) keys.push_back(e.key);
    NonNegState s = subset_state(n, keys);
    CHECK(s.squared_norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("inner products") {
  CHECK(inner(subset_state(1, {0}), subset_state(1, {1})) == 0.0);

  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    NonNegState w = random_witness(rng, 4);
    CHECK(inner(w, w) == doctest::Approx(1.0).epsilon(1e-13));
  }

  // <{0,1}|0> = 1/sqrt(2), by direct arithmetic
  double v = inner(subset_state(1, {0, 1}), subset_state(1, {0}));
  CHECK(v == doctest::Approx(0.70710678118654752).epsilon(1e-15));

  CHECK_THROWS(inner(subset_state(1, {0}), subset_state(2, {0})));
}

TEST_CASE("hellinger distance") {
  SubDistribution a{1, {{0, 1.0}}};
  SubDistribution b{1, {{0, 0.25}, {1, 0.75}}};
  // 1/2 (2 - 2*sqrt(1*1/4)) = 1/2
  CHECK(hellinger_sq(a, b) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hellinger_sq(a, a) == 0.0);
  CHECK(hellinger_sq(b, b) == 0.0);

  SubDistribution c{1, {{1, 1.0}}};
  CHECK(hellinger_sq(a, c) == 1.0);  // normalized, disjoint supports

  // strictly positive whenever the distributions differ
  std::mt19937_64 prng(300);
  for (int trial = 0; trial < 30; ++trial) {
    NonNegState x = random_witness(prng, 4);
    NonNegState y = random_witness(prng, 4);
    SubDistribution dx{4, x.entries}, dy{4, y.entries};
    if (dx.entries.size() == dy.entries.size()) {
      bool equal = true;
      for (size_t i = 0; i < dx.entries.size(); ++i)
        equal &= dx.entries[i].key == dy.entries[i].key && dx.entries[i].mass == dy.entries[i].mass;
      if (equal) continue;
    }
    CHECK(hellinger_sq(dx, dy) > 0.0);
  }

  // algebraic identity: h + cross = (|D0| + |D1|)/2
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 40; ++trial) {
    NonNegState x = random_witness(rng, 5);
    NonNegState y = random_witness(rng, 5);
    SubDistribution dx{5, x.entries}, dy{5, y.entries};
    double cross = 0;
    for (const auto& e : dx.entries) {
      double m = dy.mass(e.key);
      if (m > 0) cross += std::sqrt(e.mass * m);
    }
    double lhs = hellinger_sq(dx, dy) + cross;
    CHECK(lhs == doctest::Approx(0.5 * (dx.total_mass() + dy.total_mass())).epsilon(1e-12));
  }
}

TEST_CASE("split by wire") {
  // |+> on one wire: both halves carry mass 1/2 at the empty remainder
  auto [d0, d1] = split_by_wire(subset_state(1, {0, 1}), 1);
  CHECK(d0.width == 0);
  CHECK(d0.mass(0) == 0.5);
  CHECK(d1.mass(0) == 0.5);

  // |0>|psi>: D1 empty
  NonNegState s = subset_state(2, {0b00, 0b01});
  auto [e0, e1] = split_by_wire(s, 1);
  CHECK(e1.entries.empty());
  CHECK(e0.total_mass() == doctest::Approx(1.0).epsilon(1e-15));

  SUBCASE("mass conservation on random states") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
      int n = 1 + static_cast<int>(rng() % 7);
      NonNegState w = random_witness(rng, n);
      int wire = 1 + static_cast<int>(rng() % n);
      auto [a, b] = split_by_wire(w, wire);
      CHECK(a.total_mass() + b.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("acceptance identity against split halves") {
  // 1/2 || |D0> + |D1> ||^2 = 1/2 + <D0|D1> for any normalized state
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + static_cast<int>(rng() % 6);
    NonNegState w = random_witness(rng, n);
    int wire = 1 + static_cast<int>(rng() % n);
    auto [d0, d1] = split_by_wire(w, wire);
    double cross = inner(to_amplitudes(d0), to_amplitudes(d1));
    double half_norm = 0.5 * (d0.total_mass() + d1.total_mass()) + cross;
    CHECK(half_norm == doctest::Approx(0.5 + cross).epsilon(1e-12));
  }
}

TEST_CASE("sparse operations agree with a dense reference up to n = 10") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(rng() % 9);
    NonNegState a = random_witness(rng, n);
    NonNegState b = random_witness(rng, n);
    std::vector<double> da(size_t{1} << n, 0.0), db(size_t{1} << n, 0.0);
    for (const auto& e : a.entries) da[e.key] = std::sqrt(e.mass);
    for (const auto& e : b.entries) db[e.key] = std::sqrt(e.mass);

    CHECK(inner(a, b) == doctest::Approx(dense_inner(da, db)).epsilon(1e-12));

    int wire = 1 + static_cast<int>(rng() % n);
    auto [d0, d1] = split_by_wire(a, wire);
    double dense_d1 = 0;
    for (BitString x = 0; x < da.size(); ++x)
      if (get_wire(x, n, wire)) dense_d1 += da[x] * da[x];
    CHECK(d1.total_mass() == doctest::Approx(dense_d1).epsilon(1e-12));

    double ex = expectation_x(a, wire);
    double dense_ex = 0;
    for (BitString x = 0; x < da.size(); ++x)
      dense_ex += da[x] * da[flip_wire(x, n, wire)];
    CHECK(ex == doctest::Approx(dense_ex).epsilon(1e-12));
  }
}

TEST_CASE("witness files") {
  NonNegState w = parse_witness("width 2\n01 0.25\n10 0.75\n");
  CHECK(w.mass(0b01) == 0.25);
  CHECK(w.mass(0b10) == 0.75);

  // weights normalize on load
  NonNegState u = parse_witness("width 1\n0 3\n1 1\n");
  CHECK(u.mass(0) == doctest::Approx(0.75).epsilon(1e-15));

  CHECK_THROWS_AS(parse_witness("width 2\n0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_witness("width 1\n0 -1\n"), ParseError);
  CHECK_THROWS_AS(parse_witness("0 1\n"), ParseError);

  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    NonNegState x = random_witness(rng, 5);
    NonNegState rt = parse_witness(serialize_witness(x));
    REQUIRE(rt.entries.size() == x.entries.size());
    for (size_t i = 0; i < x.entries.size(); ++i) {
      CHECK(rt.entries[i].key == x.entries[i].key);
      CHECK(rt.entries[i].mass == doctest::Approx(x.entries[i].mass).epsilon(1e-14));
    }
  }
}

TEST_CASE("normalization flag validation") {
  CHECK_THROWS(make_state(1, {{0, 0.5}}, true));
  NonNegState sub = make_state(1, {{0, 0.5}}, false);
  CHECK(sub.squared_norm() == 0.5);
}
