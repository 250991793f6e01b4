#include <doctest.h>

#include "asep/lattice.hpp"

using namespace asep;

TEST_CASE("cylinder sizes") {
  Lattice l = Lattice::cylinder(2, 3);
  CHECK(l.side() == 5);
  CHECK(l.site_count() == 125);

  Lattice tiny = Lattice::cylinder(1, 1);
  CHECK(tiny.side() == 3);
  CHECK(tiny.site_count() == 3);

  Lattice big = Lattice::cylinder(8, 3);
  CHECK(big.side() == 17);
  CHECK(big.site_count() == 4913);

  CHECK_THROWS_AS(Lattice::cylinder(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(Lattice::cylinder(2, 0), std::invalid_argument);
}

TEST_CASE("encode/decode round-trips over the whole (2,2) lattice") {
  Lattice l = Lattice::cylinder(2, 2);
  for (int64_t s = 0; s < l.site_count(); ++s) {
    Coords c = l.decode(s);
    CHECK(l.encode(c) == s);
    for (int a = 0; a < 2; ++a) {
      CHECK(c[a] >= -2);
      CHECK(c[a] <= 2);
    }
  }
}

TEST_CASE("axis-1 wall and periodic wrap") {
  Lattice l = Lattice::cylinder(3, 3);

  Coords at_wall{};
  at_wall[0] = 3;  // x1 = +inv_eps
  auto beyond = l.neighbor(l.encode(at_wall), 1, +1);
  CHECK(!beyond.has_value());

  Coords at_edge{};
  at_edge[1] = 3;
  auto wrapped = l.neighbor(l.encode(at_edge), 2, +1);
  REQUIRE(wrapped.has_value());
  Coords w = l.decode(*wrapped);
  CHECK(w[1] == -3);
  CHECK(w[0] == 0);
  CHECK(w[2] == 0);

  Coords interior{};
  auto left = l.neighbor(l.encode(interior), 1, -1);
  REQUIRE(left.has_value());
  CHECK(l.decode(*left)[0] == -1);

  CHECK_THROWS_AS(l.neighbor(0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(l.neighbor(0, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(l.neighbor(0, 1, 2), std::invalid_argument);
}

TEST_CASE("neighbor inverse property on the interior") {
  Lattice l = Lattice::cylinder(2, 3);
  for (int64_t s = 0; s < l.site_count(); ++s) {
    for (int axis = 1; axis <= 3; ++axis) {
      auto fwd = l.neighbor(s, axis, +1);
      if (!fwd) continue;
      auto back = l.neighbor(*fwd, axis, -1);
      REQUIRE(back.has_value());
      CHECK(*back == s);
    }
  }
}

TEST_CASE("boundary classification") {
  Lattice l = Lattice::cylinder(2, 3);

  Coords left{};
  left[0] = -2;
  CHECK(l.classify(l.encode(left)) == BoundaryClass::GammaPlus);

  Coords transverse{};
  transverse[1] = 2;
  CHECK(l.classify(l.encode(transverse)) == BoundaryClass::Interior);

  int64_t plus = 0, minus = 0, interior = 0;
  for (int64_t s = 0; s < l.site_count(); ++s) {
    switch (l.classify(s)) {
      case BoundaryClass::GammaPlus: ++plus; break;
      case BoundaryClass::GammaMinus: ++minus; break;
      case BoundaryClass::Interior: ++interior; break;
    }
  }
  CHECK(plus == 25);
  CHECK(minus == 25);
  CHECK(plus + minus + interior == l.site_count());
}

TEST_CASE("torus wraps axis 1 and has no boundary") {
  Lattice t = Lattice::torus(2, 2);
  Coords at_wall{};
  at_wall[0] = 2;
  auto wrapped = t.neighbor(t.encode(at_wall), 1, +1);
  REQUIRE(wrapped.has_value());
  CHECK(t.decode(*wrapped)[0] == -2);
  for (int64_t s = 0; s < t.site_count(); ++s)
    CHECK(t.classify(s) == BoundaryClass::Interior);
}

TEST_CASE("macroscopic embedding") {
  Lattice l = Lattice::cylinder(4, 2);
  CHECK(l.macro_position(-4, 0) == doctest::Approx(-1.0));
  CHECK(l.macro_position(4, 0) == doctest::Approx(1.0));
  CHECK(l.macro_position(0, 1) == doctest::Approx(0.0));
  CHECK(l.macro_position(1, 1) == doctest::Approx(2.0 / 9.0));
}
