#include <doctest.h>

#include <cmath>

#include "critlab/lattice.hpp"
#include "critlab/rng.hpp"

using namespace critlab;

namespace {

SpinConfiguration random_config(const LatticeSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::int8_t> v(static_cast<std::size_t>(spec.volume()));
  for (auto& s : v) s = rng.below(2) ? 1 : -1;
  return {spec, v};
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("aligned and frustrated energies on a 4x4 torus") {
    const auto spec = LatticeSpec::cubic(2, 4, Boundary::periodic);
    const auto nn = Coupling::nearest_neighbor(1.0);
    CHECK(energy(SpinConfiguration::all_up(spec), nn) == -32.0);
    CHECK(energy(SpinConfiguration::checkerboard(spec), nn) == 32.0);
  }

  TEST_CASE("dyson energy matches a brute-force pair sum") {
    const auto spec = LatticeSpec::cubic(1, 8, Boundary::periodic);
    const auto c = Coupling::dyson(1.0, 1.5, 8);
    const auto s = random_config(spec, 9);
    // minimal-image ring distance, each unordered pair once, cutoff 8 keeps all pairs
    double brute = 0.0;
    for (int x = 0; x < 8; ++x)
      for (int y = x + 1; y < 8; ++y) {
        const int d = std::min(y - x, 8 - (y - x));
        brute -= std::pow(d, -1.5) * s[x] * s[y];
      }
    CHECK(energy(s, c) == doctest::Approx(brute).epsilon(1e-12));
  }

  TEST_CASE("flip delta") {
    const auto spec = LatticeSpec::cubic(2, 4, Boundary::periodic);
    const auto nn = Coupling::nearest_neighbor(1.0);
    auto up = SpinConfiguration::all_up(spec);
    CHECK(flip_delta(up, 5, nn) == 8.0);

    auto s = random_config(spec, 4);
    const double d1 = flip_delta(s, 3, nn);
    s.flip(3);
    CHECK(d1 + flip_delta(s, 3, nn) == doctest::Approx(0.0));

    for (Boundary b : {Boundary::periodic, Boundary::free, Boundary::plus, Boundary::minus}) {
      const auto sp = LatticeSpec::cubic(2, 5, b);
      const Hamiltonian h(sp, nn);
      auto c = random_config(sp, 17);
      for (int site = 0; site < sp.volume(); ++site) {
        const double before = h.energy(c);
        const double delta = h.flip_delta(c, site);
        c.flip(site);
        CHECK(h.energy(c) - before == doctest::Approx(delta).epsilon(1e-12));
      }
    }
    const auto ring = LatticeSpec::cubic(1, 16, Boundary::free);
    const Hamiltonian hd(ring, Coupling::dyson(1.0, 1.25));
    auto c = random_config(ring, 2);
    for (int site = 0; site < 16; ++site) {
      const double before = hd.energy(c);
      const double delta = hd.flip_delta(c, site);
      c.flip(site);
      CHECK(hd.energy(c) - before == doctest::Approx(delta).epsilon(1e-12));
    }
  }

  TEST_CASE("magnetization") {
    const auto spec = LatticeSpec::cubic(2, 4, Boundary::periodic);
    auto up = SpinConfiguration::all_up(spec);
    CHECK(magnetization(up) == 1.0);
    CHECK(magnetization(SpinConfiguration::checkerboard(spec)) == 0.0);
    up.flip(7);
    CHECK(magnetization(up) == doctest::Approx(14.0 / 16.0));
  }

  TEST_CASE("plus boundary aligns with all-up at the energy floor") {
    const auto spec = LatticeSpec::cubic(2, 6, Boundary::plus);
    const Hamiltonian h(spec, Coupling::nearest_neighbor(1.0));
    CHECK(h.energy(SpinConfiguration::all_up(spec)) == doctest::Approx(h.energy_floor()));
    CHECK(h.energy(SpinConfiguration(spec, -1)) > h.energy_floor());
  }

  TEST_CASE("invalid input is refused") {
    CHECK_THROWS_AS(LatticeSpec::cubic(4, 4, Boundary::periodic).validate(), LatticeError);
    CHECK_THROWS_AS(Coupling::dyson(1.0, 0.9).validate(), LatticeError);
    CHECK_THROWS_AS(Coupling::nearest_neighbor(-1.0).validate(), LatticeError);
    CHECK_THROWS_AS(boundary_from_string("twisted"), LatticeError);
    const auto spec = LatticeSpec::cubic(2, 2, Boundary::periodic);
    CHECK_THROWS(SpinConfiguration(spec, std::vector<std::int8_t>{1, 0, 1, 1}));
  }

  TEST_CASE("torus displacement uses the minimal image") {
    const auto spec = LatticeSpec::cubic(2, 8, Boundary::periodic);
    const int a = spec.index({0, 0, 0}), b = spec.index({7, 5, 0});
    const Coords d = spec.displacement(a, b);
    CHECK(d[0] == -1);
    CHECK(d[1] == -3);
    CHECK(spec.distance(a, b) == doctest::Approx(std::sqrt(10.0)));
    CHECK(spec.shifted(a, {-1, 0, 0}) == spec.index({7, 0, 0}));
    const auto open = LatticeSpec::cubic(2, 8, Boundary::free);
    CHECK(open.shifted(a, {-1, 0, 0}) == -1);
  }
}
