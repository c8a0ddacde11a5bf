#include <doctest.h>

#include <cmath>
#include <numbers>

#include "critlab/charfunc.hpp"

using namespace critlab;

namespace {

const Coupling nn = Coupling::nearest_neighbor(1.0);

}  // namespace

TEST_SUITE("charfunc") {
  TEST_CASE("generating profile closed forms") {
    const auto one = LatticeSpec::cubic(1, 1, Boundary::free);
    const auto four = LatticeSpec::cubic(2, 2, Boundary::periodic);
    const auto p1 = generating_profile(one, nn, 0.5, {0.0, 0.3, 1.0});
    CHECK(p1[0].value == 1.0);
    CHECK(p1[1].value == doctest::Approx(std::cosh(0.3)).epsilon(1e-14));
    const auto p4 = generating_profile(four, nn, 0.0, {0.7});
    CHECK(p4[0].value == doctest::Approx(std::pow(std::cosh(0.7), 4)).epsilon(1e-13));
    const auto ex = enumerate(four, nn, 0.0);
    CHECK(std::abs(characteristic_function(ex, 0.4) - std::pow(std::cos(0.4), 4)) < 1e-14);
  }

  TEST_CASE("single site zeros and sum rules") {
    const ZeroSet z = single_site_zeros();
    CHECK(z.t.front() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    CHECK(z.k_total() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(z.cumulant(2) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(z.cumulant(4) == doctest::Approx(-2.0).epsilon(1e-10));
    const ZeroSet lat = lee_yang_zeros(LatticeSpec::cubic(1, 1, Boundary::free), nn, 0.3);
    CHECK(lat.t.front() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-10));
    CHECK(lat.k_total() == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("infinite temperature zeros are the cosh zeros with multiplicity N") {
    const ZeroSet z = lee_yang_zeros(LatticeSpec::cubic(2, 2, Boundary::periodic), nn, 0.0);
    REQUIRE(z.roots.size() == 1);
    CHECK(z.multiplicity.front() == 4);
    CHECK(z.base.size() == 4);
    for (double u : z.base) CHECK(u == doctest::Approx(std::numbers::pi / 2).epsilon(1e-10));
    CHECK(z.k_total() == doctest::Approx(4.0).epsilon(1e-9));
    const auto ex = enumerate(LatticeSpec::cubic(2, 2, Boundary::periodic), nn, 0.0);
    const DcgReport d = dcg_identities(z, ex);
    CHECK(d.zero_cumulants[1] == doctest::Approx(-8.0).epsilon(1e-9));
  }

  TEST_CASE("lee-yang circle, ordering and product reconstruction") {
    for (int n : {2, 3})
      for (double beta : {0.1, 0.3, 0.5}) {
        const auto ex = enumerate(LatticeSpec::cubic(2, n, Boundary::periodic), nn, beta);
        const ZeroSet z = lee_yang_zeros(ex);
        CHECK(z.circle_deviation < kUnitCircleTolerance);
        CHECK(z.t.front() > 0.0);
        for (std::size_t i = 1; i < z.t.size(); ++i) CHECK(z.t[i] >= z.t[i - 1]);
        CHECK(z.k_total() > 0.0);
        for (double x = 0.0; x <= 1.0; x += 0.05) {
          const double g = exact_generating(ex, {x, 0.0}).real();
          CHECK(std::abs(z.product(x) / g - 1.0) < 1e-6);
        }
      }
  }

  TEST_CASE("cumulants from zeros match the spin moments") {
    const auto ex = enumerate(LatticeSpec::cubic(2, 3, Boundary::periodic), nn, 0.3);
    const ZeroSet z = lee_yang_zeros(ex);
    const DcgReport d = dcg_identities(z, ex);
    CHECK(d.pass);
    CHECK(d.signs_alternate);
    CHECK(std::abs(d.moment_cumulants[1]) > 1e-6);
  }

  TEST_CASE("identities scale linearly with volume at infinite temperature") {
    const auto one = enumerate(LatticeSpec::cubic(1, 1, Boundary::free), nn, 0.0);
    const auto nine = enumerate(LatticeSpec::cubic(2, 3, Boundary::periodic), nn, 0.0);
    const auto c1 = exact_total_spin_cumulants(one), c9 = exact_total_spin_cumulants(nine);
    for (std::size_t k = 0; k < c1.size(); ++k) CHECK(c9[k] == doctest::Approx(9.0 * c1[k]).epsilon(1e-9));
  }

  TEST_CASE("schwarz chain on exact volumes") {
    std::vector<std::vector<double>> sets;
    for (int n : {1, 2, 3}) sets.push_back(exact_total_spin_cumulants(enumerate(LatticeSpec::cubic(2, n, Boundary::periodic), nn, 0.3)));
    CHECK(schwarz_chain_check(sets).pass);
    CHECK_THROWS(schwarz_chain_check({sets[0], sets[1]}));
  }
}
