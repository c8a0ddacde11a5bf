#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "critlab/quantum_gap.hpp"

using namespace critlab;

TEST_SUITE("quantum_gap") {
  TEST_CASE("spin algebra") {
    for (int two_s = 1; two_s <= 4; ++two_s) {
      const SpinOperators s = SpinOperators::make(two_s);
      CHECK(s.commutation_error() < 1e-12);
      CHECK(s.casimir_error() < 1e-12);
    }
  }

  TEST_CASE("spin one half domination spectrum") {
    for (int sign : {1, -1}) {
      const DominationResult d = domination_check(1, sign);
      CHECK(d.min_eigenvalue == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(d.pass);
    }
    for (int two_s : {2, 3})
      for (int sign : {1, -1}) CHECK(domination_check(two_s, sign).min_eigenvalue >= -1e-10);
  }

  TEST_CASE("couplings violating the domination condition are refused") {
    CHECK_THROWS(QuantumChainSpec::nearest_neighbor(3, 1, 0.5, 1.0));
    QuantumChainSpec chain = QuantumChainSpec::nearest_neighbor(3, 1, 1.0, 0.5);
    chain.bonds.front().J = 2.0;
    CHECK_THROWS(chain.validate());
  }

  TEST_CASE("two-site plus sector") {
    const auto chain = QuantumChainSpec::nearest_neighbor(2, 1, 1.0, 0.0);
    const GapResult g = gap_check(chain, GapBoundary::plus);
    CHECK(g.ground_energy == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.bound == doctest::Approx(0.5));
    CHECK(g.pass);
  }

  TEST_CASE("classical chains have a combinatorial gap") {
    for (int n = 2; n <= 6; ++n)
      for (int two_s : {1, 2}) {
        const auto chain = QuantumChainSpec::nearest_neighbor(n, two_s, 1.0, 0.0);
        for (GapBoundary b : {GapBoundary::plus, GapBoundary::minus})
          CHECK(gap_check(chain, b).gap == doctest::Approx(combinatorial_gap(chain, b)).epsilon(1e-12));
      }
  }

  TEST_CASE("four-site chain with transverse coupling keeps the gap bound") {
    const auto chain = QuantumChainSpec::nearest_neighbor(4, 1, 1.0, 0.5);
    CHECK(chain.delta() == doctest::Approx(0.5));
    const GapResult g = gap_check(chain, GapBoundary::plus);
    CHECK(g.gap >= 0.25 - 1e-9);
    CHECK(g.hermiticity_error < 1e-12);
  }

  TEST_CASE("sublattice rotation maps J to -J") {
    for (double J : {0.25, 0.5})
      CHECK(sublattice_equivalence(QuantumChainSpec::nearest_neighbor(6, 1, 1.0, J)) < 1e-10);
  }

  TEST_CASE("chain hamiltonian is bounded below by zero") {
    CHECK(min_chain_eigenvalue(QuantumChainSpec::nearest_neighbor(5, 1, 1.0, 0.5)) >= -1e-10);
  }
}
