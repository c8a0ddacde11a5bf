#include <doctest.h>

#include <cmath>
#include <numbers>

#include "critlab/dyson.hpp"

using namespace critlab;

TEST_SUITE("dyson") {
  TEST_CASE("cloitre product at special points") {
    CHECK(cloitre(0.0, 1.5).value == 1.0);
    CHECK(std::abs(cloitre(std::numbers::pi / 2, 10.0).value) < 1e-3);
    for (double t : {0.3, 1.0, 7.5, 42.0, 1e3})
      for (double a : {1.25, 1.5, 1.75}) CHECK(std::abs(cloitre(t, a).value) <= 1.0);
  }

  TEST_CASE("cloitre decays like a stretched exponential") {
    // -log|Cl(t)| / t^(1/alpha) stays bounded below by some c > 0
    double c = 1e300;
    for (double t : log_grid(10.0, 1e4, 60)) {
      const CloitreEval e = cloitre(t, 1.5);
      if (!e.exact_zero) c = std::min(c, -e.log_abs / std::pow(t, 1.0 / 1.5));
    }
    CHECK(c > 0.0);
  }

  TEST_CASE("decay constants") {
    for (double a : {1.25, 1.5, 1.75}) {
      const DecayConstants d = decay_constant(a);
      CHECK(d.C > 0.0);
      CHECK(d.converged);
      CHECK(d.C_error < 1e-8);
    }
  }

  TEST_CASE("cloitre asymptotics match the quadrature constant") {
    for (double a : {1.25, 1.5, 1.75}) {
      const AsymptoticFit f = cloitre_asymptotics(a);
      CHECK(f.relative_deviation < 0.02);
      CHECK(std::isfinite(f.K));
      CHECK(f.K > 0.0);
    }
  }

  TEST_CASE("magnetization decay") {
    const auto grid = log_grid(1.0, 1e4, 200);
    const DecaySeries zero = magnetization_decay(0.0, 1.5, 1.0, grid);
    for (double m : zero.m1) CHECK(m == 0.0);
    const DecaySeries at0 = magnetization_decay(0.6, 1.5, 1.0, {0.0, 100.0, 1e4});
    CHECK(at0.m1.front() == 0.6);
    const DecaySeries s = magnetization_decay(1.0, 1.5, 1.0, grid);
    CHECK(s.exponent == doctest::Approx(1.0 / 1.5).epsilon(0.03));
  }

  TEST_CASE("mean-field freezing and conservation") {
    MeanFieldState frozen{1.0, 1.0, 0.3, {0.6, 0.8, 0.0}, 0.0};
    const Trajectory f = meanfield_integrate(frozen, 100.0);
    CHECK(f.max_deviation < 1e-9);

    MeanFieldState iso{0.7, 0.7, 0.7, {0.2, -0.5, 0.3}, 0.0};
    CHECK(meanfield_integrate(iso, 10.0).max_deviation == 0.0);

    MeanFieldState generic{1.0, 2.0, 3.0, {0.6, 0.0, 0.8}, 0.0};
    const Trajectory g = meanfield_integrate(generic, 100.0);
    CHECK(g.max_casimir_drift < 1e-9);
    CHECK(g.max_deviation > 1e-3);
    CHECK(meanfield_reversal_error(generic, 10.0) < 1e-9);
  }

  TEST_CASE("droplet energy scales as N^(2 - alpha)") {
    for (double a : {1.25, 1.5, 1.75}) {
      const DropletFit d = droplet_scaling(a, {16, 32, 64, 128});
      CHECK(d.differenced);
      CHECK(d.slope == doctest::Approx(2.0 - a).epsilon(0.05));
      for (double e : d.energy) CHECK(e > 0.0);
    }
  }

  TEST_CASE("log grid endpoints") {
    const auto g = log_grid(100.0, 1e4, 3);
    CHECK(g[0] == doctest::Approx(100.0));
    CHECK(g[1] == doctest::Approx(1000.0));
    CHECK(g[2] == doctest::Approx(1e4));
  }
}
