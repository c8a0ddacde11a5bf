#include <doctest.h>

#include <cmath>
#include <random>

#include "critlab/dyson.hpp"
#include "critlab/newman.hpp"

using namespace critlab;

namespace {

const Coupling nn = Coupling::nearest_neighbor(1.0);

std::vector<ExactMoments> exact_family(const std::vector<int>& sizes, double beta, Boundary b) {
  std::vector<ExactMoments> out;
  for (int n : sizes) out.push_back(enumerate(LatticeSpec::cubic(2, n, b), nn, beta));
  return out;
}

std::vector<double> linear_grid(double a, double b, int n) {
  std::vector<double> z;
  for (int i = 0; i < n; ++i) z.push_back(a + (b - a) * i / (n - 1));
  return z;
}

}  // namespace

TEST_SUITE("newman") {
  TEST_CASE("exact profiles at infinite temperature are log cosh") {
    const std::vector<int> sizes{2, 3, 4};
    const ProfileSeries p = profile_estimate(exact_family(sizes, 0.0, Boundary::periodic), sizes, linear_grid(0.0, 1.0, 11));
    for (std::size_t v = 0; v < sizes.size(); ++v) {
      CHECK(p.f[v][0] == 0.0);
      for (std::size_t i = 0; i < p.z.size(); ++i) CHECK(p.f[v][i] == doctest::Approx(std::log(std::cosh(p.z[i]))).epsilon(1e-12));
    }
  }

  TEST_CASE("exact profiles are convex and grow with the volume") {
    for (Boundary b : {Boundary::periodic, Boundary::free}) {
      const std::vector<int> sizes{2, 4};
      const ProfileSeries p = profile_estimate(exact_family(sizes, 0.3, b), sizes, linear_grid(0.0, 1.0, 21));
      const ProfileChecks c = profile_checks(p);
      CHECK(c.zero_at_origin);
      CHECK(c.convex);
      CHECK(c.monotone_in_volume);
    }
  }

  TEST_CASE("small-z exponent of quadratic and log cosh profiles") {
    const auto z = log_grid(1e-3, 0.1, 25);
    std::vector<double> quad, lc;
    for (double x : z) {
      quad.push_back(x * x);
      lc.push_back(2.0 * std::log(std::cosh(x)));
    }
    CHECK(small_z_exponent(z, quad).value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(small_z_exponent(z, lc).value == doctest::Approx(2.0).epsilon(1e-3));
  }

  TEST_CASE("gaussian block sums give p = 2") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> nd;
    const std::vector<int> sizes{4, 8, 16, 32};
    std::vector<long> volumes;
    std::vector<std::vector<double>> samples;
    for (int n : sizes) {
      volumes.push_back(long(n) * n);
      std::vector<double> s(20000);
      for (double& x : s) x = n * nd(gen);
      samples.push_back(s);
    }
    const auto z = log_grid(1e-4, 1e-2, 21);
    const ProfileSeries p = profile_estimate(samples, sizes, volumes, z);
    const VarianceSeries v = variance_series(samples, sizes, volumes);
    const ExponentEstimates e = exponent_estimates(p, v, 2);
    CHECK(e.p_hat == doctest::Approx(2.0).epsilon(0.01));
    CHECK(e.eta_hat == doctest::Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("buckingham-gunton arithmetic") {
    const BgReport mf = bg_check(p_from_delta(3.0), 0.0, 4);
    CHECK(mf.lhs == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mf.rhs == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mf.pass);
    const BgReport ising = bg_check(p_from_delta(15.0), 0.25, 2);
    CHECK(ising.lhs == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(ising.rhs == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(std::abs(ising.margin) < 1e-12);
    const BgReport g = bg_check(2.0, 0.0, 2);
    CHECK(g.rhs == 0.0);
    CHECK_FALSE(g.pass);
    CHECK(g.gaussian_endpoint);
    CHECK(bg_check(2.0, 2.0, 2).pass);
  }

  TEST_CASE("box variance of a delta covariance") {
    const auto delta = [](const Coords& d) { return d == Coords{0, 0, 0} ? 1.0 : 0.0; };
    for (int n : {1, 4, 9}) CHECK(box_variance(delta, n, 2) == doctest::Approx(double(n) * n));
  }

  TEST_CASE("sandwich constants for delta and power-law covariances") {
    const std::vector<int> sizes{8, 16, 32, 64};
    VarianceSeries white{sizes, {}, {}, {}};
    for (int n : sizes) {
      white.volumes.push_back(long(n) * n);
      white.tau2.push_back(double(n) * n);
      white.tau2_error.push_back(0.0);
    }
    const RadialTable F = RadialTable::synthetic([](double r) { return r == 0.0 ? 1.0 : 0.0; }, 2, 64);
    const SandwichReport w = sandwich_check(white, F, 2);
    CHECK(w.feasible);
    CHECK(w.K1 == doctest::Approx(1.0));
    CHECK(w.K2 == doctest::Approx(1.0));

    const auto power = [](const Coords& d) {
      const double r = std::hypot(d[0], d[1]);
      return r == 0.0 ? 1.0 : std::pow(r, -1.75);
    };
    VarianceSeries pl{sizes, {}, {}, {}};
    for (int n : sizes) {
      pl.volumes.push_back(long(n) * n);
      pl.tau2.push_back(box_variance(power, n, 2));
      pl.tau2_error.push_back(0.0);
    }
    const SandwichReport s = sandwich_check(pl, RadialTable::synthetic([](double r) { return r == 0.0 ? 1.0 : std::pow(r, -1.75); }, 2, 128), 2);
    CHECK(s.feasible);
    CHECK(s.K1 > 0.0);
    CHECK(s.K2 >= s.K1);
  }

  TEST_CASE("tail bound constants") {
    std::mt19937_64 gen(13);
    std::normal_distribution<double> nd;
    std::vector<double> x(1000000);
    for (double& v : x) v = nd(gen);
    const TailReport g = tail_bound_check(standardize(x), 2.0);
    CHECK(g.finite);
    CHECK(g.c >= 0.9);
    CHECK(g.c <= 1.3);

    std::vector<double> b(10000);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = i % 2 ? 1.0 : -1.0;
    CHECK(tail_bound_check(standardize(b), 1.5).finite);
  }

  TEST_CASE("standardized samples have zero mean and unit sample variance") {
    const auto s = standardize({1.0, 2.0, 4.0, 8.0});
    CHECK(mean(s) == doctest::Approx(0.0).epsilon(1e-14));
    double ss = 0.0;
    for (double v : s) ss += v * v;
    CHECK(ss / (s.size() - 1) == doctest::Approx(1.0));
  }
}
