#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "critlab/rng.hpp"
#include "critlab/stats.hpp"

using namespace critlab;

TEST_SUITE("stats") {
  TEST_CASE("moment and cumulant conversions are inverse") {
    // single +-1 spin: m2 = m4 = 1, odd moments zero
    const std::vector<double> m{0.0, 0.0, 1.0, 0.0, 1.0};
    const auto k = moments_to_cumulants(m);
    CHECK(k[2] == doctest::Approx(1.0));
    CHECK(k[4] == doctest::Approx(-2.0));
    const auto back = cumulants_to_moments(k);
    for (std::size_t i = 1; i < m.size(); ++i) CHECK(back[i] == doctest::Approx(m[i]).epsilon(1e-14));
  }

  TEST_CASE("gaussian fourth cumulant vanishes within errors") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd x(200000, 4);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double g = nd(gen);
      x(i, 0) = g;
      x(i, 1) = g * g;
      x(i, 2) = g * g * g;
      x(i, 3) = g * g * g * g;
    }
    const JackknifeSet raw = JackknifeSet::from_samples(x, 50);
    const JackknifeSet k4 = raw.apply([](const Eigen::VectorXd& v) {
      const std::vector<double> m{0.0, v(0), v(1), v(2), v(3)};
      return Eigen::VectorXd::Constant(1, moments_to_cumulants(m)[4]);
    });
    CHECK(std::abs(k4.mean(0)) < 3.0 * k4.error()(0));
  }

  TEST_CASE("line fit recovers slope and intercept") {
    const std::vector<double> x{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
    const LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.chi2 == doctest::Approx(0.0).epsilon(1e-20));
  }

  TEST_CASE("autocorrelation time of independent data is one half") {
    Rng rng(11);
    std::vector<double> s(100000);
    for (double& v : s) v = rng.uniform();
    CHECK(integrated_autocorrelation_time(s) == doctest::Approx(0.5).epsilon(0.1));
  }

  TEST_CASE("AR(1) autocorrelation time matches closed form") {
    Rng rng(5);
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    const double a = 0.8;
    std::vector<double> s(400000);
    double v = 0.0;
    for (double& x : s) x = v = a * v + nd(gen);
    // tau = 1/2 + a/(1-a)
    CHECK(integrated_autocorrelation_time(s) == doctest::Approx(0.5 + a / (1 - a)).epsilon(0.08));
  }

  TEST_CASE("kendall tau on a perfectly decreasing sequence") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6}, y{6, 5, 4, 3, 2, 1};
    const KendallResult k = kendall_tau(x, y);
    CHECK(k.tau == doctest::Approx(-1.0));
    CHECK(k.p_decreasing == doctest::Approx(1.0 / 720.0));
  }

  TEST_CASE("xoshiro jump streams are distinct and reproducible") {
    auto a = Rng::stream(42, 1), b = Rng::stream(42, 1), c = Rng::stream(42, 2);
    CHECK(a == b);
    CHECK(a() != c());
  }
}
