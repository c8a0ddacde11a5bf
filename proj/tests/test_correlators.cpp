#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "critlab/correlators.hpp"
#include "critlab/ursell.hpp"

using namespace critlab;

namespace {

double norm(const Coords& d) { return std::sqrt(double(d[0]) * d[0] + double(d[1]) * d[1] + double(d[2]) * d[2]); }

}  // namespace

TEST_SUITE("correlators") {
  TEST_CASE("set partitions are counted by the Bell numbers") {
    const int bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
    for (int r = 1; r <= kMaxUrsellOrder; ++r) CHECK(set_partitions(r).size() == static_cast<std::size_t>(bell[r]));
  }

  TEST_CASE("connected functions of a product measure vanish") {
    const auto spec = LatticeSpec::cubic(2, 2, Boundary::periodic);
    const auto ex = enumerate(spec, Coupling::nearest_neighbor(1.0), 0.0);
    UrsellCalculator u([&](const SiteTuple& t) -> std::optional<double> { return ex.moment(t); });
    for (int r = 2; r <= 6; ++r)
      for (const auto& t : all_tuples(4, r)) {
        bool distinct = true;
        for (std::size_t i = 1; i < t.size(); ++i) distinct &= t[i] != t[i - 1];
        if (distinct) CHECK(std::abs(u.connected(t)) < 1e-12);
      }
  }

  TEST_CASE("single-site fourth cumulant of a symmetric spin") {
    UrsellCalculator u([](const SiteTuple& t) -> std::optional<double> { return t.size() % 2 ? 0.0 : 1.0; });
    CHECK(u.connected({0, 0}) == doctest::Approx(1.0));
    CHECK(u.connected({0, 0, 0, 0}) == doctest::Approx(-2.0));
  }

  TEST_CASE("two-point connected function is the covariance") {
    const auto spec = LatticeSpec::cubic(2, 2, Boundary::plus);
    const auto ex = enumerate(spec, Coupling::nearest_neighbor(1.0), 0.4);
    UrsellCalculator u([&](const SiteTuple& t) -> std::optional<double> { return ex.moment(t); });
    CHECK(u.connected({0, 3}) == doctest::Approx(ex.two_point(0, 3) - ex.moment({0}) * ex.moment({3})).epsilon(1e-14));
    CHECK(u.connected({2}) == doctest::Approx(ex.moment({2})));
  }

  TEST_CASE("ursell recursion round-trips to the moments up to order six") {
    for (int ny : {2, 4}) {
      const int ext[2] = {2, ny};
      const auto ex = enumerate(LatticeSpec::box(ext, Boundary::plus), Coupling::nearest_neighbor(1.0), 0.4);
      UrsellCalculator u([&](const SiteTuple& t) -> std::optional<double> { return ex.moment(t); });
      for (int r = 1; r <= 6; ++r)
        for (const auto& t : all_tuples(ex.volume(), r)) CHECK(u.moment_from_connected(t) == doctest::Approx(ex.moment(t)).epsilon(1e-10));
    }
  }

  TEST_CASE("griffiths and lebowitz audits on exact data") {
    for (double beta : {0.0, 0.4}) {
      const auto ex = enumerate(LatticeSpec::cubic(2, 2, Boundary::periodic), Coupling::nearest_neighbor(1.0), beta);
      const auto t2 = all_tuples(4, 2), t4 = all_tuples(4, 4);
      const MomentTable m = MomentTable::from_exact(ex, [&] {
        std::vector<SiteTuple> all;
        for (int r = 1; r <= 4; ++r)
          for (auto& t : all_tuples(4, r)) all.push_back(t);
        return all;
      }());
      const auto w2 = connected_from_moments(m, 2, t2);
      const auto w4 = connected_from_moments(m, 4, t4);
      const InequalityAudit a = inequality_audit(w2, w4);
      CHECK(a.griffiths_checked > 0);
      CHECK(a.griffiths_violations == 0);
      CHECK(a.lebowitz_violations == 0);
      if (beta == 0.0) {
        for (const auto& [t, v] : w2.values)
          if (t[0] != t[1]) CHECK(std::abs(v) < 1e-12);
        for (const auto& [t, v] : w4.values) {
          std::set<int> sites(t.begin(), t.end());
          if (sites.size() == 4) CHECK(std::abs(v) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("summability of synthetic two-point functions") {
    const auto spec = LatticeSpec::cubic(2, 256, Boundary::periodic);
    const auto fast = synthetic_two_point(spec, [](const Coords& d) { return std::exp(-norm(d)); });
    CHECK(summability_diagnostic(fast, default_radii(fast)).verdict == "summable");

    const auto slow = synthetic_two_point(spec, [](const Coords& d) { return d == Coords{0, 0, 0} ? 1.0 : std::pow(norm(d), -1.75); });
    const SummabilityReport r = summability_diagnostic(slow, default_radii(slow));
    CHECK(r.verdict == "non_summable");
    CHECK(r.divergence_exponent == doctest::Approx(0.25).epsilon(0.2));
  }

  TEST_CASE("spectral measure of white noise and of a cosine") {
    const auto spec = LatticeSpec::cubic(2, 8, Boundary::periodic);
    const auto delta = synthetic_two_point(spec, [](const Coords& d) { return d == Coords{0, 0, 0} ? 1.0 : 0.0; });
    const SpectralTable s = spectral_measure(delta);
    for (double v : s.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.positive());

    const double k0 = 2.0 * std::numbers::pi * 2.0 / 8.0;
    const auto cosine = synthetic_two_point(spec, [&](const Coords& d) { return 0.5 * std::cos(k0 * d[0]); });
    const SpectralTable c = spectral_measure(cosine);
    double off = 0.0;
    int peaks = 0;
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      const auto k = c.momentum(i);
      const bool at_peak = std::abs(std::abs(k[0]) - k0) < 1e-9 && std::abs(k[1]) < 1e-9;
      if (at_peak) {
        ++peaks;
        CHECK(c.values[i] > 1.0);
      } else {
        off = std::max(off, std::abs(c.values[i]));
      }
    }
    CHECK(peaks == 2);
    CHECK(off < 1e-12);
    CHECK(c.max_asymmetry < 1e-12);
  }

  TEST_CASE("non-periodic data is refused by the spectral measure") {
    const auto ex = enumerate(LatticeSpec::cubic(2, 3, Boundary::free), Coupling::nearest_neighbor(1.0), 0.2);
    CHECK_THROWS(spectral_measure(two_point_from_exact(ex)));
  }

  TEST_CASE("eta fit recovers an exact power law") {
    const auto spec = LatticeSpec::cubic(2, 128, Boundary::periodic);
    const auto w = synthetic_two_point(spec, [](const Coords& d) { return d == Coords{0, 0, 0} ? 1.0 : std::pow(norm(d), -0.25); });
    FitWindow win;
    win.finite_size_terms = false;
    const EtaFit e = eta_fit(w, win);
    CHECK(e.eta == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(e.preferred == "power_law");
    CHECK(e.ergodicity_ok);
  }

  TEST_CASE("eta fit prefers the exponential for clustering data") {
    const auto spec = LatticeSpec::cubic(2, 128, Boundary::periodic);
    const auto w = synthetic_two_point(spec, [](const Coords& d) { return std::exp(-norm(d) / 3.0); });
    FitWindow win;
    win.finite_size_terms = false;
    const EtaFit e = eta_fit(w, win);
    CHECK(e.preferred == "exponential");
    CHECK(e.poor_fit);
  }

  TEST_CASE("exact two-point function on a torus") {
    const auto ex = enumerate(LatticeSpec::cubic(2, 4, Boundary::periodic), Coupling::nearest_neighbor(1.0), 0.3);
    const TwoPointFunction w = two_point_from_exact(ex);
    const std::size_t i = w.index({1, 0, 0});
    REQUIRE(i != TwoPointFunction::npos);
    CHECK(w.values.mean(static_cast<Eigen::Index>(i)) == doctest::Approx(ex.two_point(0, 1)).epsilon(1e-12));
    CHECK(spectral_measure(w).positive());
  }
}
