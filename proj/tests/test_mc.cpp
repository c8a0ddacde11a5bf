#include <doctest.h>

#include <cmath>

#include "critlab/exact.hpp"
#include "critlab/mc.hpp"

using namespace critlab;

namespace {

SamplerConfig config(double beta, Algorithm a, int samples, std::uint64_t seed = 1) {
  SamplerConfig c;
  c.beta = beta;
  c.algorithm = a;
  c.samples = samples;
  c.thermalization_sweeps = 200;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("mc") {
  TEST_CASE("metropolis at infinite temperature accepts every flip") {
    const auto spec = LatticeSpec::cubic(2, 8, Boundary::periodic);
    const Hamiltonian h(spec, Coupling::nearest_neighbor(1.0));
    auto s = SpinConfiguration::all_up(spec);
    Rng rng(1);
    for (int i = 0; i < 10; ++i) CHECK(metropolis_sweep(s, 0.0, h, rng) == 64);

    BulkObservable bulk(h);
    const SampleSet set = run_chain(spec, Coupling::nearest_neighbor(1.0), config(0.0, Algorithm::metropolis, 100000 / 64 + 1), {&bulk});
    const Estimate m = set.estimate("bulk", "m");
    CHECK(std::abs(m.value) < 3.0 * m.error);
  }

  TEST_CASE("metropolis at low temperature keeps the aligned state") {
    const auto spec = LatticeSpec::cubic(2, 8, Boundary::periodic);
    const Hamiltonian h(spec, Coupling::nearest_neighbor(1.0));
    auto s = SpinConfiguration::all_up(spec);
    Rng rng(2);
    for (int i = 0; i < 100; ++i) metropolis_sweep(s, 5.0, h, rng);
    CHECK(s.total() == 64);
  }

  TEST_CASE("wolff cluster sizes at the temperature extremes") {
    const auto spec = LatticeSpec::cubic(2, 6, Boundary::periodic);
    const Hamiltonian h(spec, Coupling::nearest_neighbor(1.0));
    auto s = SpinConfiguration::all_up(spec);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) CHECK(wolff_update(s, 0.0, h, rng) == 1);
    auto up = SpinConfiguration::all_up(spec);
    CHECK(wolff_update(up, 50.0, h, rng) == 36);
    CHECK(up.total() == -36);
  }

  TEST_CASE("wolff clusters never flip the pinned shell") {
    const auto spec = LatticeSpec::cubic(2, 6, Boundary::plus);
    const Hamiltonian h(spec, Coupling::nearest_neighbor(1.0));
    auto up = SpinConfiguration::all_up(spec);
    Rng rng(4);
    CHECK(wolff_update(up, 50.0, h, rng) == -36);
    CHECK(up.total() == 36);
  }

  TEST_CASE("every sampler matches enumeration on small systems") {
    const auto nn = Coupling::nearest_neighbor(1.0);
    for (Boundary b : {Boundary::periodic, Boundary::free, Boundary::plus}) {
      const auto spec = LatticeSpec::cubic(2, 2, b);
      const Hamiltonian h(spec, nn);
      const auto ex = enumerate(spec, nn, 0.4);
      for (Algorithm a : {Algorithm::metropolis, Algorithm::wolff, Algorithm::mixed}) {
        CAPTURE(to_string(b));
        CAPTURE(to_string(a));
        BulkObservable bulk(h);
        TupleObservable tuples({{0, 1}, {0, 3}, {0}});
        const SampleSet s = run_chain(spec, nn, config(0.4, a, 40000, 7), {&bulk, &tuples});
        const Estimate m2 = s.estimate("bulk", "m2");
        const Estimate c01 = s.estimate("tuples", "s0_1");
        const Estimate m1 = s.estimate("tuples", "s0");
        CHECK(std::abs(m2.value - ex.magnetization_moment(2)) < 3.0 * m2.error);
        CHECK(std::abs(c01.value - ex.two_point(0, 1)) < 3.0 * c01.error);
        CHECK(std::abs(m1.value - ex.moment({0})) < 3.0 * std::max(m1.error, 1e-12));
      }
    }
  }

  TEST_CASE("high temperature magnetization vanishes on a free 32x32 box") {
    const auto spec = LatticeSpec::cubic(2, 32, Boundary::free);
    const auto nn = Coupling::nearest_neighbor(1.0);
    const Hamiltonian h(spec, nn);
    BulkObservable bulk(h);
    const SampleSet s = run_chain(spec, nn, config(0.25, Algorithm::wolff, 4000, 5), {&bulk});
    const Estimate m = s.estimate("bulk", "m");
    CHECK(std::abs(m.value) < 3.0 * m.error);
  }

  TEST_CASE("plus boundary magnetizes the low temperature phase") {
    const auto spec = LatticeSpec::cubic(2, 32, Boundary::plus);
    const auto nn = Coupling::nearest_neighbor(1.0);
    const Hamiltonian h(spec, nn);
    BulkObservable bulk(h);
    const SampleSet s = run_chain(spec, nn, config(0.5, Algorithm::mixed, 2000, 6), {&bulk});
    const Estimate m = s.estimate("bulk", "m");
    CHECK(m.value > 5.0 * m.error);
  }

  TEST_CASE("identical configuration reproduces the sample set for any thread count") {
    const auto spec = LatticeSpec::cubic(2, 8, Boundary::periodic);
    const auto nn = Coupling::nearest_neighbor(1.0);
    const Hamiltonian h(spec, nn);
    BulkObservable bulk(h);
    auto c = config(kBetaCritical2D, Algorithm::wolff, 500, 9);
    c.chains = 3;
    const SampleSet a = run_chain(spec, nn, c, {&bulk}, 1);
    const SampleSet b = run_chain(spec, nn, c, {&bulk}, 3);
    CHECK(a.series_csv() == b.series_csv());
    CHECK(a.get("bulk").block_sums == b.get("bulk").block_sums);
  }

  TEST_CASE("sampler configuration is validated") {
    SamplerConfig c;
    c.samples = 0;
    CHECK_THROWS(c.validate());
    c.samples = 10;
    c.stride_sweeps = 0;
    CHECK_THROWS(c.validate());
  }

  TEST_CASE("critical coupling constant") {
    CHECK(std::sinh(2.0 * kBetaCritical2D) == doctest::Approx(1.0).epsilon(1e-12));
  }
}
