#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "critlab/lattice.hpp"
#include "critlab/rng.hpp"
#include "critlab/stats.hpp"

namespace critlab {

/// beta_c J of the square-lattice Ising model, root of sinh(2 beta J) = 1.
inline constexpr double kBetaCritical2D = 0.440686793509772;
/// Literature estimate for the simple cubic lattice; metadata only.
inline constexpr double kBetaCritical3DEstimate = 0.2216544;

enum class Algorithm { metropolis, wolff, mixed };
std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

struct SamplerConfig {
  double beta = kBetaCritical2D;
  Algorithm algorithm = Algorithm::wolff;
  int thermalization_sweeps = 1000;
  int samples = 1000;
  int stride_sweeps = 1;
  std::uint64_t seed = 1;
  int chains = 1;
  int blocks = 50;  ///< jackknife blocks per run (split across chains)

  void validate() const;
};

/// One pass of single-site Metropolis visiting every site once, in a fresh
/// random order.
/// Returns the number of accepted flips.
long metropolis_sweep(SpinConfiguration& config, double beta, const Hamiltonian& h, Rng& rng);

/// Grows and flips one Wolff cluster from a random seed site. Returns the
/// cluster size; a cluster touching the frozen boundary shell is grown but
/// not flipped, and its size is returned negated.
long wolff_update(SpinConfiguration& config, double beta, const Hamiltonian& h, Rng& rng);

/// Observable recorded once per measurement. Scalar observables keep their
/// full time series; vector observables only keep block sums.
class Observable {
 public:
  virtual ~Observable() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> columns() const = 0;
  virtual bool keep_series() const { return false; }
  virtual void measure(const SpinConfiguration& config, std::span<double> out) = 0;
  /// Independent copy for another chain.
  virtual std::unique_ptr<Observable> clone() const = 0;
};

/// m, |m|, m^2, m^4 and the energy per site.
class BulkObservable final : public Observable {
 public:
  explicit BulkObservable(const Hamiltonian& h) : h_(&h) {}
  std::string name() const override { return "bulk"; }
  std::vector<std::string> columns() const override { return {"m", "abs_m", "m2", "m4", "e"}; }
  bool keep_series() const override { return true; }
  void measure(const SpinConfiguration& config, std::span<double> out) override;
  std::unique_ptr<Observable> clone() const override { return std::make_unique<BulkObservable>(*this); }

 private:
  const Hamiltonian* h_;
};

/// Products sigma_x sigma_y ... for a fixed list of site tuples.
class TupleObservable final : public Observable {
 public:
  explicit TupleObservable(std::vector<std::vector<int>> tuples) : tuples_(std::move(tuples)) {}
  std::string name() const override { return "tuples"; }
  std::vector<std::string> columns() const override;
  bool keep_series() const override { return true; }
  void measure(const SpinConfiguration& config, std::span<double> out) override;
  std::unique_ptr<Observable> clone() const override { return std::make_unique<TupleObservable>(*this); }
  const std::vector<std::vector<int>>& tuples() const { return tuples_; }

 private:
  std::vector<std::vector<int>> tuples_;
};

struct ObservableData {
  std::string name;
  std::vector<std::string> columns;
  Eigen::MatrixXd block_sums;  ///< blocks x columns
  Eigen::VectorXd block_counts;
  Eigen::MatrixXd series;      ///< measurements x columns, empty unless kept

  JackknifeSet jackknife() const { return JackknifeSet::from_blocks(block_sums, block_counts); }
  int column(const std::string& c) const;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string rng;
  std::string algorithm;
  std::string config_hash;
  double beta = 0.0;
  int chains = 1;
  long measurements = 0;
  double acceptance = 0.0;         ///< metropolis acceptance rate, if used
  double mean_cluster_size = 0.0;  ///< wolff, if used
  std::string beta_note;
};

struct SampleSet {
  LatticeSpec spec;
  Coupling coupling;
  SamplerConfig sampler;
  std::vector<ObservableData> observables;
  Provenance provenance;
  /// Integrated autocorrelation times of kept scalar columns, in measurements.
  std::vector<std::pair<std::string, double>> tau_int;
  /// Columns whose chain halves disagree beyond 5 sigma.
  std::vector<std::string> drift_warnings;

  const ObservableData& get(const std::string& name) const;
  Estimate estimate(const std::string& observable, const std::string& column) const;

  /// CSV of kept series: header then one row per measurement.
  std::string series_csv() const;
  /// JSON document with seed, spec, coupling, algorithm and autocorrelation data.
  std::string provenance_json() const;
};

/// Thermalize, sample and accumulate. Chains run on up to `threads` workers
/// with RNG streams jump()-separated from the seed; results are merged in
/// chain order so the output does not depend on the thread count.
SampleSet run_chain(const LatticeSpec& spec, const Coupling& coupling, const SamplerConfig& config,
                    const std::vector<const Observable*>& observables, int threads = 1);

/// Stable 64-bit FNV-1a hash as hex.
std::string hash_string(const std::string& text);

}  // namespace critlab
