#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "critlab/exact.hpp"
#include "critlab/mc.hpp"
#include "critlab/stats.hpp"
#include "critlab/ursell.hpp"

namespace critlab {

/// Connected r-point functions keyed by (translation-reduced) site tuples.
struct ConnectedFunctions {
  int order = 0;
  std::map<SiteTuple, double> values;
  std::map<SiteTuple, double> errors;  ///< empty for exact data
  std::string source = "exact";

  bool exact() const { return errors.empty(); }
  double error(const SiteTuple& t) const;
};

/// Moments keyed by site tuples, with optional jackknife replicates.
struct MomentTable {
  std::map<SiteTuple, int> column;  ///< sorted tuple -> component of data
  JackknifeSet data;
  const LatticeSpec* translation_invariant = nullptr;

  static MomentTable from_exact(const ExactMoments& exact, const std::vector<SiteTuple>& tuples);
  static MomentTable from_samples(const SampleSet& samples, const std::vector<SiteTuple>& tuples);
  static MomentTable from_values(const std::map<SiteTuple, double>& values);
};

/// Ursell functions of order r for the requested tuples, with jackknife errors
/// when the moments carry replicates. Throws MissingMomentError.
ConnectedFunctions connected_from_moments(const MomentTable& moments, int r, const std::vector<SiteTuple>& tuples);

/// Every multiset of r sites (r-combinations with repetition) of a lattice.
std::vector<SiteTuple> all_tuples(int volume, int r);

/// Per-measurement autocorrelation sums of the spin field and the site spins.
class TwoPointObservable final : public Observable {
 public:
  explicit TwoPointObservable(const LatticeSpec& spec);
  std::string name() const override { return "two_point"; }
  std::vector<std::string> columns() const override;
  void measure(const SpinConfiguration& config, std::span<double> out) override;
  std::unique_ptr<Observable> clone() const override { return std::make_unique<TwoPointObservable>(*this); }

  const Coords& grid() const { return grid_; }
  std::size_t grid_size() const;

 private:
  LatticeSpec spec_;
  Coords grid_{1, 1, 1};
};

/// W(d) = <sigma_x sigma_{x+d}> - <sigma_x><sigma_{x+d}> averaged over the
/// pairs available at displacement d. On the torus the grid is the lattice;
/// otherwise it is the doubled box with negative displacements wrapped.
struct TwoPointFunction {
  LatticeSpec spec;
  Coords grid{1, 1, 1};
  JackknifeSet values;
  std::vector<double> pair_counts;
  std::string source = "exact";

  std::size_t size() const { return pair_counts.size(); }
  bool valid(std::size_t index) const { return pair_counts[index] > 0.0; }
  Coords displacement(std::size_t index) const;
  double distance(std::size_t index) const;
  /// Index of a displacement, or npos when it is not on the grid.
  std::size_t index(const Coords& d) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

TwoPointFunction two_point_from_samples(const SampleSet& samples);
TwoPointFunction two_point_from_exact(const ExactMoments& exact);
/// Periodic synthetic W(d) as a function of the minimal-image displacement.
TwoPointFunction synthetic_two_point(const LatticeSpec& spec, const std::function<double(const Coords&)>& w);

struct RadialProfile {
  std::vector<double> r;
  std::vector<double> mean;
  std::vector<double> error;
  std::vector<int> multiplicity;
  JackknifeSet data;
  /// Largest relative deviation of on-axis values from their bin average.
  double anisotropy = 0.0;
};

RadialProfile radial_profile(const TwoPointFunction& w2, double max_radius);

struct SummabilityReport {
  std::vector<double> radii;
  std::vector<double> partial_sums;
  std::vector<double> partial_sum_errors;
  std::string verdict;  ///< summable | non_summable | inconclusive
  double log_slope = 0.0;
  double log_slope_error = 0.0;
  double divergence_exponent = 0.0;  ///< from the octave increments S(2R) - S(R)
  double divergence_exponent_error = 0.0;
  double tail_decay_rate = 0.0;
  double tail_decay_rate_error = 0.0;
  bool increments_below_noise = false;
};

/// Default radii: powers of two from 1 to the largest radius the grid covers.
std::vector<double> default_radii(const TwoPointFunction& w2);
SummabilityReport summability_diagnostic(const TwoPointFunction& w2, const std::vector<double>& radii);

struct SpectralTable {
  Coords grid{1, 1, 1};
  int dimension = 0;
  std::vector<double> values;
  std::vector<double> errors;
  double min_value = 0.0;
  double epsilon = 0.0;  ///< positivity tolerance
  std::size_t argmax = 0;
  double max_asymmetry = 0.0;  ///< max |W(k) - W(-k)|
  std::vector<std::pair<std::size_t, double>> violations;

  std::array<double, 3> momentum(std::size_t index) const;
  bool positive() const { return violations.empty(); }
};

/// Torus DFT of W; refuses non-periodic data.
SpectralTable spectral_measure(const TwoPointFunction& w2);

struct EtaFit {
  double eta = 0.0;
  double error = 0.0;
  double goodness = 0.0;  ///< reduced chi-square of the plain power law
  double model_goodness = 0.0;  ///< reduced chi-square of the fit that produced eta
  double exponential_goodness = 0.0;
  std::string preferred;  ///< power_law | exponential
  bool poor_fit = false;
  double r_min = 0.0, r_max = 0.0;
  double used_r_max = 0.0;  ///< after dropping points below the noise floor
  int points = 0;
  /// log W = c0 + c1 log r [+ c2 r/L + c3 (r/L)^2]
  std::vector<double> coefficients;
  bool finite_size_terms = false;  ///< whether the r/L corrections were fitted
  double rho_hat = 0.0, rho_error = 0.0;
  bool rho_available = false;
  bool exceeds_one = false;        ///< eta > 1 + 3 error
  bool ergodicity_ok = false;      ///< nu - (2 - eta) > 0
};

struct FitWindow {
  double r_min = 0.0;  ///< 0 selects min(4, r_max / 10)
  double r_max = 0.0;  ///< 0 selects L / 4
  /// On the torus, also fit the r/L and (r/L)^2 terms by which a finite
  /// periodic box modifies a critical power law.
  bool finite_size_terms = true;
};

EtaFit eta_fit(const TwoPointFunction& w2, FitWindow window = {});

struct InequalityAudit {
  int griffiths_checked = 0, griffiths_violations = 0;
  int lebowitz_checked = 0, lebowitz_violations = 0;
  std::vector<std::pair<SiteTuple, double>> worst_griffiths;  ///< (tuple, value / tolerance scale)
  std::vector<std::pair<SiteTuple, double>> worst_lebowitz;
  double max_w2_negative = 0.0;
  double max_w4_positive = 0.0;
};

InequalityAudit inequality_audit(const ConnectedFunctions& w2, const ConnectedFunctions& w4);

}  // namespace critlab
