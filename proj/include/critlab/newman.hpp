#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "critlab/correlators.hpp"
#include "critlab/exact.hpp"
#include "critlab/stats.hpp"

namespace critlab {

/// f_n(z) = log E exp(z sigma_n) / |Lambda_n| for a family of volumes on a
/// common z grid; f[v][i] belongs to volume v and z[i].
struct ProfileSeries {
  std::string source;  ///< "exact" or "mc"
  std::vector<int> sizes;       ///< linear size n
  std::vector<long> volumes;    ///< |Lambda_n|
  std::vector<double> z;
  std::vector<std::vector<double>> f;
  std::vector<std::vector<double>> f_neg;  ///< f_n(-z)
  std::vector<std::vector<double>> f_error;
  std::vector<std::vector<double>> truncation;  ///< mc: size of the omitted order
  std::vector<std::vector<bool>> reliable;      ///< mc: |z| sd(sigma) <= 2 log(samples)

  /// f_e(z) = f(z) + f(-z) for volume v.
  double f_even(std::size_t v, std::size_t i) const { return f[v][i] + f_neg[v][i]; }
};

struct ProfileChecks {
  bool zero_at_origin = true;     ///< f_n(0) = 0
  double worst_convexity = 0.0;   ///< most negative second difference
  bool convex = true;
  bool symmetric = true;          ///< f_n(z) = f_n(-z) where both are on the grid
  double worst_asymmetry = 0.0;
  bool monotone_in_volume = true; ///< f_n <= f_m for n <= m
  double worst_monotonicity = 0.0;
};

ProfileSeries profile_estimate(const std::vector<ExactMoments>& volumes, const std::vector<int>& sizes,
                               const std::vector<double>& z_grid);
/// Cumulant expansion through fourth order from total-spin samples per volume.
ProfileSeries profile_estimate(const std::vector<std::vector<double>>& total_spin_samples, const std::vector<int>& sizes,
                               const std::vector<long>& volumes, const std::vector<double>& z_grid, int blocks = 50);

ProfileChecks profile_checks(const ProfileSeries& p, double tolerance = 1e-10);

struct VarianceSeries {
  std::vector<int> sizes;
  std::vector<long> volumes;
  std::vector<double> tau2;
  std::vector<double> tau2_error;
};

VarianceSeries exact_variance_series(const std::vector<ExactMoments>& volumes, const std::vector<int>& sizes);
VarianceSeries variance_series(const std::vector<std::vector<double>>& total_spin_samples, const std::vector<int>& sizes,
                               const std::vector<long>& volumes, int blocks = 50);
/// Variance of the box sum for a translation-invariant covariance F on Z^nu.
double box_variance(const std::function<double(const Coords&)>& F, int n, int dimension);

/// Spin sums over the boxes [0, n)^nu anchored at the origin, one column per n.
class BoxSumObservable final : public Observable {
 public:
  BoxSumObservable(const LatticeSpec& spec, std::vector<int> sizes);
  std::string name() const override { return "box_sums"; }
  std::vector<std::string> columns() const override;
  bool keep_series() const override { return true; }
  void measure(const SpinConfiguration& config, std::span<double> out) override;
  std::unique_ptr<Observable> clone() const override { return std::make_unique<BoxSumObservable>(*this); }
  const std::vector<int>& sizes() const { return sizes_; }

 private:
  LatticeSpec spec_;
  std::vector<int> sizes_;
};

/// Per-size sample vectors from a run that recorded box_sums.
std::vector<std::vector<double>> box_sum_samples(const SampleSet& samples, std::vector<int>& sizes,
                                                 std::vector<long>& volumes);

/// Standardize samples to mean 0, variance 1.
std::vector<double> standardize(const std::vector<double>& x);

struct ExponentEstimates {
  double p_hat = 0.0, p_error = 0.0;
  std::vector<double> p_per_volume;
  double tau_slope = 0.0, tau_slope_error = 0.0;
  double tau2_intercept = 0.0;  ///< of log tau_n^2 against log n
  double eta_hat = 0.0, eta_error = 0.0;
  std::optional<double> eta_reference;        ///< from the two-point fit, if supplied
  std::optional<double> eta_discrepancy_sigma;
  bool p_flag_below_one = false;
  int dimension = 2;
};

/// p from the small-z behaviour of f_e in the largest volume; eta from the
/// growth of tau_n. Needs >= 4 volumes and a z grid spanning 1.5 decades.
ExponentEstimates exponent_estimates(const ProfileSeries& profiles, const VarianceSeries& variances, int dimension,
                                     std::optional<Estimate> eta_reference = std::nullopt);

/// Small-z exponent of one f_e curve: local log-log slopes extrapolated
/// linearly in z^2 to z = 0.
Estimate small_z_exponent(const std::vector<double>& z, const std::vector<double>& f_even);

struct BgReport {
  double lhs = 0.0;  ///< 2 - eta
  double rhs = 0.0;  ///< nu (2 - p) / p
  double sigma = 0.0;
  double margin = 0.0;  ///< rhs - lhs
  bool pass = false;
  bool p_below_one = false;
  bool gaussian_endpoint = false;  ///< p consistent with 2: outside the anomalous regime
};

BgReport bg_check(double p_hat, double eta_hat, int nu, double p_error = 0.0, double eta_error = 0.0);
inline double p_from_delta(double delta) { return 1.0 + 1.0 / delta; }

/// Cumulative sums G(R) = sum_{|x| <= R} F(x) from a radial table.
struct RadialTable {
  std::vector<double> r;
  std::vector<double> F;
  std::vector<double> multiplicity;
  static RadialTable from_profile(const RadialProfile& p);
  /// Lattice points of Z^nu up to radius r_max, F given as a function of |x|.
  static RadialTable synthetic(const std::function<double(double)>& F, int dimension, double r_max);
  double G(double R) const;
  double max_radius() const { return r.empty() ? 0.0 : r.back(); }
};

struct SandwichReport {
  double c1 = 0.0, c2 = 0.0;
  double K1 = 0.0;  ///< largest K1 making the lower bound hold at every n
  double K2 = 0.0;  ///< smallest K2 making the upper bound hold at every n
  double spread = 0.0;  ///< max/min of tau^2 / (n^nu G(c n)) at the chosen c2
  std::vector<double> lower_ratio, upper_ratio;
  bool negative_F = false;
  bool feasible = false;
  std::string note;
};

/// Searches c1, c2 in [1/4, 1] for the tightest constants with
/// K1 n^nu G(c1 n) <= tau_n^2 <= K2 n^nu G(c2 n). Feasible when all inputs are
/// positive, F shows no significant negative values and the ratio spread at
/// the best c stays below `max_spread`.
SandwichReport sandwich_check(const VarianceSeries& variances, const RadialTable& F, int dimension,
                              double max_spread = 4.0, const std::vector<double>& F_error = {});

struct TailReport {
  double p = 0.0, q = 0.0;
  double c_mgf = 0.0, c_tail = 0.0, c = 0.0;
  bool finite = false;
  std::string note;
};

/// Smallest c for E exp(tX) <= exp(|ct|^p/p) on t in [-3, 3] and
/// P(X > xi) <= exp(-(xi/c)^q/q) at xi = 1, 2, 3.
TailReport tail_bound_check(const std::vector<double>& standardized, double p_hat);

}  // namespace critlab
