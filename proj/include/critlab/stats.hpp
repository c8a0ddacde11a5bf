#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace critlab {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// A vector of estimates carried together with its leave-one-block-out
/// replicates, so that any derived quantity gets a jackknife error.
/// Exact data has zero replicate rows and zero errors.
struct JackknifeSet {
  Eigen::VectorXd mean;
  Eigen::MatrixXd replicates;  ///< rows = replicates, cols = components

  static JackknifeSet exact(Eigen::VectorXd values);
  /// From per-block sums and measurement counts.
  static JackknifeSet from_blocks(const Eigen::MatrixXd& block_sums, const Eigen::VectorXd& counts);
  /// From a raw sample matrix (rows = samples) grouped into `blocks` contiguous blocks.
  static JackknifeSet from_samples(const Eigen::MatrixXd& samples, int blocks);

  int size() const { return static_cast<int>(mean.size()); }
  int replicate_count() const { return static_cast<int>(replicates.rows()); }
  bool has_errors() const { return replicates.rows() > 1; }

  Eigen::VectorXd error() const;
  Estimate at(int i) const { return {mean(i), error()(i)}; }

  JackknifeSet apply(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) const;
  JackknifeSet select(std::span<const int> columns) const;
  /// Concatenate components of two sets with matching replicate counts.
  static JackknifeSet join(const JackknifeSet& a, const JackknifeSet& b);
};

/// Jackknife error of a scalar from its mean-of-replicates spread.
double jackknife_error(const Eigen::VectorXd& replicates);

/// Integrated autocorrelation time with Sokal's automatic window (c = 6).
/// Convention: tau_int = 1/2 + sum_t rho(t); independent data gives 1/2.
double integrated_autocorrelation_time(std::span<const double> series);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;      ///< from the supplied sigmas (or residuals if none)
  double intercept_error = 0.0;
  double residual_slope_error = 0.0;  ///< from the residual scatter of the fit
  double chi2 = 0.0;
  int dof = 0;
  double reduced_chi2() const { return dof > 0 ? chi2 / dof : 0.0; }
};

/// Weighted least-squares line y = intercept + slope x. Empty sigma means
/// unweighted, with errors taken from the residual variance.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> sigma = {});

struct LinearModelFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd errors;  ///< from the supplied sigmas, or residual scatter if none
  double chi2 = 0.0;
  int dof = 0;
  double reduced_chi2() const { return dof > 0 ? chi2 / dof : 0.0; }
};

/// Weighted least squares y ~ X c via QR; columns of X are the regressors.
LinearModelFit fit_linear_model(const Eigen::MatrixXd& X, std::span<const double> y,
                                std::span<const double> sigma = {});

struct KendallResult {
  double tau = 0.0;
  double p_decreasing = 1.0;  ///< one-sided p-value for a decreasing trend
  double p_increasing = 1.0;
  double p_two_sided = 1.0;
};

/// Kendall rank correlation; exact null distribution for n <= 12 without ties.
KendallResult kendall_tau(std::span<const double> x, std::span<const double> y);

/// Raw moments m_1..m_n to cumulants k_1..k_n (index 0 unused).
std::vector<double> moments_to_cumulants(std::span<const double> raw_moments);
/// Inverse of moments_to_cumulants.
std::vector<double> cumulants_to_moments(std::span<const double> cumulants);

double mean(std::span<const double> v);
double variance(std::span<const double> v);

}  // namespace critlab
