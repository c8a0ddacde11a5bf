#include "critlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "critlab/special.hpp"

namespace critlab {

JackknifeSet JackknifeSet::exact(Eigen::VectorXd values) {
  JackknifeSet s;
  s.mean = std::move(values);
  s.replicates.resize(0, s.mean.size());
  return s;
}

JackknifeSet JackknifeSet::from_blocks(const Eigen::MatrixXd& sums, const Eigen::VectorXd& counts) {
  if (sums.rows() != counts.size()) throw std::invalid_argument("block sums/counts mismatch");
  const double total_count = counts.sum();
  if (total_count <= 0) throw std::invalid_argument("no samples in blocks");
  Eigen::VectorXd total = sums.colwise().sum().transpose();
  JackknifeSet s;
  s.mean = total / total_count;
  const auto B = sums.rows();
  if (B < 2) {
    s.replicates.resize(0, sums.cols());
    return s;
  }
  s.replicates.resize(B, sums.cols());
  for (Eigen::Index b = 0; b < B; ++b)
    s.replicates.row(b) = (total.transpose() - sums.row(b)) / (total_count - counts(b));
  return s;
}

JackknifeSet JackknifeSet::from_samples(const Eigen::MatrixXd& samples, int blocks) {
  const auto n = samples.rows();
  if (n == 0) throw std::invalid_argument("no samples");
  blocks = static_cast<int>(std::min<Eigen::Index>(blocks, n));
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(blocks, samples.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(blocks);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto b = static_cast<Eigen::Index>((i * blocks) / n);
    sums.row(b) += samples.row(i);
    counts(b) += 1.0;
  }
  return from_blocks(sums, counts);
}

double jackknife_error(const Eigen::VectorXd& r) {
  const auto B = r.size();
  if (B < 2) return 0.0;
  double m = r.mean();
  return std::sqrt((B - 1.0) / B * (r.array() - m).square().sum());
}

Eigen::VectorXd JackknifeSet::error() const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(mean.size());
  if (!has_errors()) return e;
  for (Eigen::Index i = 0; i < mean.size(); ++i) e(i) = jackknife_error(replicates.col(i));
  return e;
}

JackknifeSet JackknifeSet::apply(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) const {
  JackknifeSet out;
  out.mean = f(mean);
  out.replicates.resize(replicates.rows(), out.mean.size());
  for (Eigen::Index b = 0; b < replicates.rows(); ++b) {
    Eigen::VectorXd r = replicates.row(b).transpose();
    out.replicates.row(b) = f(r).transpose();
  }
  return out;
}

JackknifeSet JackknifeSet::select(std::span<const int> columns) const {
  JackknifeSet out;
  out.mean.resize(static_cast<Eigen::Index>(columns.size()));
  out.replicates.resize(replicates.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out.mean(static_cast<Eigen::Index>(i)) = mean(columns[i]);
    if (replicates.rows() > 0) out.replicates.col(static_cast<Eigen::Index>(i)) = replicates.col(columns[i]);
  }
  return out;
}

JackknifeSet JackknifeSet::join(const JackknifeSet& a, const JackknifeSet& b) {
  if (a.replicates.rows() != b.replicates.rows())
    throw std::invalid_argument("cannot join jackknife sets with different replicate counts");
  JackknifeSet out;
  out.mean.resize(a.mean.size() + b.mean.size());
  out.mean << a.mean, b.mean;
  out.replicates.resize(a.replicates.rows(), out.mean.size());
  if (a.replicates.rows() > 0) out.replicates << a.replicates, b.replicates;
  return out;
}

double integrated_autocorrelation_time(std::span<const double> x) {
  const auto n = static_cast<long>(x.size());
  if (n < 4) return 0.5;
  double m = mean(x);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return 0.5;
  double tau = 0.5;
  for (long t = 1; t < n / 2; ++t) {
    double c = 0.0;
    for (long i = 0; i + t < n; ++i) c += (x[static_cast<std::size_t>(i)] - m) * (x[static_cast<std::size_t>(i + t)] - m);
    c /= static_cast<double>(n - t);
    tau += c / c0;
    if (t >= 6.0 * tau) break;
  }
  return std::max(tau, 0.5);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> sigma) {
  const std::size_t n = x.size();
  if (n != y.size() || (!sigma.empty() && sigma.size() != n)) throw std::invalid_argument("fit_line: size mismatch");
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
  const bool weighted = !sigma.empty();
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
    S += w;
    Sx += w * x[i];
    Sy += w * y[i];
    Sxx += w * x[i] * x[i];
    Sxy += w * x[i] * y[i];
  }
  const double D = S * Sxx - Sx * Sx;
  if (D <= 0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (S * Sxy - Sx * Sy) / D;
  f.intercept = (Sxx * Sy - Sx * Sxy) / D;
  f.dof = static_cast<int>(n) - 2;
  double ss = 0.0, chi2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
    if (weighted) chi2 += r * r / (sigma[i] * sigma[i]);
  }
  // unweighted scatter estimate of the slope error
  double mx = 0.0;
  for (double v : x) mx += v;
  mx /= static_cast<double>(n);
  double sxx = 0.0;
  for (double v : x) sxx += (v - mx) * (v - mx);
  double s2 = f.dof > 0 ? ss / f.dof : 0.0;
  f.residual_slope_error = std::sqrt(s2 / sxx);
  if (weighted) {
    f.chi2 = chi2;
    f.slope_error = std::sqrt(S / D);
    f.intercept_error = std::sqrt(Sxx / D);
  } else {
    f.chi2 = ss;
    f.slope_error = f.residual_slope_error;
    f.intercept_error = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  }
  return f;
}

LinearModelFit fit_linear_model(const Eigen::MatrixXd& X, std::span<const double> y, std::span<const double> sigma) {
  const auto n = X.rows(), p = X.cols();
  if (static_cast<std::size_t>(n) != y.size() || (!sigma.empty() && sigma.size() != y.size()))
    throw std::invalid_argument("fit_linear_model: size mismatch");
  if (n < p) throw std::invalid_argument("fit_linear_model: fewer points than parameters");
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (!sigma.empty())
    for (Eigen::Index i = 0; i < n; ++i) w(i) = 1.0 / sigma[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd A = w.asDiagonal() * X;
  const Eigen::VectorXd b = w.cwiseProduct(Eigen::Map<const Eigen::VectorXd>(y.data(), n));
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < p) throw std::invalid_argument("fit_linear_model: degenerate regressors");
  LinearModelFit f;
  f.coefficients = qr.solve(b);
  f.dof = static_cast<int>(n - p);
  f.chi2 = (A * f.coefficients - b).squaredNorm();
  Eigen::MatrixXd cov = (A.transpose() * A).inverse();
  if (sigma.empty()) cov *= f.dof > 0 ? f.chi2 / f.dof : 0.0;
  f.errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return f;
}

namespace {

// Number of permutations of n elements with k inversions (Mahonian numbers).
std::vector<double> inversion_distribution(int n) {
  std::vector<double> dist{1.0};
  for (int m = 2; m <= n; ++m) {
    std::vector<double> next(dist.size() + static_cast<std::size_t>(m - 1), 0.0);
    for (std::size_t k = 0; k < dist.size(); ++k)
      for (int j = 0; j < m; ++j) next[k + static_cast<std::size_t>(j)] += dist[k];
    dist = std::move(next);
  }
  return dist;
}

}  // namespace

KendallResult kendall_tau(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("kendall_tau: need two equal-length series");
  long concordant = 0, discordant = 0;
  bool ties = false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = (x[j] - x[i]) * (y[j] - y[i]);
      if (s > 0) ++concordant;
      else if (s < 0) ++discordant;
      else ties = true;
    }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  KendallResult r;
  r.tau = static_cast<double>(concordant - discordant) / pairs;
  if (n <= 12 && !ties) {
    auto dist = inversion_distribution(static_cast<int>(n));
    double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    auto d = static_cast<std::size_t>(discordant);
    double upper = 0.0, lower = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
      if (k >= d) upper += dist[k];
      if (k <= d) lower += dist[k];
    }
    r.p_decreasing = upper / total;
    r.p_increasing = lower / total;
  } else {
    double var = static_cast<double>(n) * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
    double z = static_cast<double>(concordant - discordant) / std::sqrt(var);
    r.p_decreasing = 0.5 * std::erfc(z / std::sqrt(2.0));
    r.p_increasing = 0.5 * std::erfc(-z / std::sqrt(2.0));
  }
  r.p_two_sided = std::min(1.0, 2.0 * std::min(r.p_decreasing, r.p_increasing));
  return r;
}

std::vector<double> moments_to_cumulants(std::span<const double> m) {
  // m[0] is ignored (taken as 1)
  std::vector<double> k(m.size(), 0.0);
  for (std::size_t n = 1; n < m.size(); ++n) {
    double v = m[n];
    for (std::size_t j = 1; j < n; ++j)
      v -= binomial(static_cast<int>(n - 1), static_cast<int>(j - 1)) * k[j] * m[n - j];
    k[n] = v;
  }
  return k;
}

std::vector<double> cumulants_to_moments(std::span<const double> k) {
  std::vector<double> m(k.size(), 0.0);
  if (!m.empty()) m[0] = 1.0;
  for (std::size_t n = 1; n < k.size(); ++n) {
    double v = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
      v += binomial(static_cast<int>(n - 1), static_cast<int>(j - 1)) * k[j] * m[n - j];
    m[n] = v;
  }
  return m;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace critlab
