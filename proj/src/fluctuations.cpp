#include "critlab/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "critlab/fft.hpp"
#include "critlab/special.hpp"

namespace critlab {

double window_eval(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - s));
  const double b = std::exp(-1.0 / (s - 1.0));
  return a / (a + b);
}

double window_weight(const Coords& d, double R) {
  const double r = std::sqrt(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
  return window_eval(r / R);
}

namespace {

// largest |d_i| with f_R(d) > 0 along an axis
int support_reach(double R) { return static_cast<int>(std::ceil(2.0 * R)) - 1; }

void check_radius(double R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("window radius must be positive");
}

double lattice_window_mass(double R, int dimension) {
  const int m = support_reach(R);
  double s = 0.0;
  const int my = dimension > 1 ? m : 0, mz = dimension > 2 ? m : 0;
  for (int z = -mz; z <= mz; ++z)
    for (int y = -my; y <= my; ++y)
      for (int x = -m; x <= m; ++x) s += window_weight({x, y, z}, R);
  return s;
}

std::string radius_label(double R) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", R);
  return buf;
}

}  // namespace

std::vector<Coords> window_centers(const LatticeSpec& spec, double R) {
  check_radius(R);
  const int spacing = std::max(1, static_cast<int>(std::ceil(R)));
  const int m = support_reach(R);
  std::array<std::vector<int>, 3> axis;
  for (int a = 0; a < 3; ++a) {
    if (a >= spec.dimension) {
      axis[static_cast<std::size_t>(a)] = {0};
      continue;
    }
    const int L = spec.extent(a);
    auto& v = axis[static_cast<std::size_t>(a)];
    if (spec.periodic()) {
      if (4.0 * R > L + 1e-9) throw std::invalid_argument("window exceeds lattice: need 2R <= L/2 on the torus");
      for (int c = 0; c < L; c += spacing) v.push_back(c);
    } else {
      for (int c = m; c + m <= L - 1; c += spacing) v.push_back(c);
      if (v.empty()) throw std::invalid_argument("window exceeds lattice: support does not fit inside the box");
    }
  }
  std::vector<Coords> out;
  for (int z : axis[2])
    for (int y : axis[1])
      for (int x : axis[0]) out.push_back({x, y, z});
  return out;
}

double block_variable(const SpinConfiguration& config, double R, double alpha, double center, const Coords& origin) {
  check_radius(R);
  const LatticeSpec& spec = config.spec();
  const int m = support_reach(R);
  for (int a = 0; a < spec.dimension; ++a) {
    const int L = spec.extent(a);
    if (spec.periodic()) {
      if (4.0 * R > L + 1e-9) throw std::invalid_argument("window exceeds lattice: need 2R <= L/2 on the torus");
    } else if (origin[static_cast<std::size_t>(a)] - m < 0 || origin[static_cast<std::size_t>(a)] + m > L - 1) {
      throw std::invalid_argument("window exceeds lattice");
    }
  }
  const int o = spec.index(origin);
  double s = 0.0;
  for (int x = 0; x < config.size(); ++x) {
    const double f = window_weight(spec.displacement(o, x), R);
    if (f > 0.0) s += (config[x] - center) * f;
  }
  return std::pow(R, -alpha) * s;
}

BlockMomentObservable::BlockMomentObservable(const LatticeSpec& spec, std::vector<double> radii)
    : spec_(spec), radii_(std::move(radii)) {
  spec_.validate();
  if (radii_.empty()) throw std::invalid_argument("no window radii");
  for (int a = 0; a < spec_.dimension; ++a)
    grid_[static_cast<std::size_t>(a)] = spec_.periodic() ? spec_.extent(a) : 2 * spec_.extent(a);
  const std::size_t g = static_cast<std::size_t>(grid_[0]) * grid_[1] * grid_[2];
  for (double R : radii_) {
    mass_.push_back(lattice_window_mass(R, spec_.dimension));
    std::vector<cplx> k(g);
    for (std::size_t i = 0; i < g; ++i) {
      Coords d{0, 0, 0};
      auto rest = static_cast<int>(i);
      for (int a = 0; a < spec_.dimension; ++a) {
        const int n = grid_[static_cast<std::size_t>(a)];
        int c = rest % n;
        rest /= n;
        if (c > n / 2) c -= n;
        d[static_cast<std::size_t>(a)] = c;
      }
      k[i] = window_weight(d, R);
    }
    fft_nd(k, grid_, spec_.dimension, false);
    kernels_.push_back(std::move(k));
    std::vector<std::size_t> idx;
    for (const Coords& c : window_centers(spec_, R))
      idx.push_back(static_cast<std::size_t>(c[0] + grid_[0] * (c[1] + grid_[1] * c[2])));
    centers_.push_back(std::move(idx));
  }
}

std::vector<std::string> BlockMomentObservable::columns() const {
  std::vector<std::string> c;
  for (double R : radii_)
    for (int n = 1; n <= kMaxBlockMoment; ++n) c.push_back("R" + radius_label(R) + "_m" + std::to_string(n));
  return c;
}

void BlockMomentObservable::measure(const SpinConfiguration& config, std::span<double> out) {
  const std::size_t g = kernels_.front().size();
  std::vector<cplx> field(g, 0.0);
  const int nx = spec_.extent(0), ny = spec_.dimension > 1 ? spec_.extent(1) : 1;
  const int gx = grid_[0], gy = grid_[1];
  for (int s = 0; s < config.size(); ++s) {
    const int x = s % nx, y = (s / nx) % ny, z = s / (nx * ny);
    field[static_cast<std::size_t>(x + gx * (y + gy * z))] = config[s];
  }
  fft_nd(field, grid_, spec_.dimension, false);
  std::vector<cplx> conv(g);
  for (std::size_t r = 0; r < radii_.size(); ++r) {
    for (std::size_t i = 0; i < g; ++i) conv[i] = field[i] * kernels_[r][i];
    fft_nd(conv, grid_, spec_.dimension, true);
    double acc[kMaxBlockMoment] = {};
    for (std::size_t c : centers_[r]) {
      const double y = conv[c].real();
      double p = 1.0;
      for (int n = 0; n < kMaxBlockMoment; ++n) {
        p *= y;
        acc[n] += p;
      }
    }
    const double inv = 1.0 / static_cast<double>(centers_[r].size());
    for (int n = 0; n < kMaxBlockMoment; ++n) out[r * kMaxBlockMoment + static_cast<std::size_t>(n)] = acc[n] * inv;
  }
}

JackknifeSet FluctuationMoments::normalized(double a, double center) const {
  const std::size_t nr = radii.size();
  return moments.apply([&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (std::size_t r = 0; r < nr; ++r) {
      const double shift = center * (window_mass.empty() ? 0.0 : window_mass[r]);
      const double scale = std::pow(radii[r], -a);
      double raw[kMaxBlockMoment + 1];
      raw[0] = 1.0;
      for (int n = 1; n <= kMaxBlockMoment; ++n) raw[n] = v(static_cast<Eigen::Index>(r * kMaxBlockMoment + n - 1));
      for (int n = 1; n <= kMaxBlockMoment; ++n) {
        double s = 0.0;
        for (int k = 0; k <= n; ++k) s += binomial(n, k) * raw[k] * std::pow(-shift, n - k);
        out(static_cast<Eigen::Index>(r * kMaxBlockMoment + n - 1)) = s * std::pow(scale, n);
      }
    }
    return out;
  });
}

FluctuationMoments fluctuation_moments(const SampleSet& samples) {
  const auto& d = samples.get("block_moments");
  FluctuationMoments fm;
  fm.dimension = samples.spec.dimension;
  for (std::size_t c = 0; c < d.columns.size(); c += kMaxBlockMoment) {
    const std::string& name = d.columns[c];
    const double R = std::stod(name.substr(1, name.find('_') - 1));
    fm.radii.push_back(R);
    fm.window_mass.push_back(lattice_window_mass(R, fm.dimension));
  }
  fm.moments = d.jackknife();
  fm.samples = static_cast<long>(d.block_counts.sum());
  return fm;
}

FluctuationMoments gaussian_fluctuation_moments(const TwoPointFunction& w2, const std::vector<double>& radii) {
  if (!w2.spec.periodic()) throw std::invalid_argument("gaussian moments need torus data");
  FluctuationMoments fm;
  fm.dimension = w2.spec.dimension;
  fm.radii = radii;
  fm.samples = std::numeric_limits<long>::max();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(radii.size() * kMaxBlockMoment));
  for (std::size_t r = 0; r < radii.size(); ++r) {
    window_centers(w2.spec, radii[r]);  // validates the fit
    fm.window_mass.push_back(lattice_window_mass(radii[r], fm.dimension));
    std::vector<double> f(w2.size());
    for (std::size_t i = 0; i < w2.size(); ++i) f[i] = window_weight(w2.displacement(i), radii[r]);
    const auto af = periodic_autocorrelation(f, w2.grid, w2.spec.dimension);
    double var = 0.0;
    for (std::size_t i = 0; i < w2.size(); ++i) var += w2.values.mean(static_cast<Eigen::Index>(i)) * af[i];
    double dfact = 1.0;
    for (int k = 1; 2 * k <= kMaxBlockMoment; ++k) {
      dfact *= (2 * k - 1);
      v(static_cast<Eigen::Index>(r * kMaxBlockMoment + 2 * k - 1)) = dfact * std::pow(var, k);
    }
  }
  fm.moments = JackknifeSet::exact(v);
  return fm;
}

FluctuationMoments moments_from_samples(const std::vector<std::vector<double>>& per_radius,
                                        const std::vector<double>& radii, int dimension, int blocks) {
  if (per_radius.size() != radii.size() || radii.empty()) throw std::invalid_argument("one sample list per radius");
  const std::size_t n = per_radius.front().size();
  for (const auto& s : per_radius)
    if (s.size() != n) throw std::invalid_argument("sample lists must have equal length");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(radii.size() * kMaxBlockMoment));
  for (std::size_t r = 0; r < radii.size(); ++r)
    for (std::size_t i = 0; i < n; ++i) {
      double p = 1.0;
      for (int k = 0; k < kMaxBlockMoment; ++k) {
        p *= per_radius[r][i];
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r * kMaxBlockMoment + static_cast<std::size_t>(k))) = p;
      }
    }
  FluctuationMoments fm;
  fm.dimension = dimension;
  fm.radii = radii;
  fm.window_mass.assign(radii.size(), 0.0);
  fm.moments = JackknifeSet::from_samples(m, blocks);
  fm.samples = static_cast<long>(n);
  return fm;
}

namespace {

void check_octaves(const std::vector<double>& radii) {
  if (radii.size() < 3 || radii.front() <= 0.0 || radii.back() / radii.front() < 16.0 - 1e-9)
    throw std::invalid_argument("need at least 4 octaves of radii");
}

// jackknife + residual error of a log-log slope over the columns of y
std::pair<LineFit, double> log_log_fit(const std::vector<double>& x, const JackknifeSet& y) {
  std::vector<double> lx;
  for (double v : x) lx.push_back(std::log(v));
  auto logs = y.apply([](const Eigen::VectorXd& v) { return v.array().abs().max(1e-300).log().matrix().eval(); });
  std::vector<double> ly(logs.mean.data(), logs.mean.data() + logs.mean.size());
  const LineFit f = fit_line(lx, ly);
  double err = f.residual_slope_error;
  if (logs.has_errors()) {
    Eigen::VectorXd slopes(logs.replicate_count());
    for (int b = 0; b < logs.replicate_count(); ++b) {
      std::vector<double> yb(static_cast<std::size_t>(logs.size()));
      for (int i = 0; i < logs.size(); ++i) yb[static_cast<std::size_t>(i)] = logs.replicates(b, i);
      slopes(b) = fit_line(lx, yb).slope;
    }
    err = std::max(err, jackknife_error(slopes));
  }
  return {f, err};
}

double mean_center(const FluctuationMoments& fm, std::size_t r) {
  if (fm.window_mass.empty() || fm.window_mass[r] <= 0.0) return 0.0;
  return fm.moments.mean(static_cast<Eigen::Index>(r * kMaxBlockMoment)) / fm.window_mass[r];
}

}  // namespace

VarianceFit variance_scaling_fit(const FluctuationMoments& fm) {
  check_octaves(fm.radii);
  const std::size_t nr = fm.radii.size();
  const JackknifeSet var = fm.moments.apply([&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(nr));
    for (std::size_t r = 0; r < nr; ++r) {
      const double m1 = v(static_cast<Eigen::Index>(r * kMaxBlockMoment));
      const double m2 = v(static_cast<Eigen::Index>(r * kMaxBlockMoment + 1));
      out(static_cast<Eigen::Index>(r)) = m2 - m1 * m1;
    }
    return out;
  });
  VarianceFit out;
  out.radii = fm.radii;
  const Eigen::VectorXd e = var.error();
  for (std::size_t r = 0; r < nr; ++r) {
    out.variance.push_back(var.mean(static_cast<Eigen::Index>(r)));
    out.variance_error.push_back(e(static_cast<Eigen::Index>(r)));
    if (!(out.variance.back() > 0.0)) throw std::invalid_argument("non-positive block variance");
  }
  const auto upper = var.apply([&](const Eigen::VectorXd& v) {
    Eigen::VectorXd o(1);
    const auto a = static_cast<Eigen::Index>(nr - 2), b = static_cast<Eigen::Index>(nr - 1);
    o(0) = std::log(v(b) / v(a)) / std::log(fm.radii[nr - 1] / fm.radii[nr - 2]);
    return o;
  });
  out.upper_slope = upper.mean(0);
  out.upper_slope_error = upper.error()(0);
  const auto [fit, err] = log_log_fit(fm.radii, var);
  const double nu = fm.dimension;
  out.slope_2alpha = fit.slope;
  out.intercept = fit.intercept;
  out.error = err;
  out.alpha_hat = fit.slope / 2.0;
  out.alpha_error = err / 2.0;
  out.rho_hat = 2.0 * out.alpha_hat - nu;
  out.eta_hat = 2.0 - out.rho_hat;
  if (out.alpha_hat > nu / 2.0 + 3.0 * out.alpha_error)
    out.verdict = "anomalous";
  else if (std::abs(out.alpha_hat - nu / 2.0) <= 3.0 * out.alpha_error + 1e-9)
    out.verdict = "normal";
  else
    out.verdict = "inconclusive";
  return out;
}

double CumulantTable::U(std::size_t radius, int order) const {
  return cumulants.mean(static_cast<Eigen::Index>(radius * 4 + static_cast<std::size_t>(order / 2 - 1)));
}

double CumulantTable::U_error(std::size_t radius, int order) const {
  return cumulants.error()(static_cast<Eigen::Index>(radius * 4 + static_cast<std::size_t>(order / 2 - 1)));
}

CumulantTable cumulants(const FluctuationMoments& fm, double alpha) {
  if (fm.samples < 100) throw std::invalid_argument("cumulants need at least 100 samples");
  const std::size_t nr = fm.radii.size();
  CumulantTable t;
  t.radii = fm.radii;
  t.alpha = alpha;
  // centre each radius near its mean; cumulants of order >= 2 do not depend on it
  std::vector<double> centers(nr);
  for (std::size_t r = 0; r < nr; ++r) centers[r] = mean_center(fm, r);
  const JackknifeSet norm = fm.moments.apply([&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(nr * 4));
    for (std::size_t r = 0; r < nr; ++r) {
      const double shift = centers[r] * (fm.window_mass.empty() ? 0.0 : fm.window_mass[r]);
      const double scale = std::pow(fm.radii[r], -alpha);
      std::vector<double> raw(kMaxBlockMoment + 1);
      raw[0] = 1.0;
      for (int n = 1; n <= kMaxBlockMoment; ++n) raw[static_cast<std::size_t>(n)] = v(static_cast<Eigen::Index>(r * kMaxBlockMoment + static_cast<std::size_t>(n) - 1));
      std::vector<double> c(kMaxBlockMoment + 1);
      c[0] = 1.0;
      for (int n = 1; n <= kMaxBlockMoment; ++n) {
        double s = 0.0;
        for (int k = 0; k <= n; ++k) s += binomial(n, k) * raw[static_cast<std::size_t>(k)] * std::pow(-shift, n - k);
        c[static_cast<std::size_t>(n)] = s * std::pow(scale, n);
      }
      const auto kappa = moments_to_cumulants(c);
      for (int k = 1; k <= 4; ++k) out(static_cast<Eigen::Index>(r * 4 + static_cast<std::size_t>(k) - 1)) = kappa[static_cast<std::size_t>(2 * k)];
    }
    return out;
  });
  t.cumulants = norm;
  return t;
}

GaussianityReport gaussianity_test(const CumulantTable& table, const VarianceFit& variance) {
  if (table.radii.size() < 4) throw std::invalid_argument("gaussianity test needs cumulants at >= 4 radii");
  if (std::abs(table.alpha - variance.alpha_hat) > std::max(3.0 * variance.alpha_error, 1e-9))
    throw std::invalid_argument("gaussianity test requires the anomalous normalization alpha = nu/2 + rho/2");
  const std::size_t nr = table.radii.size();
  const JackknifeSet g = table.cumulants.apply([&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(2 * nr + 1));
    std::vector<double> x, y;
    for (std::size_t r = 0; r < nr; ++r) {
      const double u2 = v(static_cast<Eigen::Index>(r * 4)), u4 = v(static_cast<Eigen::Index>(r * 4 + 1)),
                   u6 = v(static_cast<Eigen::Index>(r * 4 + 2));
      out(static_cast<Eigen::Index>(r)) = std::abs(u4) / (u2 * u2);
      out(static_cast<Eigen::Index>(nr + r)) = std::abs(u6) / (u2 * u2 * u2);
      x.push_back(1.0 / table.radii[r]);
      y.push_back(out(static_cast<Eigen::Index>(r)));
    }
    out(static_cast<Eigen::Index>(2 * nr)) = fit_line(x, y).intercept;
    return out;
  });
  const Eigen::VectorXd e = g.error();
  GaussianityReport rep;
  rep.radii = table.radii;
  for (std::size_t r = 0; r < nr; ++r) {
    rep.g4.push_back(g.mean(static_cast<Eigen::Index>(r)));
    rep.g4_error.push_back(e(static_cast<Eigen::Index>(r)));
    rep.g6.push_back(g.mean(static_cast<Eigen::Index>(nr + r)));
    rep.g6_error.push_back(e(static_cast<Eigen::Index>(nr + r)));
  }
  {
    std::vector<double> inv;
    for (double R : table.radii) inv.push_back(1.0 / R);
    rep.slope = fit_line(inv, rep.g4).slope;
  }
  rep.trend = kendall_tau(table.radii, rep.g4);
  rep.decreasing = rep.trend.p_decreasing < 0.05;
  rep.intercept = g.mean(static_cast<Eigen::Index>(2 * nr));
  {
    std::vector<double> x;
    for (double R : table.radii) x.push_back(1.0 / R);
    const LineFit f = fit_line(x, rep.g4);
    rep.intercept_error = std::max(e(static_cast<Eigen::Index>(2 * nr)), f.intercept_error);
  }
  rep.intercept_consistent = std::abs(rep.intercept) <= 3.0 * rep.intercept_error;
  rep.nonzero_at_all_radii = true;
  for (std::size_t r = 0; r < nr; ++r)
    if (!(rep.g4[r] > 3.0 * rep.g4_error[r]) || rep.g4_error[r] <= 0.0)
      if (!(rep.g4[r] > 0.0 && rep.g4_error[r] == 0.0)) rep.nonzero_at_all_radii = false;
  if (rep.decreasing && rep.intercept_consistent)
    rep.verdict = "consistent_with_quasi_free";
  else if (!rep.intercept_consistent)
    rep.verdict = "not_quasi_free_at_accessible_radii";
  else
    rep.verdict = "inconclusive";
  return rep;
}

ScalingProbe scaling_assumption_probe(const JackknifeSet& t4, const std::vector<double>& radii, int dimension) {
  if (t4.size() != static_cast<int>(radii.size()) || radii.size() < 4)
    throw std::invalid_argument("scaling probe needs T4 at >= 4 radii");
  ScalingProbe p;
  p.radii = radii;
  const Eigen::VectorXd e = t4.error();
  std::vector<int> keep;
  for (int i = 0; i < t4.size(); ++i) {
    p.t4.push_back(t4.mean(i));
    p.t4_error.push_back(e(i));
    const double tol = t4.has_errors() ? 3.0 * e(i) : 1e-12;
    if (std::abs(t4.mean(i)) > tol) keep.push_back(i);
  }
  if (keep.size() < 2) {
    p.status = "below_noise_floor";
    return p;
  }
  p.status = "ok";
  std::vector<double> r;
  for (int i : keep) r.push_back(radii[static_cast<std::size_t>(i)]);
  const auto [fit, err] = log_log_fit(r, t4.select(keep));
  p.slope = fit.slope;
  p.slope_error = err;
  p.rho_prime = (fit.slope - dimension) / 2.0;
  p.rho_prime_error = err / 2.0;
  p.admissible = p.rho_prime > 2.0 * p.rho_prime_error && p.rho_prime > 0.0;
  return p;
}

ScalingProbe scaling_assumption_probe(const CumulantTable& table, int dimension) {
  if (table.alpha != 0.0) throw std::invalid_argument("scaling probe expects unnormalized (alpha = 0) cumulants");
  std::vector<int> cols;
  for (std::size_t r = 0; r < table.radii.size(); ++r) cols.push_back(static_cast<int>(r * 4 + 1));
  return scaling_assumption_probe(table.cumulants.select(cols), table.radii, dimension);
}

double star_four_point_sum(const LatticeSpec& spec, double R, const std::function<double(const Coords&)>& k) {
  if (!spec.periodic()) throw std::invalid_argument("star form is defined on the torus");
  window_centers(spec, R);
  const int n = spec.volume();
  std::vector<cplx> f(static_cast<std::size_t>(n)), kk(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const Coords d = spec.displacement(0, s);
    f[static_cast<std::size_t>(s)] = window_weight(d, R);
    kk[static_cast<std::size_t>(s)] = k(d);
  }
  fft_nd(f, spec.extents, spec.dimension, false);
  fft_nd(kk, spec.extents, spec.dimension, false);
  for (int s = 0; s < n; ++s) f[static_cast<std::size_t>(s)] *= kk[static_cast<std::size_t>(s)];
  fft_nd(f, spec.extents, spec.dimension, true);
  double t = 0.0;
  for (const auto& v : f) {
    const double g = v.real();
    t -= g * g * g * g;
  }
  return t;
}

}  // namespace critlab
