#include "critlab/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "critlab/fft.hpp"

namespace critlab {

namespace {

SiteTuple sorted(SiteTuple t) {
  std::sort(t.begin(), t.end());
  return t;
}

SiteTuple table_key(const MomentTable& m, const SiteTuple& t) {
  return m.translation_invariant ? canonical_tuple(*m.translation_invariant, t) : sorted(t);
}

void add_subtuples(const SiteTuple& t, std::set<SiteTuple>& out) {
  const std::size_t r = t.size();
  for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
    SiteTuple s;
    for (std::size_t i = 0; i < r; ++i)
      if (mask >> i & 1u) s.push_back(t[i]);
    out.insert(sorted(s));
  }
}

SiteTuple parse_tuple_column(const std::string& name) {
  if (name.empty() || name[0] != 's') throw std::invalid_argument("not a tuple column: " + name);
  SiteTuple t;
  std::stringstream ss(name.substr(1));
  std::string part;
  while (std::getline(ss, part, '_')) t.push_back(std::stoi(part));
  return t;
}

int grid_volume(const Coords& g) { return g[0] * g[1] * g[2]; }

}  // namespace

double ConnectedFunctions::error(const SiteTuple& t) const {
  auto it = errors.find(t);
  return it == errors.end() ? 0.0 : it->second;
}

MomentTable MomentTable::from_exact(const ExactMoments& exact, const std::vector<SiteTuple>& tuples) {
  std::set<SiteTuple> all;
  for (const auto& t : tuples) add_subtuples(t, all);
  MomentTable m;
  Eigen::VectorXd v(static_cast<Eigen::Index>(all.size()));
  int i = 0;
  for (const auto& t : all) {
    m.column[t] = i;
    v(i++) = exact.moment(t);
  }
  m.data = JackknifeSet::exact(v);
  return m;
}

MomentTable MomentTable::from_samples(const SampleSet& samples, const std::vector<SiteTuple>& tuples) {
  const auto& d = samples.get("tuples");
  MomentTable m;
  for (std::size_t c = 0; c < d.columns.size(); ++c) m.column[sorted(parse_tuple_column(d.columns[c]))] = static_cast<int>(c);
  m.data = d.jackknife();
  for (const auto& t : tuples) {
    std::set<SiteTuple> need;
    add_subtuples(t, need);
    for (const auto& s : need)
      if (!m.column.count(s)) throw MissingMomentError("sample set lacks a moment required by the Ursell recursion");
  }
  return m;
}

MomentTable MomentTable::from_values(const std::map<SiteTuple, double>& values) {
  MomentTable m;
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  int i = 0;
  for (const auto& [t, x] : values) {
    m.column[sorted(t)] = i;
    v(i++) = x;
  }
  m.data = JackknifeSet::exact(v);
  return m;
}

std::vector<SiteTuple> all_tuples(int volume, int r) {
  std::vector<SiteTuple> out;
  SiteTuple t(static_cast<std::size_t>(r), 0);
  while (true) {
    out.push_back(t);
    int i = r - 1;
    while (i >= 0 && t[static_cast<std::size_t>(i)] == volume - 1) --i;
    if (i < 0) break;
    ++t[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j) t[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(i)];
  }
  return out;
}

ConnectedFunctions connected_from_moments(const MomentTable& moments, int r, const std::vector<SiteTuple>& tuples) {
  if (r < 1 || r > kMaxUrsellOrder) throw std::invalid_argument("connected order out of range");
  for (const auto& t : tuples)
    if (static_cast<int>(t.size()) != r) throw std::invalid_argument("tuple length differs from the requested order");

  // moment tables are keyed by sorted tuples; under translation invariance
  // the canonical representative of each stored tuple is registered as well
  std::map<SiteTuple, int> lookup = moments.column;
  if (moments.translation_invariant)
    for (const auto& [t, c] : moments.column) lookup.emplace(canonical_tuple(*moments.translation_invariant, t), c);

  auto evaluate = [&](const Eigen::VectorXd& v) {
    UrsellCalculator calc(
        [&](const SiteTuple& t) -> std::optional<double> {
          auto it = lookup.find(sorted(t));
          if (it == lookup.end()) return std::nullopt;
          return v(it->second);
        },
        moments.translation_invariant);
    Eigen::VectorXd out(static_cast<Eigen::Index>(tuples.size()));
    for (std::size_t i = 0; i < tuples.size(); ++i) out(static_cast<Eigen::Index>(i)) = calc.connected(tuples[i]);
    return out;
  };
  const JackknifeSet w = moments.data.apply(evaluate);
  const Eigen::VectorXd err = w.error();
  ConnectedFunctions cf;
  cf.order = r;
  cf.source = moments.data.has_errors() ? "mc" : "exact";
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const SiteTuple k = table_key(moments, tuples[i]);
    cf.values[k] = w.mean(static_cast<Eigen::Index>(i));
    if (moments.data.has_errors()) cf.errors[k] = err(static_cast<Eigen::Index>(i));
  }
  return cf;
}

TwoPointObservable::TwoPointObservable(const LatticeSpec& spec) : spec_(spec) {
  spec_.validate();
  for (int a = 0; a < spec_.dimension; ++a)
    grid_[static_cast<std::size_t>(a)] = spec_.periodic() ? spec_.extent(a) : 2 * spec_.extent(a);
}

std::size_t TwoPointObservable::grid_size() const { return static_cast<std::size_t>(grid_volume(grid_)); }

std::vector<std::string> TwoPointObservable::columns() const {
  std::vector<std::string> c;
  const std::size_t g = grid_size();
  c.reserve(g + static_cast<std::size_t>(spec_.volume()));
  for (std::size_t i = 0; i < g; ++i) c.push_back("A" + std::to_string(i));
  for (int s = 0; s < spec_.volume(); ++s) c.push_back("sigma" + std::to_string(s));
  return c;
}

void TwoPointObservable::measure(const SpinConfiguration& config, std::span<double> out) {
  std::vector<double> field(config.values().begin(), config.values().end());
  std::vector<double> a;
  if (spec_.periodic()) {
    a = periodic_autocorrelation(field, spec_.extents, spec_.dimension);
  } else {
    Coords padded;
    a = open_autocorrelation(field, spec_.extents, spec_.dimension, padded);
  }
  std::copy(a.begin(), a.end(), out.begin());
  std::copy(field.begin(), field.end(), out.begin() + static_cast<std::ptrdiff_t>(a.size()));
}

Coords TwoPointFunction::displacement(std::size_t index) const {
  Coords d{0, 0, 0};
  auto rest = static_cast<int>(index);
  for (int a = 0; a < spec.dimension; ++a) {
    const int g = grid[static_cast<std::size_t>(a)];
    int c = rest % g;
    rest /= g;
    if (spec.periodic()) {
      if (c > g / 2) c -= g;
    } else if (c >= g / 2) {
      c -= g;
    }
    d[static_cast<std::size_t>(a)] = c;
  }
  return d;
}

double TwoPointFunction::distance(std::size_t index) const {
  const Coords d = displacement(index);
  return std::sqrt(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
}

std::size_t TwoPointFunction::index(const Coords& d) const {
  std::size_t idx = 0, stride = 1;
  for (int a = 0; a < spec.dimension; ++a) {
    const int g = grid[static_cast<std::size_t>(a)];
    int c = d[static_cast<std::size_t>(a)];
    if (spec.periodic()) {
      c = ((c % g) + g) % g;
    } else {
      if (std::abs(c) >= g / 2) return npos;
      if (c < 0) c += g;
    }
    idx += static_cast<std::size_t>(c) * stride;
    stride *= static_cast<std::size_t>(g);
  }
  return idx;
}

TwoPointFunction two_point_from_samples(const SampleSet& samples) {
  const auto& d = samples.get("two_point");
  TwoPointObservable shape(samples.spec);
  const LatticeSpec spec = samples.spec;
  const std::size_t g = shape.grid_size();
  const auto n = static_cast<std::size_t>(spec.volume());
  if (d.columns.size() != g + n) throw std::invalid_argument("two_point data does not match the lattice");

  TwoPointFunction w;
  w.spec = spec;
  w.grid = shape.grid();
  w.source = "mc";
  std::vector<double> ones(n, 1.0);
  if (spec.periodic()) {
    w.pair_counts.assign(g, static_cast<double>(n));
  } else {
    Coords padded;
    w.pair_counts = open_autocorrelation(ones, spec.extents, spec.dimension, padded);
    for (auto& c : w.pair_counts) c = std::round(c);
  }
  const auto counts = w.pair_counts;
  auto transform = [&](const Eigen::VectorXd& v) {
    std::vector<double> site(v.data() + g, v.data() + g + n);
    std::vector<double> prod;
    if (spec.periodic()) {
      prod = periodic_autocorrelation(site, spec.extents, spec.dimension);
    } else {
      Coords padded;
      prod = open_autocorrelation(site, spec.extents, spec.dimension, padded);
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(g));
    for (std::size_t i = 0; i < g; ++i)
      out(static_cast<Eigen::Index>(i)) = counts[i] > 0.0 ? (v(static_cast<Eigen::Index>(i)) - prod[i]) / counts[i] : 0.0;
    return out;
  };
  w.values = d.jackknife().apply(transform);
  return w;
}

TwoPointFunction two_point_from_exact(const ExactMoments& exact) {
  const LatticeSpec& spec = exact.spec;
  TwoPointObservable shape(spec);
  TwoPointFunction w;
  w.spec = spec;
  w.grid = shape.grid();
  w.source = "exact";
  const std::size_t g = shape.grid_size();
  w.pair_counts.assign(g, 0.0);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g));
  const int n = spec.volume();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      Coords d;
      const Coords cx = spec.coords(x), cy = spec.coords(y);
      for (int a = 0; a < 3; ++a) d[static_cast<std::size_t>(a)] = cy[static_cast<std::size_t>(a)] - cx[static_cast<std::size_t>(a)];
      const std::size_t i = w.index(d);
      if (i == TwoPointFunction::npos) continue;
      const double c = exact.moment({x, y}) - exact.moment({x}) * exact.moment({y});
      sum(static_cast<Eigen::Index>(i)) += c;
      w.pair_counts[i] += 1.0;
    }
  for (std::size_t i = 0; i < g; ++i)
    if (w.pair_counts[i] > 0.0) sum(static_cast<Eigen::Index>(i)) /= w.pair_counts[i];
  w.values = JackknifeSet::exact(sum);
  return w;
}

TwoPointFunction synthetic_two_point(const LatticeSpec& spec, const std::function<double(const Coords&)>& f) {
  if (!spec.periodic()) throw std::invalid_argument("synthetic two-point data is defined on the torus");
  TwoPointFunction w;
  w.spec = spec;
  for (int a = 0; a < spec.dimension; ++a) w.grid[static_cast<std::size_t>(a)] = spec.extent(a);
  const auto g = static_cast<std::size_t>(grid_volume(w.grid));
  w.pair_counts.assign(g, static_cast<double>(spec.volume()));
  w.source = "synthetic";
  Eigen::VectorXd v(static_cast<Eigen::Index>(g));
  for (std::size_t i = 0; i < g; ++i) v(static_cast<Eigen::Index>(i)) = f(w.displacement(i));
  w.values = JackknifeSet::exact(v);
  return w;
}

RadialProfile radial_profile(const TwoPointFunction& w2, double max_radius) {
  std::map<long, std::vector<std::size_t>> bins;
  for (std::size_t i = 0; i < w2.size(); ++i) {
    if (!w2.valid(i)) continue;
    const Coords d = w2.displacement(i);
    const long r2 = static_cast<long>(d[0]) * d[0] + static_cast<long>(d[1]) * d[1] + static_cast<long>(d[2]) * d[2];
    if (std::sqrt(static_cast<double>(r2)) > max_radius + 1e-9) continue;
    bins[r2].push_back(i);
  }
  const Eigen::VectorXd err = w2.values.error();
  const bool weighted = w2.values.has_errors();
  RadialProfile p;
  std::vector<std::vector<std::pair<std::size_t, double>>> weights;
  for (const auto& [r2, idx] : bins) {
    std::vector<std::pair<std::size_t, double>> w;
    bool all_positive = weighted;
    for (auto i : idx)
      if (!(err(static_cast<Eigen::Index>(i)) > 0.0)) all_positive = false;
    double total = 0.0;
    for (auto i : idx) {
      const double e = err(static_cast<Eigen::Index>(i));
      const double wi = all_positive ? 1.0 / (e * e) : 1.0;
      w.emplace_back(i, wi);
      total += wi;
    }
    for (auto& [i, wi] : w) wi /= total;
    p.r.push_back(std::sqrt(static_cast<double>(r2)));
    p.multiplicity.push_back(static_cast<int>(idx.size()));
    weights.push_back(std::move(w));
  }
  auto combine = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t b = 0; b < weights.size(); ++b) {
      double s = 0.0;
      for (const auto& [i, wi] : weights[b]) s += wi * v(static_cast<Eigen::Index>(i));
      out(static_cast<Eigen::Index>(b)) = s;
    }
    return out;
  };
  p.data = w2.values.apply(combine);
  const Eigen::VectorXd e = p.data.error();
  for (Eigen::Index b = 0; b < p.data.mean.size(); ++b) {
    p.mean.push_back(p.data.mean(b));
    p.error.push_back(e(b));
  }
  for (std::size_t b = 0; b < p.r.size(); ++b) {
    const double r = p.r[b];
    if (std::abs(r - std::round(r)) > 1e-9 || r < 1.0) continue;
    const std::size_t i = w2.index(Coords{static_cast<int>(std::round(r)), 0, 0});
    if (i == TwoPointFunction::npos || !w2.valid(i)) continue;
    const double m = p.mean[b];
    if (std::abs(m) <= 3.0 * p.error[b] || m == 0.0) continue;
    p.anisotropy = std::max(p.anisotropy, std::abs(w2.values.mean(static_cast<Eigen::Index>(i)) - m) / std::abs(m));
  }
  return p;
}

std::vector<double> default_radii(const TwoPointFunction& w2) {
  int lmin = 1 << 30;
  for (int a = 0; a < w2.spec.dimension; ++a) lmin = std::min(lmin, w2.spec.extent(a));
  std::vector<double> radii;
  for (int r = 1; r <= lmin / 2; r *= 2) radii.push_back(r);
  return radii;
}

namespace {

// slope of y(x) with an error taken from jackknife replicates when present
struct ReplicatedFit {
  LineFit fit;
  double jackknife_slope_error = 0.0;
};

ReplicatedFit replicated_line(const std::vector<double>& x, const JackknifeSet& y, const std::vector<double>& sigma) {
  ReplicatedFit out;
  std::vector<double> ym(y.mean.data(), y.mean.data() + y.mean.size());
  out.fit = fit_line(x, ym, sigma);
  if (y.has_errors()) {
    Eigen::VectorXd slopes(y.replicate_count());
    for (int b = 0; b < y.replicate_count(); ++b) {
      std::vector<double> yb(static_cast<std::size_t>(y.size()));
      for (int i = 0; i < y.size(); ++i) yb[static_cast<std::size_t>(i)] = y.replicates(b, i);
      slopes(b) = fit_line(x, yb, sigma).slope;
    }
    out.jackknife_slope_error = jackknife_error(slopes);
  }
  return out;
}

}  // namespace

SummabilityReport summability_diagnostic(const TwoPointFunction& w2, const std::vector<double>& radii) {
  if (radii.size() < 2 || radii.front() <= 0.0 || radii.back() / radii.front() < 16.0 - 1e-9)
    throw std::invalid_argument("summability diagnostic needs at least 4 octaves of radii");
  if (!std::is_sorted(radii.begin(), radii.end())) throw std::invalid_argument("radii must be increasing");
  SummabilityReport rep;
  rep.radii = radii;
  std::vector<double> dist(w2.size());
  for (std::size_t i = 0; i < w2.size(); ++i) dist[i] = w2.distance(i);
  auto sums = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(radii.size()));
    for (std::size_t i = 0; i < w2.size(); ++i) {
      if (!w2.valid(i)) continue;
      for (std::size_t k = 0; k < radii.size(); ++k)
        if (dist[i] <= radii[k] + 1e-9) s(static_cast<Eigen::Index>(k)) += v(static_cast<Eigen::Index>(i));
    }
    return s;
  };
  const JackknifeSet S = w2.values.apply(sums);
  const Eigen::VectorXd Serr = S.error();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    rep.partial_sums.push_back(S.mean(static_cast<Eigen::Index>(k)));
    rep.partial_sum_errors.push_back(Serr(static_cast<Eigen::Index>(k)));
  }

  const auto K = static_cast<Eigen::Index>(radii.size());
  const JackknifeSet inc = S.apply([&](const Eigen::VectorXd& s) {
    Eigen::VectorXd d(K - 1);
    for (Eigen::Index k = 0; k + 1 < K; ++k) d(k) = s(k + 1) - s(k);
    return d;
  });
  const Eigen::VectorXd inc_err = inc.error();
  const double last = inc.mean(K - 2);
  const double scale = std::max(1.0, std::abs(S.mean(K - 1)));
  rep.increments_below_noise = std::abs(last) <= 3.0 * inc_err(K - 2) + 1e-9 * scale;

  // exponential tail of the radial profile over the points above noise
  const RadialProfile prof = radial_profile(w2, radii.back());
  std::vector<double> tx, ty, ts;
  bool use_sigma = w2.values.has_errors();
  for (std::size_t b = 0; b < prof.r.size(); ++b) {
    if (prof.r[b] < 1.0) continue;
    const double m = prof.mean[b], e = prof.error[b];
    if (!(m > 3.0 * e) || !(m > 1e-300)) break;
    tx.push_back(prof.r[b]);
    ty.push_back(std::log(m));
    ts.push_back(e > 0.0 ? e / m : 0.0);
  }
  bool tail_ok = false;
  if (tx.size() >= 3) {
    const LineFit f = fit_line(tx, ty, use_sigma ? std::span<const double>(ts) : std::span<const double>());
    rep.tail_decay_rate = -f.slope;
    rep.tail_decay_rate_error = std::max(f.slope_error, f.residual_slope_error);
    tail_ok = rep.tail_decay_rate > 3.0 * rep.tail_decay_rate_error && rep.tail_decay_rate > 0.0;
  }

  // growth of log S and of the octave increments
  std::vector<double> lx, ly, ls;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (rep.partial_sums[k] <= 0.0) continue;
    lx.push_back(std::log(radii[k]));
    ly.push_back(std::log(rep.partial_sums[k]));
    ls.push_back(rep.partial_sum_errors[k] / rep.partial_sums[k]);
  }
  if (lx.size() >= 3) {
    const bool weighted = w2.values.has_errors() && std::all_of(ls.begin(), ls.end(), [](double s) { return s > 0.0; });
    const LineFit f = fit_line(lx, ly, weighted ? std::span<const double>(ls) : std::span<const double>());
    rep.log_slope = f.slope;
    rep.log_slope_error = std::max(f.slope_error, f.residual_slope_error);
  }
  std::vector<double> dx, dy, ds;
  for (Eigen::Index k = 0; k + 1 < K; ++k) {
    if (radii[static_cast<std::size_t>(k)] < 2.0 - 1e-9) continue;  // lattice-scale increments
    const double v = inc.mean(k), e = inc_err(k);
    if (!(v > 3.0 * e) || v <= 0.0) continue;
    dx.push_back(std::log(radii[static_cast<std::size_t>(k + 1)]));
    dy.push_back(std::log(v));
    ds.push_back(e / v);
  }
  if (dx.size() >= 2) {
    const bool weighted = w2.values.has_errors() && std::all_of(ds.begin(), ds.end(), [](double s) { return s > 0.0; });
    const LineFit f = fit_line(dx, dy, weighted ? std::span<const double>(ds) : std::span<const double>());
    rep.divergence_exponent = f.slope;
    rep.divergence_exponent_error = dx.size() > 2 ? std::max(f.slope_error, f.residual_slope_error) : f.slope_error;
  }

  if (rep.increments_below_noise && tail_ok)
    rep.verdict = "summable";
  else if (lx.size() >= 3 && rep.log_slope > 3.0 * rep.log_slope_error)
    rep.verdict = "non_summable";
  else
    rep.verdict = "inconclusive";
  return rep;
}

std::array<double, 3> SpectralTable::momentum(std::size_t index) const {
  std::array<double, 3> k{0, 0, 0};
  auto rest = static_cast<int>(index);
  for (int a = 0; a < dimension; ++a) {
    const int g = grid[static_cast<std::size_t>(a)];
    int c = rest % g;
    rest /= g;
    if (c > g / 2) c -= g;
    k[static_cast<std::size_t>(a)] = 2.0 * M_PI * c / g;
  }
  return k;
}

SpectralTable spectral_measure(const TwoPointFunction& w2) {
  if (!w2.spec.periodic()) throw std::invalid_argument("spectral measure requires periodic (torus) data");
  SpectralTable t;
  t.grid = w2.grid;
  t.dimension = w2.spec.dimension;
  auto dft = [&](const Eigen::VectorXd& v) {
    std::vector<double> f(v.data(), v.data() + v.size());
    auto s = real_spectrum(f, w2.grid, w2.spec.dimension);
    return Eigen::Map<Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size())).eval();
  };
  const JackknifeSet spec = w2.values.apply(dft);
  const Eigen::VectorXd err = spec.error();
  t.values.assign(spec.mean.data(), spec.mean.data() + spec.mean.size());
  t.errors.assign(err.data(), err.data() + err.size());
  t.min_value = *std::min_element(t.values.begin(), t.values.end());
  t.argmax = static_cast<std::size_t>(std::max_element(t.values.begin(), t.values.end()) - t.values.begin());
  t.epsilon = 1e-10;
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const double eps = std::max(1e-10, 3.0 * t.errors[i]);
    t.epsilon = std::max(t.epsilon, eps);
    if (t.values[i] < -eps) t.violations.emplace_back(i, t.values[i]);
  }
  const int g0 = t.grid[0], g1 = t.grid[1], g2 = t.grid[2];
  for (int z = 0; z < g2; ++z)
    for (int y = 0; y < g1; ++y)
      for (int x = 0; x < g0; ++x) {
        const int mx = (g0 - x) % g0, my = (g1 - y) % g1, mz = (g2 - z) % g2;
        const double a = t.values[static_cast<std::size_t>(x + g0 * (y + g1 * z))];
        const double b = t.values[static_cast<std::size_t>(mx + g0 * (my + g1 * mz))];
        t.max_asymmetry = std::max(t.max_asymmetry, std::abs(a - b));
      }
  return t;
}

EtaFit eta_fit(const TwoPointFunction& w2, FitWindow window) {
  const int nu = w2.spec.dimension;
  int lmin = 1 << 30;
  for (int a = 0; a < nu; ++a) lmin = std::min(lmin, w2.spec.extent(a));
  EtaFit out;
  out.r_max = window.r_max > 0.0 ? window.r_max : lmin / 4.0;
  out.r_min = window.r_min > 0.0 ? window.r_min : std::min(4.0, out.r_max / 10.0);
  if (out.r_max / out.r_min < 10.0 - 1e-9) throw std::invalid_argument("eta fit window spans less than one decade");

  const RadialProfile prof = radial_profile(w2, out.r_max);
  std::vector<std::size_t> use;
  for (std::size_t b = 0; b < prof.r.size(); ++b) {
    if (prof.r[b] < out.r_min - 1e-9) continue;
    const double m = prof.mean[b], e = prof.error[b];
    if (m < -5.0 * e - 1e-12) throw std::invalid_argument("negative two-point values inside the eta fit window");
    if (!(m > 3.0 * e) || m <= 0.0) break;
    use.push_back(b);
  }
  if (use.size() < 3) throw std::invalid_argument("eta fit window has fewer than three usable points");
  out.points = static_cast<int>(use.size());
  out.used_r_max = prof.r[use.back()];

  const bool weighted = prof.data.has_errors();
  std::vector<double> x, r, sigma;
  for (auto b : use) {
    x.push_back(std::log(prof.r[b]));
    r.push_back(prof.r[b]);
    sigma.push_back(weighted ? prof.error[b] / prof.mean[b] : 0.0);
  }
  const std::span<const double> sig = weighted ? std::span<const double>(sigma) : std::span<const double>();
  auto idx = std::vector<int>(use.begin(), use.end());
  const JackknifeSet logw = prof.data.select(idx).apply([](const Eigen::VectorXd& v) {
    return v.array().max(1e-300).log().matrix().eval();
  });

  std::vector<double> ym(logw.mean.data(), logw.mean.data() + logw.mean.size());
  out.finite_size_terms = window.finite_size_terms && w2.spec.periodic() && use.size() >= 6;
  if (out.finite_size_terms) {
    // log W = a - (nu - 2 + eta) log r + b1 r/L + b2 (r/L)^2
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd X(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = r[static_cast<std::size_t>(i)] / lmin;
      X.row(i) << 1.0, x[static_cast<std::size_t>(i)], u, u * u;
    }
    const LinearModelFit fit = fit_linear_model(X, ym, sig);
    out.eta = -fit.coefficients(1) - (nu - 2);
    out.coefficients.assign(fit.coefficients.data(), fit.coefficients.data() + fit.coefficients.size());
    out.goodness = fit.reduced_chi2();
    out.error = fit.errors(1);
    if (logw.has_errors()) {
      Eigen::VectorXd slopes(logw.replicate_count());
      for (int b = 0; b < logw.replicate_count(); ++b) {
        std::vector<double> yb(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) yb[static_cast<std::size_t>(i)] = logw.replicates(b, i);
        slopes(b) = fit_linear_model(X, yb, sig).coefficients(1);
      }
      out.error = jackknife_error(slopes);
    }
  } else {
    const ReplicatedFit power = replicated_line(x, logw, sigma.empty() || !weighted ? std::vector<double>{} : sigma);
    out.eta = -power.fit.slope - (nu - 2);
    out.coefficients = {power.fit.intercept, power.fit.slope};
    out.error = weighted ? power.jackknife_slope_error : power.fit.residual_slope_error;
    out.goodness = power.fit.reduced_chi2();
  }
  // model choice compares the two-parameter forms on equal footing
  out.model_goodness = out.goodness;
  out.goodness = fit_line(x, ym, sig).reduced_chi2();
  const LineFit expo = fit_line(r, ym, sig);
  out.exponential_goodness = expo.reduced_chi2();
  out.preferred = out.exponential_goodness < out.goodness ? "exponential" : "power_law";
  out.poor_fit = out.preferred == "exponential" || (weighted && out.model_goodness > 3.0);
  out.exceeds_one = out.eta > 1.0 + 3.0 * out.error;
  out.ergodicity_ok = nu - (2.0 - out.eta) > 0.0;

  if (w2.spec.periodic()) {
    const SpectralTable spec = spectral_measure(w2);
    const double k_cut = M_PI / 8.0 + 1e-12;
    std::map<long, std::pair<double, int>> bins;
    std::map<long, double> kval;
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      const auto k = spec.momentum(i);
      const double kk = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
      if (kk <= 0.0 || kk > k_cut) continue;
      const long key = std::lround(kk * 1e9);
      bins[key].first += spec.values[i];
      bins[key].second += 1;
      kval[key] = kk;
    }
    std::vector<double> kx, ky;
    for (const auto& [key, acc] : bins) {
      const double v = acc.first / acc.second;
      if (v <= 0.0) continue;
      kx.push_back(std::log(kval[key]));
      ky.push_back(std::log(v));
    }
    if (kx.size() >= 3) {
      const LineFit f = fit_line(kx, ky);
      out.rho_hat = -f.slope;
      out.rho_error = f.residual_slope_error;
      out.rho_available = true;
    }
  }
  return out;
}

InequalityAudit inequality_audit(const ConnectedFunctions& w2, const ConnectedFunctions& w4) {
  InequalityAudit a;
  auto tolerance = [](const ConnectedFunctions& cf, const SiteTuple& t) {
    return cf.exact() ? 1e-10 : std::max(3.0 * cf.error(t), 1e-12);
  };
  for (const auto& [t, v] : w2.values) {
    ++a.griffiths_checked;
    a.max_w2_negative = std::max(a.max_w2_negative, -v);
    if (v < -tolerance(w2, t)) ++a.griffiths_violations;
    a.worst_griffiths.emplace_back(t, v);
  }
  for (const auto& [t, v] : w4.values) {
    ++a.lebowitz_checked;
    a.max_w4_positive = std::max(a.max_w4_positive, v);
    if (v > tolerance(w4, t)) ++a.lebowitz_violations;
    a.worst_lebowitz.emplace_back(t, v);
  }
  std::sort(a.worst_griffiths.begin(), a.worst_griffiths.end(), [](auto& l, auto& r) { return l.second < r.second; });
  std::sort(a.worst_lebowitz.begin(), a.worst_lebowitz.end(), [](auto& l, auto& r) { return l.second > r.second; });
  if (a.worst_griffiths.size() > 5) a.worst_griffiths.resize(5);
  if (a.worst_lebowitz.size() > 5) a.worst_lebowitz.resize(5);
  return a;
}

}  // namespace critlab
