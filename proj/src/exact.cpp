#include "critlab/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>
#include <atomic>

#include "critlab/special.hpp"

namespace critlab {

std::uint32_t tuple_mask(const std::vector<int>& sites) {
  std::uint32_t m = 0;
  for (int s : sites) {
    if (s < 0 || s >= 32) throw LatticeError("site index out of range for a tuple mask");
    m ^= std::uint32_t{1} << s;
  }
  return m;
}

double ExactMoments::moment(const std::vector<int>& sites) const {
  for (int s : sites)
    if (s < 0 || s >= volume()) throw LatticeError("site " + std::to_string(s) + " out of range");
  const std::uint32_t m = tuple_mask(sites);
  if (!subset_moments.empty()) return subset_moments[m];
  auto it = requested.find(m);
  if (it == requested.end()) throw std::out_of_range("moment was not recorded during enumeration");
  return it->second;
}

double ExactMoments::magnetization_moment(int k, bool absolute) const {
  const int n = volume();
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    double m = static_cast<double>(2 * i - n) / n;
    if (absolute) m = std::abs(m);
    s += total_spin_distribution[static_cast<std::size_t>(i)] * std::pow(m, k);
  }
  return s;
}

std::vector<double> ExactMoments::total_spin_moments(int order) const {
  const int n = volume();
  std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double M = 2.0 * i - n;
    double p = total_spin_distribution[static_cast<std::size_t>(i)], pw = 1.0;
    for (int k = 0; k <= order; ++k, pw *= M) out[static_cast<std::size_t>(k)] += p * pw;
  }
  return out;
}

namespace {

struct Partial {
  double weight = 0.0;
  double energy = 0.0;
  double energy2 = 0.0;
  std::vector<double> spin_hist;
  std::vector<double> masks;
};

}  // namespace

ExactMoments enumerate(const LatticeSpec& spec, const Coupling& coupling, double beta,
                       const EnumerationOptions& options) {
  spec.validate();
  const int n = spec.volume();
  if (n > kMaxEnumerationVolume)
    throw LatticeError("volume " + std::to_string(n) + " too large for enumeration (max " +
                       std::to_string(kMaxEnumerationVolume) + ")");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  const Hamiltonian h(spec, coupling);
  const bool full = n <= kMaxFullMomentVolume;

  std::vector<std::uint32_t> masks;
  for (const auto& t : options.tuples) masks.push_back(tuple_mask(t));
  for (auto m : masks)
    if (m >> n) throw LatticeError("tuple refers to a site outside the lattice");

  const int top_bits = std::min(n, 6);
  const int low_bits = n - top_bits;
  const int parts = 1 << top_bits;
  const std::uint64_t steps = std::uint64_t{1} << low_bits;
  const double floor = h.energy_floor();
  std::vector<Partial> partial(static_cast<std::size_t>(parts));
  std::vector<double> probability(full ? std::size_t{1} << n : 0, 0.0);

  auto run_part = [&](int part) {
    Partial& P = partial[static_cast<std::size_t>(part)];
    P.spin_hist.assign(static_cast<std::size_t>(n) + 1, 0.0);
    P.masks.assign(masks.size(), 0.0);
    const std::uint32_t high = static_cast<std::uint32_t>(part) << low_bits;
    std::vector<std::int8_t> v(static_cast<std::size_t>(n), 1);
    for (int b = 0; b < n; ++b)
      if (high >> b & 1u) v[static_cast<std::size_t>(b)] = -1;
    SpinConfiguration c(spec, std::move(v));
    double e = h.energy(c);
    int down = std::popcount(high);
    std::uint32_t state = high;
    for (std::uint64_t i = 0;; ++i) {
      const double de = e - floor;
      const double w = std::exp(-beta * de);
      P.weight += w;
      P.energy += w * de;
      P.energy2 += w * de * de;
      P.spin_hist[static_cast<std::size_t>(n - down)] += w;
      for (std::size_t k = 0; k < masks.size(); ++k)
        P.masks[k] += (std::popcount(state & masks[k]) & 1) ? -w : w;
      if (full) probability[state] = w;
      if (i + 1 == steps) break;
      const int bit = std::countr_zero(i + 1);
      e += h.flip_delta(c, bit);
      c.flip(bit);
      state ^= std::uint32_t{1} << bit;
      down += c[bit] < 0 ? 1 : -1;
    }
  };

  const int workers = std::clamp(options.threads, 1, parts);
  if (workers == 1) {
    for (int p = 0; p < parts; ++p) run_part(p);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int p = next++; p < parts; p = next++) run_part(p);
      });
    for (auto& t : pool) t.join();
  }

  ExactMoments out;
  out.spec = spec;
  out.coupling = coupling;
  out.beta = beta;
  CompensatedSum<> Z, E, E2;
  std::vector<CompensatedSum<>> hist(static_cast<std::size_t>(n) + 1), msum(masks.size());
  for (const auto& P : partial) {
    Z.add(P.weight);
    E.add(P.energy);
    E2.add(P.energy2);
    for (int i = 0; i <= n; ++i) hist[static_cast<std::size_t>(i)].add(P.spin_hist[static_cast<std::size_t>(i)]);
    for (std::size_t k = 0; k < masks.size(); ++k) msum[k].add(P.masks[k]);
  }
  const double z = Z.value();
  out.log_partition = std::log(z) - beta * floor;
  const double mean_shifted = E.value() / z;
  out.mean_energy = mean_shifted + floor;
  out.mean_energy2 = E2.value() / z + 2.0 * floor * mean_shifted + floor * floor;
  out.total_spin_distribution.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i)
    out.total_spin_distribution[static_cast<std::size_t>(i)] = hist[static_cast<std::size_t>(i)].value() / z;
  for (std::size_t k = 0; k < masks.size(); ++k) out.requested[masks[k]] = msum[k].value() / z;

  if (full) {
    for (auto& p : probability) p /= z;
    // Walsh-Hadamard transform: subset moments of the +-1 variables
    for (std::size_t len = 1; len < probability.size(); len <<= 1)
      for (std::size_t i = 0; i < probability.size(); i += len << 1)
        for (std::size_t j = i; j < i + len; ++j) {
          const double a = probability[j], b = probability[j + len];
          probability[j] = a + b;
          probability[j + len] = a - b;
        }
    out.subset_moments = std::move(probability);
    out.subset_moments[0] = 1.0;
  }
  return out;
}

std::complex<double> exact_generating(const ExactMoments& exact, std::complex<double> z) {
  const int n = exact.volume();
  // scale by exp(|Re z| N) so every term is bounded by one
  const double shift = std::abs(z.real()) * n;
  std::complex<double> s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double M = 2.0 * i - n;
    s += exact.total_spin_distribution[static_cast<std::size_t>(i)] * std::exp(z * M - shift);
  }
  return s * std::exp(shift);
}

std::complex<double> exact_generating(const LatticeSpec& spec, const Coupling& coupling, double beta,
                                      std::complex<double> z) {
  return exact_generating(enumerate(spec, coupling, beta), z);
}

double exact_log_generating(const ExactMoments& exact, double z) {
  const int n = exact.volume();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double p = exact.total_spin_distribution[static_cast<std::size_t>(i)];
    if (p > 0.0) terms.push_back(std::log(p) + z * (2.0 * i - n));
  }
  return log_sum_exp(terms);
}

StripCorrelation transfer_matrix(int width, double J, double beta, int length, int max_distance) {
  if (width < 1 || width > kMaxStripWidth)
    throw LatticeError("strip width " + std::to_string(width) + " outside [1, " + std::to_string(kMaxStripWidth) + "]");
  if (length != 0 && length < 2) throw LatticeError("strip length must be 0 (infinite) or at least 2");
  if (max_distance < 0) throw LatticeError("max_distance must be non-negative");
  const int dim = 1 << width;
  auto spin = [](int state, int i) { return (state >> i & 1) ? -1 : 1; };
  Eigen::VectorXd half_diag(dim), s0(dim);
  for (int a = 0; a < dim; ++a) {
    int intra = 0;
    // torus multigraph: each site owns the bond to its successor; none for width one
    if (width > 1)
      for (int i = 0; i < width; ++i) intra += spin(a, i) * spin(a, (i + 1) % width);
    half_diag(a) = std::exp(0.5 * beta * J * intra);
    s0(a) = spin(a, 0);
  }
  Eigen::MatrixXd T(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      int inter = 0;
      for (int i = 0; i < width; ++i) inter += spin(a, i) * spin(b, i);
      T(a, b) = half_diag(a) * std::exp(beta * J * inter) * half_diag(b);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  // descending order
  const Eigen::VectorXd lam = es.eigenvalues().reverse();
  const Eigen::MatrixXd V = es.eigenvectors().rowwise().reverse();
  const Eigen::MatrixXd S = V.transpose() * s0.asDiagonal() * V;

  StripCorrelation out;
  out.width = width;
  out.length = length;
  out.beta = beta;
  out.eigenvalues = lam;
  const Eigen::ArrayXd ratio = lam.array() / lam(0);
  out.correlation.resize(static_cast<std::size_t>(max_distance) + 1);
  if (length == 0) {
    for (int x = 0; x <= max_distance; ++x) {
      double c = 0.0;
      for (int b = 0; b < dim; ++b) c += S(0, b) * S(0, b) * std::pow(ratio(b), x);
      out.correlation[static_cast<std::size_t>(x)] = c;
    }
  } else {
    double norm = 0.0;
    for (int a = 0; a < dim; ++a) norm += std::pow(ratio(a), length);
    for (int x = 0; x <= max_distance; ++x) {
      const int xr = x % length;
      double c = 0.0;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) c += S(a, b) * S(a, b) * std::pow(ratio(a), xr) * std::pow(ratio(b), length - xr);
      out.correlation[static_cast<std::size_t>(x)] = c / norm;
    }
  }
  double lead_odd = 0.0;
  for (int b = 1; b < dim; ++b)
    if (std::abs(S(0, b)) > 1e-12) {
      lead_odd = std::abs(ratio(b));
      break;
    }
  out.correlation_length = lead_odd > 0.0 && lead_odd < 1.0 ? -1.0 / std::log(lead_odd) : INFINITY;
  return out;
}

}  // namespace critlab
