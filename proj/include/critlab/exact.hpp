#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "critlab/lattice.hpp"

namespace critlab {

inline constexpr int kMaxEnumerationVolume = 24;
/// Largest volume for which every subset moment is tabulated.
inline constexpr int kMaxFullMomentVolume = 20;

/// Finite-volume Gibbs expectations computed by summing over all states.
struct ExactMoments {
  LatticeSpec spec;
  Coupling coupling;
  double beta = 0.0;
  double log_partition = 0.0;
  double mean_energy = 0.0;
  double mean_energy2 = 0.0;
  /// P(M) for total spin M = -N, -N+2, ..., N (index (M+N)/2).
  std::vector<double> total_spin_distribution;
  /// <prod_{i in S} sigma_i> for every subset bitmask S; empty when N is too large.
  std::vector<double> subset_moments;
  /// Requested subset moments keyed by bitmask (always filled).
  std::map<std::uint32_t, double> requested;

  int volume() const { return spec.volume(); }
  /// Moment of an arbitrary site tuple (repeated sites cancel in pairs).
  double moment(const std::vector<int>& sites) const;
  double two_point(int x, int y) const { return moment({x, y}); }
  /// E[(sum sigma)^k / N^k] from the total-spin distribution.
  double magnetization_moment(int k, bool absolute = false) const;
  /// Raw moments E[(sum sigma)^n] for n = 0..order.
  std::vector<double> total_spin_moments(int order) const;
};

std::uint32_t tuple_mask(const std::vector<int>& sites);

struct EnumerationOptions {
  std::vector<std::vector<int>> tuples;  ///< moments to record when N > kMaxFullMomentVolume
  int threads = 1;
};

/// Exact enumeration with Gray-code order and incremental energies.
/// Throws LatticeError when the volume exceeds kMaxEnumerationVolume.
ExactMoments enumerate(const LatticeSpec& spec, const Coupling& coupling, double beta,
                       const EnumerationOptions& options = {});

/// E[exp(z * sum sigma)] from an enumeration, evaluated in scaled form.
std::complex<double> exact_generating(const ExactMoments& exact, std::complex<double> z);
std::complex<double> exact_generating(const LatticeSpec& spec, const Coupling& coupling, double beta,
                                      std::complex<double> z);
/// log E[exp(z sum sigma)] for real z without overflow.
double exact_log_generating(const ExactMoments& exact, double z);

/// Two-point function along a strip of width W (periodic transversally) from
/// the symmetric transfer matrix. length 0 means an infinite strip.
struct StripCorrelation {
  int width = 0;
  int length = 0;
  double beta = 0.0;
  std::vector<double> correlation;   ///< <sigma_0 sigma_x>, x = 0..max_distance
  Eigen::VectorXd eigenvalues;       ///< descending
  double correlation_length = 0.0;   ///< from the leading odd eigenvalue ratio
};

inline constexpr int kMaxStripWidth = 12;

StripCorrelation transfer_matrix(int width, double J, double beta, int length, int max_distance);

}  // namespace critlab
