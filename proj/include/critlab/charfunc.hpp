#pragma once

#include <complex>
#include <vector>

#include "critlab/exact.hpp"

namespace critlab {

/// Largest volume whose field polynomial is root-solved.
inline constexpr int kMaxZeroVolume = 20;

struct GeneratingPoint {
  double z = 0.0;
  double value = 0.0;  ///< G(z) = E[exp(z sum sigma)]
};

/// Exact G(z) on a grid of real arguments.
std::vector<GeneratingPoint> generating_profile(const ExactMoments& exact, const std::vector<double>& z_grid);
std::vector<GeneratingPoint> generating_profile(const LatticeSpec& spec, const Coupling& coupling, double beta,
                                                const std::vector<double>& z_grid);

/// Oscillatory counterpart E[exp(i t sum sigma)].
std::complex<double> characteristic_function(const ExactMoments& exact, double t);

/// Zeros of G(z) on the imaginary axis, z = +-i t_j.
///
/// Each root w_j = exp(i theta_j) of the field polynomial sum_k P(2k-N) w^k
/// produces the ladder t = u_j + pi m (m >= 0) with u_j in (0, pi). The N
/// ladders are exact; `t` keeps the first `periods` rungs of each and the
/// discarded tail is summed in closed form with the Hurwitz zeta function.
struct ZeroSet {
  int volume = 0;
  std::vector<std::complex<double>> roots;  ///< roots in w = exp(2 z)
  std::vector<double> root_residuals;       ///< |P(w)| / sum |c_k|
  std::vector<double> base;                 ///< u_j in (0, pi), sorted
  std::vector<int> multiplicity;            ///< multiplicity of each root as resolved
  int periods = 0;
  std::vector<double> t;                    ///< retained zeros, ascending
  double circle_deviation = 0.0;            ///< max ||w| - 1|
  double tail_bound = 0.0;                  ///< sum over discarded zeros of 1/t^2

  std::size_t count() const { return t.size(); }
  /// sum_j t_j^{-2k} over every zero, retained or not.
  double power_sum(int k) const;
  /// sum over the discarded zeros only.
  double tail_power_sum(int k) const;
  /// K_total = 2 sum_j 1/t_j^2.
  double k_total() const { return 2.0 * power_sum(1); }
  /// Cumulant U_{2k} = d^{2k}/dz^{2k} log G at 0, from the zeros.
  double cumulant(int order) const;
  /// prod_{retained} (1 + z^2/t^2) times the closed-form tail factor.
  double product(double z) const;
  /// Product over retained zeros only, no tail correction.
  double truncated_product(double z) const;
};

inline constexpr double kUnitCircleTolerance = 1e-8;

/// Roots of the Lee-Yang polynomial mapped to zeros of G. Throws
/// std::runtime_error when a root is off the unit circle beyond 1e-8 or the
/// root finder does not converge.
ZeroSet lee_yang_zeros(const ExactMoments& exact, int periods = 64);
ZeroSet lee_yang_zeros(const LatticeSpec& spec, const Coupling& coupling, double beta, int periods = 64);

/// Zeros of a closed-form single site (G = cosh z), used as a reference.
ZeroSet single_site_zeros(int periods = 64);

struct DcgReport {
  double k_total = 0.0;
  std::vector<double> moment_cumulants;  ///< U_2, U_4, U_6, U_8 from the spin moments
  std::vector<double> zero_cumulants;    ///< the same from the zeros
  double max_relative_mismatch = 0.0;
  bool signs_alternate = false;          ///< sign U_{2r+2} = (-1)^r
  bool all_nonzero = false;              ///< |U_{2r+2}| > threshold for r = 0..3
  bool k_positive = false;
  bool pass = false;
};

/// Checks that the cumulants read off the zero set match those of the spin
/// moments (relative 1e-8), that they alternate in sign and never vanish.
DcgReport dcg_identities(const ZeroSet& zeros, const ExactMoments& exact, double tolerance = 1e-8,
                         double nonzero_threshold = 1e-6);

struct SchwarzCase {
  std::vector<double> measure_moments;  ///< M_j = int x^{2j} dK, j = 0..3
  bool log_convex = true;               ///< M_{r-1}^2 <= M_r M_{r-2}
  double worst_log_convex = 0.0;        ///< max (M_{r-1}^2 - M_r M_{r-2}) / (M_r M_{r-2})
  bool literal_form = true;             ///< M_{r-1} <= sqrt(M_r M_{2r-2}), as printed
};

struct SchwarzReport {
  std::vector<SchwarzCase> volumes;
  bool pass = false;  ///< the log-convex form holds on every volume
};

/// `cumulant_sets[v]` holds U_2, U_4, U_6, U_8 for volume v (at least 3 volumes).
SchwarzReport schwarz_chain_check(const std::vector<std::vector<double>>& cumulant_sets, double tolerance = 1e-10);

/// U_2..U_8 of the total spin from exact moments.
std::vector<double> exact_total_spin_cumulants(const ExactMoments& exact);

}  // namespace critlab
