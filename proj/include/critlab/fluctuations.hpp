#pragma once

#include <memory>
#include <string>
#include <vector>

#include "critlab/correlators.hpp"
#include "critlab/fft.hpp"
#include "critlab/mc.hpp"
#include "critlab/stats.hpp"

namespace critlab {

inline constexpr int kMaxBlockMoment = 8;

/// Smooth cutoff: 1 on [0, 1], 0 on [2, inf), C-infinity in between.
double window_eval(double s);
/// f_R(|d|) for a lattice displacement.
double window_weight(const Coords& d, double R);

/// R^-alpha sum_x (sigma_x - center) f_R(x - origin). The window must fit:
/// 4R <= L on the torus, or its support must stay inside an open box.
double block_variable(const SpinConfiguration& config, double R, double alpha, double center,
                      const Coords& origin = {0, 0, 0});

/// Window centres on a grid of spacing ceil(R) whose windows fit the lattice.
std::vector<Coords> window_centers(const LatticeSpec& spec, double R);

/// Raw moments of the unnormalized, uncentred block variable
/// Y_R = sum_x sigma_x f_R(x - c), averaged over the centre grid.
class BlockMomentObservable final : public Observable {
 public:
  BlockMomentObservable(const LatticeSpec& spec, std::vector<double> radii);
  std::string name() const override { return "block_moments"; }
  std::vector<std::string> columns() const override;
  void measure(const SpinConfiguration& config, std::span<double> out) override;
  std::unique_ptr<Observable> clone() const override { return std::make_unique<BlockMomentObservable>(*this); }

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& window_mass() const { return mass_; }

 private:
  LatticeSpec spec_;
  std::vector<double> radii_;
  std::vector<double> mass_;
  Coords grid_{1, 1, 1};
  std::vector<std::vector<cplx>> kernels_;        ///< DFT of each window on the grid
  std::vector<std::vector<std::size_t>> centers_;  ///< grid index of each centre
};

/// Raw moments E[Y_R^n], n = 1..8, of the unnormalized block variable per radius.
struct FluctuationMoments {
  int dimension = 2;
  std::vector<double> radii;
  std::vector<double> window_mass;  ///< sum_x f_R(x)
  JackknifeSet moments;             ///< column r * 8 + (n - 1)
  long samples = 0;
  double alpha = 0.0;  ///< normalization used by derived quantities

  /// Moments of R^-alpha (Y_R - center * mass), n = 1..8, per radius.
  JackknifeSet normalized(double alpha, double center) const;
};

FluctuationMoments fluctuation_moments(const SampleSet& samples);
/// Exact moments of a centred Gaussian field with covariance W on the torus.
FluctuationMoments gaussian_fluctuation_moments(const TwoPointFunction& w2, const std::vector<double>& radii);
/// From raw per-radius samples of a block variable (rows = samples).
FluctuationMoments moments_from_samples(const std::vector<std::vector<double>>& samples_per_radius,
                                        const std::vector<double>& radii, int dimension, int blocks = 50);

struct VarianceFit {
  std::vector<double> radii;
  std::vector<double> variance, variance_error;
  double slope_2alpha = 0.0;
  double intercept = 0.0;  ///< of log V_R against log R
  double error = 0.0;
  double alpha_hat = 0.0;
  double alpha_error = 0.0;
  double rho_hat = 0.0;
  double eta_hat = 0.0;
  std::string verdict;  ///< normal | anomalous | inconclusive
  /// Local slope between the two largest radii; diagnostic only, shows how far
  /// the small windows are from the asymptotic regime.
  double upper_slope = 0.0, upper_slope_error = 0.0;
};

/// log V_R against log R for the unnormalized variance; needs >= 4 octaves.
VarianceFit variance_scaling_fit(const FluctuationMoments& moments);

/// Cumulants U_2 .. U_8 of the normalized block variable per radius.
struct CumulantTable {
  std::vector<double> radii;
  double alpha = 0.0;
  JackknifeSet cumulants;  ///< column r * 4 + (k - 1) holds U_{2k}
  double U(std::size_t radius, int order) const;
  double U_error(std::size_t radius, int order) const;
};

/// Throws when fewer than 100 samples are available.
CumulantTable cumulants(const FluctuationMoments& moments, double alpha);

struct GaussianityReport {
  std::vector<double> radii;
  std::vector<double> g4, g4_error, g6, g6_error;
  KendallResult trend;
  double intercept = 0.0;
  double intercept_error = 0.0;
  double slope = 0.0;  ///< of g4 against 1/R
  bool decreasing = false;            ///< Kendall p < 0.05 for a decreasing trend
  bool intercept_consistent = false;  ///< intercept within 3 sigma of 0
  bool nonzero_at_all_radii = false;  ///< g4 > 3 sigma at every radius
  std::string verdict;
};

/// Quasi-freeness trend test; the table must use the anomalous normalization
/// alpha = nu/2 + rho/2 estimated by the variance fit.
GaussianityReport gaussianity_test(const CumulantTable& table, const VarianceFit& variance);

struct ScalingProbe {
  std::vector<double> radii;
  std::vector<double> t4, t4_error;
  std::string status;  ///< ok | below_noise_floor
  double slope = 0.0, slope_error = 0.0;
  double rho_prime = 0.0, rho_prime_error = 0.0;
  bool admissible = false;  ///< rho' > 0 at 2 sigma
};

/// T4(R) = sum W4 prod f_R equals the fourth cumulant of the unnormalized
/// block variable; fitted as T4 ~ R^(nu + 2 rho').
ScalingProbe scaling_assumption_probe(const JackknifeSet& t4, const std::vector<double>& radii, int dimension);
ScalingProbe scaling_assumption_probe(const CumulantTable& unnormalized, int dimension);

/// Windowed four-point sum of the synthetic star form
/// W4(x1..x4) = -sum_z prod_i k(x_i - z) on the torus.
double star_four_point_sum(const LatticeSpec& spec, double R, const std::function<double(const Coords&)>& k);

}  // namespace critlab
