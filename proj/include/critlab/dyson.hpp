#pragma once

#include <array>
#include <vector>

#include "critlab/lattice.hpp"
#include "critlab/stats.hpp"

namespace critlab {

/// Cl(t) = prod_{j>=1} cos(j^-alpha t), evaluated in log space.
struct CloitreEval {
  double alpha_range = 0.0;
  double t = 0.0;
  double value = 0.0;
  double log_abs = 0.0;     ///< log|Cl|, -inf on an exact zero
  int sign = 1;
  long j_max = 0;           ///< last explicitly multiplied factor
  double tail_bound = 0.0;  ///< bound on the relative error of `value`
  bool exact_zero = false;  ///< some factor had |cos| < 1e-300
};

/// Factors j <= j_max are multiplied explicitly (compensated log sum); the rest
/// enter through the power series of log cos with Hurwitz-zeta sums, whose
/// truncation is bounded by eps.
CloitreEval cloitre(double t, double alpha_range, double eps = 1e-14);

struct DecayConstants {
  double alpha_range = 0.0;
  double C = 0.0;          ///< -(1/alpha) int_0^inf log|cos x| x^{-1-1/alpha} dx
  double C_error = 0.0;
  int intervals = 0;       ///< singular intervals integrated explicitly
  double worst_interval_error = 0.0;
  bool converged = false;
};

DecayConstants decay_constant(double alpha_range, int intervals = 2000);

struct AsymptoticFit {
  double alpha_range = 0.0;
  double t_min = 100.0, t_max = 1e4;
  int points = 0;
  double slope = 0.0;       ///< regression of -log|Cl| against t^{1/alpha}
  double slope_error = 0.0;
  double intercept = 0.0;
  double C = 0.0;           ///< quadrature constant
  double relative_deviation = 0.0;
  double K = 0.0;           ///< max |log|Cl| + C t^{1/alpha}| / t^{1/(alpha+1)}
  double K_first_half = 0.0, K_second_half = 0.0;
};

/// Compare the decay of Cl with the quadrature constant on a log grid.
AsymptoticFit cloitre_asymptotics(double alpha_range, double t_min = 100.0, double t_max = 1e4, int points = 400);

struct DecaySeries {
  std::vector<double> t;
  std::vector<double> m1;
  double exponent = 0.0;  ///< slope of log(-log|m1/p|) vs log t on the fit window
  double exponent_error = 0.0;
  double intercept = 0.0;
  double fit_t_min = 100.0, fit_t_max = 1e4;
  int fit_points = 0;
};

/// m1(t) = p prod_{y != 0} cos^2(2 J |y|^-alpha t) = p Cl(2 J t)^4.
DecaySeries magnetization_decay(double p, double alpha_range, double J, const std::vector<double>& t_grid,
                                double fit_t_min = 100.0, double fit_t_max = 1e4);

/// Log-spaced grid with `points` values on [a, b].
std::vector<double> log_grid(double a, double b, int points);

struct MeanFieldState {
  double a = 0.0, b = 0.0, c = 0.0;
  std::array<double, 3> M{0.0, 0.0, 0.0};
  double t = 0.0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<std::array<double, 3>> M;
  std::vector<double> casimir_drift;  ///< |M(t)|^2 - |M(0)|^2
  double max_casimir_drift = 0.0;
  double max_deviation = 0.0;         ///< max_t |M(t) - M(0)|_inf
};

/// Fixed-step RK4 for M1' = 2(b-c) M2 M3 and cyclic. `record_every` thins the output.
Trajectory meanfield_integrate(const MeanFieldState& state0, double t_end, double dt = 1e-3, int record_every = 1000);
/// Integrate forward then with the vector field negated; returns |M_back - M(0)|_inf.
double meanfield_reversal_error(const MeanFieldState& state0, double t_end, double dt = 1e-3);

struct DropletFit {
  double alpha_range = 0.0;
  std::vector<int> sizes;
  std::vector<double> energy;  ///< E(block flipped) - E(all up)
  double slope = 0.0;           ///< from successive differences when sizes are geometric
  double slope_error = 0.0;
  double raw_slope = 0.0;       ///< plain log-log slope, biased by the constant surface term
  double raw_intercept = 0.0;
  bool differenced = false;
  double expected = 0.0;       ///< 2 - alpha
  double relative_deviation = 0.0;
};

/// Energy cost of flipping a block of N sites on a Dyson ring of 4N sites,
/// computed through the lattice Hamiltonian, fitted as a power of N. With
/// geometric sizes the fit uses E(rN) - E(N), which drops the N-independent
/// contribution of the shortest bonds.
DropletFit droplet_scaling(double alpha_range, const std::vector<int>& sizes, double J = 1.0);

}  // namespace critlab
