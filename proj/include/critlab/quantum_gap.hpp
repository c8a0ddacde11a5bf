#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace critlab {

/// Spin-S matrices in the |S, m) basis, m = S, S-1, ..., -S.
struct SpinOperators {
  int two_s = 1;  ///< 2S
  Eigen::MatrixXcd S1, S2, S3;

  static SpinOperators make(int two_s);
  double spin() const { return 0.5 * two_s; }
  int dim() const { return two_s + 1; }
  /// max norm of [S1,S2] - i S3 and its cyclic versions
  double commutation_error() const;
  /// max norm of S.S - S(S+1)
  double casimir_error() const;
};

struct DominationResult {
  int two_s = 1;
  int sign = 1;
  double min_eigenvalue = 0.0;
  bool pass = false;
};

/// Minimum eigenvalue of S^2 - S3 x S3 -/+ (S1 x S1 + S2 x S2) for sign = +-1.
DominationResult domination_check(int two_s, int sign);

enum class GapBoundary { none, plus, minus };
std::string to_string(GapBoundary b);

struct QuantumBond {
  int x = 0, y = 0;
  double J3 = -1.0;  ///< non-positive
  double J = 0.0;
};

/// Spin chain with |J3| >= |J| on every bond. The Hamiltonian is
/// H = sum_bonds (|J3| (S^2 - s3_x s3_y) - J (s1_x s1_y + s2_x s2_y)),
/// i.e. one half of the sum over ordered pairs.
struct QuantumChainSpec {
  int sites = 2;
  int two_s = 1;
  std::vector<QuantumBond> bonds;

  static QuantumChainSpec nearest_neighbor(int sites, int two_s, double J3_abs, double J);
  long dimension() const;
  /// min over bonds of |J3| - |J|
  double delta() const;
  bool bipartite() const;
  void validate() const;
};

inline constexpr long kMaxQuantumDimension = 20000;

/// Dense Hamiltonian. Plus/minus boundaries add a frozen |+-S) neighbour at both
/// chain ends through |J3| (S^2 -+ S s3) with the adjacent bond's |J3|.
Eigen::MatrixXd chain_hamiltonian(const QuantumChainSpec& chain, GapBoundary boundary);

struct GapResult {
  GapBoundary boundary = GapBoundary::plus;
  double ground_energy = 0.0;
  int ground_degeneracy = 0;
  double polarized_overlap = 0.0;  ///< |(psi_0 | +-S ... +-S)|^2
  double gap = 0.0;
  double bound = 0.0;              ///< delta S
  double margin = 0.0;             ///< gap - bound
  double hermiticity_error = 0.0;
  std::vector<double> spectrum_head;  ///< lowest levels (up to 10)
  bool pass = false;
};

GapResult gap_check(const QuantumChainSpec& chain, GapBoundary boundary);

/// Gap read off the diagonal when every J vanishes.
double combinatorial_gap(const QuantumChainSpec& chain, GapBoundary boundary);

/// Max level difference between the chain and its copy with J -> -J.
double sublattice_equivalence(const QuantumChainSpec& chain);

/// Lowest eigenvalue of the chain Hamiltonian without boundary terms.
double min_chain_eigenvalue(const QuantumChainSpec& chain);

}  // namespace critlab
