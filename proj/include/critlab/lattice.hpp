#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace critlab {

/// Thrown for malformed lattice, coupling or configuration input.
class LatticeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Boundary { periodic, free, plus, minus };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& name);

using Coords = std::array<int, 3>;

/// Geometry of a finite box in Z^nu. Sites are stored with axis 0 fastest.
///
/// Plus/minus boundaries pin a frozen shell of +1/-1 ghost spins at
/// distance one outside the box; ghosts are not counted in volume().
struct LatticeSpec {
  int dimension = 2;
  Coords extents{1, 1, 1};
  Boundary boundary = Boundary::periodic;

  static LatticeSpec cubic(int dimension, int size, Boundary boundary);
  static LatticeSpec box(std::span<const int> extents, Boundary boundary);

  int volume() const;
  int extent(int axis) const { return extents[static_cast<std::size_t>(axis)]; }
  /// Linear size of a cubic box; throws for rectangular boxes.
  int size() const;
  bool periodic() const { return boundary == Boundary::periodic; }
  /// +1 for plus, -1 for minus, 0 otherwise.
  int ghost_spin() const;

  Coords coords(int site) const;
  int index(const Coords& c) const;
  /// Site reached from `site` by a displacement, wrapped on the torus.
  /// Returns -1 when the step leaves a non-periodic box.
  int shifted(int site, const Coords& displacement) const;
  /// Minimal-image displacement from a to b (plain difference off the torus).
  Coords displacement(int a, int b) const;
  double distance(int a, int b) const;

  void validate() const;
  bool operator==(const LatticeSpec&) const = default;
};

/// Pair coupling j(|x|). Nearest neighbour bonds follow the torus multigraph
/// convention: every site owns one bond in each positive axis direction, so a
/// periodic axis of extent 2 carries two bonds between the same pair.
struct Coupling {
  enum class Kind { nearest_neighbor, dyson };

  Kind kind = Kind::nearest_neighbor;
  double J = 1.0;
  double alpha_range = 0.0;
  int cutoff = 0;  ///< dyson only; 0 selects the default for the lattice

  static Coupling nearest_neighbor(double J);
  static Coupling dyson(double J, double alpha_range, int cutoff = 0);

  /// j(d) for a lattice distance d >= 1 (no cutoff applied).
  double strength(double distance) const;
  void validate() const;
};

std::string to_string(Coupling::Kind k);

/// Cutoff actually used on the given lattice: L/2 on a ring, L-1 on a segment.
int effective_cutoff(const Coupling& coupling, const LatticeSpec& spec);

/// Sum of j(d) over d > cutoff, the weight dropped by the truncation.
double dyson_truncation_error(const Coupling& coupling, int cutoff);

class SpinConfiguration {
 public:
  SpinConfiguration() = default;
  SpinConfiguration(LatticeSpec spec, int fill);
  SpinConfiguration(LatticeSpec spec, std::vector<std::int8_t> values);

  static SpinConfiguration all_up(const LatticeSpec& spec) { return {spec, +1}; }
  static SpinConfiguration checkerboard(const LatticeSpec& spec);

  const LatticeSpec& spec() const { return spec_; }
  int size() const { return static_cast<int>(values_.size()); }
  int operator[](int site) const { return values_[static_cast<std::size_t>(site)]; }
  void set(int site, int value);
  void flip(int site) { values_[static_cast<std::size_t>(site)] = static_cast<std::int8_t>(-values_[static_cast<std::size_t>(site)]); }
  std::span<const std::int8_t> values() const { return values_; }
  std::span<std::int8_t> mutable_values() { return values_; }

  SpinConfiguration flipped() const;
  long total() const;

 private:
  LatticeSpec spec_;
  std::vector<std::int8_t> values_;
};

/// Bond structure of (lattice, coupling) with the pinned boundary shell
/// folded into a per-site field. Build once and reuse for local updates.
class Hamiltonian {
 public:
  Hamiltonian(LatticeSpec spec, Coupling coupling);

  const LatticeSpec& spec() const { return spec_; }
  const Coupling& coupling() const { return coupling_; }
  bool nearest_neighbor() const { return coupling_.kind == Coupling::Kind::nearest_neighbor; }

  double energy(const SpinConfiguration& config) const;
  /// Sum_y j(x,y) sigma_y over lattice sites (multigraph multiplicity included).
  double pair_field(const SpinConfiguration& config, int site) const;
  /// Field exerted by the frozen ghost shell on `site`.
  double boundary_field(int site) const { return boundary_field_[static_cast<std::size_t>(site)]; }
  double flip_delta(const SpinConfiguration& config, int site) const;
  /// Lowest possible energy (every bond satisfied); attained by a ferromagnet.
  double energy_floor() const { return energy_floor_; }

  /// Nearest-neighbour stencil: 2*nu entries per site, -1 for a missing bond.
  std::span<const int> neighbors(int site) const;
  /// Number of ghost neighbours of `site` (nearest neighbour only).
  int ghost_count(int site) const { return ghost_count_[static_cast<std::size_t>(site)]; }
  int coordination() const { return 2 * spec_.dimension; }

 private:
  void check(const SpinConfiguration& config) const;

  LatticeSpec spec_;
  Coupling coupling_;
  int cutoff_ = 0;
  std::vector<int> neighbors_;
  std::vector<int> ghost_count_;
  std::vector<double> boundary_field_;
  std::vector<double> range_table_;  ///< j(d) for d = 0..cutoff (dyson)
  double energy_floor_ = 0.0;
};

double energy(const SpinConfiguration& config, const Coupling& coupling);
double flip_delta(const SpinConfiguration& config, int site, const Coupling& coupling);
double magnetization(const SpinConfiguration& config);

}  // namespace critlab
