#include "critlab/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "critlab/special.hpp"

namespace critlab {

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::periodic: return "periodic";
    case Boundary::free: return "free";
    case Boundary::plus: return "plus";
    case Boundary::minus: return "minus";
  }
  return "?";
}

Boundary boundary_from_string(const std::string& name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "free") return Boundary::free;
  if (name == "plus") return Boundary::plus;
  if (name == "minus") return Boundary::minus;
  throw LatticeError("unknown boundary '" + name + "'");
}

std::string to_string(Coupling::Kind k) {
  return k == Coupling::Kind::nearest_neighbor ? "nearest_neighbor" : "dyson";
}

LatticeSpec LatticeSpec::cubic(int dimension, int size, Boundary boundary) {
  LatticeSpec s;
  s.dimension = dimension;
  s.boundary = boundary;
  s.extents = {1, 1, 1};
  for (int a = 0; a < dimension && a < 3; ++a) s.extents[static_cast<std::size_t>(a)] = size;
  s.validate();
  return s;
}

LatticeSpec LatticeSpec::box(std::span<const int> extents, Boundary boundary) {
  LatticeSpec s;
  s.dimension = static_cast<int>(extents.size());
  s.boundary = boundary;
  s.extents = {1, 1, 1};
  for (std::size_t a = 0; a < extents.size() && a < 3; ++a) s.extents[a] = extents[a];
  s.validate();
  return s;
}

void LatticeSpec::validate() const {
  if (dimension < 1 || dimension > 3)
    throw LatticeError("dimension must be 1, 2 or 3, got " + std::to_string(dimension));
  for (int a = 0; a < 3; ++a) {
    int e = extents[static_cast<std::size_t>(a)];
    if (a < dimension && e < 1) throw LatticeError("extent must be positive");
    if (a >= dimension && e != 1) throw LatticeError("unused axes must have extent 1");
  }
  if (static_cast<long>(extents[0]) * extents[1] * extents[2] > (1L << 30))
    throw LatticeError("lattice too large");
}

int LatticeSpec::volume() const { return extents[0] * extents[1] * extents[2]; }

int LatticeSpec::size() const {
  for (int a = 1; a < dimension; ++a)
    if (extent(a) != extent(0)) throw LatticeError("size() requested on a rectangular box");
  return extent(0);
}

int LatticeSpec::ghost_spin() const {
  if (boundary == Boundary::plus) return 1;
  if (boundary == Boundary::minus) return -1;
  return 0;
}

Coords LatticeSpec::coords(int site) const {
  Coords c{0, 0, 0};
  c[0] = site % extents[0];
  site /= extents[0];
  c[1] = site % extents[1];
  c[2] = site / extents[1];
  return c;
}

int LatticeSpec::index(const Coords& c) const {
  return c[0] + extents[0] * (c[1] + extents[1] * c[2]);
}

int LatticeSpec::shifted(int site, const Coords& d) const {
  Coords c = coords(site);
  for (std::size_t a = 0; a < 3; ++a) {
    int e = extents[a];
    int v = c[a] + d[a];
    if (periodic()) {
      v %= e;
      if (v < 0) v += e;
    } else if (v < 0 || v >= e) {
      return -1;
    }
    c[a] = v;
  }
  return index(c);
}

Coords LatticeSpec::displacement(int a, int b) const {
  Coords ca = coords(a), cb = coords(b), d{0, 0, 0};
  for (std::size_t k = 0; k < 3; ++k) {
    int v = cb[k] - ca[k];
    if (periodic()) {
      int e = extents[k];
      v %= e;
      if (v < 0) v += e;
      if (v > e / 2) v -= e;
    }
    d[k] = v;
  }
  return d;
}

double LatticeSpec::distance(int a, int b) const {
  Coords d = displacement(a, b);
  return std::sqrt(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
}

Coupling Coupling::nearest_neighbor(double J) {
  Coupling c;
  c.kind = Kind::nearest_neighbor;
  c.J = J;
  c.validate();
  return c;
}

Coupling Coupling::dyson(double J, double alpha_range, int cutoff) {
  Coupling c;
  c.kind = Kind::dyson;
  c.J = J;
  c.alpha_range = alpha_range;
  c.cutoff = cutoff;
  c.validate();
  return c;
}

void Coupling::validate() const {
  if (!(J >= 0.0)) throw LatticeError("coupling must be ferromagnetic (J >= 0)");
  if (kind == Kind::dyson) {
    if (!(alpha_range > 1.0)) throw LatticeError("dyson coupling needs alpha_range > 1");
    if (cutoff < 0) throw LatticeError("dyson cutoff must be non-negative");
  }
}

double Coupling::strength(double d) const {
  if (kind == Kind::nearest_neighbor) return std::abs(d - 1.0) < 1e-12 ? J : 0.0;
  return J * std::pow(d, -alpha_range);
}

int effective_cutoff(const Coupling& coupling, const LatticeSpec& spec) {
  if (coupling.kind != Coupling::Kind::dyson) return 1;
  int L = spec.extent(0);
  int natural = spec.periodic() ? L / 2 : L - 1;
  if (coupling.cutoff == 0) return natural;
  return std::min(coupling.cutoff, natural);
}

double dyson_truncation_error(const Coupling& coupling, int cutoff) {
  if (coupling.kind != Coupling::Kind::dyson) return 0.0;
  return coupling.J * hurwitz_zeta(coupling.alpha_range, static_cast<double>(cutoff) + 1.0);
}

SpinConfiguration::SpinConfiguration(LatticeSpec spec, int fill) : spec_(spec) {
  spec_.validate();
  if (fill != 1 && fill != -1) throw LatticeError("spins must be +1 or -1");
  values_.assign(static_cast<std::size_t>(spec_.volume()), static_cast<std::int8_t>(fill));
}

SpinConfiguration::SpinConfiguration(LatticeSpec spec, std::vector<std::int8_t> values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (static_cast<int>(values_.size()) != spec_.volume())
    throw LatticeError("configuration has " + std::to_string(values_.size()) +
                       " entries, lattice has " + std::to_string(spec_.volume()) + " sites");
  for (auto v : values_)
    if (v != 1 && v != -1) throw LatticeError("spins must be +1 or -1");
}

SpinConfiguration SpinConfiguration::checkerboard(const LatticeSpec& spec) {
  SpinConfiguration c(spec, 1);
  for (int s = 0; s < c.size(); ++s) {
    Coords x = spec.coords(s);
    if ((x[0] + x[1] + x[2]) % 2) c.flip(s);
  }
  return c;
}

void SpinConfiguration::set(int site, int value) {
  if (value != 1 && value != -1) throw LatticeError("spins must be +1 or -1");
  values_.at(static_cast<std::size_t>(site)) = static_cast<std::int8_t>(value);
}

SpinConfiguration SpinConfiguration::flipped() const {
  SpinConfiguration c = *this;
  for (auto& v : c.values_) v = static_cast<std::int8_t>(-v);
  return c;
}

long SpinConfiguration::total() const {
  long s = 0;
  for (auto v : values_) s += v;
  return s;
}

Hamiltonian::Hamiltonian(LatticeSpec spec, Coupling coupling)
    : spec_(spec), coupling_(coupling) {
  spec_.validate();
  coupling_.validate();
  const int n = spec_.volume();
  const int ghost = spec_.ghost_spin();
  boundary_field_.assign(static_cast<std::size_t>(n), 0.0);
  ghost_count_.assign(static_cast<std::size_t>(n), 0);

  if (nearest_neighbor()) {
    const int z = coordination();
    neighbors_.assign(static_cast<std::size_t>(n * z), -1);
    double bonds = 0.0;
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < spec_.dimension; ++a) {
        for (int dir = 0; dir < 2; ++dir) {
          Coords d{0, 0, 0};
          d[static_cast<std::size_t>(a)] = dir == 0 ? 1 : -1;
          int t = spec_.shifted(s, d);
          std::size_t slot = static_cast<std::size_t>(s * z + 2 * a + dir);
          if (t == s) continue;  // periodic axis of extent one: no self bond
          if (t >= 0) {
            neighbors_[slot] = t;
            if (dir == 0) bonds += 1.0;
          } else if (ghost != 0) {
            ghost_count_[static_cast<std::size_t>(s)] += 1;
            boundary_field_[static_cast<std::size_t>(s)] += coupling_.J * ghost;
            bonds += 1.0;
          }
        }
      }
    }
    energy_floor_ = -coupling_.J * bonds;
    return;
  }

  if (spec_.dimension != 1) throw LatticeError("dyson coupling is defined for dimension 1 only");
  cutoff_ = effective_cutoff(coupling_, spec_);
  range_table_.assign(static_cast<std::size_t>(cutoff_) + 1, 0.0);
  for (int d = 1; d <= cutoff_; ++d) range_table_[static_cast<std::size_t>(d)] = coupling_.strength(d);

  const int L = spec_.extent(0);
  double floor = 0.0;
  for (int x = 0; x < L; ++x) {
    for (int d = 1; d <= cutoff_; ++d) {
      int y = x + d;
      if (spec_.periodic()) {
        // each unordered pair once: at d == L/2 the forward and backward images coincide
        if (2 * d == L && x >= L / 2) continue;
      } else if (y >= L) {
        break;
      }
      floor -= range_table_[static_cast<std::size_t>(d)];
    }
    if (ghost != 0) {
      double h = 0.0;
      if (x + 1 <= cutoff_) h += range_table_[static_cast<std::size_t>(x + 1)];
      if (L - x <= cutoff_) h += range_table_[static_cast<std::size_t>(L - x)];
      boundary_field_[static_cast<std::size_t>(x)] = ghost * h;
      floor -= h;
    }
  }
  energy_floor_ = floor;
}

void Hamiltonian::check(const SpinConfiguration& config) const {
  if (!(config.spec() == spec_)) throw LatticeError("configuration does not match the lattice");
}

std::span<const int> Hamiltonian::neighbors(int site) const {
  const int z = coordination();
  return {neighbors_.data() + static_cast<std::size_t>(site * z), static_cast<std::size_t>(z)};
}

double Hamiltonian::pair_field(const SpinConfiguration& config, int site) const {
  if (nearest_neighbor()) {
    int sum = 0;
    for (int t : neighbors(site))
      if (t >= 0) sum += config[t];
    return coupling_.J * sum;
  }
  const int L = spec_.extent(0);
  double h = 0.0;
  for (int d = 1; d <= cutoff_; ++d) {
    const double j = range_table_[static_cast<std::size_t>(d)];
    int fwd = site + d, bwd = site - d;
    if (spec_.periodic()) {
      fwd %= L;
      bwd = ((bwd % L) + L) % L;
      h += j * config[fwd];
      if (2 * d != L) h += j * config[bwd];
    } else {
      if (fwd < L) h += j * config[fwd];
      if (bwd >= 0) h += j * config[bwd];
    }
  }
  return h;
}

double Hamiltonian::energy(const SpinConfiguration& config) const {
  check(config);
  const int n = spec_.volume();
  double pairs = 0.0, field = 0.0;
  if (nearest_neighbor()) {
    const int z = coordination();
    long sum = 0;
    for (int s = 0; s < n; ++s)
      for (int a = 0; a < spec_.dimension; ++a) {
        int t = neighbors_[static_cast<std::size_t>(s * z + 2 * a)];
        if (t >= 0) sum += config[s] * config[t];
      }
    pairs = coupling_.J * static_cast<double>(sum);
  } else {
    for (int s = 0; s < n; ++s) pairs += 0.5 * config[s] * pair_field(config, s);
  }
  for (int s = 0; s < n; ++s) field += boundary_field_[static_cast<std::size_t>(s)] * config[s];
  return -pairs - field;
}

double Hamiltonian::flip_delta(const SpinConfiguration& config, int site) const {
  if (site < 0 || site >= spec_.volume())
    throw LatticeError("site " + std::to_string(site) + " out of range");
  return 2.0 * config[site] * (pair_field(config, site) + boundary_field(site));
}

double energy(const SpinConfiguration& config, const Coupling& coupling) {
  return Hamiltonian(config.spec(), coupling).energy(config);
}

double flip_delta(const SpinConfiguration& config, int site, const Coupling& coupling) {
  return Hamiltonian(config.spec(), coupling).flip_delta(config, site);
}

double magnetization(const SpinConfiguration& config) {
  return static_cast<double>(config.total()) / config.size();
}

}  // namespace critlab
