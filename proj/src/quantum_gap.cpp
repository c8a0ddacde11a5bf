#include "critlab/quantum_gap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace critlab {

SpinOperators SpinOperators::make(int two_s) {
  if (two_s < 1) throw std::invalid_argument("spin must be at least 1/2");
  SpinOperators op;
  op.two_s = two_s;
  const int d = two_s + 1;
  const double s = 0.5 * two_s;
  Eigen::MatrixXcd plus = Eigen::MatrixXcd::Zero(d, d);
  op.S3 = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = s - i;
    op.S3(i, i) = m;
    // S+ |m) = sqrt(s(s+1) - m(m+1)) |m+1), and |m+1) is index i-1
    if (i > 0) plus(i - 1, i) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  const Eigen::MatrixXcd minus = plus.adjoint();
  op.S1 = 0.5 * (plus + minus);
  op.S2 = std::complex<double>(0.0, -0.5) * (plus - minus);
  return op;
}

double SpinOperators::commutation_error() const {
  const std::complex<double> I(0.0, 1.0);
  const double e1 = (S1 * S2 - S2 * S1 - I * S3).cwiseAbs().maxCoeff();
  const double e2 = (S2 * S3 - S3 * S2 - I * S1).cwiseAbs().maxCoeff();
  const double e3 = (S3 * S1 - S1 * S3 - I * S2).cwiseAbs().maxCoeff();
  return std::max({e1, e2, e3});
}

double SpinOperators::casimir_error() const {
  const double s = spin();
  const Eigen::MatrixXcd c = S1 * S1 + S2 * S2 + S3 * S3 - s * (s + 1) * Eigen::MatrixXcd::Identity(dim(), dim());
  return c.cwiseAbs().maxCoeff();
}

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// S1 x S1 + S2 x S2 = (S+ x S- + S- x S+)/2 is real
Eigen::MatrixXd xy_coupling(const SpinOperators& op) {
  const Eigen::MatrixXd plus = (op.S1 + std::complex<double>(0.0, 1.0) * op.S2).real();
  const Eigen::MatrixXd minus = plus.transpose();
  return 0.5 * (kron(plus, minus) + kron(minus, plus));
}

}  // namespace

DominationResult domination_check(int two_s, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const SpinOperators op = SpinOperators::make(two_s);
  const double s = op.spin();
  const Eigen::MatrixXd s3 = op.S3.real();
  const int d2 = op.dim() * op.dim();
  const Eigen::MatrixXd m =
      s * s * Eigen::MatrixXd::Identity(d2, d2) - kron(s3, s3) - static_cast<double>(sign) * xy_coupling(op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  DominationResult r;
  r.two_s = two_s;
  r.sign = sign;
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.pass = r.min_eigenvalue >= -1e-10;
  return r;
}

std::string to_string(GapBoundary b) {
  switch (b) {
    case GapBoundary::none: return "none";
    case GapBoundary::plus: return "plus";
    case GapBoundary::minus: return "minus";
  }
  return "?";
}

QuantumChainSpec QuantumChainSpec::nearest_neighbor(int sites, int two_s, double J3_abs, double J) {
  QuantumChainSpec c;
  c.sites = sites;
  c.two_s = two_s;
  for (int x = 0; x + 1 < sites; ++x) c.bonds.push_back({x, x + 1, -std::abs(J3_abs), J});
  c.validate();
  return c;
}

long QuantumChainSpec::dimension() const {
  long d = 1;
  for (int i = 0; i < sites; ++i) {
    d *= two_s + 1;
    if (d > kMaxQuantumDimension) return d;
  }
  return d;
}

double QuantumChainSpec::delta() const {
  double d = bonds.empty() ? 0.0 : 1e300;
  for (const auto& b : bonds) d = std::min(d, std::abs(b.J3) - std::abs(b.J));
  return d;
}

bool QuantumChainSpec::bipartite() const {
  std::vector<int> colour(static_cast<std::size_t>(sites), -1);
  for (int start = 0; start < sites; ++start) {
    if (colour[static_cast<std::size_t>(start)] >= 0) continue;
    colour[static_cast<std::size_t>(start)] = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& b : bonds) {
        const int cx = colour[static_cast<std::size_t>(b.x)], cy = colour[static_cast<std::size_t>(b.y)];
        if (cx >= 0 && cy >= 0 && cx == cy) return false;
        if (cx >= 0 && cy < 0) colour[static_cast<std::size_t>(b.y)] = 1 - cx, changed = true;
        if (cy >= 0 && cx < 0) colour[static_cast<std::size_t>(b.x)] = 1 - cy, changed = true;
      }
    }
  }
  return true;
}

void QuantumChainSpec::validate() const {
  if (sites < 1) throw std::invalid_argument("chain needs at least one site");
  if (two_s < 1) throw std::invalid_argument("spin must be at least 1/2");
  if (dimension() > kMaxQuantumDimension)
    throw std::invalid_argument("Hilbert space dimension exceeds " + std::to_string(kMaxQuantumDimension));
  for (const auto& b : bonds) {
    if (b.x < 0 || b.y < 0 || b.x >= sites || b.y >= sites || b.x == b.y)
      throw std::invalid_argument("bond endpoints out of range");
    if (b.J3 > 0.0) throw std::invalid_argument("J3 must be non-positive");
    if (std::abs(b.J3) < std::abs(b.J))
      throw std::invalid_argument("|J3| >= |J| violated on bond (" + std::to_string(b.x) + "," + std::to_string(b.y) + ")");
  }
}

namespace {

// basis index <-> local level (0 = m = S) with site 0 most significant
std::vector<int> decode(long index, int sites, int d) {
  std::vector<int> lv(static_cast<std::size_t>(sites));
  for (int i = sites - 1; i >= 0; --i) {
    lv[static_cast<std::size_t>(i)] = static_cast<int>(index % d);
    index /= d;
  }
  return lv;
}

long encode(const std::vector<int>& lv, int d) {
  long idx = 0;
  for (int v : lv) idx = idx * d + v;
  return idx;
}

double diagonal_energy(const QuantumChainSpec& chain, GapBoundary boundary, const std::vector<int>& lv) {
  const double s = 0.5 * chain.two_s;
  auto m = [&](int site) { return s - lv[static_cast<std::size_t>(site)]; };
  double e = 0.0;
  for (const auto& b : chain.bonds) e += std::abs(b.J3) * (s * s - m(b.x) * m(b.y));
  if (boundary != GapBoundary::none && !chain.bonds.empty()) {
    const double ghost = boundary == GapBoundary::plus ? s : -s;
    const double jl = std::abs(chain.bonds.front().J3), jr = std::abs(chain.bonds.back().J3);
    e += jl * (s * s - ghost * m(0));
    e += jr * (s * s - ghost * m(chain.sites - 1));
  }
  return e;
}

}  // namespace

Eigen::MatrixXd chain_hamiltonian(const QuantumChainSpec& chain, GapBoundary boundary) {
  chain.validate();
  const int d = chain.two_s + 1;
  const long n = chain.dimension();
  const double s = 0.5 * chain.two_s;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    auto lv = decode(i, chain.sites, d);
    h(i, i) = diagonal_energy(chain, boundary, lv);
    // -J (S+ S- + S- S+)/2 on each bond
    for (const auto& b : chain.bonds) {
      if (b.J == 0.0) continue;
      for (int dir = 0; dir < 2; ++dir) {
        const int up = dir == 0 ? b.x : b.y, down = dir == 0 ? b.y : b.x;
        const int lu = lv[static_cast<std::size_t>(up)], ld = lv[static_cast<std::size_t>(down)];
        if (lu == 0 || ld == d - 1) continue;
        const double mu = s - lu, md = s - ld;
        const double amp = std::sqrt(s * (s + 1) - mu * (mu + 1)) * std::sqrt(s * (s + 1) - md * (md - 1));
        auto next = lv;
        next[static_cast<std::size_t>(up)] -= 1;
        next[static_cast<std::size_t>(down)] += 1;
        h(encode(next, d), i) += -b.J * 0.5 * amp;
      }
    }
  }
  return h;
}

GapResult gap_check(const QuantumChainSpec& chain, GapBoundary boundary) {
  if (boundary == GapBoundary::none) throw std::invalid_argument("gap check needs a plus or minus boundary");
  const Eigen::MatrixXd h = chain_hamiltonian(chain, boundary);
  GapResult r;
  r.boundary = boundary;
  r.hermiticity_error = (h - h.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  r.ground_energy = ev(0);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) - ev(0) <= 1e-10) ++r.ground_degeneracy;
  r.gap = r.ground_degeneracy < ev.size() ? ev(r.ground_degeneracy) - ev(0) : 0.0;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(10, ev.size()); ++i) r.spectrum_head.push_back(ev(i));
  const long polarized = boundary == GapBoundary::plus ? 0 : chain.dimension() - 1;
  for (int k = 0; k < r.ground_degeneracy; ++k) r.polarized_overlap += std::pow(es.eigenvectors()(polarized, k), 2);
  r.bound = chain.delta() * 0.5 * chain.two_s;
  r.margin = r.gap - r.bound;
  r.pass = std::abs(r.ground_energy) <= 1e-10 && r.ground_degeneracy == 1 && r.polarized_overlap >= 1.0 - 1e-10 &&
           r.gap >= r.bound - 1e-9 && r.hermiticity_error <= 1e-12;
  return r;
}

double combinatorial_gap(const QuantumChainSpec& chain, GapBoundary boundary) {
  chain.validate();
  for (const auto& b : chain.bonds)
    if (b.J != 0.0) throw std::invalid_argument("combinatorial gap needs J = 0 on every bond");
  const int d = chain.two_s + 1;
  std::vector<double> e;
  for (long i = 0; i < chain.dimension(); ++i) e.push_back(diagonal_energy(chain, boundary, decode(i, chain.sites, d)));
  std::sort(e.begin(), e.end());
  for (double v : e)
    if (v - e.front() > 1e-10) return v - e.front();
  return 0.0;
}

double sublattice_equivalence(const QuantumChainSpec& chain) {
  if (!chain.bipartite()) throw std::invalid_argument("sublattice rotation needs a bipartite chain");
  QuantumChainSpec flipped = chain;
  for (auto& b : flipped.bonds) b.J = -b.J;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(chain_hamiltonian(chain, GapBoundary::none), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(chain_hamiltonian(flipped, GapBoundary::none), Eigen::EigenvaluesOnly);
  return (a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff();
}

double min_chain_eigenvalue(const QuantumChainSpec& chain) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain_hamiltonian(chain, GapBoundary::none), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace critlab
