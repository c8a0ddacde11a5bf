#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "critlab/lattice.hpp"

namespace critlab {

using SiteTuple = std::vector<int>;
/// A set partition as a list of blocks of positions 0..r-1.
using Partition = std::vector<std::vector<int>>;

inline constexpr int kMaxUrsellOrder = 8;

/// All set partitions of {0..r-1}, generated from restricted growth strings
/// and cached. Bell(8) = 4140.
const std::vector<Partition>& set_partitions(int r);

class MissingMomentError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Memoized Ursell recursion
///   W(T) = m(T) - sum over partitions of T into k > 1 blocks of prod W(block).
/// Memo keys are sorted tuples, optionally reduced modulo lattice translations.
class UrsellCalculator {
 public:
  using MomentFn = std::function<std::optional<double>(const SiteTuple&)>;

  explicit UrsellCalculator(MomentFn moments, const LatticeSpec* translation_invariant = nullptr);

  double connected(const SiteTuple& sites);
  /// Inverse direction: sum over all partitions of products of connected parts.
  double moment_from_connected(const SiteTuple& sites);
  std::size_t memo_size() const { return memo_.size(); }

 private:
  SiteTuple key(SiteTuple sites) const;

  MomentFn moments_;
  const LatticeSpec* spec_;
  std::map<SiteTuple, double> memo_;
};

/// Lexicographically smallest sorted image of a tuple under the torus
/// translations that move one of its sites to the origin.
SiteTuple canonical_tuple(const LatticeSpec& spec, const SiteTuple& sites);

}  // namespace critlab
