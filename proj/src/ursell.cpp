#include "critlab/ursell.hpp"

#include <algorithm>
#include <mutex>
#include <string>

namespace critlab {

const std::vector<Partition>& set_partitions(int r) {
  if (r < 1 || r > kMaxUrsellOrder)
    throw std::invalid_argument("partition order must be in [1, " + std::to_string(kMaxUrsellOrder) + "]");
  static std::vector<std::vector<Partition>> cache(kMaxUrsellOrder + 1);
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto& out = cache[static_cast<std::size_t>(r)];
  if (!out.empty()) return out;
  // restricted growth strings a_0 = 0, a_i <= 1 + max(a_0..a_{i-1})
  std::vector<int> a(static_cast<std::size_t>(r), 0);
  while (true) {
    int blocks = *std::max_element(a.begin(), a.end()) + 1;
    Partition p(static_cast<std::size_t>(blocks));
    for (int i = 0; i < r; ++i) p[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])].push_back(i);
    out.push_back(std::move(p));
    int i = r - 1;
    for (; i > 0; --i) {
      int prefix_max = *std::max_element(a.begin(), a.begin() + i);
      if (a[static_cast<std::size_t>(i)] <= prefix_max) break;
    }
    if (i == 0) break;
    ++a[static_cast<std::size_t>(i)];
    std::fill(a.begin() + i + 1, a.end(), 0);
  }
  return out;
}

SiteTuple canonical_tuple(const LatticeSpec& spec, const SiteTuple& sites) {
  SiteTuple best;
  for (int anchor : sites) {
    const Coords a = spec.coords(anchor);
    SiteTuple t;
    t.reserve(sites.size());
    for (int s : sites) {
      Coords c = spec.coords(s);
      for (int k = 0; k < spec.dimension; ++k) {
        const int L = spec.extent(k);
        c[static_cast<std::size_t>(k)] = ((c[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)]) % L + L) % L;
      }
      t.push_back(spec.index(c));
    }
    std::sort(t.begin(), t.end());
    if (best.empty() || t < best) best = std::move(t);
  }
  return best;
}

UrsellCalculator::UrsellCalculator(MomentFn moments, const LatticeSpec* translation_invariant)
    : moments_(std::move(moments)), spec_(translation_invariant) {
  if (spec_ && !spec_->periodic()) spec_ = nullptr;
}

SiteTuple UrsellCalculator::key(SiteTuple sites) const {
  if (spec_) return canonical_tuple(*spec_, sites);
  std::sort(sites.begin(), sites.end());
  return sites;
}

double UrsellCalculator::connected(const SiteTuple& sites) {
  if (sites.empty()) throw std::invalid_argument("connected function of an empty tuple");
  const SiteTuple k = key(sites);
  if (auto it = memo_.find(k); it != memo_.end()) return it->second;
  const auto m = moments_(k);
  if (!m) {
    std::string s;
    for (int x : k) s += (s.empty() ? "" : ",") + std::to_string(x);
    throw MissingMomentError("missing moment for tuple (" + s + ")");
  }
  double w = *m;
  const int r = static_cast<int>(k.size());
  if (r > 1) {
    for (const auto& p : set_partitions(r)) {
      if (p.size() < 2) continue;
      double prod = 1.0;
      for (const auto& block : p) {
        SiteTuple sub;
        for (int i : block) sub.push_back(k[static_cast<std::size_t>(i)]);
        prod *= connected(sub);
        if (prod == 0.0) break;
      }
      w -= prod;
    }
  }
  memo_.emplace(k, w);
  return w;
}

double UrsellCalculator::moment_from_connected(const SiteTuple& sites) {
  const int r = static_cast<int>(sites.size());
  double m = 0.0;
  for (const auto& p : set_partitions(r)) {
    double prod = 1.0;
    for (const auto& block : p) {
      SiteTuple sub;
      for (int i : block) sub.push_back(sites[static_cast<std::size_t>(i)]);
      prod *= connected(sub);
    }
    m += prod;
  }
  return m;
}

}  // namespace critlab
