#include "critlab/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <mutex>
#include <numeric>

#include <json.hpp>

namespace critlab {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::metropolis: return "metropolis";
    case Algorithm::wolff: return "wolff";
    case Algorithm::mixed: return "mixed";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "metropolis") return Algorithm::metropolis;
  if (name == "wolff") return Algorithm::wolff;
  if (name == "mixed") return Algorithm::mixed;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

void SamplerConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and non-negative");
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  if (stride_sweeps < 1) throw std::invalid_argument("stride_sweeps must be at least 1");
  if (thermalization_sweeps < 0) throw std::invalid_argument("thermalization_sweeps must be non-negative");
  if (chains < 1) throw std::invalid_argument("chains must be at least 1");
  if (blocks < 1) throw std::invalid_argument("blocks must be at least 1");
}

long metropolis_sweep(SpinConfiguration& config, double beta, const Hamiltonian& h, Rng& rng) {
  // A fixed visiting order makes zero-cost flips deterministic, and the
  // composed pass is then not irreducible on small lattices (a 2x2 box
  // settles on the wrong stationary measure). A fresh random order per pass
  // restores ergodicity while still visiting every site once.
  std::vector<int> order(static_cast<std::size_t>(config.size()));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  long accepted = 0;
  if (h.nearest_neighbor()) {
    // delta E = 2 J s (sum of neighbours + ghosts), an integer multiple of 2J
    const int z = h.coordination();
    const double J = h.coupling().J;
    std::vector<double> accept(static_cast<std::size_t>(z + 1));
    for (int k = 0; k <= z; ++k) accept[static_cast<std::size_t>(k)] = std::exp(-2.0 * beta * J * k);
    const int ghost = h.spec().ghost_spin();
    auto spins = config.mutable_values();
    for (int s : order) {
      int local = ghost * h.ghost_count(s);
      for (int t : h.neighbors(s))
        if (t >= 0) local += spins[static_cast<std::size_t>(t)];
      const int k = spins[static_cast<std::size_t>(s)] * local;
      if (k <= 0 || rng.uniform() < accept[static_cast<std::size_t>(k)]) {
        spins[static_cast<std::size_t>(s)] = static_cast<std::int8_t>(-spins[static_cast<std::size_t>(s)]);
        ++accepted;
      }
    }
    return accepted;
  }
  for (int s : order) {
    const double delta = h.flip_delta(config, s);
    if (delta <= 0.0 || rng.uniform() < std::exp(-beta * delta)) {
      config.flip(s);
      ++accepted;
    }
  }
  return accepted;
}

long wolff_update(SpinConfiguration& config, double beta, const Hamiltonian& h, Rng& rng) {
  if (!h.nearest_neighbor()) throw std::invalid_argument("wolff updates need a nearest-neighbour coupling");
  const int n = config.size();
  const double p_add = -std::expm1(-2.0 * beta * h.coupling().J);
  const int ghost = h.spec().ghost_spin();
  thread_local std::vector<std::uint32_t> mark;
  thread_local std::uint32_t generation = 0;
  thread_local std::vector<int> stack;
  if (static_cast<int>(mark.size()) != n) {
    mark.assign(static_cast<std::size_t>(n), 0);
    generation = 0;
  }
  if (++generation == 0) {
    std::fill(mark.begin(), mark.end(), 0);
    generation = 1;
  }
  auto spins = config.mutable_values();
  const int seed = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  const std::int8_t s0 = spins[static_cast<std::size_t>(seed)];
  stack.clear();
  stack.push_back(seed);
  mark[static_cast<std::size_t>(seed)] = generation;
  std::vector<int> cluster;
  cluster.reserve(64);
  bool pinned = false;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    cluster.push_back(s);
    if (ghost == s0 && h.ghost_count(s) > 0) {
      for (int g = 0; g < h.ghost_count(s); ++g)
        if (rng.uniform() < p_add) pinned = true;
    }
    for (int t : h.neighbors(s)) {
      if (t < 0 || mark[static_cast<std::size_t>(t)] == generation) continue;
      if (spins[static_cast<std::size_t>(t)] != s0) continue;
      if (rng.uniform() < p_add) {
        mark[static_cast<std::size_t>(t)] = generation;
        stack.push_back(t);
      }
    }
  }
  const long size = static_cast<long>(cluster.size());
  if (pinned) return -size;
  for (int s : cluster) spins[static_cast<std::size_t>(s)] = static_cast<std::int8_t>(-s0);
  return size;
}

void BulkObservable::measure(const SpinConfiguration& config, std::span<double> out) {
  const double m = magnetization(config);
  out[0] = m;
  out[1] = std::abs(m);
  out[2] = m * m;
  out[3] = m * m * m * m;
  out[4] = h_->energy(config) / config.size();
}

std::vector<std::string> TupleObservable::columns() const {
  std::vector<std::string> c;
  for (const auto& t : tuples_) {
    std::string s = "s";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "_" : "") + std::to_string(t[i]);
    c.push_back(s);
  }
  return c;
}

void TupleObservable::measure(const SpinConfiguration& config, std::span<double> out) {
  for (std::size_t i = 0; i < tuples_.size(); ++i) {
    int p = 1;
    for (int s : tuples_[i]) p *= config[s];
    out[i] = p;
  }
}

int ObservableData::column(const std::string& c) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == c) return static_cast<int>(i);
  throw std::out_of_range("observable '" + name + "' has no column '" + c + "'");
}

const ObservableData& SampleSet::get(const std::string& name) const {
  for (const auto& o : observables)
    if (o.name == name) return o;
  throw std::out_of_range("sample set has no observable '" + name + "'");
}

Estimate SampleSet::estimate(const std::string& observable, const std::string& column) const {
  const auto& o = get(observable);
  return o.jackknife().at(o.column(column));
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ChainResult {
  std::vector<Eigen::MatrixXd> sums;
  std::vector<Eigen::VectorXd> counts;
  std::vector<Eigen::MatrixXd> series;
  long accepted = 0;
  long proposals = 0;
  long clusters = 0;
  long cluster_sites = 0;
};

// A Wolff sweep is a fixed number of clusters once thermalized; before that
// (clusters_per_sweep == 0) it grows clusters until |Lambda| sites are covered.
// A size-based stopping rule would lock the parity of giant-cluster flips in
// the ordered phase and freeze the sign of the magnetization.
void sweep(SpinConfiguration& c, const SamplerConfig& cfg, const Hamiltonian& h, Rng& rng, ChainResult& r,
           long clusters_per_sweep = 0) {
  auto wolff_sweep = [&] {
    long flipped = 0, grown = 0;
    while (clusters_per_sweep > 0 ? grown++ < clusters_per_sweep : flipped < c.size()) {
      long s = std::labs(wolff_update(c, cfg.beta, h, rng));
      flipped += s;
      r.clusters += 1;
      r.cluster_sites += s;
    }
  };
  switch (cfg.algorithm) {
    case Algorithm::metropolis:
      r.accepted += metropolis_sweep(c, cfg.beta, h, rng);
      r.proposals += c.size();
      break;
    case Algorithm::wolff:
      wolff_sweep();
      break;
    case Algorithm::mixed:
      r.accepted += metropolis_sweep(c, cfg.beta, h, rng);
      r.proposals += c.size();
      wolff_sweep();
      break;
  }
}

ChainResult run_one(const Hamiltonian& h, const SamplerConfig& cfg, int chain, int samples, int blocks,
                    const std::vector<std::unique_ptr<Observable>>& obs) {
  Rng rng = Rng::stream(cfg.seed, static_cast<unsigned>(chain));
  const LatticeSpec& spec = h.spec();
  SpinConfiguration c(spec, spec.ghost_spin() == 0 ? 1 : spec.ghost_spin());
  if (spec.ghost_spin() == 0)
    for (int s = 0; s < c.size(); ++s)
      if (rng() & 1u) c.flip(s);
  ChainResult r;
  for (int t = 0; t < cfg.thermalization_sweeps; ++t) sweep(c, cfg, h, rng, r);
  const long per_sweep =
      r.cluster_sites > 0 ? std::max(1L, std::lround(static_cast<double>(c.size()) * r.clusters / r.cluster_sites)) : 0;
  r.accepted = r.proposals = r.clusters = r.cluster_sites = 0;
  std::vector<std::vector<double>> row(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const auto cols = static_cast<Eigen::Index>(obs[k]->columns().size());
    row[k].resize(static_cast<std::size_t>(cols));
    r.sums.emplace_back(Eigen::MatrixXd::Zero(blocks, cols));
    r.counts.emplace_back(Eigen::VectorXd::Zero(blocks));
    r.series.emplace_back(obs[k]->keep_series() ? Eigen::MatrixXd(samples, cols) : Eigen::MatrixXd());
  }
  for (int i = 0; i < samples; ++i) {
    for (int t = 0; t < cfg.stride_sweeps; ++t) sweep(c, cfg, h, rng, r, per_sweep);
    const auto b = static_cast<Eigen::Index>((static_cast<long>(i) * blocks) / samples);
    for (std::size_t k = 0; k < obs.size(); ++k) {
      obs[k]->measure(c, row[k]);
      Eigen::Map<const Eigen::RowVectorXd> v(row[k].data(), static_cast<Eigen::Index>(row[k].size()));
      r.sums[k].row(b) += v;
      r.counts[k](b) += 1.0;
      if (r.series[k].size() > 0) r.series[k].row(i) = v;
    }
  }
  return r;
}

}  // namespace

SampleSet run_chain(const LatticeSpec& spec, const Coupling& coupling, const SamplerConfig& config,
                    const std::vector<const Observable*>& observables, int threads) {
  config.validate();
  Hamiltonian h(spec, coupling);
  if (config.algorithm != Algorithm::metropolis && !h.nearest_neighbor())
    throw std::invalid_argument("cluster updates are only available for nearest-neighbour couplings");
  if (config.samples < config.chains) throw std::invalid_argument("fewer samples than chains");

  const int chains = config.chains;
  const int blocks_per_chain = std::max(1, config.blocks / chains);
  std::vector<ChainResult> results(static_cast<std::size_t>(chains));
  std::vector<int> samples(static_cast<std::size_t>(chains), config.samples / chains);
  for (int c = 0; c < config.samples % chains; ++c) samples[static_cast<std::size_t>(c)] += 1;

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int c = next++; c < chains; c = next++) {
      try {
        std::vector<std::unique_ptr<Observable>> obs;
        for (const auto* o : observables) obs.push_back(o->clone());
        const int ns = samples[static_cast<std::size_t>(c)];
        results[static_cast<std::size_t>(c)] = run_one(h, config, c, ns, std::min(blocks_per_chain, ns), obs);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, chains);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  SampleSet out;
  out.spec = spec;
  out.coupling = coupling;
  out.sampler = config;
  long accepted = 0, proposals = 0, clusters = 0, cluster_sites = 0;
  for (const auto& r : results) {
    accepted += r.accepted;
    proposals += r.proposals;
    clusters += r.clusters;
    cluster_sites += r.cluster_sites;
  }
  for (std::size_t k = 0; k < observables.size(); ++k) {
    ObservableData d;
    d.name = observables[k]->name();
    d.columns = observables[k]->columns();
    const auto cols = static_cast<Eigen::Index>(d.columns.size());
    Eigen::Index total_blocks = 0, total_rows = 0;
    for (const auto& r : results) {
      total_blocks += r.sums[k].rows();
      total_rows += r.series[k].rows();
    }
    d.block_sums.resize(total_blocks, cols);
    d.block_counts.resize(total_blocks);
    d.series.resize(total_rows, observables[k]->keep_series() ? cols : 0);
    Eigen::Index b0 = 0, r0 = 0;
    for (const auto& r : results) {
      d.block_sums.middleRows(b0, r.sums[k].rows()) = r.sums[k];
      d.block_counts.segment(b0, r.counts[k].size()) = r.counts[k];
      b0 += r.sums[k].rows();
      if (r.series[k].size() > 0) {
        d.series.middleRows(r0, r.series[k].rows()) = r.series[k];
        r0 += r.series[k].rows();
      }
    }
    out.observables.push_back(std::move(d));
  }

  for (const auto& d : out.observables) {
    if (d.series.rows() < 8) continue;
    for (Eigen::Index c = 0; c < d.series.cols(); ++c) {
      std::vector<double> x(static_cast<std::size_t>(d.series.rows()));
      for (Eigen::Index i = 0; i < d.series.rows(); ++i) x[static_cast<std::size_t>(i)] = d.series(i, c);
      const double tau = integrated_autocorrelation_time(x);
      const std::string label = d.name + "." + d.columns[static_cast<std::size_t>(c)];
      out.tau_int.emplace_back(label, tau);
      const std::size_t half = x.size() / 2;
      std::span<const double> first(x.data(), half), second(x.data() + half, x.size() - half);
      const double se = std::sqrt(2.0 * tau * (variance(first) / first.size() + variance(second) / second.size()));
      const double diff = std::abs(mean(first) - mean(second));
      if (se > 0.0 && diff > 5.0 * se) out.drift_warnings.push_back(label);
    }
  }

  std::ostringstream key;
  key << to_string(spec.boundary) << ':' << spec.dimension << ':' << spec.extents[0] << 'x' << spec.extents[1] << 'x'
      << spec.extents[2] << '|' << to_string(coupling.kind) << ':' << fmt(coupling.J) << ':' << fmt(coupling.alpha_range)
      << ':' << coupling.cutoff << '|' << fmt(config.beta) << ':' << to_string(config.algorithm) << ':'
      << config.thermalization_sweeps << ':' << config.samples << ':' << config.stride_sweeps << ':' << config.seed
      << ':' << config.chains << ':' << config.blocks;
  auto& p = out.provenance;
  p.seed = config.seed;
  p.rng = Rng::name;
  p.algorithm = to_string(config.algorithm);
  p.config_hash = hash_string(key.str());
  p.beta = config.beta;
  p.chains = chains;
  p.measurements = config.samples;
  p.acceptance = proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
  p.mean_cluster_size = clusters > 0 ? static_cast<double>(cluster_sites) / static_cast<double>(clusters) : 0.0;
  if (spec.dimension == 3 && std::abs(config.beta - kBetaCritical3DEstimate) < 1e-12)
    p.beta_note = "external literature estimate";
  return out;
}

std::string SampleSet::series_csv() const {
  std::ostringstream os;
  os << "index";
  for (const auto& d : observables)
    if (d.series.cols() > 0)
      for (const auto& c : d.columns) os << ',' << d.name << '.' << c;
  os << '\n';
  const Eigen::Index rows = [&] {
    for (const auto& d : observables)
      if (d.series.cols() > 0) return d.series.rows();
    return Eigen::Index{0};
  }();
  for (Eigen::Index i = 0; i < rows; ++i) {
    os << i;
    for (const auto& d : observables)
      for (Eigen::Index c = 0; c < d.series.cols(); ++c) os << ',' << fmt(d.series(i, c));
    os << '\n';
  }
  return os.str();
}

std::string SampleSet::provenance_json() const {
  nlohmann::ordered_json j;
  j["seed"] = provenance.seed;
  j["rng"] = provenance.rng;
  j["config_hash"] = provenance.config_hash;
  j["lattice"] = {{"dimension", spec.dimension},
                  {"extents", std::vector<int>(spec.extents.begin(), spec.extents.begin() + spec.dimension)},
                  {"boundary", to_string(spec.boundary)}};
  j["coupling"] = {{"kind", to_string(coupling.kind)}, {"J", coupling.J}};
  if (coupling.kind == Coupling::Kind::dyson) {
    j["coupling"]["alpha_range"] = coupling.alpha_range;
    j["coupling"]["cutoff"] = effective_cutoff(coupling, spec);
    j["coupling"]["truncation_error"] = dyson_truncation_error(coupling, effective_cutoff(coupling, spec));
  }
  j["sampler"] = {{"algorithm", provenance.algorithm},
                  {"beta", sampler.beta},
                  {"thermalization_sweeps", sampler.thermalization_sweeps},
                  {"samples", sampler.samples},
                  {"stride_sweeps", sampler.stride_sweeps},
                  {"chains", sampler.chains},
                  {"blocks", sampler.blocks}};
  if (!provenance.beta_note.empty()) j["sampler"]["beta_note"] = provenance.beta_note;
  j["acceptance_rate"] = provenance.acceptance;
  j["mean_cluster_size"] = provenance.mean_cluster_size;
  nlohmann::ordered_json tau = nlohmann::ordered_json::object();
  for (const auto& [k, v] : tau_int) tau[k] = v;
  j["tau_int"] = tau;
  j["drift_warnings"] = drift_warnings;
  return j.dump(2) + "\n";
}

std::string hash_string(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace critlab
