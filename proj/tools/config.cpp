#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace critlab::cli {

namespace {

struct SchemaKey {
  const char* key;
  const char* fallback;
};

// Keys and defaults, in the order the resolved config is echoed.
constexpr SchemaKey kSchema[] = {
    {"run.stages", "simulate,analyze"},
    {"run.seed", "1"},
    {"run.threads", "1"},
    {"run.out", "critlab_out"},

    {"lattice.dimension", "2"},
    {"lattice.size", "64"},
    {"lattice.boundary", "periodic"},

    {"coupling.kind", "nearest_neighbor"},
    {"coupling.J", "1"},
    {"coupling.alpha", "1.5"},
    {"coupling.cutoff", "0"},

    {"sampler.beta", "critical"},
    {"sampler.algorithm", "wolff"},
    {"sampler.thermalization", "1000"},
    {"sampler.samples", "4000"},
    {"sampler.stride", "1"},
    {"sampler.chains", "1"},
    {"sampler.blocks", "50"},

    {"correlators.eta_r_min", "0"},
    {"correlators.eta_r_max", "0"},
    {"correlators.finite_size_terms", "true"},

    {"fluctuations.radii", "1,2,4,8,16"},

    {"charfunc.systems", "1x1,2x2,2x3,3x3"},
    {"charfunc.boundary", "periodic"},
    {"charfunc.betas", "0.1,0.3,0.5"},
    {"charfunc.periods", "64"},
    {"charfunc.z_points", "21"},

    {"dyson.alphas", "1.25,1.5,1.75"},
    {"dyson.t_min", "100"},
    {"dyson.t_max", "10000"},
    {"dyson.points", "400"},
    {"dyson.p", "1"},
    {"dyson.J", "1"},
    {"dyson.droplet_sizes", "16,32,64,128,256"},
    {"dyson.meanfield_t", "100"},
    {"dyson.dt", "0.001"},

    {"gap.max_sites", "8"},
    {"gap.two_s", "1"},
    {"gap.J3", "1"},
    {"gap.J", "0,0.25,0.5"},
    {"gap.boundary", "plus"},

    {"newman.exact_sizes", "2,4"},
    {"newman.exact_beta", "0.3"},
    {"newman.exact_boundary", "periodic"},
    {"newman.box_sizes", "8,16,32,64"},
    {"newman.exact_z_max", "1"},
    {"newman.exact_z_points", "21"},
    {"newman.z_min", "0.00001"},
    {"newman.z_max", "0.01"},
    {"newman.z_points", "31"},
    {"newman.max_spread", "4"},
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
    throw ConfigError("key '" + key + "': '" + v + "' is not a finite number");
  return x;
}

long parse_integer(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  return x;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (const auto& k : kSchema) {
    order_.emplace_back(k.key);
    entries_[k.key] = {k.fallback, false};
  }
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& origin) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line, section;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string dotted = section.empty() ? key : section + "." + key;
    if (!c.entries_.count(dotted)) throw ConfigError(where + ": unknown key '" + dotted + "'");
    c.set(dotted, trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("unknown key '" + key + "'");
  it->second = {value, true};
}

bool ExperimentConfig::explicitly_set(const std::string& key) const { return entry(key).set; }

const ExperimentConfig::Entry& ExperimentConfig::entry(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

std::string ExperimentConfig::text(const std::string& key) const { return entry(key).value; }
double ExperimentConfig::real(const std::string& key) const { return parse_real(key, text(key)); }
long ExperimentConfig::integer(const std::string& key) const { return parse_integer(key, text(key)); }

std::uint64_t ExperimentConfig::unsigned_integer(const std::string& key) const {
  const std::string v = text(key);
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v.front() == '-' || *end != '\0' || errno == ERANGE)
    throw ConfigError("key '" + key + "': '" + v + "' is not a non-negative integer");
  return x;
}

bool ExperimentConfig::boolean(const std::string& key) const {
  const std::string v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<double> ExperimentConfig::real_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(text(key), ',')) out.push_back(parse_real(key, item));
  return out;
}

std::vector<int> ExperimentConfig::int_list(const std::string& key) const {
  std::vector<int> out;
  for (const auto& item : split(text(key), ',')) out.push_back(static_cast<int>(parse_integer(key, item)));
  return out;
}

std::vector<std::string> ExperimentConfig::text_list(const std::string& key) const { return split(text(key), ','); }

LatticeSpec ExperimentConfig::lattice() const {
  try {
    const auto spec = LatticeSpec::cubic(static_cast<int>(integer("lattice.dimension")),
                                         static_cast<int>(integer("lattice.size")),
                                         boundary_from_string(text("lattice.boundary")));
    spec.validate();
    return spec;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("section [lattice]: ") + e.what());
  }
}

Coupling ExperimentConfig::coupling() const {
  const std::string kind = text("coupling.kind");
  Coupling c;
  if (kind == "nearest_neighbor")
    c = Coupling::nearest_neighbor(real("coupling.J"));
  else if (kind == "dyson")
    c = Coupling::dyson(real("coupling.J"), real("coupling.alpha"), static_cast<int>(integer("coupling.cutoff")));
  else
    throw ConfigError("key 'coupling.kind': unknown coupling '" + kind + "'");
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("section [coupling]: ") + e.what());
  }
  return c;
}

SamplerConfig ExperimentConfig::sampler() const {
  SamplerConfig s;
  const std::string beta = text("sampler.beta");
  s.beta = beta == "critical" ? kBetaCritical2D : real("sampler.beta");
  try {
    s.algorithm = algorithm_from_string(text("sampler.algorithm"));
  } catch (const std::exception&) {
    throw ConfigError("key 'sampler.algorithm': unknown algorithm '" + text("sampler.algorithm") + "'");
  }
  s.thermalization_sweeps = static_cast<int>(integer("sampler.thermalization"));
  s.samples = static_cast<int>(integer("sampler.samples"));
  s.stride_sweeps = static_cast<int>(integer("sampler.stride"));
  s.chains = static_cast<int>(integer("sampler.chains"));
  s.blocks = static_cast<int>(integer("sampler.blocks"));
  s.seed = unsigned_integer("run.seed");
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("section [sampler]: ") + e.what());
  }
  return s;
}

std::string ExperimentConfig::render(bool results_only) const {
  std::ostringstream os;
  std::string section;
  for (const auto& key : order_) {
    if (results_only && (key == "run.out" || key == "run.threads")) continue;
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) os << '\n';
      os << '[' << s << "]\n";
      section = s;
    }
    os << key.substr(dot + 1) << " = " << entries_.at(key).value << '\n';
  }
  return os.str();
}

}  // namespace critlab::cli
