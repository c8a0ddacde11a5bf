#include "artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace critlab::cli {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_real(v));
  add_text(std::move(row));
}

void CsvTable::add_text(std::vector<std::string> values) {
  if (values.size() != header.size()) throw std::logic_error("csv row does not match the header");
  rows.push_back(std::move(values));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw DataError(path.string() + ":1: missing header line");
  CsvTable t(split_cells(line));
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    auto cells = split_cells(line);
    if (cells.size() != t.header.size())
      throw DataError(path.string() + ":" + std::to_string(number) + ": expected " + std::to_string(t.header.size()) +
                      " columns, found " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw DataError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

void save_samples(const SampleSet& s, const fs::path& dir) {
  write_text(dir / "series.csv", s.series_csv());
  for (const auto& d : s.observables) {
    std::vector<std::string> header{"block", "count"};
    header.insert(header.end(), d.columns.begin(), d.columns.end());
    CsvTable t(header);
    for (Eigen::Index b = 0; b < d.block_sums.rows(); ++b) {
      std::vector<double> row{static_cast<double>(b), d.block_counts(b)};
      for (Eigen::Index c = 0; c < d.block_sums.cols(); ++c) row.push_back(d.block_sums(b, c));
      t.add(row);
    }
    write_text(dir / ("blocks_" + d.name + ".csv"), t.str());
  }
  Json prov = Json::parse(s.provenance_json());
  prov["observables"] = Json::array();
  for (const auto& d : s.observables) prov["observables"].push_back({{"name", d.name}, {"series", d.series.cols() > 0}});
  prov["measurements"] = s.provenance.measurements;
  write_json(dir / "provenance.json", prov);
}

namespace {

double cell_value(const CsvTable& t, const fs::path& path, std::size_t row, std::size_t col) {
  const std::string& c = t.rows[row][col];
  char* end = nullptr;
  const double v = std::strtod(c.c_str(), &end);
  if (c.empty() || *end != '\0')
    throw DataError(path.string() + ":" + std::to_string(row + 2) + ": '" + c + "' is not a number");
  return v;
}

}  // namespace

SampleSet load_samples(const fs::path& dir) {
  const fs::path prov_path = dir / "provenance.json";
  if (!fs::exists(prov_path)) throw DataError(prov_path.string() + ": missing; run simulate first");
  const Json prov = read_json(prov_path);
  SampleSet s;
  try {
    const auto& lat = prov.at("lattice");
    std::vector<int> ext = lat.at("extents").get<std::vector<int>>();
    s.spec = LatticeSpec::box(ext, boundary_from_string(lat.at("boundary").get<std::string>()));
    const auto& cp = prov.at("coupling");
    if (cp.at("kind").get<std::string>() == "dyson")
      s.coupling = Coupling::dyson(cp.at("J").get<double>(), cp.at("alpha_range").get<double>(), cp.at("cutoff").get<int>());
    else
      s.coupling = Coupling::nearest_neighbor(cp.at("J").get<double>());
    const auto& sm = prov.at("sampler");
    s.sampler.algorithm = algorithm_from_string(sm.at("algorithm").get<std::string>());
    s.sampler.beta = sm.at("beta").get<double>();
    s.sampler.thermalization_sweeps = sm.at("thermalization_sweeps").get<int>();
    s.sampler.samples = sm.at("samples").get<int>();
    s.sampler.stride_sweeps = sm.at("stride_sweeps").get<int>();
    s.sampler.chains = sm.at("chains").get<int>();
    s.sampler.blocks = sm.at("blocks").get<int>();
    s.sampler.seed = prov.at("seed").get<std::uint64_t>();
    s.provenance.seed = s.sampler.seed;
    s.provenance.rng = prov.at("rng").get<std::string>();
    s.provenance.algorithm = sm.at("algorithm").get<std::string>();
    s.provenance.config_hash = prov.at("config_hash").get<std::string>();
    s.provenance.beta = s.sampler.beta;
    s.provenance.chains = s.sampler.chains;
    s.provenance.measurements = prov.at("measurements").get<long>();
    s.provenance.acceptance = prov.at("acceptance_rate").get<double>();
    s.provenance.mean_cluster_size = prov.at("mean_cluster_size").get<double>();
    for (const auto& [k, v] : prov.at("tau_int").items()) s.tau_int.emplace_back(k, v.get<double>());
    s.drift_warnings = prov.at("drift_warnings").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw DataError(prov_path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(prov_path.string() + ": " + e.what());
  }

  const fs::path series_path = dir / "series.csv";
  const CsvTable series = fs::exists(series_path) ? read_csv(series_path) : CsvTable({"index"});
  for (const auto& o : prov.at("observables")) {
    ObservableData d;
    d.name = o.at("name").get<std::string>();
    const fs::path bp = dir / ("blocks_" + d.name + ".csv");
    const CsvTable t = read_csv(bp);
    if (t.header.size() < 3 || t.header[0] != "block" || t.header[1] != "count")
      throw DataError(bp.string() + ":1: expected block,count,... header");
    d.columns.assign(t.header.begin() + 2, t.header.end());
    const auto B = static_cast<Eigen::Index>(t.rows.size());
    const auto C = static_cast<Eigen::Index>(d.columns.size());
    d.block_sums.resize(B, C);
    d.block_counts.resize(B);
    for (Eigen::Index b = 0; b < B; ++b) {
      d.block_counts(b) = cell_value(t, bp, static_cast<std::size_t>(b), 1);
      for (Eigen::Index c = 0; c < C; ++c)
        d.block_sums(b, c) = cell_value(t, bp, static_cast<std::size_t>(b), static_cast<std::size_t>(c + 2));
    }
    if (o.at("series").get<bool>()) {
      std::vector<std::size_t> cols;
      for (const auto& c : d.columns) {
        const std::string want = d.name + "." + c;
        std::size_t k = 0;
        while (k < series.header.size() && series.header[k] != want) ++k;
        if (k == series.header.size()) throw DataError(series_path.string() + ":1: missing column " + want);
        cols.push_back(k);
      }
      d.series.resize(static_cast<Eigen::Index>(series.rows.size()), C);
      for (std::size_t i = 0; i < series.rows.size(); ++i)
        for (std::size_t c = 0; c < cols.size(); ++c)
          d.series(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = cell_value(series, series_path, i, cols[c]);
    }
    s.observables.push_back(std::move(d));
  }
  return s;
}

void write_error_report(const fs::path& dir, const std::string& command, const std::string& message) {
  try {
    fs::create_directories(dir);
    write_json(dir / "error.json", Json{{"command", command}, {"status", "runtime_failure"}, {"exit_code", 3}, {"message", message}});
  } catch (...) {
  }
}

}  // namespace critlab::cli
