#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "critlab/lattice.hpp"
#include "critlab/mc.hpp"

namespace critlab::cli {

/// Invalid configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line-oriented configuration:
///
///   # comment
///   [section]
///   key = value
///
/// Every key must appear in the schema; values keep their text until read.
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig parse(const std::string& text, const std::string& origin = "<config>");
  static ExperimentConfig load(const std::string& path);

  /// Override a key, validating it against the schema (used by CLI flags).
  void set(const std::string& dotted_key, const std::string& value);
  bool explicitly_set(const std::string& dotted_key) const;

  std::string text(const std::string& dotted_key) const;
  double real(const std::string& dotted_key) const;
  long integer(const std::string& dotted_key) const;
  std::uint64_t unsigned_integer(const std::string& dotted_key) const;
  bool boolean(const std::string& dotted_key) const;
  std::vector<double> real_list(const std::string& dotted_key) const;
  std::vector<int> int_list(const std::string& dotted_key) const;
  std::vector<std::string> text_list(const std::string& dotted_key) const;

  LatticeSpec lattice() const;
  Coupling coupling() const;
  SamplerConfig sampler() const;

  /// Every key with its resolved value, in schema order.
  std::string resolved() const { return render(false); }
  /// Hash of the keys that can change results (output path and thread count excluded).
  std::string hash() const { return hash_string(render(true)); }

 private:
  struct Entry {
    std::string value;
    bool set = false;
  };
  std::vector<std::string> order_;
  std::map<std::string, Entry> entries_;

  const Entry& entry(const std::string& key) const;
  std::string render(bool results_only) const;
};

}  // namespace critlab::cli
