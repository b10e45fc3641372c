#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbhcli {

// exit codes shared by all subcommands
inline constexpr int kOk = 0;
inline constexpr int kValidationError = 2;
inline constexpr int kNotConverged = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat dotted-key config: `key = value` lines, '#' comments.
struct Config {
  std::string path;
  std::map<std::string, std::string> kv;
  mutable std::set<std::string> used;

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  std::string get(const std::string& key, const std::string& def = "") const;
  std::string require(const std::string& key) const;
  double get_num(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& def = {}) const;
  /// keys present in the file but never read by the scenario
  std::vector<std::string> unknown_keys() const;
};

Config parse_config(const std::string& path);

/// Executes one scenario config; writes artifacts into its output
/// directory; returns an exit code.
int run_scenario(const Config& cfg, int threads);

/// `fbh plot <run-dir>`: renders SVGs from the run's CSV artifacts.
int emit_plots(const std::string& run_dir);

}  // namespace fbhcli
