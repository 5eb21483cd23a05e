#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "luislab/channel.hpp"
#include "luislab/oamp.hpp"
#include "luislab/prior.hpp"

namespace luis {

// Flat key = value text config; '#' starts a comment, later assignments win.
struct ConfigMap {
  std::map<std::string, std::string> values;

  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_text(const std::string& text);

  void set(const std::string& key, const std::string& value) { values[key] = value; }
  // "key=value" as accepted on the command line.
  void set_assignment(const std::string& assignment);

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_real(const std::string& key, double fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
};

struct SystemConfig {
  int m = 0;
  int n = 0;
  double kappa = 1.0;
  std::vector<double> snr_db;  // sweep points
  Rotation rotation = Rotation::haar;
};

struct CodeConfig {
  bool enabled = false;
  std::string alist_path;  // load when nonempty, otherwise construct
  int regular_n = 0;
  int inner_iters = 50;
  std::vector<double> rho_grid;  // transfer-curve sampling points
  int blocks_per_point = 20;
};

struct DetectorConfig {
  int outer_iters = 30;
  Tracking tracking = Tracking::analytic;
};

struct MonteCarloConfig {
  int trials = 100;
  int target_bit_errors = 200;
  std::uint64_t master_seed = 1;
  int workers = 1;
};

struct OutputConfig {
  std::string directory = ".";
};

struct ExperimentConfig {
  SystemConfig system;
  std::string prior_spec = "qpsk";
  Prior prior;
  CodeConfig code;
  DetectorConfig detector;
  MonteCarloConfig montecarlo;
  OutputConfig output;

  // Validates every field; errors carry the config key path.
  static ExperimentConfig from_map(const ConfigMap& map);

  ChannelSpectrum spectrum() const;
  // Canonical echo of every resolved key, for run manifests.
  std::string resolved_text() const;
};

// "a,b,c" or "start:step:stop" (inclusive) or a single number.
std::vector<double> parse_sweep(const std::string& text, const std::string& key);

}  // namespace luis
