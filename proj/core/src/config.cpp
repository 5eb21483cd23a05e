#include "luislab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "luislab/csvio.hpp"

namespace luis {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config: " + key + ": " + what);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "system.m",          "system.n",
      "system.kappa",      "system.snr_db",
      "system.rotation",   "prior",
      "code.alist",        "code.regular_n",
      "code.inner_iters",  "code.rho_grid",
      "code.blocks_per_point", "detector.outer_iters",
      "detector.tracking", "montecarlo.trials",
      "montecarlo.target_bit_errors", "montecarlo.master_seed",
      "montecarlo.workers", "output.directory",
  };
  return keys;
}

}  // namespace

ConfigMap ConfigMap::from_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    map.values[key] = value;
  }
  return map;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

void ConfigMap::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("config override '" + assignment + "': expected key=value");
  }
  values[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::string ConfigMap::get(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    return fallback;
  }
  try {
    size_t pos = 0;
    const long value = std::stol(it->second, &pos);
    if (pos != it->second.size()) {
      fail(key, "expected integer, got '" + it->second + "'");
    }
    return value;
  } catch (const std::invalid_argument&) {
    fail(key, "expected integer, got '" + it->second + "'");
  } catch (const std::out_of_range&) {
    fail(key, "integer out of range");
  }
}

double ConfigMap::get_real(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    return fallback;
  }
  try {
    size_t pos = 0;
    const double value = std::stod(it->second, &pos);
    if (pos != it->second.size()) {
      fail(key, "expected number, got '" + it->second + "'");
    }
    return value;
  } catch (const std::invalid_argument&) {
    fail(key, "expected number, got '" + it->second + "'");
  } catch (const std::out_of_range&) {
    fail(key, "number out of range");
  }
}

std::uint64_t ConfigMap::get_seed(const std::string& key, std::uint64_t fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    return fallback;
  }
  try {
    size_t pos = 0;
    const std::uint64_t value = std::stoull(it->second, &pos, 0);
    if (pos != it->second.size()) {
      fail(key, "expected unsigned integer, got '" + it->second + "'");
    }
    return value;
  } catch (const std::exception&) {
    fail(key, "expected unsigned integer, got '" + it->second + "'");
  }
}

std::vector<double> parse_sweep(const std::string& text, const std::string& key) {
  std::vector<double> points;
  if (text.find(':') != std::string::npos) {
    const auto parts = csv::split(text, ':');
    if (parts.size() != 3) {
      fail(key, "range must be start:step:stop");
    }
    const double start = std::stod(parts[0]);
    const double step = std::stod(parts[1]);
    const double stop = std::stod(parts[2]);
    if (!(step > 0.0) || stop < start) {
      fail(key, "range must have positive step and stop >= start");
    }
    for (double x = start; x <= stop + 1e-9 * step; x += step) {
      points.push_back(x);
    }
    return points;
  }
  for (const std::string& token : csv::split(text, ',')) {
    const std::string t = trim(token);
    if (t.empty()) {
      fail(key, "empty sweep entry");
    }
    try {
      size_t pos = 0;
      points.push_back(std::stod(t, &pos));
      if (pos != t.size()) {
        throw std::invalid_argument(t);
      }
    } catch (const std::exception&) {
      fail(key, "expected number, got '" + t + "'");
    }
  }
  if (points.empty()) {
    fail(key, "empty sweep");
  }
  return points;
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& map) {
  for (const auto& [key, value] : map.values) {
    if (known_keys().count(key) == 0) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  cfg.system.m = static_cast<int>(map.get_int("system.m", 0));
  cfg.system.n = static_cast<int>(map.get_int("system.n", 0));
  if (cfg.system.m <= 0) {
    fail("system.m", "required positive integer");
  }
  if (cfg.system.n <= 0) {
    fail("system.n", "required positive integer");
  }
  cfg.system.kappa = map.get_real("system.kappa", 1.0);
  if (!(cfg.system.kappa >= 1.0)) {
    fail("system.kappa", "condition number must be >= 1");
  }
  cfg.system.snr_db = parse_sweep(map.get("system.snr_db", "0"), "system.snr_db");
  for (double s : cfg.system.snr_db) {
    if (!std::isfinite(s)) {
      fail("system.snr_db", "must be finite");
    }
  }

  const std::string rot = map.get("system.rotation", "haar");
  if (rot == "haar") {
    cfg.system.rotation = Rotation::haar;
  } else if (rot == "haar_right") {
    cfg.system.rotation = Rotation::haar_right;
  } else if (rot == "identity") {
    cfg.system.rotation = Rotation::identity;
  } else {
    fail("system.rotation", "expected haar | haar_right | identity");
  }

  cfg.prior_spec = map.get("prior", "qpsk");
  try {
    cfg.prior = parse_prior(cfg.prior_spec);
  } catch (const std::exception& e) {
    fail("prior", e.what());
  }

  cfg.code.alist_path = map.get("code.alist", "");
  cfg.code.regular_n = static_cast<int>(map.get_int("code.regular_n", 0));
  cfg.code.inner_iters = static_cast<int>(map.get_int("code.inner_iters", 50));
  cfg.code.enabled = !cfg.code.alist_path.empty() || cfg.code.regular_n > 0;
  if (!cfg.code.alist_path.empty() && cfg.code.regular_n > 0) {
    fail("code.regular_n", "give either code.alist or code.regular_n, not both");
  }
  if (cfg.code.regular_n < 0 || (cfg.code.regular_n > 0 && cfg.code.regular_n % 2 != 0)) {
    fail("code.regular_n", "must be a positive even bit count");
  }
  if (cfg.code.inner_iters < 0) {
    fail("code.inner_iters", "must be nonnegative");
  }
  if (map.has("code.rho_grid")) {
    cfg.code.rho_grid = parse_sweep(map.get("code.rho_grid", ""), "code.rho_grid");
    for (size_t i = 0; i < cfg.code.rho_grid.size(); ++i) {
      if (cfg.code.rho_grid[i] < 0.0 || (i > 0 && cfg.code.rho_grid[i] <= cfg.code.rho_grid[i - 1])) {
        fail("code.rho_grid", "must be nonnegative and strictly increasing");
      }
    }
  }
  cfg.code.blocks_per_point = static_cast<int>(map.get_int("code.blocks_per_point", 20));
  if (cfg.code.blocks_per_point < 1) {
    fail("code.blocks_per_point", "must be >= 1");
  }

  cfg.detector.outer_iters = static_cast<int>(map.get_int("detector.outer_iters", 30));
  if (cfg.detector.outer_iters < 1) {
    fail("detector.outer_iters", "must be >= 1");
  }
  const std::string tracking = map.get("detector.tracking", "analytic");
  if (tracking == "analytic") {
    cfg.detector.tracking = Tracking::analytic;
  } else if (tracking == "empirical") {
    cfg.detector.tracking = Tracking::empirical;
  } else {
    fail("detector.tracking", "expected analytic | empirical");
  }

  cfg.montecarlo.trials = static_cast<int>(map.get_int("montecarlo.trials", 100));
  if (cfg.montecarlo.trials < 1) {
    fail("montecarlo.trials", "must be >= 1");
  }
  cfg.montecarlo.target_bit_errors =
      static_cast<int>(map.get_int("montecarlo.target_bit_errors", 200));
  if (cfg.montecarlo.target_bit_errors < 1) {
    fail("montecarlo.target_bit_errors", "must be >= 1");
  }
  cfg.montecarlo.master_seed = map.get_seed("montecarlo.master_seed", 1);
  cfg.montecarlo.workers = static_cast<int>(map.get_int("montecarlo.workers", 1));
  if (cfg.montecarlo.workers < 1) {
    fail("montecarlo.workers", "must be >= 1");
  }

  cfg.output.directory = map.get("output.directory", ".");
  return cfg;
}

ChannelSpectrum ExperimentConfig::spectrum() const {
  return make_kappa_spectrum(system.m, system.n, system.kappa);
}

std::string ExperimentConfig::resolved_text() const {
  std::ostringstream out;
  out << "system.m = " << system.m << "\n";
  out << "system.n = " << system.n << "\n";
  out << "system.kappa = " << csv::format_double(system.kappa) << "\n";
  out << "system.snr_db = ";
  for (size_t i = 0; i < system.snr_db.size(); ++i) {
    out << (i ? "," : "") << csv::format_double(system.snr_db[i]);
  }
  out << "\n";
  const char* rot = system.rotation == Rotation::haar
                        ? "haar"
                        : (system.rotation == Rotation::haar_right ? "haar_right" : "identity");
  out << "system.rotation = " << rot << "\n";
  out << "prior = " << prior_spec << "\n";
  if (code.enabled) {
    if (!code.alist_path.empty()) {
      out << "code.alist = " << code.alist_path << "\n";
    } else {
      out << "code.regular_n = " << code.regular_n << "\n";
    }
    out << "code.inner_iters = " << code.inner_iters << "\n";
    if (!code.rho_grid.empty()) {
      out << "code.rho_grid = ";
      for (size_t i = 0; i < code.rho_grid.size(); ++i) {
        out << (i ? "," : "") << csv::format_double(code.rho_grid[i]);
      }
      out << "\n";
    }
    out << "code.blocks_per_point = " << code.blocks_per_point << "\n";
  }
  out << "detector.outer_iters = " << detector.outer_iters << "\n";
  out << "detector.tracking = "
      << (detector.tracking == Tracking::analytic ? "analytic" : "empirical") << "\n";
  out << "montecarlo.trials = " << montecarlo.trials << "\n";
  out << "montecarlo.target_bit_errors = " << montecarlo.target_bit_errors << "\n";
  out << "montecarlo.master_seed = " << montecarlo.master_seed << "\n";
  out << "montecarlo.workers = " << montecarlo.workers << "\n";
  out << "output.directory = " << output.directory << "\n";
  return out.str();
}

}  // namespace luis
