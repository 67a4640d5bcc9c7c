#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qlyap {

enum class Model { syk, xxz };

struct StateSelection {
  enum class Kind { all, ground, center, window, boltzmann };
  Kind kind = Kind::all;
  double lo_percent = 0.0;   // window
  double hi_percent = 100.0;
  double temperature = 0.0;  // boltzmann

  static StateSelection parse(const std::string& text);
  std::string to_string() const;
};

struct TimeGrid {
  enum class Spacing { linear, geometric };
  double start = 0.02;
  double stop = 100.0;
  int count = 30;
  Spacing spacing = Spacing::geometric;
  std::vector<double> explicit_times;  // overrides start/stop/count when non-empty

  std::vector<double> points() const;
};

struct ExperimentConfig {
  Model model = Model::syk;
  int size = 12;  // N (Majoranas) or N_site
  double j_scale = 1.0;
  double k_scale = 0.01;
  double w_scale = 0.5;
  TimeGrid times;
  int n_samples = 10;
  std::uint64_t master_seed = 1;
  StateSelection selection;
  std::vector<std::string> tasks = {"growth"};
  std::string output_dir = "out";
  int n_workers = 0;  // 0: min(hardware threads, samples)

  int subsystem_modes = 0;  // 0: floor(N/4)
  double ks_window_lo = 1.0;
  double ks_window_hi = 2.0;

  std::string unfolding = "fixed_i";
  std::string gaps = "all";
  int unfold_degree = 10;
  std::optional<double> hist_time;  // default: last grid time
  double hist_lo = 0.0;
  double hist_hi = 4.0;
  int hist_bins = 40;

  bool save_couplings = true;

  bool has_task(const std::string& t) const;
  /// Sets one key from its textual value; throws std::invalid_argument on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  nlohmann::json to_json() const;
};

/// Flat `key = value` text; `#` starts a comment, values may be double-quoted.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Accepts either a config file or a run manifest (its `config` echo).
ExperimentConfig load_config_or_manifest(const std::string& path);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Violations in human-readable form; empty means valid.
std::vector<std::string> validate_config(const ExperimentConfig& config);

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks = {"growth", "spectrum", "ks_ee", "diagnostics", "rmt"};
  return tasks;
}

}  // namespace qlyap
