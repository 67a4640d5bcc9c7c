#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qlyap/config.hpp"
#include "qlyap/diagnostics.hpp"
#include "qlyap/entropy.hpp"
#include "qlyap/lyapunov.hpp"

namespace qlyap {

/// Everything computed for one disorder sample; a pure function of (config, index).
struct SampleResult {
  int index = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;

  nlohmann::json couplings;
  std::vector<double> energies;     // reference-state energies (zero sector for XXZ)
  std::vector<int> selected;        // reference-state indices
  std::vector<double> weights;      // one per selected state
  std::vector<double> times;
  std::vector<std::vector<LyapunovRecord>> records;  // [time][selected state]
  std::vector<LyapunovRecord> averaged;              // [time]

  bool has_ks_ee = false;
  KsEeSeries ks_ee;

  std::vector<OverlapCurve> overlaps;
  bool has_degeneracy = false;
  DegeneracyReport degeneracy;
};

/// Reference states picked by the selection rule among `n_states` ascending eigenstates.
std::vector<int> select_states(const StateSelection& selection, int n_states);

SampleResult compute_sample(const ExperimentConfig& config, int index);

struct OutputFile {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct RunManifest {
  nlohmann::json config;
  std::vector<int> sample_indices;
  std::vector<std::uint64_t> sample_seeds;
  std::vector<std::uint64_t> failed_seeds;
  std::string code_version;
  double wall_seconds = 0.0;
  int workers = 1;
  bool partial = false;
  std::vector<OutputFile> files;
  std::string output_dir;

  nlohmann::json to_json() const;
};

/// Output directory after applying QLYAP_OUTPUT_ROOT to relative paths.
std::string resolve_output_dir(const std::string& configured);

/// Runs samples 0..n_samples-1. Throws std::invalid_argument listing every violation
/// when the configuration does not validate.
RunManifest run_experiment(const ExperimentConfig& config);
/// Runs the given sample indices only (used for leave-one-out checks).
RunManifest run_experiment(const ExperimentConfig& config, std::span<const int> sample_indices);

std::string sha256_file(const std::string& path);
std::string code_version();

}  // namespace qlyap
