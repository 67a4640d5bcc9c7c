// Command-line driver: run or validate an experiment config, or sample reference spectra.
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qlyap/config.hpp"
#include "qlyap/harness.hpp"
#include "qlyap/rmtstats.hpp"

namespace {

qlyap::ExperimentConfig load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
  auto config = qlyap::load_config_or_manifest(path);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

int report_violations(const qlyap::ExperimentConfig& config) {
  const auto v = qlyap::validate_config(config);
  for (const auto& msg : v) std::cerr << "violation: " << msg << '\n';
  return v.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Lyapunov spectra of SYK and XXZ ensembles"};
  app.set_version_flag("--version", qlyap::code_version());
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  auto add_override_flags = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "config file or manifest.json")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", sets, "override a config key (key=value), repeatable");
  };

  auto* run = app.add_subcommand("run", "run an experiment and write CSV/JSON outputs");
  add_override_flags(run);
  int workers = -1, samples = -1;
  std::string seed, output;
  run->add_option("-j,--workers", workers, "worker threads (0: automatic)");
  run->add_option("-n,--samples", samples, "number of disorder samples");
  run->add_option("--seed", seed, "master seed");
  run->add_option("-o,--output", output, "output directory");

  auto* validate = app.add_subcommand("validate", "check a config and list violations");
  add_override_flags(validate);

  auto* ref = app.add_subcommand("reference-ensembles", "sample GUE or Poisson reference spectra");
  std::string kind;
  int dim = 0, count = 0;
  std::uint64_t ref_seed = 0;
  std::string ref_out;
  ref->add_option("kind", kind, "gue or poisson")->required();
  ref->add_option("dim", dim, "levels per spectrum")->required()->check(CLI::PositiveNumber);
  ref->add_option("count", count, "number of spectra")->required()->check(CLI::PositiveNumber);
  ref->add_option("seed", ref_seed, "seed")->required();
  ref->add_option("-o,--output", ref_out, "write the spectra to this CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto config = load_with_overrides(config_path, sets);
      const int rc = report_violations(config);
      if (rc == 0) std::cout << "ok\n";
      return rc;
    }
    if (*run) {
      if (workers >= 0) sets.push_back("n_workers=" + std::to_string(workers));
      if (samples >= 0) sets.push_back("n_samples=" + std::to_string(samples));
      if (!seed.empty()) sets.push_back("master_seed=" + seed);
      if (!output.empty()) sets.push_back("output_dir=" + output);
      const auto config = load_with_overrides(config_path, sets);
      if (const int rc = report_violations(config); rc != 0) return rc;
      const auto m = qlyap::run_experiment(config);
      std::cout << "wrote " << m.files.size() + 1 << " files to " << m.output_dir << " (" << std::fixed
                << std::setprecision(1) << m.wall_seconds << " s, " << m.workers << " workers)\n";
      if (m.partial) {
        std::cerr << m.failed_seeds.size() << " sample(s) failed; see failures.json\n";
        return 3;
      }
      return 0;
    }
    if (*ref) {
      const auto k = qlyap::reference_kind_from_string(kind);
      const auto ens = qlyap::reference_ensembles(k, dim, count, ref_seed);
      if (!ref_out.empty()) {
        std::ofstream out(ref_out);
        out << std::setprecision(17);
        for (const auto& s : ens.spectra) {
          for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i];
          out << '\n';
        }
      }
      std::cout << std::setprecision(6);
      if (dim >= 3) {
        const auto r = qlyap::r_statistic(ens, qlyap::GapSelection::all);
        std::cout << "r_mean " << r.mean << "\nr_stderr " << r.std_error << "\nr_count " << r.count << '\n';
      } else {
        std::cout << "spectra " << ens.size() << " (dim < 3: no gap ratios)\n";
      }
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
