#include "qlyap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "qlyap/rmtstats.hpp"
#include "qlyap/rng.hpp"

#ifndef QLYAP_VERSION
#define QLYAP_VERSION "unknown"
#endif

namespace qlyap {

namespace fs = std::filesystem;

std::string code_version() { return QLYAP_VERSION; }

std::vector<int> select_states(const StateSelection& selection, int n_states) {
  std::vector<int> out;
  if (n_states <= 0) return out;
  switch (selection.kind) {
    case StateSelection::Kind::all:
    case StateSelection::Kind::boltzmann:
      out.resize(static_cast<std::size_t>(n_states));
      std::iota(out.begin(), out.end(), 0);
      break;
    case StateSelection::Kind::ground:
      out.push_back(0);
      break;
    case StateSelection::Kind::center:
      out.push_back(n_states / 2);
      break;
    case StateSelection::Kind::window:
      // State i sits at fractional rank (i + 1/2) / L.
      for (int i = 0; i < n_states; ++i) {
        // Compared as 100 (i + 1/2) against pct * L so that exact boundaries stay exact.
        const double rank = 100.0 * (i + 0.5);
        if (rank >= selection.lo_percent * n_states && rank < selection.hi_percent * n_states) out.push_back(i);
      }
      break;
  }
  return out;
}

namespace {

bool needs_lyapunov(const ExperimentConfig& c) {
  return c.has_task("growth") || c.has_task("spectrum") || c.has_task("rmt") || c.has_task("ks_ee");
}

template <class Engine>
void fill_lyapunov(const ExperimentConfig& config, const Engine& engine, SampleResult& r,
                   std::vector<double>* mean_hks_all) {
  const int n_states = static_cast<int>(engine.n_states());
  r.selected = select_states(config.selection, n_states);
  if (r.selected.empty()) {
    throw std::runtime_error("state selection '" + config.selection.to_string() + "' picks no eigenstate");
  }
  if (config.selection.kind == StateSelection::Kind::boltzmann) {
    std::vector<double> e;
    for (int s : r.selected) e.push_back(r.energies[static_cast<std::size_t>(s)]);
    r.weights = boltzmann_weights(e, config.selection.temperature);
  } else {
    r.weights.assign(r.selected.size(), 1.0 / static_cast<double>(r.selected.size()));
  }

  const bool all_needed = mean_hks_all != nullptr;
  std::vector<int> compute = r.selected;
  if (all_needed) {
    compute.resize(static_cast<std::size_t>(n_states));
    std::iota(compute.begin(), compute.end(), 0);
  }

  for (double t : r.times) {
    const auto ls = engine.l_matrices(compute, t);
    std::vector<LyapunovRecord> computed;
    computed.reserve(ls.size());
    for (const auto& l : ls) computed.push_back(spectrum_from_l(l));
    if (all_needed) {
      double sum = 0.0;
      for (const auto& rec : computed) sum += rec.h_ks;
      mean_hks_all->push_back(sum / static_cast<double>(computed.size()));
    }
    std::vector<LyapunovRecord> chosen;
    if (all_needed) {
      for (int s : r.selected) chosen.push_back(computed[static_cast<std::size_t>(s)]);
    } else {
      chosen = std::move(computed);
    }
    r.averaged.push_back(average_records(chosen, r.weights));
    r.records.push_back(std::move(chosen));
  }
}

void compute_syk(const ExperimentConfig& config, SampleResult& r) {
  const MajoranaBasis basis = jordan_wigner_majoranas(config.size);
  const SykCouplings couplings = draw_syk_couplings(config.size, config.j_scale, config.k_scale, r.seed);
  r.couplings = to_json(couplings);
  EigenSystem eig = diagonalize(build_syk(couplings, basis));
  r.energies.assign(eig.energies.data(), eig.energies.data() + eig.energies.size());

  if (config.has_task("diagnostics")) {
    r.overlaps.push_back(d1_curve(eig, basis));
    r.overlaps.push_back(d2_curve(eig, basis));
    r.degeneracy = degeneracy_audit(eig, 1e-10);
    r.has_degeneracy = true;
  }
  if (!needs_lyapunov(config)) return;

  const SykLyapunov engine(basis, std::move(eig));
  std::vector<double> mean_hks;
  const bool ks_ee = config.has_task("ks_ee");
  fill_lyapunov(config, engine, r, ks_ee ? &mean_hks : nullptr);
  if (ks_ee) {
    const auto spec = BipartitionSpec::for_majoranas(config.size, config.subsystem_modes);
    r.ks_ee = ks_vs_ee_series(basis, engine.eigensystem(), spec, r.times, mean_hks, config.ks_window_lo,
                              config.ks_window_hi);
    r.has_ks_ee = true;
  }
}

void compute_xxz(const ExperimentConfig& config, SampleResult& r) {
  const XxzFields fields = draw_xxz_fields(config.size, config.w_scale, r.seed);
  r.couplings = to_json(fields);
  const XxzLyapunov engine(diagonalize_xxz_sectors(fields));
  const auto& e = engine.eigensystem().energies;
  r.energies.assign(e.data(), e.data() + e.size());
  if (config.has_task("diagnostics")) r.overlaps.push_back(d_xxz_curve(engine));
  if (needs_lyapunov(config)) fill_lyapunov(config, engine, r, nullptr);
}

}  // namespace

SampleResult compute_sample(const ExperimentConfig& config, int index) {
  SampleResult r;
  r.index = index;
  r.seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(index));
  r.times = config.times.points();
  if (config.model == Model::syk) {
    compute_syk(config, r);
  } else {
    compute_xxz(config, r);
  }
  return r;
}

std::string resolve_output_dir(const std::string& configured) {
  const fs::path p(configured);
  if (p.is_relative()) {
    if (const char* root = std::getenv("QLYAP_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
      return (fs::path(root) / p).string();
    }
  }
  return p.string();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256_file: cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof buffer);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buffer, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return os.str();
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json files_json = nlohmann::json::array();
  for (const auto& f : files) files_json.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  return {{"config", config},
          {"sample_indices", sample_indices},
          {"sample_seeds", sample_seeds},
          {"failed_seeds", failed_seeds},
          {"partial", partial},
          {"code_version", code_version},
          {"wall_seconds", wall_seconds},
          {"workers", workers},
          {"output_dir", output_dir},
          {"files", files_json}};
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

struct MeanError {
  double mean = 0.0;
  double error = 0.0;
};

MeanError mean_error(const std::vector<double>& xs) {
  MeanError m;
  if (xs.empty()) return {NAN, NAN};
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return m;
}

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    names_.push_back(name);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
    return out;
  }

  std::vector<OutputFile> inventory() const {
    std::vector<OutputFile> files;
    for (const auto& n : names_) {
      const auto p = dir_ / n;
      files.push_back({n, fs::file_size(p), sha256_file(p.string())});
    }
    return files;
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

void write_record_header(std::ostream& out, std::size_t n) {
  out << "sample_seed,state_index,t";
  for (std::size_t i = 1; i <= n; ++i) out << ",lambda_" << i;
  out << ",h_ks,lambda_otoc\n";
}

void write_record(std::ostream& out, std::uint64_t seed, const LyapunovRecord& r) {
  out << seed << ',' << r.state_index << ',' << num(r.t);
  for (double x : r.lambdas) out << ',' << num(x);
  out << ',' << num(r.h_ks) << ',' << num(r.lambda_otoc) << '\n';
}

std::size_t n_exponents(const std::vector<const SampleResult*>& ok) {
  for (const auto* s : ok)
    if (!s->averaged.empty()) return s->averaged.front().lambdas.size();
  return 0;
}

void write_growth(Outputs& o, const std::vector<const SampleResult*>& ok, const std::vector<double>& times) {
  {
    auto out = o.open("growth.csv");
    write_record_header(out, n_exponents(ok));
    for (const auto* s : ok)
      for (const auto& rec : s->averaged) write_record(out, s->seed, rec);
  }
  auto out = o.open("growth_summary.csv");
  out << "t,n_samples,lambda_max_mean,lambda_max_stderr,lambda_max_t_mean,lambda_max_t_stderr,"
         "lambda_otoc_mean,lambda_otoc_stderr,lambda_otoc_t_mean,lambda_otoc_t_stderr,"
         "otoc_ratio_mean,otoc_ratio_stderr,h_ks_mean,h_ks_stderr\n";
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    std::vector<double> lmax, lmax_t, lotoc, lotoc_t, ratio, hks;
    for (const auto* s : ok) {
      const auto& a = s->averaged[ti];
      lmax.push_back(a.lambdas.back());
      lmax_t.push_back(a.lambdas.back() * t);
      lotoc.push_back(a.lambda_otoc);
      lotoc_t.push_back(a.lambda_otoc * t);
      ratio.push_back(a.otoc_ratio);
      hks.push_back(a.h_ks);
    }
    out << num(t) << ',' << ok.size();
    for (const auto* series : {&lmax, &lmax_t, &lotoc, &lotoc_t, &ratio, &hks}) {
      const auto me = mean_error(*series);
      out << ',' << num(me.mean) << ',' << num(me.error);
    }
    out << '\n';
  }
}

void write_spectrum(Outputs& o, const std::vector<const SampleResult*>& ok) {
  auto out = o.open("spectrum.csv");
  write_record_header(out, n_exponents(ok));
  for (const auto* s : ok)
    for (const auto& per_time : s->records)
      for (const auto& rec : per_time) write_record(out, s->seed, rec);
}

void write_ks_ee(Outputs& o, const std::vector<const SampleResult*>& ok, const ExperimentConfig& config) {
  nlohmann::json per_sample = nlohmann::json::array();
  {
    auto out = o.open("ks_ee.csv");
    out << "sample_seed,t,s_ee,n_see_over_a,hks_t\n";
    for (const auto* s : ok) {
      const auto& k = s->ks_ee;
      for (std::size_t i = 0; i < k.entropy.times.size(); ++i) {
        out << s->seed << ',' << num(k.entropy.times[i]) << ',' << num(k.entropy.s_ee[i]) << ','
            << num(k.entropy.normalized[i]) << ',' << num(k.hks_t[i]) << '\n';
      }
      per_sample.push_back({{"sample_seed", s->seed}, {"shift", k.shift}, {"pearson", k.pearson}});
    }
  }
  // Fit on the ensemble-mean curves.
  const auto& times = ok.front()->ks_ee.entropy.times;
  std::vector<double> mean_see(times.size(), 0.0), mean_hks(times.size(), 0.0);
  for (const auto* s : ok) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      mean_see[i] += s->ks_ee.entropy.normalized[i] / static_cast<double>(ok.size());
      mean_hks[i] += s->ks_ee.hks_t[i] / static_cast<double>(ok.size());
    }
  }
  const auto fit = fit_constant_shift(times, mean_see, mean_hks, config.ks_window_lo, config.ks_window_hi);
  const int a = config.subsystem_modes > 0 ? config.subsystem_modes : config.size / 4;
  const nlohmann::json summary = {{"subsystem_modes", a},
                                  {"window", {config.ks_window_lo, config.ks_window_hi}},
                                  {"log_base", "e"},
                                  {"ensemble_shift", fit.shift},
                                  {"ensemble_pearson", fit.pearson},
                                  {"window_points", fit.points},
                                  {"samples", per_sample}};
  auto out = o.open("ks_ee_summary.json");
  out << summary.dump(2) << '\n';
}

void write_diagnostics(Outputs& o, const std::vector<const SampleResult*>& ok, const ExperimentConfig& config) {
  {
    auto out = o.open("diagnostics.csv");
    out << "model,sample_seed,j_over_L,d_value,tag\n";
    const char* model = config.model == Model::syk ? "syk" : "xxz";
    for (const auto* s : ok)
      for (const auto& curve : s->overlaps)
        for (std::size_t j = 0; j < curve.values.size(); ++j)
          out << model << ',' << s->seed << ',' << num(curve.fraction(j)) << ',' << num(curve.values[j]) << ','
              << curve.tag << '\n';
  }
  if (config.model == Model::syk) {
    nlohmann::json audit = nlohmann::json::array();
    for (const auto* s : ok) {
      if (!s->has_degeneracy) continue;
      audit.push_back({{"sample_seed", s->seed},
                       {"levels", s->degeneracy.levels},
                       {"paired", s->degeneracy.paired},
                       {"fraction", s->degeneracy.fraction()},
                       {"relative_tolerance", 1e-10},
                       {"width", s->degeneracy.width}});
    }
    auto out = o.open("degeneracy.json");
    out << audit.dump(2) << '\n';
  }
}

std::vector<double> chosen_gaps(const UnfoldedGaps& g, GapSelection which) {
  if (which == GapSelection::all) return g.pooled();
  std::vector<double> out;
  for (const auto& row : g.gaps) {
    if (row.size() >= 2) {
      out.push_back(row[row.size() - 2]);
      out.push_back(row[row.size() - 1]);
    }
  }
  return out;
}

void write_rmt(Outputs& o, const std::vector<const SampleResult*>& ok, const ExperimentConfig& config,
               const std::vector<double>& times) {
  const auto method = unfolding_from_string(config.unfolding);
  const auto which = gap_selection_from_string(config.gaps);
  auto ensemble_at = [&](std::size_t ti) {
    SpectrumEnsemble e;
    for (const auto* s : ok)
      for (const auto& rec : s->records[ti]) e.spectra.push_back(rec.lambdas);
    e.metadata = {{"t", times[ti]}};
    return e;
  };

  nlohmann::json failures = nlohmann::json::array();
  {
    auto out = o.open("r_series.csv");
    out << "t,r_mean,r_stderr,n_triples\n";
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      try {
        const auto r = r_statistic(unfold(ensemble_at(ti), method, config.unfold_degree), which);
        out << num(times[ti]) << ',' << num(r.mean) << ',' << num(r.std_error) << ',' << r.count << '\n';
      } catch (const std::exception& ex) {
        out << num(times[ti]) << ",nan,nan,0\n";
        failures.push_back({{"t", times[ti]}, {"error", ex.what()}});
      }
    }
  }

  const double target = config.hist_time.value_or(times.back());
  std::size_t hist_index = 0;
  for (std::size_t ti = 1; ti < times.size(); ++ti)
    if (std::abs(times[ti] - target) < std::abs(times[hist_index] - target)) hist_index = ti;
  const BinSpec bins{config.hist_lo, config.hist_hi, config.hist_bins};
  nlohmann::json hist_meta;
  {
    auto out = o.open("ps_hist.csv");
    out << "bin_center,density\n";
    try {
      const auto gaps = chosen_gaps(unfold(ensemble_at(hist_index), method, config.unfold_degree), which);
      const auto h = spacing_histogram(gaps, bins);
      for (std::size_t b = 0; b < h.centers.size(); ++b) out << num(h.centers[b]) << ',' << num(h.density[b]) << '\n';
      hist_meta = {{"t", times[hist_index]}, {"gaps", h.total}, {"outside_range", h.outside}};
    } catch (const std::exception& ex) {
      hist_meta = {{"t", times[hist_index]}, {"error", ex.what()}};
    }
  }

  std::size_t spectra = 0;
  for (const auto* s : ok) spectra += s->selected.size();
  const nlohmann::json meta = {{"unfolding", config.unfolding},
                               {"gaps", config.gaps},
                               {"unfold_degree", config.unfold_degree},
                               {"state_selection", config.selection.to_string()},
                               {"spectra_per_time", spectra},
                               {"histogram", hist_meta},
                               {"bins", {bins.lo, bins.hi, bins.bins}},
                               {"reference", {{"gue_r", kGueMeanR}, {"poisson_r", kPoissonMeanR}}},
                               {"failures", failures}};
  auto out = o.open("rmt_meta.json");
  out << meta.dump(2) << '\n';
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config) {
  std::vector<int> indices(static_cast<std::size_t>(std::max(config.n_samples, 0)));
  std::iota(indices.begin(), indices.end(), 0);
  return run_experiment(config, indices);
}

RunManifest run_experiment(const ExperimentConfig& config, std::span<const int> sample_indices) {
  const auto violations = validate_config(config);
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw std::invalid_argument(msg);
  }
  const auto start = std::chrono::steady_clock::now();

  const int n = static_cast<int>(sample_indices.size());
  int workers = config.n_workers;
  if (workers == 0) {
    workers = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  }
  workers = std::max(1, std::min(workers, std::max(n, 1)));

  std::vector<SampleResult> results(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int slot = next++; slot < n; slot = next++) {
      const int index = sample_indices[static_cast<std::size_t>(slot)];
      try {
        results[static_cast<std::size_t>(slot)] = compute_sample(config, index);
      } catch (const std::exception& ex) {
        SampleResult failed;
        failed.index = index;
        failed.seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(index));
        failed.ok = false;
        failed.error = ex.what();
        results[static_cast<std::size_t>(slot)] = std::move(failed);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  // Aggregation order is by sample index, independent of scheduling.
  std::vector<const SampleResult*> ok;
  std::vector<const SampleResult*> ordered;
  for (const auto& r : results) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->index < b->index; });

  RunManifest m;
  m.config = config.to_json();
  m.code_version = code_version();
  m.workers = workers;
  for (const auto* r : ordered) {
    m.sample_indices.push_back(r->index);
    m.sample_seeds.push_back(r->seed);
    if (r->ok) {
      ok.push_back(r);
    } else {
      m.failed_seeds.push_back(r->seed);
    }
  }
  m.partial = !m.failed_seeds.empty();

  Outputs o(resolve_output_dir(config.output_dir));
  m.output_dir = o.dir().string();
  const auto times = config.times.points();
  if (!ok.empty()) {
    if (config.has_task("growth")) write_growth(o, ok, times);
    if (config.has_task("spectrum")) write_spectrum(o, ok);
    if (config.has_task("ks_ee")) write_ks_ee(o, ok, config);
    if (config.has_task("diagnostics")) write_diagnostics(o, ok, config);
    if (config.has_task("rmt")) write_rmt(o, ok, config, times);
  }
  if (config.save_couplings) {
    nlohmann::json all = nlohmann::json::array();
    for (const auto* r : ok) all.push_back(r->couplings);
    auto out = o.open("couplings.json");
    out << all.dump(1) << '\n';
  }
  if (m.partial) {
    nlohmann::json errors = nlohmann::json::array();
    for (const auto* r : ordered)
      if (!r->ok) errors.push_back({{"sample_index", r->index}, {"sample_seed", r->seed}, {"error", r->error}});
    auto out = o.open("failures.json");
    out << errors.dump(2) << '\n';
  }

  m.files = o.inventory();
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream(o.dir() / "manifest.json") << m.to_json().dump(2) << '\n';
  return m;
}

}  // namespace qlyap
