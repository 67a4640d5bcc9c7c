// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance [--output DIR] [--only N[,N...]]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qlyap/diagnostics.hpp"
#include "qlyap/entropy.hpp"
#include "qlyap/harness.hpp"
#include "qlyap/lyapunov.hpp"
#include "qlyap/rmtstats.hpp"
#include "qlyap/rng.hpp"

using namespace qlyap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path g_output = fs::temp_directory_path() / "qlyap_acceptance";

ExperimentConfig base(Model model, int size, int samples) {
  ExperimentConfig c;
  c.model = model;
  c.size = size;
  c.n_samples = samples;
  c.master_seed = 20240601;
  c.n_workers = 1;
  c.save_couplings = false;
  return c;
}

std::vector<SampleResult> samples_of(const ExperimentConfig& c) {
  std::vector<SampleResult> out;
  for (int i = 0; i < c.n_samples; ++i) out.push_back(compute_sample(c, i));
  return out;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double min_eig_ratio(const ComplexMatrix& l) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(l, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff();
}

// Late-time value of (1/n) tr L averaged over eigenstates, samples and t in [50, 100].
double otoc_plateau(ExperimentConfig c) {
  c.tasks = {"growth"};
  c.selection = StateSelection::parse("all");
  c.times.explicit_times = {50.0, 75.0, 100.0};
  std::vector<double> v;
  for (const auto& s : samples_of(c))
    for (const auto& a : s.averaged) v.push_back(a.otoc_ratio);
  return mean(v);
}

Outcome syk_plateau() {
  const double p = otoc_plateau([] {
    auto c = base(Model::syk, 12, 50);
    c.k_scale = 0.01;
    return c;
  }());
  const double dev = std::abs(p - 6.0) / 6.0;
  return {dev < 0.15, fmt("N=12 K=0.01, 50 samples: plateau %.4f vs N/2=6 (rel. dev %.3f, limit 0.15)", p, dev)};
}

Outcome xxz_plateau() {
  const double p = otoc_plateau([] {
    auto c = base(Model::xxz, 8, 100);
    c.w_scale = 0.5;
    return c;
  }());
  const double dev = std::abs(p - 5.0) / 5.0;
  return {dev < 0.10, fmt("N_site=8 W=0.5, 100 samples: plateau %.4f vs 1+N_site/2=5 (rel. dev %.3f, limit 0.10)",
                          p, dev)};
}

Outcome identity_at_zero() {
  double worst_syk = 0, worst_xxz = 0;
  const auto basis = jordan_wigner_majoranas(10);
  for (int s = 0; s < 20; ++s) {
    const auto seed = derive_seed(3, s);
    const SykLyapunov syk(basis, diagonalize(build_syk(draw_syk_couplings(10, 1.0, 0.01, seed), basis)));
    for (int st = 0; st < syk.n_states(); ++st)
      worst_syk = std::max(worst_syk, max_abs(syk.l_matrix(st, 0.0).entries - ComplexMatrix::Identity(10, 10)));
    const XxzLyapunov xxz(diagonalize_xxz_sectors(draw_xxz_fields(8, 0.5, seed)));
    for (int st = 0; st < xxz.n_states(); ++st)
      worst_xxz = std::max(worst_xxz, max_abs(xxz.l_matrix(st, 0.0).entries - ComplexMatrix::Identity(8, 8)));
  }
  return {worst_syk < 1e-10 && worst_xxz < 1e-10,
          fmt("20 samples each, all eigenstates: max |L(0)-1| SYK %.2e, XXZ %.2e (limit 1e-10)", worst_syk, worst_xxz)};
}

Outcome psd_sweep() {
  TimeGrid grid;
  grid.count = 10;
  const auto times = grid.points();
  double worst = INFINITY;
  const auto basis = jordan_wigner_majoranas(12);
  for (int s = 0; s < 10; ++s) {
    const auto seed = derive_seed(4, s);
    const SykLyapunov syk(basis, diagonalize(build_syk(draw_syk_couplings(12, 1.0, 0.01, seed), basis)));
    const XxzLyapunov xxz(diagonalize_xxz_sectors(draw_xxz_fields(8, 0.5, seed)));
    std::vector<int> all_syk(syk.n_states()), all_xxz(xxz.n_states());
    std::iota(all_syk.begin(), all_syk.end(), 0);
    std::iota(all_xxz.begin(), all_xxz.end(), 0);
    for (double t : times) {
      for (const auto& l : syk.l_matrices(all_syk, t)) worst = std::min(worst, min_eig_ratio(l.entries));
      for (const auto& l : xxz.l_matrices(all_xxz, t)) worst = std::min(worst, min_eig_ratio(l.entries));
    }
  }
  return {worst >= -1e-10,
          fmt("SYK N=12 and XXZ N_site=8, 10 samples x 10 times, all eigenstates: min eig/max eig = %.3e "
              "(limit -1e-10)",
              worst)};
}

Outcome oracle_equivalence() {
  double evo = 0, lsyk = 0, lxxz = 0;
  std::vector<ComplexMatrix> hams;
  const auto b12 = jordan_wigner_majoranas(12);
  hams.push_back(build_syk(draw_syk_couplings(12, 1.0, 0.01, 5), b12));
  const SpinBasis s6(6);
  hams.push_back(build_xxz(draw_xxz_fields(6, 0.5, 5), s6));
  ComplexMatrix r = oracle::random_hermitian(64, 5);
  r *= 5.0 / diagonalize(r).energies.cwiseAbs().maxCoeff();
  hams.push_back(r);
  for (const auto& h : hams) {
    const auto eig = diagonalize(h);
    const ComplexMatrix o = oracle::random_hermitian(static_cast<int>(h.rows()), 6);
    ComplexVector v = ComplexVector::Random(h.rows());
    v.normalize();
    for (double t : {0.1, 0.5, 1.0}) {
      const ComplexMatrix u = oracle::taylor_propagator(h, t, 40);
      evo = std::max(evo, max_abs(heisenberg(o, eig, t) - u.adjoint() * o * u));
      evo = std::max(evo, (evolve_state(v, eig, t) - u * v).cwiseAbs().maxCoeff());
    }
  }
  const auto b8 = jordan_wigner_majoranas(8);
  for (int s = 0; s < 5; ++s) {
    const ComplexMatrix h = build_syk(draw_syk_couplings(8, 1.0, 0.01, derive_seed(5, s)), b8);
    const auto eig = diagonalize(h);
    const SykLyapunov engine(b8, eig);
    const int mid = static_cast<int>(eig.dim() / 2);
    lsyk = std::max(lsyk, max_abs(engine.l_matrix(mid, 1.0).entries -
                                  oracle::syk_l_direct(b8, h, eig.vectors.col(mid), 1.0)));

    const auto fields = draw_xxz_fields(6, 0.5, derive_seed(5, s));
    const XxzLyapunov xxz(diagonalize_xxz_sectors(fields));
    const auto& sec = xxz.sectors();
    const int st = static_cast<int>(xxz.n_states() / 2);
    ComplexVector phi = ComplexVector::Zero(s6.dim());
    for (std::size_t a = 0; a < sec.zero_mask.size(); ++a) phi(sec.zero_mask[a]) = sec.zero.vectors(a, st);
    lxxz = std::max(lxxz, max_abs(xxz.l_matrix(st, 1.0).entries -
                                  oracle::xxz_l_direct(s6, build_xxz(fields, s6), phi, 1.0)));
  }
  return {evo < 1e-8 && lsyk < 1e-10 && lxxz < 1e-10,
          fmt("evolution vs 40-term Taylor (dim 64, t<=1): %.2e (limit 1e-8); L vs direct contraction: "
              "SYK N=8 %.2e, XXZ N_site=6 %.2e (limit 1e-10)",
              evo, lsyk, lxxz)};
}

Outcome degeneracy() {
  double f10 = 1.0, f16 = 0.0;
  const auto b10 = jordan_wigner_majoranas(10);
  for (int s = 0; s < 5; ++s) {
    const auto eig = diagonalize(build_syk(draw_syk_couplings(10, 1.0, 0.0, derive_seed(6, s)), b10));
    f10 = std::min(f10, degeneracy_audit(eig, 1e-10).fraction());
  }
  const auto b16 = jordan_wigner_majoranas(16);
  for (int s = 0; s < 2; ++s) {
    const auto eig = diagonalize(build_syk(draw_syk_couplings(16, 1.0, 0.0, derive_seed(6, s)), b16));
    f16 = std::max(f16, degeneracy_audit(eig, 1e-10).fraction());
  }
  return {f10 == 1.0 && f16 < 1.0,
          fmt("K=0, tol 1e-10 x width: N=10 min paired fraction %.3f (need 1), N=16 max %.3f (need < 1)", f10, f16)};
}

Outcome syk_rmt() {
  const double gue = r_statistic(reference_ensembles(ReferenceKind::gue, 50, 10000, 77), GapSelection::all, 12).mean;

  auto c = base(Model::syk, 12, 10);
  c.k_scale = 0.01;
  c.tasks = {"growth", "rmt"};
  c.selection = StateSelection::parse("all");
  const auto times = c.times.points();  // 0.02 .. 100, geometric
  const auto samples = samples_of(c);

  // Pre-plateau window: (1/n) tr L between 10% and 90% of its rise to the late-time value.
  std::vector<double> ratio(times.size(), 0.0);
  for (const auto& s : samples)
    for (std::size_t ti = 0; ti < times.size(); ++ti) ratio[ti] += s.averaged[ti].otoc_ratio / samples.size();
  double late = 0;
  int n_late = 0;
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    if (times[ti] >= 50.0) late += ratio[ti], ++n_late;
  late /= n_late;
  std::vector<double> window;
  double r_sum = 0;
  std::size_t r_count = 0, spectra = 0;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double rise = (ratio[ti] - 1.0) / (late - 1.0);
    if (rise < 0.1 || rise > 0.9) continue;
    window.push_back(times[ti]);
    SpectrumEnsemble e;
    for (const auto& s : samples)
      for (const auto& rec : s.records[ti]) e.spectra.push_back(rec.lambdas);
    spectra = e.size();
    const auto r = r_statistic(unfold_fixed_i(e), GapSelection::all);
    r_sum += r.mean * r.count;
    r_count += r.count;
  }
  const double r_pre = r_count ? r_sum / r_count : NAN;

  auto k = base(Model::syk, 12, 10);
  k.k_scale = 100.0;
  k.tasks = {"rmt"};
  k.times.explicit_times = {100.0};
  SpectrumEnsemble e;
  for (const auto& s : samples_of(k))
    for (const auto& rec : s.records[0]) e.spectra.push_back(rec.lambdas);
  const double r_k = r_statistic(unfold_fixed_i(e), GapSelection::all).mean;

  const bool ok = !window.empty() && spectra >= 500 && std::abs(r_pre - gue) < 0.04 && r_k < 0.5;
  return {ok, fmt("GUE oracle <r>=%.4f; K=0.01 fixed-i, %zu spectra per time, t in [%.3g, %.3g] (%zu times): "
                  "<r>=%.4f (|diff| %.4f, limit 0.04); K=100 t=100: <r>=%.4f (need < 0.5)",
                  gue, spectra, window.empty() ? NAN : window.front(), window.empty() ? NAN : window.back(),
                  window.size(), r_pre, std::abs(r_pre - gue), r_k)};
}

Outcome xxz_phases() {
  auto r_at = [](double w) {
    auto c = base(Model::xxz, 8, 2000);
    c.w_scale = w;
    c.tasks = {"rmt"};
    c.selection = StateSelection::parse("window(45, 55)");
    c.times.explicit_times = {10.0};
    SpectrumEnsemble e;
    for (const auto& s : samples_of(c))
      for (const auto& rec : s.records[0]) e.spectra.push_back(rec.lambdas);
    const auto r = r_statistic(unfold_fixed_i(e), GapSelection::largest_three);
    return std::pair{r, e.size()};
  };
  const auto [r05, n05] = r_at(0.5);
  const auto [r4, n4] = r_at(4.0);
  auto closer_gue = [](double r) { return std::abs(r - kGueMeanR) < std::abs(r - kPoissonMeanR); };
  const bool ok = n05 >= 500 && n4 >= 500 && closer_gue(r05.mean) && !closer_gue(r4.mean);
  return {ok, fmt("window(45,55), largest-three gaps, t=10: W=0.5 <r>=%.4f+-%.4f (%zu spectra, closer to GUE: "
                  "%s); W=4 <r>=%.4f+-%.4f (%zu spectra, closer to Poisson: %s)",
                  r05.mean, r05.std_error, n05, closer_gue(r05.mean) ? "yes" : "no", r4.mean, r4.std_error, n4,
                  closer_gue(r4.mean) ? "no" : "yes")};
}

Outcome ks_vs_ee() {
  auto c = base(Model::syk, 12, 20);
  c.k_scale = 0.01;
  c.tasks = {"ks_ee"};
  c.subsystem_modes = 3;
  c.times.explicit_times.clear();
  for (int i = 0; i <= 10; ++i) c.times.explicit_times.push_back(1.0 + 0.1 * i);
  const auto samples = samples_of(c);
  const auto& times = samples.front().ks_ee.entropy.times;
  std::vector<double> see(times.size(), 0.0), hks(times.size(), 0.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < times.size(); ++i) {
      see[i] += s.ks_ee.entropy.normalized[i] / samples.size();
      hks[i] += s.ks_ee.hks_t[i] / samples.size();
    }
  const auto fit = fit_constant_shift(times, see, hks, 1.0, 2.0);
  return {fit.pearson > 0.95, fmt("N=12 K=0.01 |A|=3, 20 samples, t in [1,2]: shift %.4f, Pearson %.5f (need > "
                                  "0.95)",
                                  fit.shift, fit.pearson)};
}

Outcome reference_oracles() {
  const auto p = reference_ensembles(ReferenceKind::poisson, 102, 1000, 10);
  const auto rp = r_statistic(p, GapSelection::all);

  const auto g = reference_ensembles(ReferenceKind::gue, 2, 100000, 11);
  std::vector<double> s;
  for (const auto& sp : g.spectra) s.push_back(sp[1] - sp[0]);
  const double m = mean(s);
  for (double& x : s) x /= m;
  const BinSpec bins{0.0, 3.0, 12};
  const auto h = spacing_histogram(s, bins);
  double sup = 0, peak = 0;
  for (int b = 0; b < bins.bins; ++b) {
    const double lo = bins.lo + b * bins.width();
    const double expected = (gue_surmise_cdf(lo + bins.width()) - gue_surmise_cdf(lo)) / bins.width();
    sup = std::max(sup, std::abs(h.density[b] - expected));
  }
  for (double x = 0; x < 3; x += 1e-4) peak = std::max(peak, gue_surmise(x));
  const bool ok = rp.count == 100000 && std::abs(rp.mean - 0.3863) <= 0.003 && sup <= 0.02 * peak;
  return {ok, fmt("Poisson <r>=%.4f over %zu triples (target 0.3863 +- 0.003); GUE dim-2 spacing, 1e5 draws, bin "
                  "0.25: sup|P-surmise| = %.4f = %.2f%% of peak (limit 2%%)",
                  rp.mean, rp.count, sup, 100 * sup / peak)};
}

Outcome completeness() {
  double e1 = 0, e2 = 0, ex = 0;
  const auto b = jordan_wigner_majoranas(12);
  for (int s = 0; s < 10; ++s) {
    const auto seed = derive_seed(11, s);
    const auto eig = diagonalize(build_syk(draw_syk_couplings(12, 1.0, 0.01, seed), b));
    e1 = std::max(e1, std::abs(d1_curve(eig, b).values.back() - 1.0));
    e2 = std::max(e2, std::abs(d2_curve(eig, b).values.back() - 1.0));
    const XxzLyapunov xxz(diagonalize_xxz_sectors(draw_xxz_fields(8, 0.5, seed)));
    ex = std::max(ex, std::abs(d_xxz_curve(xxz).values.back() - 0.5));
  }
  return {e1 < 1e-8 && e2 < 1e-8 && ex < 1e-8,
          fmt("10 samples: |d1(L-1)-1| %.2e, |d2(L-1)-1| %.2e, |d_xxz(full)-1/2| %.2e (limit 1e-8)", e1, e2, ex)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  std::vector<ExperimentConfig> configs;
  auto syk = base(Model::syk, 8, 12);
  syk.tasks = {"growth", "spectrum", "ks_ee", "diagnostics", "rmt"};
  syk.times.explicit_times = {0.05, 0.5, 1.0, 1.5, 2.0, 10.0};
  configs.push_back(syk);
  auto xxz = base(Model::xxz, 8, 12);
  xxz.w_scale = 0.5;
  xxz.tasks = {"growth", "spectrum", "diagnostics", "rmt"};
  xxz.times.count = 8;
  xxz.selection = StateSelection::parse("window(45, 55)");
  xxz.gaps = "largest_three";
  configs.push_back(xxz);

  std::size_t compared = 0;
  std::vector<std::string> mismatched;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto c = configs[i];
    std::vector<RunManifest> runs;
    for (int workers : {1, 8}) {
      c.n_workers = workers;
      c.output_dir = (g_output / ("determinism_" + std::to_string(i) + "_w" + std::to_string(workers))).string();
      fs::remove_all(c.output_dir);
      runs.push_back(run_experiment(c));
    }
    for (const auto& f : runs[0].files) {
      if (f.name.size() < 4 || f.name.substr(f.name.size() - 4) != ".csv") continue;
      ++compared;
      if (slurp(fs::path(runs[0].output_dir) / f.name) != slurp(fs::path(runs[1].output_dir) / f.name))
        mismatched.push_back(f.name);
    }
    if (runs[1].workers != 8) mismatched.push_back("(8-worker run used " + std::to_string(runs[1].workers) + ")");
  }
  std::string bad;
  for (const auto& m : mismatched) bad += " " + m;
  return {mismatched.empty() && compared >= 8,
          fmt("SYK and XXZ runs, 1 vs 8 workers: %zu CSV files compared, %zu differ%s", compared, mismatched.size(),
              bad.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--output" && i + 1 < argc) {
      g_output = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else {
      std::cerr << "usage: acceptance [--output DIR] [--only N[,N...]]\n";
      return 2;
    }
  }
  fs::create_directories(g_output);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"SYK OTOC plateau", syk_plateau},
      {"XXZ OTOC plateau", xxz_plateau},
      {"L(0) identity", identity_at_zero},
      {"L positive semidefinite", psd_sweep},
      {"oracle equivalence", oracle_equivalence},
      {"SYK degeneracy", degeneracy},
      {"SYK r-statistic", syk_rmt},
      {"XXZ phase discrimination", xxz_phases},
      {"KS entropy vs entanglement", ks_vs_ee},
      {"reference oracles", reference_oracles},
      {"completeness sums", completeness},
      {"worker determinism", determinism},
  };

  std::ofstream report(g_output / "acceptance_report.txt");
  auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    report << line << '\n';
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    emit(std::string(o.pass ? "PASS" : "FAIL") + " [" + std::to_string(id) + "] " + criteria[i].first + ": " +
         o.detail + " (" + fmt("%.1f", secs) + " s)");
  }
  emit(failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed");
  return failed == 0 ? 0 : 1;
}
