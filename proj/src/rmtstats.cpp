#include "qlyap/rmtstats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qlyap/rng.hpp"

namespace qlyap {

void SpectrumEnsemble::validate() const {
  for (const auto& s : spectra) {
    if (s.size() != levels()) {
      throw std::invalid_argument("SpectrumEnsemble: spectra have different lengths");
    }
    if (!std::is_sorted(s.begin(), s.end())) {
      throw std::invalid_argument("SpectrumEnsemble: spectrum is not sorted ascending");
    }
  }
}

std::string to_string(UnfoldingMethod m) { return m == UnfoldingMethod::standard ? "standard" : "fixed_i"; }

UnfoldingMethod unfolding_from_string(const std::string& s) {
  if (s == "standard") return UnfoldingMethod::standard;
  if (s == "fixed_i") return UnfoldingMethod::fixed_i;
  throw std::invalid_argument("unknown unfolding method '" + s + "'");
}

std::vector<double> UnfoldedGaps::pooled() const {
  std::vector<double> out;
  for (const auto& g : gaps) out.insert(out.end(), g.begin(), g.end());
  return out;
}

double UnfoldedGaps::mean() const {
  const auto all = pooled();
  return all.empty() ? 0.0 : std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size());
}

namespace {

// Legendre polynomials P_0..P_degree at u.
void legendre_row(double u, int degree, double* out) {
  out[0] = 1.0;
  if (degree >= 1) out[1] = u;
  for (int k = 2; k <= degree; ++k) out[k] = ((2.0 * k - 1.0) * u * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
}

}  // namespace

double PolynomialFit::operator()(double x) const {
  const int degree = static_cast<int>(coefficients.size()) - 1;
  const double u = 2.0 * (x - lo) / (hi - lo) - 1.0;
  std::vector<double> row(coefficients.size());
  legendre_row(u, degree, row.data());
  double v = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) v += coefficients[k] * row[k];
  return v;
}

PolynomialFit fit_staircase(const SpectrumEnsemble& ensemble, int degree) {
  ensemble.validate();
  if (degree < 1) {
    throw std::invalid_argument("fit_staircase: degree must be >= 1");
  }
  std::vector<double> pooled;
  for (const auto& s : ensemble.spectra) pooled.insert(pooled.end(), s.begin(), s.end());
  std::sort(pooled.begin(), pooled.end());
  const auto m = static_cast<Eigen::Index>(pooled.size());

  PolynomialFit fit;
  if (m == 0) {
    throw std::runtime_error("fit_staircase: empty ensemble");
  }
  fit.lo = pooled.front();
  fit.hi = pooled.back();
  std::ostringstream why;
  if (!(fit.hi > fit.lo)) {
    throw std::runtime_error("fit_staircase: all levels coincide, density support is a point");
  }

  // Mid-rank staircase so that tied levels share one staircase value.
  Eigen::VectorXd y(m);
  const double spectra = static_cast<double>(ensemble.size());
  for (Eigen::Index a = 0; a < m;) {
    Eigen::Index b = a;
    while (b + 1 < m && pooled[b + 1] == pooled[a]) ++b;
    const double mid_rank = 0.5 * static_cast<double>(a + b) + 0.5;
    for (Eigen::Index c = a; c <= b; ++c) y(c) = mid_rank / spectra;
    a = b + 1;
  }

  Eigen::MatrixXd design(m, degree + 1);
  std::vector<double> row(static_cast<std::size_t>(degree + 1));
  for (Eigen::Index a = 0; a < m; ++a) {
    legendre_row(2.0 * (pooled[a] - fit.lo) / (fit.hi - fit.lo) - 1.0, degree, row.data());
    for (int k = 0; k <= degree; ++k) design(a, k) = row[k];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  fit.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (m <= degree || !(fit.condition < kMaxFitCondition)) {
    why << "fit_staircase: ill-conditioned degree-" << degree << " fit on " << m
        << " levels (condition number " << fit.condition << ")";
    throw std::runtime_error(why.str());
  }
  const Eigen::VectorXd coeffs = svd.solve(y);
  fit.coefficients.assign(coeffs.data(), coeffs.data() + coeffs.size());
  return fit;
}

UnfoldedGaps unfold_standard(const SpectrumEnsemble& ensemble, int degree) {
  const PolynomialFit fit = fit_staircase(ensemble, degree);
  UnfoldedGaps out{UnfoldingMethod::standard, {}};
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : ensemble.spectra) {
    std::vector<double> g;
    for (std::size_t i = 1; i < s.size(); ++i) {
      g.push_back(fit(s[i]) - fit(s[i - 1]));
      sum += g.back();
      ++count;
    }
    out.gaps.push_back(std::move(g));
  }
  const double mean = count ? sum / static_cast<double>(count) : 0.0;
  if (!(mean > 0.0)) {
    throw std::runtime_error("unfold_standard: fitted staircase is not increasing on average");
  }
  for (auto& g : out.gaps)
    for (double& x : g) x /= mean;
  return out;
}

UnfoldedGaps unfold_fixed_i(const SpectrumEnsemble& ensemble) {
  ensemble.validate();
  if (ensemble.size() < 2) {
    throw std::invalid_argument("unfold_fixed_i: need at least two spectra");
  }
  const std::size_t n_gaps = ensemble.levels() > 0 ? ensemble.levels() - 1 : 0;
  std::vector<double> mean(n_gaps, 0.0);
  for (const auto& s : ensemble.spectra)
    for (std::size_t i = 0; i < n_gaps; ++i) mean[i] += s[i + 1] - s[i];
  for (std::size_t i = 0; i < n_gaps; ++i) {
    mean[i] /= static_cast<double>(ensemble.size());
    if (!(mean[i] > 0.0)) {
      throw std::runtime_error("unfold_fixed_i: mean gap at index " + std::to_string(i + 1) +
                               " is zero (degenerate ensemble)");
    }
  }
  UnfoldedGaps out{UnfoldingMethod::fixed_i, {}};
  for (const auto& s : ensemble.spectra) {
    std::vector<double> g(n_gaps);
    for (std::size_t i = 0; i < n_gaps; ++i) g[i] = (s[i + 1] - s[i]) / mean[i];
    out.gaps.push_back(std::move(g));
  }
  return out;
}

UnfoldedGaps unfold(const SpectrumEnsemble& ensemble, UnfoldingMethod method, int degree) {
  return method == UnfoldingMethod::standard ? unfold_standard(ensemble, degree) : unfold_fixed_i(ensemble);
}

Histogram spacing_histogram(std::span<const double> gaps, const BinSpec& spec) {
  if (gaps.empty()) {
    throw std::invalid_argument("spacing_histogram: no gaps");
  }
  if (spec.bins < 1 || !(spec.hi > spec.lo)) {
    throw std::invalid_argument("spacing_histogram: invalid bin specification");
  }
  Histogram h;
  h.spec = spec;
  h.total = gaps.size();
  std::vector<std::size_t> counts(static_cast<std::size_t>(spec.bins), 0);
  const double w = spec.width();
  for (double g : gaps) {
    if (g < spec.lo || g >= spec.hi) {
      ++h.outside;
      continue;
    }
    auto b = static_cast<std::size_t>((g - spec.lo) / w);
    counts[std::min(b, counts.size() - 1)]++;
  }
  for (int b = 0; b < spec.bins; ++b) {
    h.centers.push_back(spec.lo + (b + 0.5) * w);
    h.density.push_back(static_cast<double>(counts[static_cast<std::size_t>(b)]) /
                        (static_cast<double>(h.total) * w));
  }
  return h;
}

double gue_surmise(double s) {
  using std::numbers::pi;
  return s < 0.0 ? 0.0 : (32.0 / (pi * pi)) * s * s * std::exp(-4.0 * s * s / pi);
}

double gue_surmise_cdf(double s) {
  using std::numbers::pi;
  if (s <= 0.0) return 0.0;
  return std::erf(2.0 * s / std::sqrt(pi)) - (4.0 * s / pi) * std::exp(-4.0 * s * s / pi);
}

double poisson_density(double s) { return s < 0.0 ? 0.0 : std::exp(-s); }
double poisson_cdf(double s) { return s <= 0.0 ? 0.0 : 1.0 - std::exp(-s); }

std::string to_string(GapSelection g) { return g == GapSelection::all ? "all" : "largest_three"; }

GapSelection gap_selection_from_string(const std::string& s) {
  if (s == "all") return GapSelection::all;
  if (s == "largest_three") return GapSelection::largest_three;
  throw std::invalid_argument("unknown gap selection '" + s + "'");
}

namespace {

RStatistic r_over_gap_rows(const std::vector<std::vector<double>>& rows, GapSelection which,
                           std::size_t edge_exclude) {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  auto add = [&](double a, double b) {
    const double hi = std::max(a, b);
    if (!(hi > 0.0)) return;
    const double r = std::min(a, b) / hi;
    sum += r;
    sum_sq += r * r;
    ++count;
  };
  for (const auto& g : rows) {
    if (g.size() < 2) continue;
    if (which == GapSelection::largest_three) {
      add(g[g.size() - 2], g[g.size() - 1]);
      continue;
    }
    for (std::size_t i = 1 + edge_exclude; i + edge_exclude < g.size(); ++i) add(g[i - 1], g[i]);
  }
  RStatistic r;
  r.count = count;
  if (count == 0) return r;
  r.mean = sum / static_cast<double>(count);
  if (count > 1) {
    const double var = std::max(0.0, (sum_sq - count * r.mean * r.mean) / static_cast<double>(count - 1));
    r.std_error = std::sqrt(var / static_cast<double>(count));
  }
  return r;
}

}  // namespace

RStatistic r_statistic(const UnfoldedGaps& gaps, GapSelection which, std::size_t edge_exclude) {
  return r_over_gap_rows(gaps.gaps, which, edge_exclude);
}

RStatistic r_statistic(const SpectrumEnsemble& ensemble, GapSelection which, std::size_t edge_exclude) {
  ensemble.validate();
  std::vector<std::vector<double>> rows;
  for (const auto& s : ensemble.spectra) {
    if (s.size() < 3) {
      throw std::invalid_argument("r_statistic: spectra need at least three levels");
    }
    std::vector<double> g;
    for (std::size_t i = 1; i < s.size(); ++i) g.push_back(s[i] - s[i - 1]);
    rows.push_back(std::move(g));
  }
  return r_over_gap_rows(rows, which, edge_exclude);
}

ReferenceKind reference_kind_from_string(const std::string& s) {
  if (s == "gue" || s == "GUE") return ReferenceKind::gue;
  if (s == "poisson" || s == "Poisson") return ReferenceKind::poisson;
  throw std::invalid_argument("unknown reference ensemble '" + s + "' (expected GUE or Poisson)");
}

SpectrumEnsemble reference_ensembles(ReferenceKind kind, int dim, int count, std::uint64_t seed) {
  if (dim < 2) {
    throw std::invalid_argument("reference_ensembles: dim must be >= 2");
  }
  if (count < 1) {
    throw std::invalid_argument("reference_ensembles: count must be positive");
  }
  SpectrumEnsemble ens;
  ens.metadata = {{"kind", kind == ReferenceKind::gue ? "GUE" : "Poisson"},
                  {"dim", dim},
                  {"count", count},
                  {"seed", seed}};
  ens.spectra.reserve(static_cast<std::size_t>(count));
  const double off_sigma = std::sqrt(0.5);
  Eigen::MatrixXcd h(dim, dim);
  for (int c = 0; c < count; ++c) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    std::vector<double> levels(static_cast<std::size_t>(dim));
    if (kind == ReferenceKind::gue) {
      for (int i = 0; i < dim; ++i) {
        h(i, i) = rng.normal();
        for (int j = i + 1; j < dim; ++j) {
          const double re = off_sigma * rng.normal();
          const double im = off_sigma * rng.normal();
          h(i, j) = {re, im};
          h(j, i) = {re, -im};
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
      for (int i = 0; i < dim; ++i) levels[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    } else {
      double x = 0.0;
      for (int i = 0; i < dim; ++i) {
        x += rng.exponential();
        levels[static_cast<std::size_t>(i)] = x;
      }
    }
    ens.spectra.push_back(std::move(levels));
  }
  return ens;
}

}  // namespace qlyap
