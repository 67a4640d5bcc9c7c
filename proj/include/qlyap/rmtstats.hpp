#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace qlyap {

/// Sorted level sequences of equal length, one per (sample, reference state).
struct SpectrumEnsemble {
  std::vector<std::vector<double>> spectra;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t size() const { return spectra.size(); }
  std::size_t levels() const { return spectra.empty() ? 0 : spectra.front().size(); }
  /// Throws std::invalid_argument unless every spectrum is sorted and all lengths agree.
  void validate() const;
};

enum class UnfoldingMethod { standard, fixed_i };
std::string to_string(UnfoldingMethod m);
UnfoldingMethod unfolding_from_string(const std::string& s);

/// Normalized gaps kept per spectrum so that gap ratios can be formed afterwards.
struct UnfoldedGaps {
  UnfoldingMethod method = UnfoldingMethod::fixed_i;
  std::vector<std::vector<double>> gaps;

  std::vector<double> pooled() const;
  double mean() const;
};

/// Least-squares polynomial in Legendre form on the scaled variable u in [-1, 1].
struct PolynomialFit {
  double lo = 0.0, hi = 1.0;
  std::vector<double> coefficients;
  double condition = 0.0;

  double operator()(double x) const;
};

/// Fit the cumulative level density (mid-rank staircase of the pooled levels,
/// divided by the number of spectra). Throws std::runtime_error carrying the design
/// matrix condition number when the fit is ill-conditioned.
PolynomialFit fit_staircase(const SpectrumEnsemble& ensemble, int degree);

/// Condition numbers above this abort the polynomial unfolding.
inline constexpr double kMaxFitCondition = 1e10;

/// Unfolded level = fitted staircase at each exponent; gaps rescaled to global mean 1.
UnfoldedGaps unfold_standard(const SpectrumEnsemble& ensemble, int degree = 10);

/// g_i / <g_i>, the mean taken over spectra at fixed gap index i.
UnfoldedGaps unfold_fixed_i(const SpectrumEnsemble& ensemble);

UnfoldedGaps unfold(const SpectrumEnsemble& ensemble, UnfoldingMethod method, int degree = 10);

struct BinSpec {
  double lo = 0.0;
  double hi = 4.0;
  int bins = 40;
  double width() const { return (hi - lo) / bins; }
};

struct Histogram {
  BinSpec spec;
  std::vector<double> centers;
  std::vector<double> density;  // counts / (total * width)
  std::size_t total = 0;
  std::size_t outside = 0;  // samples outside [lo, hi)
};

Histogram spacing_histogram(std::span<const double> gaps, const BinSpec& spec);

/// Wigner surmise for GUE, (32/pi^2) s^2 exp(-4 s^2 / pi).
double gue_surmise(double s);
double gue_surmise_cdf(double s);
double poisson_density(double s);
double poisson_cdf(double s);

/// Large-matrix reference values of <r>.
inline constexpr double kGueMeanR = 0.5996;
inline constexpr double kPoissonMeanR = 0.38629436111989061;  // 2 ln 2 - 1

enum class GapSelection { all, largest_three };
std::string to_string(GapSelection g);
GapSelection gap_selection_from_string(const std::string& s);

struct RStatistic {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// r = min(g_{i-1}, g_i) / max(g_{i-1}, g_i) over consecutive gap pairs. With
/// `largest_three` only the two gaps between the three largest levels are used.
/// `edge_exclude` drops that many gap pairs at each end (ignored for largest_three).
/// Pairs with both gaps zero are skipped.
RStatistic r_statistic(const UnfoldedGaps& gaps, GapSelection which, std::size_t edge_exclude = 0);
RStatistic r_statistic(const SpectrumEnsemble& ensemble, GapSelection which, std::size_t edge_exclude = 0);

enum class ReferenceKind { gue, poisson };
ReferenceKind reference_kind_from_string(const std::string& s);

/// GUE: Hermitian matrices with unit-variance real diagonal and unit-variance complex
/// off-diagonal entries, eigenvalues ascending. Poisson: cumulative sums of Exp(1).
SpectrumEnsemble reference_ensembles(ReferenceKind kind, int dim, int count, std::uint64_t seed);

}  // namespace qlyap
