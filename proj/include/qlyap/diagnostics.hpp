#pragma once

#include <string>
#include <vector>

#include "qlyap/lyapunov.hpp"

namespace qlyap {

/// Cumulative overlap d(j) for j = 0..L-1; value(j) includes eigenstates 0..j.
struct OverlapCurve {
  std::string tag;  // "d1", "d2" or "d_xxz"
  std::vector<double> values;

  double at(std::size_t j) const { return values.at(j); }
  /// (j + 1) / L for plotting against the fraction of the spectrum covered.
  double fraction(std::size_t j) const { return static_cast<double>(j + 1) / static_cast<double>(values.size()); }
};

/// d1(j) = (2/N) sum_k sum_{i<=j} |<E_i|psi_k|E_0>|^2.
OverlapCurve d1_curve(const EigenSystem& eig, const MajoranaBasis& basis);
/// d2(j) = (4/N) sum_k sum_{i<=j} |<E_i|psi_k psi_{k+1}|E_0>|^2, with psi_{N+1} = psi_1.
OverlapCurve d2_curve(const EigenSystem& eig, const MajoranaBasis& basis);
double d1(const EigenSystem& eig, const MajoranaBasis& basis, std::size_t j);
double d2(const EigenSystem& eig, const MajoranaBasis& basis, std::size_t j);

/// d(j) = (1/N_site) sum_k sum_{i<=j} |<E_{i,+1}|sigma+_k|E_{0,0}>|^2 over the sector
/// reached from S_z = 0 by one raising operator.
OverlapCurve d_xxz_curve(const XxzLyapunov& system);
double d_xxz(const XxzLyapunov& system, std::size_t j);

struct DegeneracyReport {
  int levels = 0;
  int paired = 0;      // levels with a neighbour within the tolerance
  double width = 0.0;  // E_max - E_min
  double tolerance = 0.0;
  double fraction() const { return levels == 0 ? 0.0 : static_cast<double>(paired) / levels; }
};

/// Counts eigenvalues with a partner within relative_tol * spectral width.
DegeneracyReport degeneracy_audit(const EigenSystem& eig, double relative_tol);

}  // namespace qlyap
