#include "qlyap/diagnostics.hpp"

#include <cmath>

namespace qlyap {

namespace {

// overlap weights w_i = sum_k |<E_i| O_k |E_0>|^2 accumulated into a normalized running sum.
OverlapCurve cumulative(std::string tag, const RealVector& weights, double scale) {
  OverlapCurve curve{std::move(tag), {}};
  curve.values.reserve(static_cast<std::size_t>(weights.size()));
  double running = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    running += scale * weights(i);
    curve.values.push_back(running);
  }
  return curve;
}

}  // namespace

OverlapCurve d1_curve(const EigenSystem& eig, const MajoranaBasis& basis) {
  const int n = basis.n_majorana();
  const ComplexVector ground = eig.vectors.col(0);
  RealVector weights = RealVector::Zero(eig.dim());
  for (int k = 1; k <= n; ++k) {
    const ComplexVector amplitudes = eig.vectors.adjoint() * (basis.op(k) * ground);
    weights += amplitudes.cwiseAbs2();
  }
  return cumulative("d1", weights, 2.0 / n);
}

OverlapCurve d2_curve(const EigenSystem& eig, const MajoranaBasis& basis) {
  const int n = basis.n_majorana();
  const ComplexVector ground = eig.vectors.col(0);
  RealVector weights = RealVector::Zero(eig.dim());
  for (int k = 1; k <= n; ++k) {
    const int next = k % n + 1;
    const ComplexVector amplitudes = eig.vectors.adjoint() * (basis.op(k) * (basis.op(next) * ground));
    weights += amplitudes.cwiseAbs2();
  }
  return cumulative("d2", weights, 4.0 / n);
}

double d1(const EigenSystem& eig, const MajoranaBasis& basis, std::size_t j) { return d1_curve(eig, basis).at(j); }
double d2(const EigenSystem& eig, const MajoranaBasis& basis, std::size_t j) { return d2_curve(eig, basis).at(j); }

OverlapCurve d_xxz_curve(const XxzLyapunov& system) {
  const int n = system.n_operators();
  RealVector weights = RealVector::Zero(system.sectors().raised.dim());
  for (int k = 1; k <= n; ++k) weights += system.raise_eigenbasis(k).col(0).cwiseAbs2();
  return cumulative("d_xxz", weights, 1.0 / n);
}

double d_xxz(const XxzLyapunov& system, std::size_t j) { return d_xxz_curve(system).at(j); }

DegeneracyReport degeneracy_audit(const EigenSystem& eig, double relative_tol) {
  DegeneracyReport report;
  report.levels = static_cast<int>(eig.dim());
  report.width = eig.spectral_width();
  report.tolerance = relative_tol * report.width;
  const auto& e = eig.energies;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const bool below = i > 0 && std::abs(e(i) - e(i - 1)) <= report.tolerance;
    const bool above = i + 1 < e.size() && std::abs(e(i + 1) - e(i)) <= report.tolerance;
    if (below || above) ++report.paired;
  }
  return report;
}

}  // namespace qlyap
