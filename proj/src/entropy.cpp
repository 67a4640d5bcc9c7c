#include "qlyap/entropy.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace qlyap {

BipartitionSpec BipartitionSpec::for_majoranas(int n_majorana, int subsystem_modes) {
  BipartitionSpec spec{subsystem_modes > 0 ? subsystem_modes : n_majorana / 4, n_majorana / 2};
  spec.validate();
  return spec;
}

void BipartitionSpec::validate() const {
  if (subsystem_modes < 1 || subsystem_modes > total_modes - 1) {
    throw std::invalid_argument("BipartitionSpec: |A| = " + std::to_string(subsystem_modes) +
                                " must lie in [1, " + std::to_string(total_modes - 1) + "]");
  }
}

ComplexVector fock_vacuum(const std::vector<DiracMode>& modes) {
  if (modes.empty()) {
    throw std::invalid_argument("fock_vacuum: no modes");
  }
  const Eigen::Index dim = modes.front().annihilator.rows();
  // prod_k c_k c_k^dagger projects onto the common kernel of all c_k.
  ComplexMatrix projector = ComplexMatrix::Identity(dim, dim);
  for (const auto& m : modes) projector = (m.annihilator * m.creator) * projector;

  Eigen::Index best = 0;
  projector.colwise().norm().maxCoeff(&best);
  ComplexVector v = projector.col(best);
  const double norm = v.norm();
  if (norm < 1e-8) {
    throw std::runtime_error("fock_vacuum: modes have no common vacuum");
  }
  v /= norm;
  Eigen::Index peak = 0;
  v.cwiseAbs().maxCoeff(&peak);
  v *= std::conj(v(peak)) / std::abs(v(peak));
  return v;
}

namespace {

// Rows index the complement qubits, columns the kept ones; site 1 is most significant.
Eigen::Map<const ComplexMatrix> as_bipartite(const ComplexVector& state, const BipartitionSpec& spec) {
  spec.validate();
  const auto dim_a = static_cast<Eigen::Index>(qubit_dimension(spec.subsystem_modes));
  const auto dim_b = static_cast<Eigen::Index>(qubit_dimension(spec.total_modes - spec.subsystem_modes));
  if (state.size() != dim_a * dim_b) {
    throw std::invalid_argument("reduced_density: state dimension does not match the bipartition");
  }
  if (std::abs(state.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("reduced_density: state is not normalized");
  }
  return Eigen::Map<const ComplexMatrix>(state.data(), dim_b, dim_a);
}

}  // namespace

ComplexMatrix reduced_density(const ComplexVector& state, const BipartitionSpec& spec) {
  const auto psi = as_bipartite(state, spec);
  return psi.transpose() * psi.conjugate();
}

ComplexMatrix complement_density(const ComplexVector& state, const BipartitionSpec& spec) {
  const auto psi = as_bipartite(state, spec);
  return psi * psi.adjoint();
}

double von_neumann(const ComplexMatrix& rho) {
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-8) {
    throw std::invalid_argument("von_neumann: trace " + std::to_string(trace) + " differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double p = solver.eigenvalues()(i);
    if (p > kEntropyFloor) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

EntropySeries entanglement_growth(const MajoranaBasis& basis, const EigenSystem& eig,
                                  const BipartitionSpec& spec, std::span<const double> times) {
  spec.validate();
  if (spec.total_modes != basis.n_majorana() / 2) {
    throw std::invalid_argument("entanglement_growth: bipartition does not match the basis");
  }
  const ComplexVector vacuum = fock_vacuum(dirac_from_majorana(basis));
  EntropySeries out;
  const double scale = static_cast<double>(basis.n_majorana()) / spec.subsystem_modes;
  for (double t : times) {
    ComplexVector state = evolve_state(vacuum, eig, t);
    state.normalize();
    const double s = von_neumann(reduced_density(state, spec));
    out.times.push_back(t);
    out.s_ee.push_back(s);
    out.normalized.push_back(scale * s);
  }
  return out;
}

ShiftFit fit_constant_shift(std::span<const double> times, std::span<const double> x, std::span<const double> y,
                            double lo, double hi) {
  if (times.size() != x.size() || times.size() != y.size()) {
    throw std::invalid_argument("fit_constant_shift: series lengths differ");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= lo && times[i] <= hi) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  }
  ShiftFit fit;
  fit.points = static_cast<int>(xs.size());
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  fit.shift = my - mx;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.pearson = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
  return fit;
}

KsEeSeries ks_vs_ee_series(const MajoranaBasis& basis, const EigenSystem& eig, const BipartitionSpec& spec,
                           std::span<const double> times, std::span<const double> mean_hks, double window_lo,
                           double window_hi) {
  if (mean_hks.size() != times.size()) {
    throw std::invalid_argument("ks_vs_ee_series: one h_KS value per time is required");
  }
  KsEeSeries out;
  out.entropy = entanglement_growth(basis, eig, spec, times);
  for (std::size_t i = 0; i < times.size(); ++i) out.hks_t.push_back(times[i] * mean_hks[i]);
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  const ShiftFit fit = fit_constant_shift(times, out.entropy.normalized, out.hks_t, window_lo, window_hi);
  out.shift = fit.shift;
  out.pearson = fit.pearson;
  out.window_points = fit.points;
  return out;
}

KsEeSeries ks_vs_ee_series(const MajoranaBasis& basis, const SykLyapunov& engine, const BipartitionSpec& spec,
                           std::span<const double> times, double window_lo, double window_hi) {
  std::vector<int> all(static_cast<std::size_t>(engine.n_states()));
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> mean_hks;
  for (double t : times) {
    double sum = 0.0;
    for (const auto& l : engine.l_matrices(all, t)) sum += spectrum_from_l(l).h_ks;
    mean_hks.push_back(sum / static_cast<double>(all.size()));
  }
  return ks_vs_ee_series(basis, engine.eigensystem(), spec, times, mean_hks, window_lo, window_hi);
}

}  // namespace qlyap
