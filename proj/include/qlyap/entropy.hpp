#pragma once

#include <span>
#include <vector>

#include "qlyap/lyapunov.hpp"
#include "qlyap/qops.hpp"

namespace qlyap {

/// First `subsystem_modes` Dirac modes kept, the remaining ones traced out.
struct BipartitionSpec {
  int subsystem_modes = 0;
  int total_modes = 0;

  /// Defaults to half the modes, floor(N/4).
  static BipartitionSpec for_majoranas(int n_majorana, int subsystem_modes = 0);
  void validate() const;
};

/// State annihilated by every c_k, phase fixed so its largest component is real positive.
ComplexVector fock_vacuum(const std::vector<DiracMode>& modes);

/// rho_A on the first |A| qubits of the Jordan-Wigner chain.
ComplexMatrix reduced_density(const ComplexVector& state, const BipartitionSpec& spec);
/// Density matrix of the complement (the last total - |A| qubits).
ComplexMatrix complement_density(const ComplexVector& state, const BipartitionSpec& spec);

/// Eigenvalues at or below this are dropped from -sum p log p.
inline constexpr double kEntropyFloor = 1e-15;

/// -tr rho log rho in nats. Throws std::invalid_argument if |tr rho - 1| > 1e-8.
double von_neumann(const ComplexMatrix& rho);

struct EntropySeries {
  std::vector<double> times;
  std::vector<double> s_ee;
  std::vector<double> normalized;  // N S_EE / |A|
};

EntropySeries entanglement_growth(const MajoranaBasis& basis, const EigenSystem& eig,
                                  const BipartitionSpec& spec, std::span<const double> times);

struct KsEeSeries {
  EntropySeries entropy;
  std::vector<double> hks_t;  // t * h_KS averaged over all eigenstates
  double window_lo = 1.0;
  double window_hi = 2.0;
  double shift = 0.0;    // c minimizing sum (N S/|A| + c - h t)^2 in the window
  double pearson = 0.0;  // correlation of the two series in the window
  int window_points = 0;
};

/// Compare h_KS t with N S_EE/|A| given the eigenstate-averaged h_KS at each time.
KsEeSeries ks_vs_ee_series(const MajoranaBasis& basis, const EigenSystem& eig, const BipartitionSpec& spec,
                           std::span<const double> times, std::span<const double> mean_hks, double window_lo,
                           double window_hi);

/// Same, computing h_KS from every eigenstate of the sample (times must be positive).
KsEeSeries ks_vs_ee_series(const MajoranaBasis& basis, const SykLyapunov& engine, const BipartitionSpec& spec,
                           std::span<const double> times, double window_lo, double window_hi);

/// Least-squares constant shift and Pearson correlation of y against x over [lo, hi].
struct ShiftFit {
  double shift = 0.0;
  double pearson = 0.0;
  int points = 0;
};
ShiftFit fit_constant_shift(std::span<const double> times, std::span<const double> x, std::span<const double> y,
                            double lo, double hi);

}  // namespace qlyap
