#pragma once

#include <span>
#include <vector>

#include "qlyap/evolve.hpp"
#include "qlyap/models.hpp"
#include "qlyap/qops.hpp"

namespace qlyap {

/// Reference-state label for records that average several eigenstates.
inline constexpr int kAveragedState = -1;

/// L_ij(t) = sum_k <phi| M_ki(t)^dagger M_kj(t) |phi>.
struct LMatrix {
  double t = 0.0;
  int state_index = kAveragedState;
  ComplexMatrix entries;
};

struct LyapunovRecord {
  double t = 0.0;
  int state_index = kAveragedState;
  std::vector<double> lambdas;          // ascending
  std::vector<double> singular_values;  // e^{lambda_i t}, same order
  double h_ks = 0.0;
  double lambda_otoc = 0.0;
  double otoc_ratio = 0.0;  // (1/n) tr L = e^{2 lambda_otoc t}
  int floored = 0;          // eigenvalues of L raised to the floor before the log
};

/// {psi_i(t), psi_j(0)} on the full Hilbert space, 1-based labels.
ComplexMatrix m_matrix_syk(const MajoranaBasis& basis, const EigenSystem& eig, int i, int j, double t);

/// [sigma_{+,i}(t), sigma_{-,j}(0)] on the full 2^n space; `eig` diagonalizes the full Hamiltonian.
ComplexMatrix m_matrix_xxz(const SpinBasis& basis, const EigenSystem& eig, int i, int j, double t);

/// L for an arbitrary normalized state in the full space, forming every M_kj explicitly.
/// Throws std::invalid_argument when |phi| deviates from 1 by more than 1e-10.
LMatrix l_matrix_syk_state(const MajoranaBasis& basis, const EigenSystem& eig, const ComplexVector& phi,
                           double t);
LMatrix l_matrix_xxz_state(const SpinBasis& basis, const EigenSystem& eig, const ComplexVector& phi, double t);

/// Lyapunov matrices of SYK energy eigenstates. The Majoranas are rotated into the
/// eigenbasis once, so that each time costs 2N^2 products restricted to the requested
/// eigenstate columns.
class SykLyapunov {
 public:
  SykLyapunov(const MajoranaBasis& basis, EigenSystem eig);

  const EigenSystem& eigensystem() const { return eig_; }
  int n_operators() const { return static_cast<int>(psi_.size()); }
  Eigen::Index n_states() const { return eig_.dim(); }

  LMatrix l_matrix(int state, double t) const;
  std::vector<LMatrix> l_matrices(std::span<const int> states, double t) const;

 private:
  EigenSystem eig_;
  std::vector<ComplexMatrix> psi_;  // eigenbasis
};

/// Eigensystems of the S_z = 0 sector and the two sectors one spin flip away.
struct XxzSectors {
  int n_site = 0;
  std::vector<std::size_t> zero_mask, raised_mask, lowered_mask;
  EigenSystem zero, raised, lowered;  // S_z = 0, +1, -1
};

/// Requires an even number of sites.
XxzSectors diagonalize_xxz_sectors(const XxzFields& fields);

/// Rectangular matrix of an operator between two sectors: rows index `to`, columns `from`.
ComplexMatrix sector_block(const ComplexMatrix& full_op, const std::vector<std::size_t>& to,
                           const std::vector<std::size_t>& from);

/// sigma_{+,site} mapping sector `from` to sector `to` (rows `to`, cols `from`), built from bits.
ComplexMatrix raising_block(int n_site, int site, const std::vector<std::size_t>& to,
                            const std::vector<std::size_t>& from);

/// Lyapunov matrices of S_z = 0 eigenstates of the XXZ chain. M_kj maps the zero
/// sector to itself, so only the three sector eigensystems are needed.
class XxzLyapunov {
 public:
  explicit XxzLyapunov(XxzSectors sectors);

  const XxzSectors& sectors() const { return sectors_; }
  const EigenSystem& eigensystem() const { return sectors_.zero; }
  int n_operators() const { return sectors_.n_site; }
  Eigen::Index n_states() const { return sectors_.zero.dim(); }

  LMatrix l_matrix(int state, double t) const;
  std::vector<LMatrix> l_matrices(std::span<const int> states, double t) const;

  /// V_+^dagger sigma_{+,site} V_0, raised-sector eigenstates by zero-sector eigenstates.
  const ComplexMatrix& raise_eigenbasis(int site) const;

 private:
  XxzSectors sectors_;
  std::vector<ComplexMatrix> raise_;  // A_i = V_+^dag sigma+_i V_0
  std::vector<ComplexMatrix> lower_;  // B_i = V_-^dag sigma-_i V_0
};

/// Eigenvalues of L below floor_ratio * max are raised to the floor before the log.
inline constexpr double kEigenvalueFloorRatio = 1e-14;

/// lambda_i = log(eig_i(L)) / (2t), ascending. Throws std::invalid_argument for t <= 0.
LyapunovRecord spectrum_from_l(const LMatrix& l);

/// (1/2t) log((1/n) tr L).
double lambda_otoc(const LMatrix& l);
/// (1/2t) log((1/n) sum_i e^{2 lambda_i t}).
double lambda_otoc(std::span<const double> lambdas, double t);

/// Sum of strictly positive exponents.
double ks_entropy(std::span<const double> lambdas);
inline double ks_entropy(const LyapunovRecord& r) { return ks_entropy(r.lambdas); }

/// Normalized e^{-(E - E_min)/T}; T = +inf gives uniform weights.
std::vector<double> boltzmann_weights(std::span<const double> energies, double temperature);

/// Weighted average of per-state records at one time. Exponents are averaged index by
/// index after sorting; h_ks and the OTOC quantities are averaged as they are.
LyapunovRecord average_records(std::span<const LyapunovRecord> records, std::span<const double> weights);

}  // namespace qlyap
