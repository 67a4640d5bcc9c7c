#pragma once

#include "qlyap/types.hpp"

namespace qlyap {

/// Eigenpairs of a Hermitian operator, energies ascending, eigenvectors as columns.
struct EigenSystem {
  RealVector energies;
  ComplexMatrix vectors;

  Eigen::Index dim() const { return energies.size(); }
  double spectral_width() const {
    return dim() == 0 ? 0.0 : energies(dim() - 1) - energies(0);
  }
};

/// Throws std::invalid_argument when `h` is not Hermitian to `hermitian_tol`.
EigenSystem diagonalize(const ComplexMatrix& h, double hermitian_tol = 1e-10);

/// e^{iHt} O e^{-iHt}.
ComplexMatrix heisenberg(const ComplexMatrix& op, const EigenSystem& eig, double t);

/// e^{-iHt} v.
ComplexVector evolve_state(const ComplexVector& v, const EigenSystem& eig, double t);

/// O expressed in the eigenbasis, V^dagger O V.
ComplexMatrix to_eigenbasis(const ComplexMatrix& op, const EigenSystem& eig);

/// Entrywise phases e^{i (E_a - E_b) t} for row energies E_a and column energies E_b.
/// Multiplying an eigenbasis operator by these phases is its Heisenberg evolution.
ComplexMatrix heisenberg_phases(const RealVector& row_energies, const RealVector& col_energies, double t);

}  // namespace qlyap
