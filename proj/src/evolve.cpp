#include "qlyap/evolve.hpp"

#include <Eigen/Eigenvalues>

namespace qlyap {

EigenSystem diagonalize(const ComplexMatrix& h, double hermitian_tol) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("diagonalize: matrix is not square");
  }
  const double scale = std::max(1.0, max_abs(h));
  if (hermiticity_defect(h) > hermitian_tol * scale) {
    throw std::invalid_argument("diagonalize: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("diagonalize: eigensolver did not converge");
  }
  // Eigen returns eigenvalues in increasing order.
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix heisenberg_phases(const RealVector& row_energies, const RealVector& col_energies, double t) {
  ComplexMatrix phases(row_energies.size(), col_energies.size());
  for (Eigen::Index b = 0; b < col_energies.size(); ++b) {
    for (Eigen::Index a = 0; a < row_energies.size(); ++a) {
      const double angle = (row_energies(a) - col_energies(b)) * t;
      phases(a, b) = Complex(std::cos(angle), std::sin(angle));
    }
  }
  return phases;
}

ComplexMatrix to_eigenbasis(const ComplexMatrix& op, const EigenSystem& eig) {
  if (op.rows() != eig.dim() || op.cols() != eig.dim()) {
    throw std::invalid_argument("to_eigenbasis: dimension mismatch");
  }
  return eig.vectors.adjoint() * op * eig.vectors;
}

ComplexMatrix heisenberg(const ComplexMatrix& op, const EigenSystem& eig, double t) {
  if (t == 0.0) return op;
  ComplexMatrix in_eigenbasis = to_eigenbasis(op, eig);
  in_eigenbasis.array() *= heisenberg_phases(eig.energies, eig.energies, t).array();
  return eig.vectors * in_eigenbasis * eig.vectors.adjoint();
}

ComplexVector evolve_state(const ComplexVector& v, const EigenSystem& eig, double t) {
  if (v.size() != eig.dim()) {
    throw std::invalid_argument("evolve_state: dimension mismatch");
  }
  if (t == 0.0) return v;
  ComplexVector coeffs = eig.vectors.adjoint() * v;
  for (Eigen::Index a = 0; a < coeffs.size(); ++a) {
    const double angle = -eig.energies(a) * t;
    coeffs(a) *= Complex(std::cos(angle), std::sin(angle));
  }
  return eig.vectors * coeffs;
}

}  // namespace qlyap
