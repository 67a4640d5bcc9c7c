#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qlyap {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest entry modulus of A - A^dagger.
inline double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("hermiticity_defect: matrix is not square");
  }
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = 1e-12) {
  return a.rows() == a.cols() && hermiticity_defect(a) < tol;
}

inline double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Hilbert dimension 2^n for n qubits, with an upper bound keeping dense storage sane.
inline std::size_t qubit_dimension(int n_qubits) {
  if (n_qubits < 0 || n_qubits > 14) {
    throw std::invalid_argument("qubit count " + std::to_string(n_qubits) +
                                " outside supported range [0, 14]");
  }
  return std::size_t{1} << n_qubits;
}

}  // namespace qlyap
