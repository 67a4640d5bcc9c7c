// Independent reference computations shared by unit and acceptance tests.
#pragma once

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "qlyap/qops.hpp"
#include "qlyap/types.hpp"

namespace oracle {

using qlyap::Complex;
using qlyap::ComplexMatrix;
using qlyap::ComplexVector;

/// Truncated series for e^{-iHt}.
inline ComplexMatrix taylor_propagator(const ComplexMatrix& h, double t, int terms = 40) {
  const Eigen::Index n = h.rows();
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  ComplexMatrix sum = term;
  const ComplexMatrix a = Complex(0.0, -t) * h;
  for (int k = 1; k < terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

inline ComplexMatrix expm_propagator(const ComplexMatrix& h, double t) {
  return (Complex(0.0, -t) * h).exp();
}

inline ComplexMatrix random_hermitian(int dim, unsigned seed) {
  std::srand(seed);
  ComplexMatrix a = ComplexMatrix::Random(dim, dim);
  return (a + a.adjoint()) / 2.0;
}

/// L_ij = sum_k <phi| {psi_k(t), psi_i}^dag {psi_k(t), psi_j} |phi>, with the propagator
/// from a matrix exponential and every operator formed explicitly.
inline ComplexMatrix syk_l_direct(const qlyap::MajoranaBasis& basis, const ComplexMatrix& h,
                                  const ComplexVector& phi, double t) {
  const int n = basis.n_majorana();
  const ComplexMatrix u = expm_propagator(h, t);  // e^{-iHt}
  ComplexMatrix l = ComplexMatrix::Zero(n, n);
  std::vector<std::vector<ComplexMatrix>> m(n, std::vector<ComplexMatrix>(n));
  for (int k = 1; k <= n; ++k) {
    const ComplexMatrix psik_t = u.adjoint() * basis.op(k) * u;
    for (int j = 1; j <= n; ++j) m[k - 1][j - 1] = psik_t * basis.op(j) + basis.op(j) * psik_t;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) l(i, j) += (phi.adjoint() * m[k][i].adjoint() * m[k][j] * phi)(0);
  return l;
}

/// Same contraction for the spin chain with M_kj = [sigma+_k(t), sigma-_j].
inline ComplexMatrix xxz_l_direct(const qlyap::SpinBasis& basis, const ComplexMatrix& h, const ComplexVector& phi,
                                  double t) {
  const int n = basis.n_site();
  const ComplexMatrix u = expm_propagator(h, t);
  ComplexMatrix l = ComplexMatrix::Zero(n, n);
  std::vector<std::vector<ComplexMatrix>> m(n, std::vector<ComplexMatrix>(n));
  for (int k = 1; k <= n; ++k) {
    const ComplexMatrix sp_t = u.adjoint() * basis.sigma_plus(k) * u;
    for (int j = 1; j <= n; ++j) {
      const ComplexMatrix sm = basis.sigma_minus(j);
      m[k - 1][j - 1] = sp_t * sm - sm * sp_t;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) l(i, j) += (phi.adjoint() * m[k][i].adjoint() * m[k][j] * phi)(0);
  return l;
}

}  // namespace oracle
