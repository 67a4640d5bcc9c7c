#pragma once

#include <vector>

#include "qlyap/types.hpp"

namespace qlyap {

enum class Pauli { identity, x, y, z, plus, minus };

/// 2x2 single-site matrix; plus/minus are (sigma_x +- i sigma_y) / 2.
ComplexMatrix pauli_matrix(Pauli label);

/// 1 (x) ... (x) sigma (x) ... (x) 1 with sigma at 1-based `site`; site 1 is the
/// leftmost (most significant) tensor factor.
ComplexMatrix site_operator(Pauli label, int site, int n_site);

/// Operator with exactly one nonzero entry per column (a phased permutation).
/// Pauli strings and their products stay in this class, which lets Hamiltonians
/// with thousands of terms be assembled in O(terms * dim).
class MonomialOperator {
 public:
  static MonomialOperator identity(std::size_t dim);
  /// Throws std::invalid_argument if `m` has a column with more than one nonzero.
  static MonomialOperator from_dense(const ComplexMatrix& m);

  std::size_t dim() const { return rows_.size(); }
  MonomialOperator operator*(const MonomialOperator& rhs) const;
  void add_to(ComplexMatrix& target, Complex coefficient) const;
  ComplexMatrix dense() const;

 private:
  std::vector<std::size_t> rows_;
  std::vector<Complex> values_;
};

/// Jordan-Wigner Majorana operators psi_1..psi_N on N/2 qubits, {psi_i, psi_j} = delta_ij.
class MajoranaBasis {
 public:
  MajoranaBasis(int n_majorana, std::vector<ComplexMatrix> ops);

  int n_majorana() const { return n_majorana_; }
  int n_qubits() const { return n_majorana_ / 2; }
  Eigen::Index dim() const { return ops_.front().rows(); }

  /// 1-based access.
  const ComplexMatrix& op(int i) const;
  const std::vector<ComplexMatrix>& ops() const { return ops_; }
  const MonomialOperator& monomial(int i) const;

  /// Largest deviation of {psi_i, psi_j} from delta_ij over all pairs.
  double anticommutator_defect() const;

 private:
  int n_majorana_;
  std::vector<ComplexMatrix> ops_;
  std::vector<MonomialOperator> monomials_;
};

MajoranaBasis jordan_wigner_majoranas(int n_majorana);

struct DiracMode {
  ComplexMatrix annihilator;
  ComplexMatrix creator;
};

/// c_k = (psi_{2k-1} + i psi_{2k}) / sqrt(2), k = 1..N/2.
std::vector<DiracMode> dirac_from_majorana(const MajoranaBasis& basis);

/// Pauli operators on an n-site spin-1/2 chain, built on demand.
/// Computational basis bit (n - site) set means the spin at `site` is down.
class SpinBasis {
 public:
  explicit SpinBasis(int n_site);

  int n_site() const { return n_site_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(qubit_dimension(n_site_)); }

  ComplexMatrix sigma(Pauli label, int site) const { return site_operator(label, site, n_site_); }
  ComplexMatrix sigma_x(int site) const { return sigma(Pauli::x, site); }
  ComplexMatrix sigma_y(int site) const { return sigma(Pauli::y, site); }
  ComplexMatrix sigma_z(int site) const { return sigma(Pauli::z, site); }
  ComplexMatrix sigma_plus(int site) const { return sigma(Pauli::plus, site); }
  ComplexMatrix sigma_minus(int site) const { return sigma(Pauli::minus, site); }

  /// (1/2) sum_i sigma_{z,i}.
  const ComplexMatrix& s_z_total() const { return s_z_total_; }

  /// S_z^(total) eigenvalue of computational basis state `index`, times two.
  int twice_sz_of(std::size_t index) const;
  bool spin_down(std::size_t index, int site) const;

 private:
  int n_site_;
  ComplexMatrix s_z_total_;
};

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qlyap
