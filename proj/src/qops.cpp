#include "qlyap/qops.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace qlyap {

ComplexMatrix pauli_matrix(Pauli label) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (label) {
    case Pauli::identity:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case Pauli::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case Pauli::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case Pauli::plus:
      m(0, 1) = 1.0;
      break;
    case Pauli::minus:
      m(1, 0) = 1.0;
      break;
  }
  return m;
}

namespace {

ComplexMatrix kron_chain(const std::vector<ComplexMatrix>& factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) {
    ComplexMatrix next = Eigen::kroneckerProduct(out, f).eval();
    out.swap(next);
  }
  return out;
}

}  // namespace

ComplexMatrix site_operator(Pauli label, int site, int n_site) {
  if (n_site < 1) {
    throw std::invalid_argument("site_operator: n_site must be positive");
  }
  if (site < 1 || site > n_site) {
    throw std::out_of_range("site_operator: site " + std::to_string(site) + " not in [1, " +
                            std::to_string(n_site) + "]");
  }
  qubit_dimension(n_site);
  std::vector<ComplexMatrix> factors(static_cast<std::size_t>(n_site), pauli_matrix(Pauli::identity));
  factors[static_cast<std::size_t>(site - 1)] = pauli_matrix(label);
  return kron_chain(factors);
}

MonomialOperator MonomialOperator::identity(std::size_t dim) {
  MonomialOperator m;
  m.rows_.resize(dim);
  m.values_.assign(dim, Complex{1.0, 0.0});
  for (std::size_t c = 0; c < dim; ++c) m.rows_[c] = c;
  return m;
}

MonomialOperator MonomialOperator::from_dense(const ComplexMatrix& d) {
  if (d.rows() != d.cols()) {
    throw std::invalid_argument("MonomialOperator: matrix is not square");
  }
  MonomialOperator m;
  const auto dim = static_cast<std::size_t>(d.cols());
  m.rows_.assign(dim, 0);
  m.values_.assign(dim, Complex{});
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    int nonzero = 0;
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
      if (d(r, c) != Complex{}) {
        ++nonzero;
        m.rows_[static_cast<std::size_t>(c)] = static_cast<std::size_t>(r);
        m.values_[static_cast<std::size_t>(c)] = d(r, c);
      }
    }
    if (nonzero > 1) {
      throw std::invalid_argument("MonomialOperator: column has more than one nonzero entry");
    }
  }
  return m;
}

MonomialOperator MonomialOperator::operator*(const MonomialOperator& rhs) const {
  if (dim() != rhs.dim()) {
    throw std::invalid_argument("MonomialOperator: dimension mismatch");
  }
  MonomialOperator out;
  out.rows_.resize(dim());
  out.values_.resize(dim());
  for (std::size_t c = 0; c < dim(); ++c) {
    const std::size_t mid = rhs.rows_[c];
    out.rows_[c] = rows_[mid];
    out.values_[c] = values_[mid] * rhs.values_[c];
  }
  return out;
}

void MonomialOperator::add_to(ComplexMatrix& target, Complex coefficient) const {
  for (std::size_t c = 0; c < dim(); ++c) {
    target(static_cast<Eigen::Index>(rows_[c]), static_cast<Eigen::Index>(c)) += coefficient * values_[c];
  }
}

ComplexMatrix MonomialOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  add_to(m, 1.0);
  return m;
}

MajoranaBasis::MajoranaBasis(int n_majorana, std::vector<ComplexMatrix> ops)
    : n_majorana_(n_majorana), ops_(std::move(ops)) {
  if (n_majorana_ < 2 || n_majorana_ % 2 != 0) {
    throw std::invalid_argument("MajoranaBasis: N must be even and >= 2, got " + std::to_string(n_majorana));
  }
  if (ops_.size() != static_cast<std::size_t>(n_majorana_)) {
    throw std::invalid_argument("MajoranaBasis: operator count does not match N");
  }
  const auto expected = static_cast<Eigen::Index>(qubit_dimension(n_majorana_ / 2));
  for (const auto& op : ops_) {
    if (op.rows() != expected || op.cols() != expected) {
      throw std::invalid_argument("MajoranaBasis: operator dimension is not 2^(N/2)");
    }
  }
  monomials_.reserve(ops_.size());
  for (const auto& op : ops_) monomials_.push_back(MonomialOperator::from_dense(op));
}

const ComplexMatrix& MajoranaBasis::op(int i) const {
  if (i < 1 || i > n_majorana_) {
    throw std::out_of_range("MajoranaBasis: index " + std::to_string(i) + " out of range");
  }
  return ops_[static_cast<std::size_t>(i - 1)];
}

const MonomialOperator& MajoranaBasis::monomial(int i) const {
  if (i < 1 || i > n_majorana_) {
    throw std::out_of_range("MajoranaBasis: index " + std::to_string(i) + " out of range");
  }
  return monomials_[static_cast<std::size_t>(i - 1)];
}

double MajoranaBasis::anticommutator_defect() const {
  const auto id = ComplexMatrix::Identity(dim(), dim());
  double worst = 0.0;
  for (int i = 1; i <= n_majorana_; ++i) {
    for (int j = i; j <= n_majorana_; ++j) {
      ComplexMatrix ac = anticommutator(op(i), op(j));
      if (i == j) ac -= id;
      worst = std::max(worst, max_abs(ac));
    }
  }
  return worst;
}

MajoranaBasis jordan_wigner_majoranas(int n_majorana) {
  if (n_majorana < 2 || n_majorana % 2 != 0) {
    throw std::invalid_argument("jordan_wigner_majoranas: N must be even and >= 2, got " +
                                std::to_string(n_majorana));
  }
  const int n_qubits = n_majorana / 2;
  const double norm = 1.0 / std::numbers::sqrt2;
  std::vector<ComplexMatrix> ops;
  ops.reserve(static_cast<std::size_t>(n_majorana));
  for (int q = 0; q < n_qubits; ++q) {
    for (Pauli tail : {Pauli::x, Pauli::y}) {
      std::vector<ComplexMatrix> factors;
      factors.reserve(static_cast<std::size_t>(n_qubits));
      for (int s = 0; s < n_qubits; ++s) {
        if (s < q) {
          factors.push_back(pauli_matrix(Pauli::z));
        } else if (s == q) {
          factors.push_back(pauli_matrix(tail));
        } else {
          factors.push_back(pauli_matrix(Pauli::identity));
        }
      }
      ops.push_back(norm * kron_chain(factors));
    }
  }
  return MajoranaBasis(n_majorana, std::move(ops));
}

std::vector<DiracMode> dirac_from_majorana(const MajoranaBasis& basis) {
  std::vector<DiracMode> modes;
  const double norm = 1.0 / std::numbers::sqrt2;
  for (int k = 1; k <= basis.n_majorana() / 2; ++k) {
    ComplexMatrix c = norm * (basis.op(2 * k - 1) + kI * basis.op(2 * k));
    ComplexMatrix cdag = c.adjoint();
    modes.push_back({std::move(c), std::move(cdag)});
  }
  return modes;
}

SpinBasis::SpinBasis(int n_site) : n_site_(n_site) {
  if (n_site < 1) {
    throw std::invalid_argument("SpinBasis: n_site must be positive");
  }
  const auto d = static_cast<Eigen::Index>(qubit_dimension(n_site));
  s_z_total_ = ComplexMatrix::Zero(d, d);
  for (Eigen::Index s = 0; s < d; ++s) {
    s_z_total_(s, s) = 0.5 * twice_sz_of(static_cast<std::size_t>(s));
  }
}

int SpinBasis::twice_sz_of(std::size_t index) const {
  const int down = std::popcount(index);
  return n_site_ - 2 * down;
}

bool SpinBasis::spin_down(std::size_t index, int site) const {
  return ((index >> (n_site_ - site)) & 1U) != 0;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b + b * a; }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

}  // namespace qlyap
