#include "qlyap/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace qlyap {

namespace {

void check_label(int i, int n, const char* what) {
  if (i < 1 || i > n) {
    throw std::out_of_range(std::string(what) + ": operator label " + std::to_string(i) + " not in [1, " +
                            std::to_string(n) + "]");
  }
}

void check_normalized(const ComplexVector& phi) {
  if (std::abs(phi.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("l_matrix: reference state is not normalized");
  }
}

// L_ij += sum_a conj(M_i(a, c)) M_j(a, c) for every selected column c, where M_j
// holds the columns of M_kj for one fixed k.
void accumulate(std::vector<LMatrix>& out, const std::vector<ComplexMatrix>& m_cols) {
  const auto n = static_cast<Eigen::Index>(m_cols.size());
  const Eigen::Index rows = m_cols.front().rows();
  ComplexMatrix gathered(rows, n);
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (Eigen::Index j = 0; j < n; ++j) gathered.col(j) = m_cols[static_cast<std::size_t>(j)].col(c);
    out[c].entries.noalias() += gathered.adjoint() * gathered;
  }
}

std::vector<LMatrix> empty_l(std::span<const int> states, int n, double t) {
  std::vector<LMatrix> out;
  out.reserve(states.size());
  for (int s : states) out.push_back(LMatrix{t, s, ComplexMatrix::Zero(n, n)});
  return out;
}

void check_states(std::span<const int> states, Eigen::Index n_states) {
  for (int s : states) {
    if (s < 0 || s >= n_states) {
      throw std::out_of_range("l_matrix: eigenstate index " + std::to_string(s) + " out of range");
    }
  }
}

ComplexMatrix select_columns(const ComplexMatrix& m, std::span<const int> cols) {
  ComplexMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = m.col(cols[c]);
  return out;
}

LMatrix contract_full(const std::vector<std::vector<ComplexMatrix>>& m, const ComplexVector& phi, double t) {
  const auto n = static_cast<Eigen::Index>(m.size());
  LMatrix l{t, kAveragedState, ComplexMatrix::Zero(n, n)};
  for (const auto& row : m) {
    ComplexMatrix applied(phi.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) applied.col(j) = row[static_cast<std::size_t>(j)] * phi;
    l.entries.noalias() += applied.adjoint() * applied;
  }
  return l;
}

}  // namespace

ComplexMatrix m_matrix_syk(const MajoranaBasis& basis, const EigenSystem& eig, int i, int j, double t) {
  check_label(i, basis.n_majorana(), "m_matrix_syk");
  check_label(j, basis.n_majorana(), "m_matrix_syk");
  return anticommutator(heisenberg(basis.op(i), eig, t), basis.op(j));
}

ComplexMatrix m_matrix_xxz(const SpinBasis& basis, const EigenSystem& eig, int i, int j, double t) {
  check_label(i, basis.n_site(), "m_matrix_xxz");
  check_label(j, basis.n_site(), "m_matrix_xxz");
  return commutator(heisenberg(basis.sigma_plus(i), eig, t), basis.sigma_minus(j));
}

LMatrix l_matrix_syk_state(const MajoranaBasis& basis, const EigenSystem& eig, const ComplexVector& phi,
                           double t) {
  check_normalized(phi);
  const int n = basis.n_majorana();
  std::vector<std::vector<ComplexMatrix>> m(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const ComplexMatrix evolved = heisenberg(basis.op(k), eig, t);
    for (int j = 1; j <= n; ++j) m[k - 1].push_back(anticommutator(evolved, basis.op(j)));
  }
  return contract_full(m, phi, t);
}

LMatrix l_matrix_xxz_state(const SpinBasis& basis, const EigenSystem& eig, const ComplexVector& phi, double t) {
  check_normalized(phi);
  const int n = basis.n_site();
  std::vector<ComplexMatrix> lowering;
  for (int j = 1; j <= n; ++j) lowering.push_back(basis.sigma_minus(j));
  std::vector<std::vector<ComplexMatrix>> m(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const ComplexMatrix evolved = heisenberg(basis.sigma_plus(k), eig, t);
    for (int j = 1; j <= n; ++j) m[k - 1].push_back(commutator(evolved, lowering[j - 1]));
  }
  return contract_full(m, phi, t);
}

SykLyapunov::SykLyapunov(const MajoranaBasis& basis, EigenSystem eig) : eig_(std::move(eig)) {
  if (eig_.dim() != basis.dim()) {
    throw std::invalid_argument("SykLyapunov: eigensystem and basis dimensions differ");
  }
  psi_.reserve(static_cast<std::size_t>(basis.n_majorana()));
  for (const auto& op : basis.ops()) psi_.push_back(to_eigenbasis(op, eig_));
}

LMatrix SykLyapunov::l_matrix(int state, double t) const {
  const int states[] = {state};
  return std::move(l_matrices(states, t).front());
}

std::vector<LMatrix> SykLyapunov::l_matrices(std::span<const int> states, double t) const {
  check_states(states, n_states());
  const int n = n_operators();
  auto out = empty_l(states, n, t);
  if (states.empty()) return out;

  const ComplexMatrix phases = heisenberg_phases(eig_.energies, eig_.energies, t);
  std::vector<ComplexMatrix> psi_cols;
  psi_cols.reserve(psi_.size());
  for (const auto& p : psi_) psi_cols.push_back(select_columns(p, states));

  std::vector<ComplexMatrix> m_cols(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const ComplexMatrix evolved = phases.cwiseProduct(psi_[k]);
    const ComplexMatrix evolved_cols = select_columns(evolved, states);
    for (int j = 0; j < n; ++j) {
      m_cols[j].noalias() = evolved * psi_cols[j];
      m_cols[j].noalias() += psi_[j] * evolved_cols;
    }
    accumulate(out, m_cols);
  }
  return out;
}

ComplexMatrix sector_block(const ComplexMatrix& full_op, const std::vector<std::size_t>& to,
                           const std::vector<std::size_t>& from) {
  ComplexMatrix block(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
  for (std::size_t c = 0; c < from.size(); ++c)
    for (std::size_t r = 0; r < to.size(); ++r)
      block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          full_op(static_cast<Eigen::Index>(to[r]), static_cast<Eigen::Index>(from[c]));
  return block;
}

ComplexMatrix raising_block(int n_site, int site, const std::vector<std::size_t>& to,
                            const std::vector<std::size_t>& from) {
  check_label(site, n_site, "raising_block");
  std::unordered_map<std::size_t, Eigen::Index> position;
  for (std::size_t r = 0; r < to.size(); ++r) position.emplace(to[r], static_cast<Eigen::Index>(r));
  const std::size_t bit = std::size_t{1} << (n_site - site);
  ComplexMatrix block = ComplexMatrix::Zero(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
  for (std::size_t c = 0; c < from.size(); ++c) {
    if ((from[c] & bit) == 0) continue;  // already up
    const auto it = position.find(from[c] ^ bit);
    if (it != position.end()) block(it->second, static_cast<Eigen::Index>(c)) = 1.0;
  }
  return block;
}

XxzSectors diagonalize_xxz_sectors(const XxzFields& fields) {
  if (fields.n_site < 2 || fields.n_site % 2 != 0) {
    throw std::invalid_argument("diagonalize_xxz_sectors: the S_z = 0 sector needs an even n_site");
  }
  const SpinBasis basis(fields.n_site);
  XxzSectors s;
  s.n_site = fields.n_site;
  s.zero_mask = sz_sector_mask(basis, TwiceSz{0});
  s.raised_mask = sz_sector_mask(basis, TwiceSz{2});
  s.lowered_mask = sz_sector_mask(basis, TwiceSz{-2});
  s.zero = diagonalize(build_xxz_sector(fields, s.zero_mask));
  s.raised = diagonalize(build_xxz_sector(fields, s.raised_mask));
  s.lowered = diagonalize(build_xxz_sector(fields, s.lowered_mask));
  return s;
}

XxzLyapunov::XxzLyapunov(XxzSectors sectors) : sectors_(std::move(sectors)) {
  const int n = sectors_.n_site;
  for (int i = 1; i <= n; ++i) {
    const ComplexMatrix up = raising_block(n, i, sectors_.raised_mask, sectors_.zero_mask);
    const ComplexMatrix down = raising_block(n, i, sectors_.zero_mask, sectors_.lowered_mask).transpose();
    raise_.push_back(sectors_.raised.vectors.adjoint() * up * sectors_.zero.vectors);
    lower_.push_back(sectors_.lowered.vectors.adjoint() * down * sectors_.zero.vectors);
  }
}

const ComplexMatrix& XxzLyapunov::raise_eigenbasis(int site) const {
  check_label(site, sectors_.n_site, "XxzLyapunov::raise_eigenbasis");
  return raise_[static_cast<std::size_t>(site - 1)];
}

LMatrix XxzLyapunov::l_matrix(int state, double t) const {
  const int states[] = {state};
  return std::move(l_matrices(states, t).front());
}

std::vector<LMatrix> XxzLyapunov::l_matrices(std::span<const int> states, double t) const {
  check_states(states, n_states());
  const int n = n_operators();
  auto out = empty_l(states, n, t);
  if (states.empty()) return out;

  const auto& e0 = sectors_.zero.energies;
  const ComplexMatrix raise_phase = heisenberg_phases(sectors_.raised.energies, e0, t);
  const ComplexMatrix lowered_to_zero_phase = heisenberg_phases(e0, sectors_.lowered.energies, t);

  std::vector<ComplexMatrix> lower_cols;
  for (const auto& b : lower_) lower_cols.push_back(select_columns(b, states));

  // Within the zero sector, [sigma+_k(t), sigma-_j] = C_k(t) B_j - B'_j A_k(t) with
  // C_k = B_k^dagger (lowered -> zero) and B'_j = A_j^dagger (raised -> zero).
  std::vector<ComplexMatrix> m_cols(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const ComplexMatrix raise_t_cols = select_columns(raise_phase.cwiseProduct(raise_[k]), states);
    const ComplexMatrix from_lowered_t = lowered_to_zero_phase.cwiseProduct(lower_[k].adjoint());
    for (int j = 0; j < n; ++j) {
      m_cols[j].noalias() = from_lowered_t * lower_cols[j];
      m_cols[j].noalias() -= raise_[j].adjoint() * raise_t_cols;
    }
    accumulate(out, m_cols);
  }
  return out;
}

LyapunovRecord spectrum_from_l(const LMatrix& l) {
  if (!(l.t > 0.0)) {
    throw std::invalid_argument("spectrum_from_l: exponents need t > 0");
  }
  const Eigen::Index n = l.entries.rows();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(l.entries, Eigen::EigenvaluesOnly);
  const RealVector& ev = solver.eigenvalues();
  const double largest = ev(n - 1);
  const double floor = std::max(kEigenvalueFloorRatio * std::abs(largest), std::numeric_limits<double>::min());

  LyapunovRecord r;
  r.t = l.t;
  r.state_index = l.state_index;
  r.lambdas.resize(static_cast<std::size_t>(n));
  r.singular_values.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double value = ev(i);
    if (value < floor) {
      value = floor;
      ++r.floored;
    }
    r.lambdas[i] = std::log(value) / (2.0 * l.t);
    r.singular_values[i] = std::sqrt(value);
  }
  r.h_ks = ks_entropy(r.lambdas);
  r.otoc_ratio = l.entries.trace().real() / static_cast<double>(n);
  r.lambda_otoc = lambda_otoc(l);
  return r;
}

double lambda_otoc(const LMatrix& l) {
  if (!(l.t > 0.0)) {
    throw std::invalid_argument("lambda_otoc: needs t > 0");
  }
  const double mean_diag = l.entries.trace().real() / static_cast<double>(l.entries.rows());
  return std::log(mean_diag) / (2.0 * l.t);
}

double lambda_otoc(std::span<const double> lambdas, double t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("lambda_otoc: needs t > 0");
  }
  if (lambdas.empty()) {
    throw std::invalid_argument("lambda_otoc: empty exponent set");
  }
  const double top = *std::max_element(lambdas.begin(), lambdas.end());
  double sum = 0.0;
  for (double x : lambdas) sum += std::exp(2.0 * (x - top) * t);
  return top + std::log(sum / static_cast<double>(lambdas.size())) / (2.0 * t);
}

double ks_entropy(std::span<const double> lambdas) {
  double sum = 0.0;
  for (double x : lambdas)
    if (x > 0.0) sum += x;
  return sum;
}

std::vector<double> boltzmann_weights(std::span<const double> energies, double temperature) {
  if (energies.empty()) return {};
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("boltzmann_weights: temperature must be positive");
  }
  const double e_min = *std::min_element(energies.begin(), energies.end());
  std::vector<double> w(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) {
    w[i] = std::isinf(temperature) ? 1.0 : std::exp(-(energies[i] - e_min) / temperature);
  }
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= z;
  return w;
}

LyapunovRecord average_records(std::span<const LyapunovRecord> records, std::span<const double> weights) {
  if (records.empty() || records.size() != weights.size()) {
    throw std::invalid_argument("average_records: need one weight per record");
  }
  const std::size_t n = records.front().lambdas.size();
  LyapunovRecord avg;
  avg.t = records.front().t;
  avg.state_index = records.size() == 1 ? records.front().state_index : kAveragedState;
  avg.lambdas.assign(n, 0.0);
  avg.singular_values.assign(n, 0.0);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.lambdas.size() != n || rec.singular_values.size() != n) {
      throw std::invalid_argument("average_records: records have different exponent counts");
    }
    const double w = weights[r];
    for (std::size_t i = 0; i < n; ++i) {
      avg.lambdas[i] += w * rec.lambdas[i];
      avg.singular_values[i] += w * rec.singular_values[i];
    }
    avg.h_ks += w * rec.h_ks;
    avg.lambda_otoc += w * rec.lambda_otoc;
    avg.otoc_ratio += w * rec.otoc_ratio;
    avg.floored += rec.floored;
  }
  return avg;
}

}  // namespace qlyap
