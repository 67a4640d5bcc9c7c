#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "qlyap/qops.hpp"

namespace qlyap {

struct SykCouplings {
  int n_majorana = 0;
  double j_scale = 1.0;  // standard deviation of J_ijkl
  double k_scale = 0.0;  // standard deviation of K_ij
  std::uint64_t seed = 0;
  std::vector<double> j_tensor;  // i<j<k<l, lexicographic
  std::vector<double> k_tensor;  // i<j, lexicographic
};

struct XxzFields {
  int n_site = 0;
  double w_scale = 0.0;  // fields drawn from [-W, W]
  std::uint64_t seed = 0;
  std::vector<double> w;
};

/// Quartic couplings are drawn first, then quadratic ones, from one counter stream.
/// Both sets are always drawn so that the J values do not depend on K.
SykCouplings draw_syk_couplings(int n_majorana, double j_scale, double k_scale, std::uint64_t seed);
XxzFields draw_xxz_fields(int n_site, double w_scale, std::uint64_t seed);

/// Index of J_ijkl (1-based, i<j<k<l) inside SykCouplings::j_tensor.
std::size_t quartic_index(int n, int i, int j, int k, int l);
std::size_t quadratic_index(int n, int i, int j);

/// sqrt(6/N^3) sum J_ijkl psi_i psi_j psi_k psi_l + (i/sqrt(N)) sum K_ij psi_i psi_j.
ComplexMatrix build_syk(const SykCouplings& couplings, const MajoranaBasis& basis);

/// sum_i (1/4) sigma_i . sigma_{i+1} + (w_i/2) sigma_{z,i}, periodic, in the full 2^n space.
ComplexMatrix build_xxz(const XxzFields& fields, const SpinBasis& basis);

/// Twice the total S_z, so that half-integer sectors are exact.
struct TwiceSz {
  int value;
  static TwiceSz from_half_integer(double sz);
  double sz() const { return 0.5 * value; }
};

/// Computational basis indices (ascending) with the requested S_z^(total).
std::vector<std::size_t> sz_sector_mask(const SpinBasis& basis, double total_sz);
std::vector<std::size_t> sz_sector_mask(const SpinBasis& basis, TwiceSz total_sz);

/// XXZ Hamiltonian restricted to a sector, assembled directly from bit configurations.
ComplexMatrix build_xxz_sector(const XxzFields& fields, const std::vector<std::size_t>& sector);

nlohmann::json to_json(const SykCouplings& c);
nlohmann::json to_json(const XxzFields& f);
SykCouplings syk_couplings_from_json(const nlohmann::json& j);
XxzFields xxz_fields_from_json(const nlohmann::json& j);

}  // namespace qlyap
