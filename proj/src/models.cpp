#include "qlyap/models.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>

#include "qlyap/rng.hpp"

namespace qlyap {

SykCouplings draw_syk_couplings(int n_majorana, double j_scale, double k_scale, std::uint64_t seed) {
  if (n_majorana < 2 || n_majorana % 2 != 0) {
    throw std::invalid_argument("draw_syk_couplings: N must be even and >= 2");
  }
  if (j_scale < 0.0 || k_scale < 0.0) {
    throw std::invalid_argument("draw_syk_couplings: coupling scales must be non-negative");
  }
  SykCouplings c;
  c.n_majorana = n_majorana;
  c.j_scale = j_scale;
  c.k_scale = k_scale;
  c.seed = seed;
  CounterRng rng(seed);
  const int n = n_majorana;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k)
        for (int l = k + 1; l <= n; ++l) c.j_tensor.push_back(j_scale * rng.normal());
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) c.k_tensor.push_back(k_scale * rng.normal());
  return c;
}

XxzFields draw_xxz_fields(int n_site, double w_scale, std::uint64_t seed) {
  if (n_site < 2) {
    throw std::invalid_argument("draw_xxz_fields: n_site must be >= 2");
  }
  if (w_scale < 0.0) {
    throw std::invalid_argument("draw_xxz_fields: W must be non-negative");
  }
  XxzFields f;
  f.n_site = n_site;
  f.w_scale = w_scale;
  f.seed = seed;
  CounterRng rng(seed);
  for (int s = 0; s < n_site; ++s) f.w.push_back(rng.uniform(-w_scale, w_scale));
  return f;
}

std::size_t quartic_index(int n, int i, int j, int k, int l) {
  if (!(1 <= i && i < j && j < k && k < l && l <= n)) {
    throw std::out_of_range("quartic_index: need 1 <= i < j < k < l <= N");
  }
  std::size_t idx = 0;
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c)
        for (int d = c + 1; d <= n; ++d) {
          if (a == i && b == j && c == k && d == l) return idx;
          ++idx;
        }
  return idx;
}

std::size_t quadratic_index(int n, int i, int j) {
  if (!(1 <= i && i < j && j <= n)) {
    throw std::out_of_range("quadratic_index: need 1 <= i < j <= N");
  }
  // Pairs with first index a < i come before: sum_{a<i} (n - a).
  const auto ii = static_cast<std::size_t>(i);
  const auto nn = static_cast<std::size_t>(n);
  const std::size_t before = (ii - 1) * nn - (ii - 1) * ii / 2;
  return before + static_cast<std::size_t>(j - i - 1);
}

ComplexMatrix build_syk(const SykCouplings& couplings, const MajoranaBasis& basis) {
  const int n = couplings.n_majorana;
  if (basis.n_majorana() != n) {
    throw std::invalid_argument("build_syk: basis has N=" + std::to_string(basis.n_majorana()) +
                                " but couplings have N=" + std::to_string(n));
  }
  const auto n_quartic = static_cast<std::size_t>(n) * (n - 1) * (n - 2) * (n - 3) / 24;
  const auto n_quadratic = static_cast<std::size_t>(n) * (n - 1) / 2;
  if (couplings.j_tensor.size() != n_quartic || couplings.k_tensor.size() != n_quadratic) {
    throw std::invalid_argument("build_syk: coupling tensors have the wrong size");
  }

  // pair[(i,j)] = psi_i psi_j for i<j, reused by both terms.
  std::vector<MonomialOperator> pairs;
  pairs.reserve(n_quadratic);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) pairs.push_back(basis.monomial(i) * basis.monomial(j));
  auto pair = [&](int i, int j) -> const MonomialOperator& { return pairs[quadratic_index(n, i, j)]; };

  ComplexMatrix h = ComplexMatrix::Zero(basis.dim(), basis.dim());
  const double quartic_norm = std::sqrt(6.0 / (static_cast<double>(n) * n * n));
  std::size_t idx = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k)
        for (int l = k + 1; l <= n; ++l) {
          const double coupling = couplings.j_tensor[idx++];
          if (coupling != 0.0) (pair(i, j) * pair(k, l)).add_to(h, quartic_norm * coupling);
        }

  const Complex quadratic_norm = kI / std::sqrt(static_cast<double>(n));
  idx = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double coupling = couplings.k_tensor[idx++];
      if (coupling != 0.0) pair(i, j).add_to(h, quadratic_norm * coupling);
    }
  return h;
}

ComplexMatrix build_xxz(const XxzFields& fields, const SpinBasis& basis) {
  const int n = fields.n_site;
  if (basis.n_site() != n) {
    throw std::invalid_argument("build_xxz: basis and fields disagree on n_site");
  }
  if (n < 2 || fields.w.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("build_xxz: need n_site >= 2 and one field per site");
  }
  std::vector<std::array<MonomialOperator, 3>> sigma;
  for (int s = 1; s <= n; ++s) {
    sigma.push_back({MonomialOperator::from_dense(basis.sigma_x(s)),
                     MonomialOperator::from_dense(basis.sigma_y(s)),
                     MonomialOperator::from_dense(basis.sigma_z(s))});
  }
  ComplexMatrix h = ComplexMatrix::Zero(basis.dim(), basis.dim());
  for (int s = 0; s < n; ++s) {
    const int next = (s + 1) % n;
    for (int a = 0; a < 3; ++a) (sigma[s][a] * sigma[next][a]).add_to(h, 0.25);
    sigma[s][2].add_to(h, 0.5 * fields.w[static_cast<std::size_t>(s)]);
  }
  return h;
}

TwiceSz TwiceSz::from_half_integer(double sz) {
  const double twice = 2.0 * sz;
  const double rounded = std::round(twice);
  if (std::abs(twice - rounded) > 1e-12) {
    throw std::invalid_argument("S_z value " + std::to_string(sz) + " is not a half-integer");
  }
  return TwiceSz{static_cast<int>(rounded)};
}

std::vector<std::size_t> sz_sector_mask(const SpinBasis& basis, TwiceSz total_sz) {
  const int n = basis.n_site();
  if (std::abs(total_sz.value) > n || (n - total_sz.value) % 2 != 0) {
    throw std::invalid_argument("sz_sector_mask: S_z = " + std::to_string(total_sz.sz()) +
                                " is not reachable with " + std::to_string(n) + " sites");
  }
  std::vector<std::size_t> out;
  const auto d = static_cast<std::size_t>(basis.dim());
  for (std::size_t s = 0; s < d; ++s) {
    if (basis.twice_sz_of(s) == total_sz.value) out.push_back(s);
  }
  return out;
}

std::vector<std::size_t> sz_sector_mask(const SpinBasis& basis, double total_sz) {
  return sz_sector_mask(basis, TwiceSz::from_half_integer(total_sz));
}

ComplexMatrix build_xxz_sector(const XxzFields& fields, const std::vector<std::size_t>& sector) {
  const int n = fields.n_site;
  if (n < 2 || fields.w.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("build_xxz_sector: need n_site >= 2 and one field per site");
  }
  std::unordered_map<std::size_t, Eigen::Index> position;
  for (std::size_t a = 0; a < sector.size(); ++a) position.emplace(sector[a], static_cast<Eigen::Index>(a));

  const auto dim = static_cast<Eigen::Index>(sector.size());
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  auto bit_of = [n](int site0) { return std::size_t{1} << (n - 1 - site0); };  // 0-based site
  for (Eigen::Index a = 0; a < dim; ++a) {
    const std::size_t config = sector[static_cast<std::size_t>(a)];
    double diag = 0.0;
    for (int s = 0; s < n; ++s) {
      const int next = (s + 1) % n;
      const bool down_s = (config & bit_of(s)) != 0;
      const bool down_next = (config & bit_of(next)) != 0;
      const double zs = down_s ? -1.0 : 1.0;
      const double znext = down_next ? -1.0 : 1.0;
      diag += 0.25 * zs * znext + 0.5 * fields.w[static_cast<std::size_t>(s)] * zs;
      if (down_s != down_next) {
        // (1/4)(XX + YY) = (1/2)(sigma+ sigma- + sigma- sigma+) swaps antiparallel spins.
        const std::size_t flipped = config ^ bit_of(s) ^ bit_of(next);
        const auto it = position.find(flipped);
        if (it == position.end()) {
          throw std::invalid_argument("build_xxz_sector: index set is not closed under the Hamiltonian");
        }
        h(it->second, a) += 0.5;
      }
    }
    h(a, a) += diag;
  }
  return h;
}

nlohmann::json to_json(const SykCouplings& c) {
  return {{"model", "syk"}, {"N", c.n_majorana}, {"J", c.j_scale},       {"K", c.k_scale},
          {"seed", c.seed}, {"j_tensor", c.j_tensor}, {"k_tensor", c.k_tensor}};
}

nlohmann::json to_json(const XxzFields& f) {
  return {{"model", "xxz"}, {"N_site", f.n_site}, {"W", f.w_scale}, {"seed", f.seed}, {"w", f.w}};
}

SykCouplings syk_couplings_from_json(const nlohmann::json& j) {
  if (j.at("model").get<std::string>() != "syk") {
    throw std::invalid_argument("syk_couplings_from_json: model is not syk");
  }
  SykCouplings c;
  c.n_majorana = j.at("N").get<int>();
  c.j_scale = j.at("J").get<double>();
  c.k_scale = j.at("K").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.j_tensor = j.at("j_tensor").get<std::vector<double>>();
  c.k_tensor = j.at("k_tensor").get<std::vector<double>>();
  return c;
}

XxzFields xxz_fields_from_json(const nlohmann::json& j) {
  if (j.at("model").get<std::string>() != "xxz") {
    throw std::invalid_argument("xxz_fields_from_json: model is not xxz");
  }
  XxzFields f;
  f.n_site = j.at("N_site").get<int>();
  f.w_scale = j.at("W").get<double>();
  f.seed = j.at("seed").get<std::uint64_t>();
  f.w = j.at("w").get<std::vector<double>>();
  return f;
}

}  // namespace qlyap
