#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qlyap/evolve.hpp"
#include "qlyap/qops.hpp"

using namespace qlyap;

TEST_CASE("diagonalize small cases") {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 3, 1, 2;
  const auto e = diagonalize(d);
  CHECK(e.energies(0) == doctest::Approx(1));
  CHECK(e.energies(1) == doctest::Approx(2));
  CHECK(e.energies(2) == doctest::Approx(3));

  const auto x = diagonalize(pauli_matrix(Pauli::x));
  CHECK(x.energies(0) == doctest::Approx(-1));
  CHECK(x.energies(1) == doctest::Approx(1));
  const ComplexVector minus = x.vectors.col(0);
  CHECK(std::abs(minus(0) + minus(1)) < 1e-12);
  CHECK(std::abs(std::abs(minus(0)) - 1 / std::sqrt(2.0)) < 1e-12);

  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(diagonalize(bad), std::invalid_argument);
}

TEST_CASE("reconstruction and unitarity at dim 64") {
  const ComplexMatrix h = oracle::random_hermitian(64, 3);
  const auto e = diagonalize(h);
  const ComplexMatrix rec = e.vectors * e.energies.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  CHECK(max_abs(rec - h) < 1e-10);
  CHECK(max_abs(e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(64, 64)) < 1e-10);
  for (Eigen::Index i = 1; i < e.dim(); ++i) CHECK(e.energies(i) >= e.energies(i - 1));
  CHECK(max_abs(h * e.vectors - e.vectors * e.energies.cast<Complex>().asDiagonal()) < 1e-8 * e.spectral_width());
}

TEST_CASE("heisenberg picture") {
  const ComplexMatrix h = oracle::random_hermitian(16, 5);
  const auto e = diagonalize(h);
  const ComplexMatrix o = oracle::random_hermitian(16, 6);
  CHECK(max_abs(heisenberg(o, e, 0.0) - o) < 1e-12);
  CHECK(max_abs(heisenberg(h * h, e, 3.7) - h * h) < 1e-10);
  CHECK(std::abs(heisenberg(o, e, 2.1).norm() - o.norm()) < 1e-10);

  const EigenSystem e1{e.energies, e.vectors};
  const ComplexMatrix twice = heisenberg(heisenberg(o, e, 0.4), e1, 1.1);
  CHECK(max_abs(twice - heisenberg(o, e, 1.5)) < 1e-9);

  for (double t : {0.1, 0.5, 1.0}) {
    const ComplexMatrix u = oracle::taylor_propagator(h, t);
    CHECK(max_abs(heisenberg(o, e, t) - u.adjoint() * o * u) < 1e-8);
  }
}

TEST_CASE("spin precession") {
  const double w = 1.3;
  const auto e = diagonalize(0.5 * w * pauli_matrix(Pauli::z));
  for (double t : {0.2, 1.0, 2.5}) {
    const ComplexMatrix expect =
        std::cos(w * t) * pauli_matrix(Pauli::x) - std::sin(w * t) * pauli_matrix(Pauli::y);
    CHECK(max_abs(heisenberg(pauli_matrix(Pauli::x), e, t) - expect) < 1e-12);
  }
}

TEST_CASE("state evolution") {
  const ComplexMatrix h = oracle::random_hermitian(32, 8);
  const auto e = diagonalize(h);
  ComplexVector v = ComplexVector::Random(32);
  v.normalize();
  CHECK((evolve_state(v, e, 0.0) - v).norm() < 1e-12);

  const ComplexVector ek = e.vectors.col(4);
  const ComplexVector ekt = evolve_state(ek, e, 2.0);
  CHECK((ekt - std::exp(Complex(0, -e.energies(4) * 2.0)) * ek).norm() < 1e-12);

  const double energy = (v.adjoint() * h * v)(0).real();
  for (double t : {0.3, 1.0, 4.0}) {
    const ComplexVector vt = evolve_state(v, e, t);
    CHECK(std::abs((vt.adjoint() * h * vt)(0).real() - energy) < 1e-10);
  }
  const double scale = 5.0 / e.energies.cwiseAbs().maxCoeff();
  const ComplexVector ref = oracle::taylor_propagator(h, scale) * v;
  CHECK((evolve_state(v, e, scale) - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("eigenbasis phases") {
  const ComplexMatrix h = oracle::random_hermitian(8, 12);
  const auto e = diagonalize(h);
  const ComplexMatrix o = oracle::random_hermitian(8, 13);
  const ComplexMatrix rotated = to_eigenbasis(o, e);
  const ComplexMatrix via_phases = heisenberg_phases(e.energies, e.energies, 0.9).cwiseProduct(rotated);
  CHECK(max_abs(e.vectors * via_phases * e.vectors.adjoint() - heisenberg(o, e, 0.9)) < 1e-12);
}
