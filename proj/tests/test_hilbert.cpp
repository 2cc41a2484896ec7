#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "udsim/hilbert.hpp"

using namespace udsim;

TEST_CASE("state_vector validates the norm") {
  cvector good(2);
  good << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  REQUIRE_NOTHROW(state_vector(good));

  cvector bad(2);
  bad << 1.0, 1.0;
  REQUIRE_THROWS_AS(state_vector(bad), std::invalid_argument);
  const state_vector fixed = state_vector::normalized(bad);
  REQUIRE(std::abs(fixed[0]) == Catch::Approx(1.0 / std::sqrt(2.0)));
  REQUIRE_THROWS_AS(state_vector::normalized(cvector::Zero(2)),
                    std::invalid_argument);
}

TEST_CASE("density_matrix validates shape, hermiticity, trace, positivity") {
  REQUIRE_THROWS_AS(density_matrix(cmatrix::Zero(2, 3)), std::invalid_argument);

  cmatrix not_herm = cmatrix::Identity(2, 2) / 2.0;
  not_herm(0, 1) = complex(0.0, 0.5);
  REQUIRE_THROWS_AS(density_matrix(not_herm), std::invalid_argument);

  REQUIRE_THROWS_AS(density_matrix(cmatrix::Identity(2, 2)),
                    std::invalid_argument);  // trace 2

  cmatrix indefinite = cmatrix::Zero(2, 2);
  indefinite(0, 0) = 1.5;
  indefinite(1, 1) = -0.5;
  REQUIRE_THROWS_AS(density_matrix(indefinite), std::invalid_argument);

  const density_matrix rho = density_matrix::pure(fock_state(1, hilbert_dim(3)));
  REQUIRE(rho.matrix()(1, 1).real() == Catch::Approx(1.0));
}

TEST_CASE("fock_state basis vectors and range check") {
  const hilbert_dim dim(4);
  const state_vector two = fock_state(2, dim);
  REQUIRE(two.size() == 4);
  REQUIRE(std::abs(two[2] - complex(1.0, 0.0)) == 0.0);
  REQUIRE_THROWS_AS(fock_state(4, dim), std::out_of_range);
  REQUIRE_THROWS_AS(fock_state(-1, dim), std::out_of_range);
}

TEST_CASE("coherent_state Poisson statistics") {
  const hilbert_dim dim(2, 40);
  const state_vector alpha = coherent_state(complex(1.6, 0.0), dim);
  REQUIRE(alpha.amplitudes().norm() == Catch::Approx(1.0).margin(1e-12));
  // Vacuum weight |<0|alpha>|^2 = e^{-|alpha|^2}; e^{-2.56} frozen below.
  REQUIRE(std::norm(alpha[0]) ==
          Catch::Approx(0.077304740443299746).margin(1e-12));
  // Mean photon number is |alpha|^2.
  double mean = 0.0;
  for (int n = 0; n < 40; ++n) mean += n * std::norm(alpha[n]);
  REQUIRE(mean == Catch::Approx(2.56).margin(1e-10));
}

TEST_CASE("coherent_state rejects insufficient truncation") {
  REQUIRE_THROWS_AS(coherent_state(complex(3.0, 0.0), hilbert_dim(2, 5)),
                    std::runtime_error);
}

TEST_CASE("annihilation_operator matrix elements") {
  const cmatrix a = annihilation_operator(hilbert_dim(2, 4));
  REQUIRE(a(0, 1).real() == Catch::Approx(1.0));
  REQUIRE(a(1, 2).real() == Catch::Approx(std::sqrt(2.0)));
  REQUIRE(a(2, 3).real() == Catch::Approx(std::sqrt(3.0)));
  // [a, a^dag] = I away from the truncation edge.
  const cmatrix comm = a * a.adjoint() - a.adjoint() * a;
  REQUIRE(linalg::max_abs(comm.topLeftCorner(3, 3) - cmatrix::Identity(3, 3)) <
          1e-12);
}

TEST_CASE("displacement_operator is unitary and generates coherent states") {
  const hilbert_dim dim(2, 40);
  const complex alpha(0.9, -0.4);
  const cmatrix d = displacement_operator(alpha, dim);
  REQUIRE(linalg::max_abs(d * d.adjoint() - cmatrix::Identity(40, 40)) < 1e-9);
  const state_vector from_d(cvector(d.col(0)));
  const state_vector series = coherent_state(alpha, dim);
  REQUIRE(std::abs(overlap(from_d, series)) ==
          Catch::Approx(1.0).margin(1e-9));
  // Opposite displacements exponentiate negated generators, so they invert
  // each other exactly even on the truncated space.
  const cmatrix d_inv = displacement_operator(-alpha, dim);
  REQUIRE(linalg::max_abs(d * d_inv - cmatrix::Identity(40, 40)) < 1e-10);
  REQUIRE_THROWS_AS(displacement_operator(complex(4.0, 0.0), hilbert_dim(2, 6)),
                    std::runtime_error);
}

TEST_CASE("overlap conjugates its first argument") {
  cvector u(2), v(2);
  u << complex(0.0, 1.0), 0.0;
  v << 1.0, 0.0;
  const state_vector a(u), b(v);
  REQUIRE(overlap(a, b) == complex(0.0, -1.0));
  REQUIRE(overlap(b, a) == complex(0.0, 1.0));
  REQUIRE_THROWS_AS(overlap(a, fock_state(0, hilbert_dim(3))),
                    std::invalid_argument);
}

TEST_CASE("gram_matrix of coherent states matches the closed form") {
  // <alpha|beta> = exp(-(|a|^2+|b|^2)/2 + conj(a) b).
  const hilbert_dim dim(2, 40);
  const complex a(1.6, 0.0), b(0.0, 1.6);
  const cmatrix g =
      gram_matrix({coherent_state(a, dim), coherent_state(b, dim)});
  const complex expected =
      std::exp(-0.5 * (std::norm(a) + std::norm(b)) + std::conj(a) * b);
  REQUIRE(std::abs(g(0, 1) - expected) < 1e-12);
  REQUIRE(std::abs(std::abs(g(0, 1)) - 0.077304740443299746) < 1e-12);
  REQUIRE(g(0, 0).real() == Catch::Approx(1.0).margin(1e-12));
}
