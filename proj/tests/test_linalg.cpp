#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "udsim/linalg.hpp"

using namespace udsim;
using namespace udsim::linalg;

TEST_CASE("max_abs and is_hermitian") {
  cmatrix m(2, 2);
  m << complex(1.0, 0.0), complex(0.0, 2.0), complex(0.0, -2.0),
      complex(-3.0, 0.0);
  REQUIRE(max_abs(m) == Catch::Approx(3.0));
  REQUIRE(is_hermitian(m));
  m(0, 1) = complex(0.0, 2.0 + 1e-6);
  REQUIRE_FALSE(is_hermitian(m));
  REQUIRE(is_hermitian(m, 1e-5));
}

TEST_CASE("min_eigenvalue on a diagonal matrix") {
  cmatrix m = cmatrix::Zero(3, 3);
  m(0, 0) = 3.0;
  m(1, 1) = -1.0;
  m(2, 2) = 0.5;
  REQUIRE(min_eigenvalue(m) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("hermitian_sqrt of a known 2x2 matrix") {
  // [[2,1],[1,2]] has eigenpairs 3 on (1,1)/sqrt2 and 1 on (1,-1)/sqrt2,
  // so the root is [[(s+1)/2,(s-1)/2],[(s-1)/2,(s+1)/2]] with s = sqrt(3).
  cmatrix m(2, 2);
  m << 2.0, 1.0, 1.0, 2.0;
  const double s = std::sqrt(3.0);
  cmatrix expected(2, 2);
  expected << (s + 1.0) / 2.0, (s - 1.0) / 2.0, (s - 1.0) / 2.0,
      (s + 1.0) / 2.0;
  const cmatrix root = hermitian_sqrt(m);
  REQUIRE(max_abs(root - expected) < 1e-12);
  REQUIRE(max_abs(root * root - m) < 1e-12);
}

TEST_CASE("hermitian_sqrt clamps tiny negatives and rejects real ones") {
  cmatrix nearly = cmatrix::Zero(2, 2);
  nearly(0, 0) = 1.0;
  nearly(1, 1) = -1e-11;  // inside the default psd tolerance
  const cmatrix root = hermitian_sqrt(nearly);
  REQUIRE(root(1, 1).real() == 0.0);

  cmatrix negative = cmatrix::Zero(2, 2);
  negative(0, 0) = 1.0;
  negative(1, 1) = -1e-3;
  REQUIRE_THROWS_AS(hermitian_sqrt(negative), std::invalid_argument);

  cmatrix skew(2, 2);
  skew << 0.0, 1.0, -1.0, 0.0;
  REQUIRE_THROWS_AS(hermitian_sqrt(skew), std::invalid_argument);
}

TEST_CASE("pseudo_inverse inverts the support and kills the kernel") {
  cmatrix m = cmatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  const cmatrix pinv = pseudo_inverse(m);
  REQUIRE(pinv(0, 0).real() == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(max_abs(pinv) == Catch::Approx(0.5).margin(1e-12));

  cmatrix a(3, 3);
  a << 1.0, 2.0, 0.0, complex(0.0, 1.0), 0.5, 1.0, 0.0, 3.0, complex(0.0, -2.0);
  const cmatrix ap = pseudo_inverse(a);
  REQUIRE(max_abs(a * ap * a - a) < 1e-10);
  REQUIRE(max_abs(ap * a * ap - ap) < 1e-10);
}

TEST_CASE("support_projector keeps the span of a rank-1 matrix") {
  cvector v(3);
  v << 0.6, 0.0, 0.8;
  const cmatrix rho = v * v.adjoint();
  const cmatrix p = support_projector(rho, 1e-9);
  REQUIRE(p.trace().real() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(max_abs(p - rho) < 1e-12);  // projector onto v itself
  REQUIRE(max_abs(p * p - p) < 1e-12);
}

TEST_CASE("expm_anti_hermitian reproduces a planar rotation") {
  const double theta = 0.7;
  cmatrix g(2, 2);
  g << 0.0, theta, -theta, 0.0;  // real antisymmetric = anti-Hermitian
  const cmatrix u = expm_anti_hermitian(g);
  cmatrix expected(2, 2);
  expected << std::cos(theta), std::sin(theta), -std::sin(theta),
      std::cos(theta);
  REQUIRE(max_abs(u - expected) < 1e-12);
  REQUIRE(max_abs(u * u.adjoint() - cmatrix::Identity(2, 2)) < 1e-12);
  REQUIRE_THROWS_AS(expm_anti_hermitian(cmatrix::Identity(2, 2) * 2.0),
                    std::invalid_argument);
}

TEST_CASE("span_union merges overlapping column spans") {
  cmatrix a(3, 1), b(3, 2);
  a.col(0) = cvector::Unit(3, 0);
  b.col(0) = cvector::Unit(3, 0);  // duplicate direction
  b.col(1) = cvector::Unit(3, 2);
  const cmatrix s = span_union({a, b});
  REQUIRE(s.cols() == 2);
  REQUIRE(max_abs(s.adjoint() * s - cmatrix::Identity(2, 2)) < 1e-12);
  // The span contains e0 and e2 but not e1.
  const cmatrix p = s * s.adjoint();
  REQUIRE((p * cvector::Unit(3, 0)).norm() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE((p * cvector::Unit(3, 1)).norm() < 1e-12);
  REQUIRE(span_union({}).cols() == 0);
}

TEST_CASE("orthonormal_completion extends to a unitary basis") {
  cmatrix v(3, 1);
  v.col(0) = cvector(3);
  v(0, 0) = 0.6;
  v(1, 0) = 0.0;
  v(2, 0) = complex(0.0, 0.8);
  const cmatrix basis = orthonormal_completion(v);
  REQUIRE(basis.rows() == 3);
  REQUIRE(basis.cols() == 3);
  REQUIRE(max_abs(basis.adjoint() * basis - cmatrix::Identity(3, 3)) < 1e-12);
  REQUIRE(max_abs(basis.col(0) - v.col(0)) == 0.0);

  // Preferred candidates are taken first when independent.
  cmatrix preferred(3, 1);
  preferred.col(0) = cvector::Unit(3, 1);
  const cmatrix with_pref = orthonormal_completion(v, preferred);
  REQUIRE(std::abs(with_pref.col(1).dot(cvector::Unit(3, 1))) ==
          Catch::Approx(1.0).margin(1e-12));

  cmatrix too_many(2, 3);
  too_many.setZero();
  REQUIRE_THROWS_AS(orthonormal_completion(too_many), std::invalid_argument);
}

TEST_CASE("kron of diagonal matrices") {
  cmatrix a = cmatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const cmatrix k = kron(a, cmatrix::Identity(2, 2));
  REQUIRE(k.rows() == 4);
  cmatrix expected = cmatrix::Zero(4, 4);
  expected(0, 0) = expected(1, 1) = 1.0;
  expected(2, 2) = expected(3, 3) = 2.0;
  REQUIRE(max_abs(k - expected) == 0.0);
}
