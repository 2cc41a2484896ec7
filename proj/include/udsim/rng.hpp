#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "udsim/core.hpp"
#include "udsim/linalg.hpp"

// Seeded randomness with an explicitly specified mapping from engine output
// to doubles, so that equal seeds give equal streams regardless of the
// standard library's distribution implementations.
namespace udsim {

// splitmix64 step; used to derive independent substreams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class random_source {
 public:
  explicit random_source(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (pairs generated together).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

  complex gaussian_complex() {
    const double re = gaussian();
    const double im = gaussian();
    return complex(re, im);
  }

  // Haar-uniform unit vector with the global phase fixed so the first
  // component of largest magnitude is real and nonnegative.
  cvector unit_vector(int dim) {
    cvector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gaussian_complex();
    v.normalize();
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    const complex z = v[pivot];
    v *= std::conj(z) / std::abs(z);
    return v;
  }

  // Haar-distributed unitary via QR of a complex Gaussian matrix with the
  // usual R-diagonal phase fix.
  cmatrix unitary(int dim) {
    cmatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = gaussian_complex();
    Eigen::HouseholderQR<cmatrix> qr(g);
    cmatrix q = qr.householderQ();
    cmatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
      const complex d = r(j, j);
      q.col(j) *= std::abs(d) > 0 ? d / std::abs(d) : complex(1.0, 0.0);
    }
    return q;
  }

  // Random CPTP Kraus set of the requested rank: Gaussian blocks G_i
  // whitened by (sum G_i^dag G_i)^{-1/2}, so sum K_i^dag K_i = I exactly.
  std::vector<cmatrix> cptp_kraus(int dim, int rank) {
    std::vector<cmatrix> blocks(rank);
    cmatrix gram = cmatrix::Zero(dim, dim);
    for (auto& g : blocks) {
      g.resize(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = gaussian_complex();
      gram += g.adjoint() * g;
    }
    Eigen::SelfAdjointEigenSolver<cmatrix> es(gram);
    rvector inv_sqrt = es.eigenvalues();
    for (Eigen::Index i = 0; i < inv_sqrt.size(); ++i)
      inv_sqrt[i] = 1.0 / std::sqrt(inv_sqrt[i]);
    const cmatrix whiten =
        es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
    for (auto& g : blocks) g = g * whiten;
    return blocks;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace udsim
