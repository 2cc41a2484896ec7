#pragma once

#include <string>
#include <vector>

#include "udsim/core.hpp"
#include "udsim/linalg.hpp"

// Finite-dimensional Hilbert-space primitives: normalized state vectors,
// density matrices, Fock and coherent states, and truncated displacement
// operators.  States are immutable after construction; all comparisons are
// phase-insensitive (use |overlap| or density matrices).
namespace udsim {

class state_vector {
 public:
  explicit state_vector(cvector amplitudes)
      : amplitudes_(std::move(amplitudes)) {
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > tol::state_norm)
      throw std::invalid_argument("state_vector: norm " +
                                  std::to_string(norm) + " is not 1");
  }

  // Normalizes before constructing; rejects (near-)zero vectors.
  static state_vector normalized(cvector amplitudes) {
    const double norm = amplitudes.norm();
    if (norm < 1e-12)
      throw std::invalid_argument("state_vector: cannot normalize zero vector");
    return state_vector(cvector(amplitudes / norm));
  }

  const cvector& amplitudes() const { return amplitudes_; }
  int size() const { return static_cast<int>(amplitudes_.size()); }
  complex operator[](int i) const { return amplitudes_[i]; }

 private:
  cvector amplitudes_;
};

class density_matrix {
 public:
  explicit density_matrix(cmatrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols())
      throw std::invalid_argument("density_matrix: matrix is not square");
    if (!linalg::is_hermitian(matrix_, tol::hermitian))
      throw std::invalid_argument("density_matrix: matrix is not Hermitian");
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > tol::trace_one)
      throw std::invalid_argument("density_matrix: trace " +
                                  std::to_string(tr) + " is not 1");
    if (linalg::min_eigenvalue(matrix_) < -tol::psd)
      throw std::invalid_argument("density_matrix: matrix is not PSD");
  }

  static density_matrix pure(const state_vector& psi) {
    return density_matrix(cmatrix(psi.amplitudes() *
                                  psi.amplitudes().adjoint()));
  }

  const cmatrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }

 private:
  cmatrix matrix_;
};

inline state_vector fock_state(int k, const hilbert_dim& dim) {
  if (k < 0 || k >= dim.d_trunc)
    throw std::out_of_range("fock_state: index " + std::to_string(k) +
                            " outside truncation " +
                            std::to_string(dim.d_trunc));
  return state_vector(cvector(cvector::Unit(dim.d_trunc, k)));
}

// Truncated coherent state |alpha>.  Amplitudes follow the Poisson series
// c_n = c_{n-1} * alpha / sqrt(n); the weight lost to the truncated tail
// must stay below the leakage bound, after which the state is renormalized.
inline state_vector coherent_state(complex alpha, const hilbert_dim& dim,
                                   double leakage_bound = tol::truncation) {
  cvector amps(dim.d_trunc);
  amps[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim.d_trunc; ++n)
    amps[n] = amps[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  const double leakage = 1.0 - amps.squaredNorm();
  if (leakage > leakage_bound)
    throw std::runtime_error(
        "coherent_state: truncation insufficient, leakage " +
        std::to_string(leakage) + " exceeds " +
        std::to_string(leakage_bound));
  return state_vector::normalized(std::move(amps));
}

// Annihilation operator on the truncated space: <n-1| a |n> = sqrt(n).
inline cmatrix annihilation_operator(const hilbert_dim& dim) {
  cmatrix a = cmatrix::Zero(dim.d_trunc, dim.d_trunc);
  for (int n = 1; n < dim.d_trunc; ++n)
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// D(alpha) = exp(alpha a^dag - alpha^* a) on the truncated space.  The
// result is unitary by construction; truncation quality is checked by
// comparing D(alpha)|0> against the coherent-state series.
inline cmatrix displacement_operator(complex alpha, const hilbert_dim& dim) {
  const cmatrix a = annihilation_operator(dim);
  const cmatrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  cmatrix d = linalg::expm_anti_hermitian(gen);
  cvector series(dim.d_trunc);
  series[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim.d_trunc; ++n)
    series[n] = series[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  if ((d.col(0) - series).norm() > 1e-8)
    throw std::runtime_error(
        "displacement_operator: truncation insufficient for |alpha| = " +
        std::to_string(std::abs(alpha)));
  return d;
}

inline complex overlap(const state_vector& a, const state_vector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("overlap: dimension mismatch");
  return a.amplitudes().dot(b.amplitudes());  // conjugates first argument
}

inline cmatrix gram_matrix(const std::vector<state_vector>& states) {
  const int n = static_cast<int>(states.size());
  cmatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = overlap(states[i], states[j]);
  return g;
}

}  // namespace udsim
