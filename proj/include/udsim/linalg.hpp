#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "udsim/core.hpp"

// Small dense linear-algebra helpers shared by every module: Hermitian
// square roots, pseudoinverses, exponentials of anti-Hermitian generators,
// and deterministic orthonormal completions.
namespace udsim::linalg {

inline double max_abs(const cmatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const cmatrix& m, double tolerance = tol::hermitian) {
  return max_abs(m - m.adjoint()) <= tolerance;
}

inline double min_eigenvalue(const cmatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<cmatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Principal square root of a Hermitian PSD matrix.  Eigenvalues in
// [-neg_tol, 0) are clamped to zero; anything below -neg_tol is rejected.
inline cmatrix hermitian_sqrt(const cmatrix& m, double neg_tol = tol::psd) {
  if (!is_hermitian(m, 1e-9))
    throw std::invalid_argument("hermitian_sqrt: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<cmatrix> es(m);
  rvector vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -neg_tol)
      throw std::invalid_argument(
          "hermitian_sqrt: matrix is not PSD (min eigenvalue " +
          std::to_string(vals.minCoeff()) + ")");
    vals[i] = vals[i] > 0.0 ? std::sqrt(vals[i]) : 0.0;
  }
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

// Moore-Penrose pseudoinverse; singular values below rcond * sigma_max are
// treated as zero.
inline cmatrix pseudo_inverse(const cmatrix& m, double rcond = tol::pinv_cut) {
  Eigen::JacobiSVD<cmatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const rvector& sigma = svd.singularValues();
  const double cut = sigma.size() ? rcond * sigma.maxCoeff() : 0.0;
  rvector inv = rvector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > cut) inv[i] = 1.0 / sigma[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

// Projector onto the column span of a Hermitian PSD matrix (its support),
// keeping eigenvectors with eigenvalue above cut.
inline cmatrix support_projector(const cmatrix& m, double cut) {
  Eigen::SelfAdjointEigenSolver<cmatrix> es(m);
  cmatrix p = cmatrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > cut)
      p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  return p;
}

// exp(g) for anti-Hermitian g, via eigendecomposition of the Hermitian
// generator h = -i g; the result is unitary to machine precision.
inline cmatrix expm_anti_hermitian(const cmatrix& g) {
  const cmatrix h = complex(0.0, -1.0) * g;
  if (!is_hermitian(h, 1e-10))
    throw std::invalid_argument(
        "expm_anti_hermitian: generator is not anti-Hermitian");
  Eigen::SelfAdjointEigenSolver<cmatrix> es(h);
  cvector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases[i] = std::exp(complex(0.0, es.eigenvalues()[i]));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

// Orthonormal basis of the joint column span of the given matrices (each
// treated as a list of basis columns).  Columns with singular value below
// cut are dropped.
inline cmatrix span_union(const std::vector<cmatrix>& column_sets,
                          double cut = 1e-8) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : column_sets) {
    if (b.cols() == 0) continue;
    rows = b.rows();
    cols += b.cols();
  }
  if (cols == 0) return cmatrix::Zero(rows, 0);
  cmatrix stacked(rows, cols);
  Eigen::Index at = 0;
  for (const auto& b : column_sets) {
    if (b.cols() == 0) continue;
    stacked.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  Eigen::JacobiSVD<cmatrix> svd(stacked, Eigen::ComputeThinU);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Extends the orthonormal columns of v to a full orthonormal basis.
// Candidates are tried in a deterministic order: caller-supplied columns
// first, then identity columns; each is orthogonalized (twice, for
// stability) against everything accepted so far.
inline cmatrix orthonormal_completion(const cmatrix& v,
                                      const cmatrix& preferred = cmatrix()) {
  const Eigen::Index n = v.rows();
  cmatrix basis(n, n);
  Eigen::Index have = v.cols();
  if (have > n)
    throw std::invalid_argument("orthonormal_completion: too many columns");
  basis.leftCols(have) = v;
  auto try_candidate = [&](const cvector& cand) {
    if (have == n) return;
    cvector w = cand;
    for (int pass = 0; pass < 2; ++pass)
      w -= basis.leftCols(have) * (basis.leftCols(have).adjoint() * w);
    const double norm = w.norm();
    if (norm > 1e-6) basis.col(have++) = w / norm;
  };
  for (Eigen::Index j = 0; j < preferred.cols(); ++j)
    try_candidate(preferred.col(j));
  for (Eigen::Index j = 0; j < n && have < n; ++j)
    try_candidate(cvector::Unit(n, j));
  if (have < n)
    throw std::runtime_error("orthonormal_completion: basis incomplete");
  return basis;
}

// Kronecker product, a (x) b.
inline cmatrix kron(const cmatrix& a, const cmatrix& b) {
  cmatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace udsim::linalg
