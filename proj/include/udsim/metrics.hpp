#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "udsim/channels.hpp"
#include "udsim/core.hpp"
#include "udsim/discrimination.hpp"
#include "udsim/hilbert.hpp"
#include "udsim/linalg.hpp"

// Comparison metrics: report distance, state fidelity, the chi (process)
// matrix in the Heisenberg-Weyl operator basis, and process fidelity.
namespace udsim {

// Heisenberg-Weyl element W_{a,b} = X^a Z^b with X|k> = |k+1 mod d> and
// Z|k> = w^k |k>, w = e^{i 2 pi / d}.  The d^2 elements are unitary and
// trace orthogonal: Tr[W_m^dag W_n] = d * delta_{mn}.
inline cmatrix heisenberg_weyl(int a, int b, int d) {
  cmatrix w = cmatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const complex phase = std::exp(complex(0.0, 2.0 * pi * b * k / d));
    w((k + a) % d, k) = phase;
  }
  return w;
}

struct chi_matrix {
  cmatrix matrix;           // d^2 x d^2, index m = a*d + b
  std::string basis_label;  // fixed to the Heisenberg-Weyl convention
  int dim = 0;
};

inline std::string heisenberg_weyl_label(int d) {
  return "heisenberg-weyl-d" + std::to_string(d);
}

// chi_{mn} = sum_i c_{im} c_{in}^* with K_i = sum_m c_{im} W_m and
// c_{im} = Tr[W_m^dag K_i] / d, so that the map acts as
// E(rho) = sum_{mn} chi_{mn} W_m rho W_n^dag.  Trace-preserving maps give
// Tr[chi] = 1 in this normalization.
inline chi_matrix chi_of(const kraus_channel& ch) {
  const int d = ch.dim();
  const int n = d * d;
  cmatrix coeff(static_cast<Eigen::Index>(ch.rank()), n);
  for (int m = 0; m < n; ++m) {
    const cmatrix w = heisenberg_weyl(m / d, m % d, d);
    for (int i = 0; i < ch.rank(); ++i)
      coeff(i, m) = (w.adjoint() * ch.kraus_ops()[i]).trace() /
                    static_cast<double>(d);
  }
  chi_matrix chi;
  chi.matrix = coeff.adjoint() * coeff;
  chi.matrix = 0.5 * (chi.matrix + chi.matrix.adjoint().eval());
  chi.basis_label = heisenberg_weyl_label(d);
  chi.dim = d;
  return chi;
}

// Reconstructs the map from its chi matrix (used for round-trip checks):
// E(rho) = sum_{mn} chi_{mn} W_m rho W_n^dag.
inline cmatrix apply_chi(const chi_matrix& chi, const cmatrix& rho) {
  const int d = chi.dim;
  std::vector<cmatrix> basis(d * d);
  for (int m = 0; m < d * d; ++m) basis[m] = heisenberg_weyl(m / d, m % d, d);
  cmatrix out = cmatrix::Zero(d, d);
  for (int m = 0; m < d * d; ++m)
    for (int n = 0; n < d * d; ++n) {
      const complex c = chi.matrix(m, n);
      if (std::abs(c) < 1e-300) continue;
      out += c * basis[m] * rho * basis[n].adjoint();
    }
  return out;
}

// F_P = Tr(sqrt(sqrt(chi_a) chi_b sqrt(chi_a)))^2; symmetric in its
// arguments and equal to 1 iff the maps coincide.
inline double process_fidelity(const chi_matrix& a, const chi_matrix& b) {
  if (a.basis_label != b.basis_label || a.dim != b.dim)
    throw std::invalid_argument("process_fidelity: basis mismatch");
  const cmatrix root = linalg::hermitian_sqrt(a.matrix, 1e-9);
  const cmatrix inner = root * b.matrix * root;
  const cmatrix outer =
      linalg::hermitian_sqrt(0.5 * (inner + inner.adjoint().eval()), 1e-9);
  const double f = outer.trace().real();
  return std::clamp(f * f, 0.0, 1.0);
}

// F_s = Tr(rho_simu rho_ideal) for a pure ideal state.
inline double state_fidelity(const density_matrix& simu,
                             const density_matrix& ideal_pure) {
  if (simu.size() != ideal_pure.size())
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  const double purity =
      (ideal_pure.matrix() * ideal_pure.matrix()).trace().real();
  if (purity < 1.0 - 1e-9)
    throw std::invalid_argument("state_fidelity: ideal state is not pure");
  const double f = (simu.matrix() * ideal_pure.matrix()).trace().real();
  return std::clamp(f, 0.0, 1.0);
}

// D = sum |A_simu - A_ideal| / N over the full conditional matrix, N being
// the number of prepared operations (matrix rows).
inline double distance_D(const rmatrix& simulated, const rmatrix& ideal) {
  if (simulated.rows() != ideal.rows() || simulated.cols() != ideal.cols())
    throw std::invalid_argument("distance_D: shape mismatch");
  return (simulated - ideal).cwiseAbs().sum() /
         static_cast<double>(simulated.rows());
}

inline double distance_D(const discrimination_report& simulated,
                         const discrimination_report& ideal) {
  return distance_D(simulated.conditional, ideal.conditional);
}

}  // namespace udsim
