#pragma once

#include <array>
#include <utility>
#include <vector>

#include "udsim/channels.hpp"
#include "udsim/core.hpp"
#include "udsim/discrimination.hpp"
#include "udsim/linalg.hpp"
#include "udsim/metrics.hpp"

// Compilation of channels (Kraus rank <= 4) and POVMs (<= 4 elements) into
// binary-tree circuits: joint system-ancilla unitaries whose first block
// column implements the layer isometry, with the mid-circuit ancilla
// outcome selecting the second layer.  A rank <= 2 operation needs a
// single layer (one joint unitary, one readout); rank 3-4 needs two.
namespace udsim {

// Joint unitaries are 2d x 2d on ancilla (x) system ordering: rows [0, d)
// belong to ancilla |0>, rows [d, 2d) to ancilla |1>.  For a two-layer
// circuit outcome_map sends the bit pair (b1, b2), packed as 2*b1 + b2, to
// the realized Kraus index; a single-layer circuit uses entries [b1] and
// leaves U_B0/U_B1 as identity placeholders.  Padded zero-probability
// branches carry -1.
struct binary_tree_circuit {
  int dim = 0;
  int layers = 2;
  cmatrix U_A, U_B0, U_B1;
  std::array<int, 4> outcome_map = {0, 1, 2, 3};

  cmatrix layer_block(int layer, int branch, int row) const {
    const cmatrix& u = layer == 0 ? U_A : (branch == 0 ? U_B0 : U_B1);
    return u.block(row * dim, 0, dim, dim);
  }
};

// First-layer pair A_0 = sqrt(K0^dag K0 + K1^dag K1),
// A_1 = sqrt(K2^dag K2 + K3^dag K3); requires the list padded to four.
inline std::pair<cmatrix, cmatrix> layer_split(
    const std::vector<cmatrix>& kraus4) {
  if (kraus4.size() != 4)
    throw std::invalid_argument("layer_split: expected exactly 4 operators");
  const cmatrix a0_sq = kraus4[0].adjoint() * kraus4[0] +
                        kraus4[1].adjoint() * kraus4[1];
  const cmatrix a1_sq = kraus4[2].adjoint() * kraus4[2] +
                        kraus4[3].adjoint() * kraus4[3];
  return {linalg::hermitian_sqrt(a0_sq), linalg::hermitian_sqrt(a1_sq)};
}

// Second-layer pair B_i = K_i A^+ on the support of A, with the stacked
// isometry extended over ker(A) so that B0^dag B0 + B1^dag B1 = I even for
// singular A.  The extension columns are orthogonal to the range of the
// stacked operator, so reconstruction B_i A = K_i is unaffected.
inline std::pair<cmatrix, cmatrix> branch_ops(const cmatrix& k0,
                                              const cmatrix& k1,
                                              const cmatrix& a) {
  const Eigen::Index d = a.rows();
  // Kernel detection runs on the squared layer operator: a comes from a
  // Hermitian square root, which amplifies eigenvalue round-off eps to
  // sqrt(eps), while the squared spectrum keeps its clean gap at eps.
  constexpr double spectrum_cut = 1e-12;
  constexpr double escape_tol = 1e-7;  // sqrt-amplified round-off scale
  const cmatrix a_sq_raw = a.adjoint() * a;
  const cmatrix a_sq = (a_sq_raw + a_sq_raw.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<cmatrix> es(a_sq);
  const double cut =
      spectrum_cut * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
  cmatrix pinv = cmatrix::Zero(d, d);
  cmatrix kernel(d, d);
  Eigen::Index kernel_dim = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lambda = es.eigenvalues()[i];
    if (lambda > cut)
      pinv += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() /
              std::sqrt(lambda);
    else
      kernel.col(kernel_dim++) = es.eigenvectors().col(i);
  }
  const cmatrix p_support = cmatrix::Identity(d, d) -
                            kernel.leftCols(kernel_dim) *
                                kernel.leftCols(kernel_dim).adjoint();
  for (const cmatrix* k : {&k0, &k1}) {
    const double escape = linalg::max_abs(*k - *k * p_support);
    if (escape > escape_tol)
      throw std::invalid_argument(
          "branch_ops: Kraus operator acts outside the layer support "
          "(residual " + std::to_string(escape) + ")");
  }
  cmatrix stacked(2 * d, d);
  stacked.topRows(d) = k0 * pinv;
  stacked.bottomRows(d) = k1 * pinv;
  if (kernel_dim > 0) {
    // Orthonormal columns w_j perpendicular to ran(stacked); adding
    // w_j k_j^dag maps ker(A) isometrically without touching supp(A).
    const cmatrix range = linalg::span_union({stacked}, 0.5);
    cmatrix added(2 * d, kernel_dim);
    Eigen::Index have = 0;
    auto try_candidate = [&](const cvector& cand) {
      if (have == kernel_dim) return true;
      cvector w = cand;
      for (int pass = 0; pass < 2; ++pass) {
        w -= range * (range.adjoint() * w);
        if (have > 0)
          w -= added.leftCols(have) * (added.leftCols(have).adjoint() * w);
      }
      if (w.norm() <= 1e-6) return false;
      added.col(have++) = w / w.norm();
      return true;
    };
    for (Eigen::Index j = 0; j < kernel_dim; ++j) {
      cvector top = cvector::Zero(2 * d);
      top.head(d) = kernel.col(j);
      if (try_candidate(top)) continue;
      cvector bottom = cvector::Zero(2 * d);
      bottom.tail(d) = kernel.col(j);
      try_candidate(bottom);
    }
    for (Eigen::Index j = 0; j < 2 * d && have < kernel_dim; ++j)
      try_candidate(cvector::Unit(2 * d, j));
    if (have < kernel_dim)
      throw std::runtime_error("branch_ops: kernel completion failed");
    for (Eigen::Index j = 0; j < kernel_dim; ++j)
      stacked += added.col(j) * kernel.col(j).adjoint();
  }
  const cmatrix defect = stacked.adjoint() * stacked -
                         cmatrix::Identity(d, d);
  if (linalg::max_abs(defect) > tol::isometry)
    throw std::runtime_error("branch_ops: completed pair is not an isometry");
  return {stacked.topRows(d), stacked.bottomRows(d)};
}

// Completes the stacked block column (top; bottom) to a full 2d x 2d
// unitary; candidate completion columns are the identity columns, making
// the result deterministic.
inline cmatrix unitary_completion(const cmatrix& top, const cmatrix& bottom) {
  const Eigen::Index d = top.rows();
  const cmatrix defect =
      top.adjoint() * top + bottom.adjoint() * bottom -
      cmatrix::Identity(d, d);
  if (linalg::max_abs(defect) > tol::isometry)
    throw std::invalid_argument(
        "unitary_completion: block column is not an isometry (defect " +
        std::to_string(linalg::max_abs(defect)) + ")");
  cmatrix v(2 * d, d);
  v.topRows(d) = top;
  v.bottomRows(d) = bottom;
  const cmatrix u = linalg::orthonormal_completion(v);
  if (linalg::max_abs(u.adjoint() * u -
                      cmatrix::Identity(2 * d, 2 * d)) > tol::unitary)
    throw std::runtime_error("unitary_completion: completion not unitary");
  return u;
}

// Pads a channel's Kraus list with zero operators up to exactly four.
inline std::vector<cmatrix> pad_kraus(const kraus_channel& channel) {
  if (channel.rank() > 4)
    throw std::invalid_argument(
        "pad_kraus: Kraus rank " + std::to_string(channel.rank()) +
        " unsupported (two-layer tree handles rank <= 4)");
  std::vector<cmatrix> padded = channel.kraus_ops();
  while (padded.size() < 4)
    padded.push_back(cmatrix::Zero(channel.dim(), channel.dim()));
  return padded;
}

// Full compilation.  Rank <= 2 compiles to a single layer whose outcome
// bit b1 realizes K_{b1} directly; higher ranks use two layers, with the
// bit pair (b1, b2) realizing K_{2 b1 + b2} as B_{b1 b2} A_{b1}.
inline binary_tree_circuit compile_channel(const kraus_channel& channel) {
  const std::vector<cmatrix> kraus = pad_kraus(channel);
  binary_tree_circuit circuit;
  circuit.dim = channel.dim();
  if (channel.rank() <= 2) {
    circuit.layers = 1;
    circuit.U_A = unitary_completion(kraus[0], kraus[1]);
    circuit.U_B0 = circuit.U_B1 =
        cmatrix::Identity(2 * channel.dim(), 2 * channel.dim());
    circuit.outcome_map = {0, channel.rank() == 2 ? 1 : -1, -1, -1};
    return circuit;
  }
  const auto [a0, a1] = layer_split(kraus);
  const auto [b00, b01] = branch_ops(kraus[0], kraus[1], a0);
  const auto [b10, b11] = branch_ops(kraus[2], kraus[3], a1);
  circuit.U_A = unitary_completion(a0, a1);
  circuit.U_B0 = unitary_completion(b00, b01);
  circuit.U_B1 = unitary_completion(b10, b11);
  for (int i = 0; i < 4; ++i)
    circuit.outcome_map[i] = i < channel.rank() ? i : -1;
  return circuit;
}

// Measurement channel of a POVM with at most four elements: Kraus set
// {sqrt(E_I), sqrt(E_0), ...} with the inconclusive root first, matching
// the convention that the all-zeros outcome heralds E_I.
inline kraus_channel povm_to_kraus(const povm_set& povm) {
  if (povm.outcome_count() + 1 > 4)
    throw std::invalid_argument(
        "povm_to_kraus: more than 4 POVM elements (split the measurement)");
  std::vector<cmatrix> kraus;
  kraus.push_back(linalg::hermitian_sqrt(povm.inconclusive()));
  for (const auto& e : povm.effects())
    kraus.push_back(linalg::hermitian_sqrt(e));
  return kraus_channel(std::move(kraus), "povm", tol::cptp_strict);
}

// Reads the realized Kraus operators back off the circuit branches.
inline std::vector<cmatrix> reconstruct_kraus(
    const binary_tree_circuit& circuit) {
  std::vector<cmatrix> kraus;
  for (int b1 = 0; b1 < 2; ++b1) {
    const cmatrix a = circuit.layer_block(0, 0, b1);
    if (circuit.layers == 1) {
      if (circuit.outcome_map[b1] >= 0) kraus.push_back(a);
      continue;
    }
    for (int b2 = 0; b2 < 2; ++b2) {
      if (circuit.outcome_map[2 * b1 + b2] < 0) continue;
      kraus.push_back(circuit.layer_block(1, b1, b2) * a);
    }
  }
  return kraus;
}

// Process fidelity between the compiled circuit (branches read back as a
// Kraus set) and the target channel; exact compilations give F_P = 1 up to
// round-off.
inline double verify_circuit(const binary_tree_circuit& circuit,
                             const kraus_channel& target) {
  if (circuit.dim != target.dim())
    throw std::invalid_argument("verify_circuit: dimension mismatch");
  kraus_channel realized(reconstruct_kraus(circuit), "realized", 1e-6);
  return process_fidelity(chi_of(realized), chi_of(target));
}

}  // namespace udsim
