#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "udsim/core.hpp"
#include "udsim/hilbert.hpp"
#include "udsim/linalg.hpp"

// Kraus-operator channels: validated construction, application, composition,
// and the built-in families (block dephasing, block Pauli, photon loss,
// qubit decoherence).  Channels are immutable values; application is pure.
namespace udsim {

class kraus_channel {
 public:
  kraus_channel(std::vector<cmatrix> kraus_ops, std::string label = "",
                double tolerance = tol::cptp_accept)
      : kraus_(std::move(kraus_ops)), label_(std::move(label)) {
    if (kraus_.empty())
      throw std::invalid_argument("kraus_channel: empty Kraus list");
    const Eigen::Index n = kraus_.front().rows();
    for (const auto& k : kraus_)
      if (k.rows() != n || k.cols() != n)
        throw std::invalid_argument(
            "kraus_channel: Kraus operators must be square and equally sized");
    cmatrix sum = cmatrix::Zero(n, n);
    for (const auto& k : kraus_) sum += k.adjoint() * k;
    const double defect = linalg::max_abs(sum - cmatrix::Identity(n, n));
    if (defect > tolerance)
      throw std::invalid_argument(
          "kraus_channel: not trace preserving, ||sum K^dag K - I|| = " +
          std::to_string(defect));
  }

  const std::vector<cmatrix>& kraus_ops() const { return kraus_; }
  int dim() const { return static_cast<int>(kraus_.front().rows()); }
  int rank() const { return static_cast<int>(kraus_.size()); }
  const std::string& label() const { return label_; }

  // Raw operator-sum application; accepts any matrix (linearity is used on
  // non-state inputs, e.g. operator-basis elements).
  cmatrix apply_raw(const cmatrix& m) const {
    if (m.rows() != dim() || m.cols() != dim())
      throw std::invalid_argument("kraus_channel: dimension mismatch");
    cmatrix out = cmatrix::Zero(m.rows(), m.cols());
    for (const auto& k : kraus_) out += k * m * k.adjoint();
    return out;
  }

  density_matrix apply(const density_matrix& rho) const {
    return density_matrix(apply_raw(rho.matrix()));
  }

 private:
  std::vector<cmatrix> kraus_;
  std::string label_;
};

inline kraus_channel make_channel(std::vector<cmatrix> kraus_ops,
                                  std::string label = "") {
  return kraus_channel(std::move(kraus_ops), std::move(label));
}

inline kraus_channel identity_channel(int dim, std::string label = "identity") {
  return kraus_channel({cmatrix::Identity(dim, dim)}, std::move(label));
}

// Choi matrix J = sum_i w_i w_i^dag with w_i = sum_j |j> (x) K_i |j>.
// Two channels are equal as maps iff their Choi matrices are equal.
inline cmatrix choi_matrix(const kraus_channel& ch) {
  const int d = ch.dim();
  cmatrix j = cmatrix::Zero(d * d, d * d);
  for (const auto& k : ch.kraus_ops()) {
    cvector w(d * d);
    for (int col = 0; col < d; ++col) w.segment(col * d, d) = k.col(col);
    j += w * w.adjoint();
  }
  return j;
}

inline double map_distance(const kraus_channel& a, const kraus_channel& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("map_distance: dimension mismatch");
  return linalg::max_abs(choi_matrix(a) - choi_matrix(b));
}

// Partition of the basis indices {0..d-1} into disjoint blocks.
using block_partition = std::vector<std::vector<int>>;

inline void validate_partition(const block_partition& partition, int d) {
  std::vector<int> seen(d, 0);
  for (const auto& block : partition) {
    if (block.empty())
      throw std::invalid_argument("block_partition: empty block");
    for (int i : block) {
      if (i < 0 || i >= d)
        throw std::invalid_argument("block_partition: index " +
                                    std::to_string(i) + " outside dimension");
      if (seen[i]++)
        throw std::invalid_argument("block_partition: index " +
                                    std::to_string(i) + " repeated");
    }
  }
  for (int i = 0; i < d; ++i)
    if (!seen[i])
      throw std::invalid_argument("block_partition: index " +
                                  std::to_string(i) + " not covered");
}

// Kraus set = the block projectors {P_s}: coherences between different
// blocks are destroyed, coherences within a block survive.
inline kraus_channel block_dephasing(const block_partition& partition,
                                     const hilbert_dim& dim,
                                     std::string label = "block_dephasing") {
  validate_partition(partition, dim.d);
  std::vector<cmatrix> kraus;
  for (const auto& block : partition) {
    cmatrix p = cmatrix::Zero(dim.d_trunc, dim.d_trunc);
    for (int i : block) p(i, i) = 1.0;
    kraus.push_back(std::move(p));
  }
  // Levels above the logical dimension (if any) pass through unchanged.
  if (dim.d_trunc > dim.d) {
    cmatrix rest = cmatrix::Zero(dim.d_trunc, dim.d_trunc);
    for (int i = dim.d; i < dim.d_trunc; ++i) rest(i, i) = 1.0;
    kraus.push_back(std::move(rest));
  }
  return kraus_channel(std::move(kraus), std::move(label), tol::cptp_strict);
}

enum class pauli_kind { x, y, z };

inline std::string to_string(pauli_kind kind) {
  switch (kind) {
    case pauli_kind::x: return "X";
    case pauli_kind::y: return "Y";
    case pauli_kind::z: return "Z";
  }
  throw std::invalid_argument("pauli_kind: invalid value");
}

struct block_pauli_params {
  double eta;
  pauli_kind kind;
  std::vector<std::pair<int, int>> subspace_pairs;
};

// Pauli operator acting simultaneously on the given 2-dimensional
// subspaces: sigma on pair 1 (+) sigma on pair 2 (+) ...
inline cmatrix block_pauli_operator(
    pauli_kind kind, const std::vector<std::pair<int, int>>& pairs, int n) {
  cmatrix k = cmatrix::Zero(n, n);
  std::vector<int> seen(n, 0);
  for (const auto& [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b)
      throw std::invalid_argument("block_pauli: invalid subspace pair");
    if (seen[a]++ || seen[b]++)
      throw std::invalid_argument("block_pauli: overlapping subspace pairs");
    switch (kind) {
      case pauli_kind::x:
        k(b, a) = 1.0;
        k(a, b) = 1.0;
        break;
      case pauli_kind::y:
        k(b, a) = complex(0.0, 1.0);
        k(a, b) = complex(0.0, -1.0);
        break;
      case pauli_kind::z:
        k(a, a) = 1.0;
        k(b, b) = -1.0;
        break;
    }
  }
  return k;
}

// Identity with probability 1-eta, the block-Pauli error with probability
// eta: Kraus set {sqrt(1-eta) I, sqrt(eta) K_1}.  The error operator K_1
// acts as the chosen Pauli on every listed pair and as the identity on all
// remaining levels, keeping both branches trace preserving.
inline kraus_channel block_pauli(const block_pauli_params& params,
                                 const hilbert_dim& dim,
                                 std::string label = "") {
  if (params.eta < 0.0 || params.eta > 1.0)
    throw std::invalid_argument("block_pauli: eta outside [0, 1]");
  cmatrix k1 =
      block_pauli_operator(params.kind, params.subspace_pairs, dim.d_trunc);
  for (int i = 0; i < dim.d_trunc; ++i)
    if (k1.row(i).isZero(0.0) && k1.col(i).isZero(0.0)) k1(i, i) = 1.0;
  if (label.empty()) label = "block_pauli_" + to_string(params.kind);
  std::vector<cmatrix> kraus;
  if (params.eta < 1.0)
    kraus.push_back(std::sqrt(1.0 - params.eta) *
                    cmatrix::Identity(dim.d_trunc, dim.d_trunc));
  if (params.eta > 0.0) kraus.push_back(std::sqrt(params.eta) * k1);
  return kraus_channel(std::move(kraus), std::move(label), tol::cptp_strict);
}

// Multi-photon-loss channel: <m-l| K_l |m> = sqrt(C(m,l)) (1-gamma)^((m-l)/2)
// gamma^(l/2).  Amplitudes are computed in log space to avoid overflow in
// the binomial coefficients.
inline kraus_channel amplitude_damping(double gamma, const hilbert_dim& dim,
                                       std::string label = "amplitude_damping") {
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("amplitude_damping: gamma outside [0, 1)");
  const int n = dim.d_trunc;
  if (gamma == 0.0) return identity_channel(n, std::move(label));
  std::vector<cmatrix> kraus;
  for (int l = 0; l < n; ++l) {
    cmatrix k = cmatrix::Zero(n, n);
    for (int m = l; m < n; ++m) {
      const double log_amp =
          0.5 * (std::lgamma(m + 1.0) - std::lgamma(l + 1.0) -
                 std::lgamma(m - l + 1.0)) +
          0.5 * (m - l) * std::log1p(-gamma) + 0.5 * l * std::log(gamma);
      k(m - l, m) = std::exp(log_amp);
    }
    kraus.push_back(std::move(k));
  }
  return kraus_channel(std::move(kraus), std::move(label), tol::cptp_strict);
}

// Two-Kraus dephasing with coherence factor lambda in [0, 1]:
// {sqrt((1+lambda)/2) I, sqrt((1-lambda)/2) Z}.
inline kraus_channel qubit_dephasing(double lambda,
                                     std::string label = "dephasing") {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("qubit_dephasing: lambda outside [0, 1]");
  cmatrix z = cmatrix::Identity(2, 2);
  z(1, 1) = -1.0;
  std::vector<cmatrix> kraus;
  kraus.push_back(std::sqrt(0.5 * (1.0 + lambda)) * cmatrix::Identity(2, 2));
  if (lambda < 1.0) kraus.push_back(std::sqrt(0.5 * (1.0 - lambda)) * z);
  return kraus_channel(std::move(kraus), std::move(label), tol::cptp_strict);
}

// Apply channel a, then channel b: Kraus set {B_j A_i}.
inline kraus_channel compose(const kraus_channel& a, const kraus_channel& b,
                             std::string label = "") {
  if (a.dim() != b.dim())
    throw std::invalid_argument("compose: dimension mismatch");
  std::vector<cmatrix> kraus;
  kraus.reserve(a.kraus_ops().size() * b.kraus_ops().size());
  for (const auto& bj : b.kraus_ops())
    for (const auto& ai : a.kraus_ops()) kraus.push_back(bj * ai);
  if (label.empty()) label = b.label() + "*" + a.label();
  return kraus_channel(std::move(kraus), std::move(label), 1e-9);
}

// Tensor product channel acting on the joint space, a on the first factor.
inline kraus_channel tensor(const kraus_channel& a, const kraus_channel& b,
                            std::string label = "") {
  std::vector<cmatrix> kraus;
  kraus.reserve(a.kraus_ops().size() * b.kraus_ops().size());
  for (const auto& ka : a.kraus_ops())
    for (const auto& kb : b.kraus_ops())
      kraus.push_back(linalg::kron(ka, kb));
  if (label.empty()) label = a.label() + "(x)" + b.label();
  return kraus_channel(std::move(kraus), std::move(label), 1e-9);
}

// Amplitude damping with gamma = 1 - e^{-t/T1} composed with pure dephasing
// with coherence factor e^{-t/Tphi}; the two commute as maps.
inline kraus_channel qubit_noise(double t, double T1, double Tphi) {
  if (t < 0.0) throw std::invalid_argument("qubit_noise: negative duration");
  if (T1 <= 0.0 || Tphi <= 0.0)
    throw std::invalid_argument("qubit_noise: nonpositive time constant");
  if (t == 0.0) return identity_channel(2, "qubit_noise");
  const double gamma = 1.0 - std::exp(-t / T1);
  const double lambda = std::exp(-t / Tphi);
  return compose(amplitude_damping(gamma, hilbert_dim(2)),
                 qubit_dephasing(lambda), "qubit_noise");
}

}  // namespace udsim
