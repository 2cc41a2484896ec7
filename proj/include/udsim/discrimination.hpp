#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "udsim/channels.hpp"
#include "udsim/core.hpp"
#include "udsim/hilbert.hpp"
#include "udsim/linalg.hpp"
#include "udsim/rng.hpp"

// Unambiguous-discrimination core: reciprocal states, the symmetric-state
// conclusive-probability bound, optimal POVM construction by scale
// bisection, support-based feasibility for general channel sets, seeded
// probe search, and Born-rule evaluation into discrimination reports.
namespace udsim {

class povm_set {
 public:
  // effects = {E_0..E_{N-1}}; inconclusive must equal I - sum effects.
  povm_set(std::vector<cmatrix> effects, cmatrix inconclusive, double scale)
      : effects_(std::move(effects)),
        inconclusive_(std::move(inconclusive)),
        scale_(scale) {
    if (effects_.empty())
      throw std::invalid_argument("povm_set: no conclusive effects");
    const Eigen::Index n = inconclusive_.rows();
    cmatrix sum = inconclusive_;
    for (const auto& e : effects_) {
      if (e.rows() != n || e.cols() != n)
        throw std::invalid_argument("povm_set: effect dimension mismatch");
      if (linalg::min_eigenvalue(e) < -tol::psd)
        throw std::invalid_argument("povm_set: effect is not PSD");
      sum += e;
    }
    if (linalg::min_eigenvalue(inconclusive_) < -tol::psd)
      throw std::invalid_argument("povm_set: inconclusive effect is not PSD");
    if (linalg::max_abs(sum - cmatrix::Identity(n, n)) > tol::cptp_strict)
      throw std::invalid_argument("povm_set: effects do not resolve identity");
  }

  static povm_set from_effects(std::vector<cmatrix> effects, double scale) {
    const Eigen::Index n = effects.front().rows();
    cmatrix inc = cmatrix::Identity(n, n);
    for (const auto& e : effects) inc -= e;
    return povm_set(std::move(effects), std::move(inc), scale);
  }

  const std::vector<cmatrix>& effects() const { return effects_; }
  const cmatrix& inconclusive() const { return inconclusive_; }
  double scale() const { return scale_; }
  int outcome_count() const { return static_cast<int>(effects_.size()); }
  int dim() const { return static_cast<int>(inconclusive_.rows()); }

 private:
  std::vector<cmatrix> effects_;
  cmatrix inconclusive_;
  double scale_;
};

// Conditional outcome probabilities P(m|n): one row per prepared operation,
// columns 0..N-1 for the conclusive outcomes and a final inconclusive
// column.
struct discrimination_report {
  rmatrix conditional;
  std::vector<double> priors;
  double p_con = 0.0;
  double p_inc = 0.0;
  double p_err = 0.0;
};

// Permutation of outcome columns that maximizes the conclusive diagonal;
// ties resolve to the lexicographically smallest permutation.  Outcome
// labels are only defined up to wiring, so reports are normalized this way.
inline std::vector<int> heralding_permutation(const rmatrix& conditional) {
  const int n = static_cast<int>(conditional.rows());
  if (n > 8)
    throw std::invalid_argument(
        "heralding_permutation: too many outcomes for exhaustive search");
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_diag = -1.0;
  do {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) diag += conditional(i, perm[i]);
    if (diag > best_diag + 1e-15) {
      best_diag = diag;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Assembles a report from a raw conditional matrix (rows already summing to
// one): relabels outcomes by the heralding permutation, then aggregates
// conclusive/inconclusive/erroneous probabilities under the priors.
inline discrimination_report make_report(const rmatrix& raw,
                                         std::vector<double> priors) {
  const int n = static_cast<int>(raw.rows());
  if (raw.cols() != n + 1)
    throw std::invalid_argument("make_report: conditional must be N x (N+1)");
  if (static_cast<int>(priors.size()) != n)
    throw std::invalid_argument("make_report: priors size mismatch");
  const double total = std::accumulate(priors.begin(), priors.end(), 0.0);
  if (std::abs(total - 1.0) > tol::state_norm)
    throw std::invalid_argument("make_report: priors sum to " +
                                std::to_string(total));
  for (int i = 0; i < n; ++i) {
    const double row = raw.row(i).sum();
    if (std::abs(row - 1.0) > 1e-9)
      throw std::invalid_argument("make_report: row " + std::to_string(i) +
                                  " sums to " + std::to_string(row));
  }
  const std::vector<int> perm = heralding_permutation(raw.leftCols(n));
  discrimination_report report;
  report.conditional.resize(n, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) report.conditional(i, m) = raw(i, perm[m]);
    report.conditional(i, n) = raw(i, n);
  }
  report.priors = std::move(priors);
  for (int i = 0; i < n; ++i) {
    report.p_con += report.priors[i] * report.conditional(i, i);
    report.p_inc += report.priors[i] * report.conditional(i, n);
    for (int m = 0; m < n; ++m)
      if (m != i) report.p_err += report.priors[i] * report.conditional(i, m);
  }
  return report;
}

inline std::vector<double> uniform_priors(int n) {
  return std::vector<double>(n, 1.0 / n);
}

// Reciprocal states |psi_n_perp>: each orthogonal to every input state
// except its partner.  Obtained by removing from |psi_n> its projection
// onto the span of the other states.
inline std::vector<state_vector> reciprocal_states(
    const std::vector<state_vector>& states) {
  const int n = static_cast<int>(states.size());
  if (n < 2)
    throw std::invalid_argument("reciprocal_states: need at least two states");
  const cmatrix gram = gram_matrix(states);
  if (linalg::min_eigenvalue(gram) <= 1e-10)
    throw std::invalid_argument(
        "reciprocal_states: states are not linearly independent");
  std::vector<state_vector> result;
  result.reserve(n);
  for (int k = 0; k < n; ++k) {
    cmatrix others(states[0].size(), n - 1);
    int at = 0;
    for (int j = 0; j < n; ++j)
      if (j != k) others.col(at++) = states[j].amplitudes();
    const cmatrix basis = linalg::span_union({others});
    cvector perp = states[k].amplitudes() -
                   basis * (basis.adjoint() * states[k].amplitudes());
    result.push_back(state_vector::normalized(std::move(perp)));
  }
  return result;
}

// Conclusive-probability upper bound for N symmetric coherent states of
// magnitude alpha_mag: the circulant Gram row g(k) = exp(-|a|^2 (1 -
// e^{i 2 pi k / N})) has DFT eigenvalues lambda_r = N |c_r|^2, and the
// bound is N * min_r |c_r|^2.  Returns the bound and the |c_r|^2 list.
inline std::pair<double, std::vector<double>> symmetric_ud_bound(
    double alpha_mag, int N) {
  if (N < 2) throw std::invalid_argument("symmetric_ud_bound: N must be >= 2");
  if (alpha_mag < 0.0)
    throw std::invalid_argument("symmetric_ud_bound: negative magnitude");
  const double a2 = alpha_mag * alpha_mag;
  std::vector<complex> g(N);
  for (int k = 0; k < N; ++k)
    g[k] = std::exp(-a2 * (1.0 - std::exp(complex(0.0, 2.0 * pi * k / N))));
  std::vector<double> c_sq(N);
  double min_c = std::numeric_limits<double>::max();
  for (int r = 0; r < N; ++r) {
    complex sum = 0.0;
    for (int k = 0; k < N; ++k)
      sum += g[k] * std::exp(complex(0.0, -2.0 * pi * r * k / N));
    c_sq[r] = std::max(0.0, sum.real() / N);  // clamp eigenvalue round-off
    min_c = std::min(min_c, c_sq[r]);
  }
  return {N * min_c, c_sq};
}

namespace detail {

// Largest scale P in (0, 1] keeping I - P * M PSD, located by bisection on
// the minimum eigenvalue; the returned P is feasible and within
// tol::bisection of the threshold.
inline double bisect_scale(const cmatrix& m) {
  const cmatrix id = cmatrix::Identity(m.rows(), m.cols());
  auto feasible = [&](double p) {
    return linalg::min_eigenvalue(id - p * m) >= 0.0;
  };
  if (feasible(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol::bisection) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace detail

// Optimal unambiguous-discrimination POVM for linearly independent pure
// states: E_n = (P / |<psi_n|psi_n_perp>|^2) |psi_n_perp><psi_n_perp| with
// the largest P keeping the inconclusive effect PSD.
inline povm_set build_symmetric_povm(const std::vector<state_vector>& states) {
  const std::vector<state_vector> recip = reciprocal_states(states);
  const int n = static_cast<int>(states.size());
  const int dim = states[0].size();
  std::vector<cmatrix> directions(n);
  cmatrix m = cmatrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    const double weight = std::norm(overlap(states[k], recip[k]));
    directions[k] =
        (recip[k].amplitudes() * recip[k].amplitudes().adjoint()) / weight;
    m += directions[k];
  }
  const double scale = detail::bisect_scale(m);
  std::vector<cmatrix> effects(n);
  for (int k = 0; k < n; ++k) effects[k] = scale * directions[k];
  return povm_set::from_effects(std::move(effects), scale);
}

// Orthonormal basis of supp(rho): eigenvectors with eigenvalue above
// cut * trace.
inline cmatrix support(const density_matrix& rho,
                       double cut = tol::support_cut) {
  Eigen::SelfAdjointEigenSolver<cmatrix> es(rho.matrix());
  const double threshold = cut * rho.matrix().trace().real();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > threshold) keep.push_back(i);
  cmatrix basis(rho.size(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    basis.col(j) = es.eigenvectors().col(keep[j]);
  return basis;
}

struct support_analysis {
  cmatrix S;                        // orthonormal basis of union of supports
  std::vector<cmatrix> S_n;         // bases of the leave-one-out unions
  std::vector<cmatrix> complements; // projectors onto S minus S_n
  std::vector<bool> feasible;       // dim S > dim S_n per operation
  std::optional<povm_set> candidate;  // emitted when every flag is true
};

inline bool all_feasible(const support_analysis& analysis) {
  for (bool f : analysis.feasible)
    if (!f) return false;
  return true;
}

// Support criterion for unambiguous discrimination of a channel set with a
// given probe: operation n is identifiable iff the union of all output
// supports strictly contains the union of the other outputs.  When every
// operation passes, a candidate POVM with one shared conditional
// probability is built from the complement projectors.
inline support_analysis ud_feasibility(
    const std::vector<kraus_channel>& channels, const state_vector& probe,
    double cut = tol::support_cut) {
  const int n = static_cast<int>(channels.size());
  if (n < 2)
    throw std::invalid_argument("ud_feasibility: need at least two channels");
  const density_matrix input = density_matrix::pure(probe);
  std::vector<density_matrix> outputs;
  std::vector<cmatrix> supports;
  outputs.reserve(n);
  for (const auto& ch : channels) {
    outputs.push_back(ch.apply(input));
    supports.push_back(support(outputs.back(), cut));
  }
  support_analysis analysis;
  analysis.S = linalg::span_union(supports);
  const cmatrix p_all = analysis.S * analysis.S.adjoint();
  for (int k = 0; k < n; ++k) {
    std::vector<cmatrix> others;
    for (int j = 0; j < n; ++j)
      if (j != k) others.push_back(supports[j]);
    analysis.S_n.push_back(linalg::span_union(others));
    const cmatrix& rest = analysis.S_n.back();
    analysis.complements.push_back(p_all - rest * rest.adjoint());
    analysis.feasible.push_back(analysis.S.cols() > rest.cols());
  }
  if (all_feasible(analysis)) {
    std::vector<cmatrix> directions(n);
    cmatrix m = cmatrix::Zero(probe.size(), probe.size());
    for (int k = 0; k < n; ++k) {
      const double hit =
          (analysis.complements[k] * outputs[k].matrix()).trace().real();
      directions[k] = analysis.complements[k] / hit;
      m += directions[k];
    }
    const double scale = detail::bisect_scale(m);
    std::vector<cmatrix> effects(n);
    for (int k = 0; k < n; ++k) effects[k] = scale * directions[k];
    analysis.candidate = povm_set::from_effects(std::move(effects), scale);
  }
  return analysis;
}

struct probe_search_result {
  bool found = false;
  std::optional<state_vector> probe;
  std::optional<support_analysis> analysis;
  double p_con = 0.0;
};

// Samples `trials` Haar-uniform pure probes (2d-1 free real parameters:
// global phase fixed, norm fixed) and keeps the feasible probe with the
// largest bisected conclusive probability.
inline probe_search_result probe_search(
    const std::vector<kraus_channel>& channels, int trials,
    std::uint64_t seed) {
  if (trials < 1)
    throw std::invalid_argument("probe_search: trials must be >= 1");
  if (channels.empty())
    throw std::invalid_argument("probe_search: no channels");
  random_source rng(seed);
  const int dim = channels.front().dim();
  probe_search_result best;
  for (int t = 0; t < trials; ++t) {
    state_vector probe(rng.unit_vector(dim));
    support_analysis analysis = ud_feasibility(channels, probe);
    if (!analysis.candidate) continue;
    const double p = analysis.candidate->scale();
    if (!best.found || p > best.p_con) {
      best.found = true;
      best.p_con = p;
      best.probe = std::move(probe);
      best.analysis = std::move(analysis);
    }
  }
  return best;
}

// Born-rule evaluation: P(m|n) = Tr[E_m rho_n] with rho_n the channel
// outputs on the probe; outcome columns are relabeled by the heralding
// permutation before aggregation.
inline discrimination_report evaluate_povm(
    const povm_set& povm, const std::vector<kraus_channel>& channels,
    const state_vector& probe, std::vector<double> priors) {
  const int n = static_cast<int>(channels.size());
  if (povm.outcome_count() != n)
    throw std::invalid_argument(
        "evaluate_povm: effect count does not match channel count");
  const density_matrix input = density_matrix::pure(probe);
  rmatrix raw(n, n + 1);
  for (int i = 0; i < n; ++i) {
    const cmatrix rho = channels[i].apply(input).matrix();
    for (int m = 0; m < n; ++m)
      raw(i, m) = (povm.effects()[m] * rho).trace().real();
    raw(i, n) = (povm.inconclusive() * rho).trace().real();
  }
  return make_report(raw, std::move(priors));
}

inline discrimination_report evaluate_povm(
    const povm_set& povm, const std::vector<kraus_channel>& channels,
    const state_vector& probe) {
  return evaluate_povm(povm, channels, probe,
                       uniform_priors(static_cast<int>(channels.size())));
}

}  // namespace udsim
