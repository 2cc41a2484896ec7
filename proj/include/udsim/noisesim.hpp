#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "udsim/channels.hpp"
#include "udsim/core.hpp"
#include "udsim/dilation.hpp"
#include "udsim/discrimination.hpp"
#include "udsim/hilbert.hpp"
#include "udsim/linalg.hpp"
#include "udsim/metrics.hpp"
#include "udsim/rng.hpp"

// Noisy simulation of compiled discrimination experiments: binary-tree
// circuits run on a joint ancilla-system state with decoherence interleaved
// symmetrically around every joint unitary, decoherence across the readout
// window, classical readout confusion, and ideal ancilla reset between
// layers.
namespace udsim {

// Hardware model.  Times are microseconds; chi_qs (MHz) is the dispersive
// shift recorded with results for provenance -- joint unitaries are treated
// as calibrated, so it does not enter the dynamics.  readout_confusion is
// row-stochastic: entry (b, r) is the probability that true ancilla bit b
// is reported as r.
struct noise_model {
  double cavity_t1 = 143.0;
  double qubit_t1 = 30.0;
  double qubit_tphi = 120.0;
  double chi_qs = 1.90;
  double gate_time = 2.0;
  double measure_time = 0.32;
  rmatrix readout_confusion;
  bool cavity_noise = true;
  bool qubit_noise = true;
  bool readout_noise = true;

  noise_model() {
    readout_confusion.resize(2, 2);
    readout_confusion << 0.999, 0.001, 0.011, 0.989;
  }

  static noise_model none() {
    noise_model nm;
    nm.cavity_noise = nm.qubit_noise = nm.readout_noise = false;
    return nm;
  }

  void validate() const {
    if (!(cavity_t1 > 0.0) || !(qubit_t1 > 0.0) || !(qubit_tphi > 0.0))
      throw std::invalid_argument("noise_model: relaxation times must be > 0");
    if (!(chi_qs > 0.0))
      throw std::invalid_argument("noise_model: chi_qs must be > 0");
    if (gate_time < 0.0 || measure_time < 0.0)
      throw std::invalid_argument("noise_model: durations must be >= 0");
    if (readout_confusion.rows() != 2 || readout_confusion.cols() != 2)
      throw std::invalid_argument("noise_model: confusion matrix must be 2x2");
    for (int b = 0; b < 2; ++b) {
      double row = 0.0;
      for (int r = 0; r < 2; ++r) {
        if (readout_confusion(b, r) < 0.0)
          throw std::invalid_argument(
              "noise_model: confusion entries must be >= 0");
        row += readout_confusion(b, r);
      }
      if (std::abs(row - 1.0) > 1e-9)
        throw std::invalid_argument(
            "noise_model: confusion rows must sum to 1 (row " +
            std::to_string(b) + " sums to " + std::to_string(row) + ")");
    }
  }

  rmatrix confusion_used() const {
    return readout_noise ? readout_confusion : rmatrix::Identity(2, 2);
  }
};

namespace sim_detail {

// Kraus operators with squared Frobenius norm at or below this bound are
// dropped from a decoherence window; the trace they carry is far below
// every acceptance tolerance.
constexpr double kraus_prune = 1e-13;
// Classical branches below this probability are dropped.
constexpr double branch_prune = 1e-14;

}  // namespace sim_detail

// Decoherence over one time window, split by factor: cavity operators act
// on each d x d system block, qubit operators act blockwise on the ancilla
// index.  Empty lists mean no noise of that kind.
struct noise_window {
  std::vector<cmatrix> cavity;
  std::vector<Eigen::Matrix2cd> qubit;
};

inline noise_window make_window(const noise_model& nm, int d, double t) {
  noise_window w;
  if (t <= 0.0) return w;
  if (nm.cavity_noise) {
    const double gamma = 1.0 - std::exp(-t / nm.cavity_t1);
    const kraus_channel c = amplitude_damping(gamma, hilbert_dim(d), "cavity");
    for (const auto& k : c.kraus_ops())
      if (k.squaredNorm() > sim_detail::kraus_prune) w.cavity.push_back(k);
  }
  if (nm.qubit_noise) {
    const kraus_channel q =
        qubit_noise(t, nm.qubit_t1, nm.qubit_tphi);
    for (const auto& k : q.kraus_ops())
      if (k.squaredNorm() > sim_detail::kraus_prune)
        w.qubit.push_back(Eigen::Matrix2cd(k));
  }
  return w;
}

// Readout window: cavity decay only.  The measured assignment matrix
// (readout_confusion) already contains the qubit's decay during the
// readout pulse, so charging qubit T1/Tphi over measure_time as well
// would double-count that error.
inline noise_window make_readout_window(const noise_model& nm, int d) {
  noise_model cavity_only = nm;
  cavity_only.qubit_noise = false;
  return make_window(cavity_only, d, nm.measure_time);
}

// Applies cavity operators to a bare d x d system matrix.
inline void apply_cavity(cmatrix& system, const std::vector<cmatrix>& ops) {
  if (ops.empty()) return;
  cmatrix out = cmatrix::Zero(system.rows(), system.cols());
  for (const auto& k : ops) out += k * system * k.adjoint();
  system = std::move(out);
}

// Applies one window to a 2d x 2d joint matrix (ancilla index major).
inline void apply_window(cmatrix& joint, const noise_window& w, int d) {
  if (!w.cavity.empty()) {
    for (int b = 0; b < 2; ++b)
      for (int bp = 0; bp < 2; ++bp) {
        cmatrix acc = cmatrix::Zero(d, d);
        for (const auto& k : w.cavity)
          acc += k * joint.block(b * d, bp * d, d, d) * k.adjoint();
        joint.block(b * d, bp * d, d, d) = acc;
      }
  }
  if (!w.qubit.empty()) {
    cmatrix out = cmatrix::Zero(joint.rows(), joint.cols());
    for (const auto& q : w.qubit)
      for (int b = 0; b < 2; ++b)
        for (int bp = 0; bp < 2; ++bp)
          for (int a = 0; a < 2; ++a)
            for (int ap = 0; ap < 2; ++ap) {
              const complex c = q(b, a) * std::conj(q(bp, ap));
              if (c == complex(0.0, 0.0)) continue;
              out.block(b * d, bp * d, d, d) +=
                  c * joint.block(a * d, ap * d, d, d);
            }
    joint = std::move(out);
  }
}

// One layer on a freshly reset ancilla: half-window decoherence before the
// unitary (the qubit part is a no-op on |0><0| x sigma, so only the cavity
// half acts), embedding through the first block column, the trailing
// half-window, then the readout window.  The caller projects ancilla
// blocks afterwards.
inline cmatrix evolve_layer(const cmatrix& system, const cmatrix& u,
                            const noise_window& gate_half,
                            const noise_window& readout, int d) {
  cmatrix sigma = system;
  apply_cavity(sigma, gate_half.cavity);
  const cmatrix column = u.leftCols(d);
  cmatrix joint = column * sigma * column.adjoint();
  apply_window(joint, gate_half, d);
  apply_window(joint, readout, d);
  return joint;
}

// One weighted classical history: reported bits so far and the normalized
// post-measurement system state.
struct sim_branch {
  double probability = 1.0;
  cmatrix state;
  std::vector<int> bits;
};

// Runs one compiled circuit on every branch.  True measurement bits select
// the projected state; reported bits (drawn through the confusion matrix)
// route the feedforward unitary and are what the record keeps.  A
// single-layer circuit stops after its first readout and appends one bit.
inline std::vector<sim_branch> run_circuit(const std::vector<sim_branch>& in,
                                           const binary_tree_circuit& circ,
                                           const noise_model& nm,
                                           const noise_window& gate_half,
                                           const noise_window& readout) {
  const int d = circ.dim;
  const rmatrix confusion = nm.confusion_used();
  std::vector<sim_branch> out;
  for (const sim_branch& br : in) {
    const cmatrix joint1 =
        evolve_layer(br.state, circ.U_A, gate_half, readout, d);
    for (int b1 = 0; b1 < 2; ++b1) {
      const cmatrix block1 = joint1.block(b1 * d, b1 * d, d, d);
      const double p1 = block1.trace().real();
      if (p1 <= sim_detail::branch_prune) continue;
      const cmatrix sigma1 = block1 / p1;
      for (int r1 = 0; r1 < 2; ++r1) {
        const double pr1 = confusion(b1, r1);
        if (pr1 <= 0.0) continue;
        if (circ.layers == 1) {
          const double p = br.probability * p1 * pr1;
          if (p <= sim_detail::branch_prune) continue;
          sim_branch next;
          next.probability = p;
          next.state = sigma1;
          next.bits = br.bits;
          next.bits.push_back(r1);
          out.push_back(std::move(next));
          continue;
        }
        const cmatrix joint2 = evolve_layer(
            sigma1, r1 == 0 ? circ.U_B0 : circ.U_B1, gate_half, readout, d);
        for (int b2 = 0; b2 < 2; ++b2) {
          const cmatrix block2 = joint2.block(b2 * d, b2 * d, d, d);
          const double p2 = block2.trace().real();
          if (p2 <= sim_detail::branch_prune) continue;
          for (int r2 = 0; r2 < 2; ++r2) {
            const double pr2 = confusion(b2, r2);
            const double p = br.probability * p1 * pr1 * p2 * pr2;
            if (pr2 <= 0.0 || p <= sim_detail::branch_prune) continue;
            sim_branch next;
            next.probability = p;
            next.state = block2 / p2;
            next.bits = br.bits;
            next.bits.push_back(r1);
            next.bits.push_back(r2);
            out.push_back(std::move(next));
          }
        }
      }
    }
  }
  return out;
}

// Measurement program for a POVM: one compiled circuit per stage, plus a
// label per reported bit pair.  Labels >= 0 are conclusive outcome
// indices; label_inconclusive ends the shot inconclusively (also used for
// bit pairs that ideally never occur); label_continue hands the branch to
// the next stage.
constexpr int label_inconclusive = -1;
constexpr int label_continue = -2;

struct povm_stage {
  binary_tree_circuit circuit;
  std::array<int, 4> labels = {label_inconclusive, label_inconclusive,
                               label_inconclusive, label_inconclusive};
};

struct povm_program {
  std::vector<povm_stage> stages;
  int outcome_count = 0;
  int dim = 0;
};

// Compiles a POVM into one stage when it has at most four elements
// (inconclusive effect included; bit pair 00 heralds it), and into a
// two-stage cascade otherwise: the first stage measures
// {E_I, E_0, E_1, G^2 = sum of the rest} and the second measures the
// conditional effects F_j = G+ E_j G+, which reproduce the Born
// probabilities exactly because each E_j is supported inside supp(G).
// The part of the space outside supp(G) is folded into the first
// conditional effect; it never receives amplitude.
inline povm_program compile_povm_program(const povm_set& povm) {
  const int n = povm.outcome_count();
  const int d = povm.dim();
  povm_program program;
  program.outcome_count = n;
  program.dim = d;
  if (n + 1 <= 4) {
    povm_stage stage;
    stage.circuit = compile_channel(povm_to_kraus(povm));
    for (int code = 0; code < 4; ++code) {
      const int idx = stage.circuit.outcome_map[code];
      stage.labels[code] = idx <= 0 ? label_inconclusive : idx - 1;
    }
    program.stages.push_back(std::move(stage));
    return program;
  }
  if (n > 6)
    throw std::invalid_argument(
        "compile_povm_program: more than 7 POVM elements needs a deeper "
        "cascade than the two stages implemented here");
  // Stage 1: inconclusive, first two effects, and the merged remainder.
  cmatrix rest = cmatrix::Zero(d, d);
  for (int j = 2; j < n; ++j) rest += povm.effects()[j];
  std::vector<cmatrix> stage1_ops = {
      linalg::hermitian_sqrt(povm.inconclusive()),
      linalg::hermitian_sqrt(povm.effects()[0]),
      linalg::hermitian_sqrt(povm.effects()[1]),
      linalg::hermitian_sqrt(rest)};
  povm_stage stage1;
  stage1.circuit = compile_channel(
      kraus_channel(std::move(stage1_ops), "povm-stage-1", tol::cptp_strict));
  stage1.labels = {label_inconclusive, 0, 1, label_continue};
  program.stages.push_back(std::move(stage1));
  // Stage 2: conditional effects on the post-measurement state G rho G / p.
  // G+ comes from the eigendecomposition of the remainder itself: the
  // square root's own eigenvalue round-off is sqrt(eps)-sized and must not
  // be inverted.
  Eigen::SelfAdjointEigenSolver<cmatrix> es(rest);
  const double cut =
      1e-12 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
  cmatrix g_pinv = cmatrix::Zero(d, d);
  cmatrix p_supp = cmatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] <= cut) continue;
    const cmatrix vv =
        es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    g_pinv += vv / std::sqrt(es.eigenvalues()[i]);
    p_supp += vv;
  }
  std::vector<cmatrix> stage2_ops;
  for (int j = 2; j < n; ++j) {
    cmatrix f = g_pinv * povm.effects()[j] * g_pinv;
    if (j == 2) f += cmatrix::Identity(d, d) - p_supp;
    f = (f + f.adjoint().eval()) / 2.0;
    stage2_ops.push_back(linalg::hermitian_sqrt(f, 1e-9));
  }
  povm_stage stage2;
  stage2.circuit = compile_channel(
      kraus_channel(std::move(stage2_ops), "povm-stage-2", 1e-8));
  for (int code = 0; code < 4; ++code) {
    const int idx = stage2.circuit.outcome_map[code];
    stage2.labels[code] = idx < 0 ? label_inconclusive : 2 + idx;
  }
  program.stages.push_back(std::move(stage2));
  return program;
}

// A compiled experiment: probe, one circuit per prepared operation, and
// the measurement program.  Noise is supplied separately at run time so
// one plan can be evaluated under several hardware configurations.
struct experiment_plan {
  state_vector probe;
  std::vector<binary_tree_circuit> channel_circuits;
  std::vector<std::string> channel_labels;
  povm_program program;
  long long shots = 0;
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(probe.amplitudes().size()); }

  void validate() const {
    if (channel_circuits.empty())
      throw std::invalid_argument("experiment_plan: no channel circuits");
    if (channel_labels.size() != channel_circuits.size())
      throw std::invalid_argument("experiment_plan: label count mismatch");
    if (program.stages.empty())
      throw std::invalid_argument("experiment_plan: empty POVM program");
    for (const auto& c : channel_circuits)
      if (c.dim != dim())
        throw std::invalid_argument("experiment_plan: circuit dim mismatch");
    if (program.dim != dim())
      throw std::invalid_argument("experiment_plan: program dim mismatch");
    if (shots < 0)
      throw std::invalid_argument("experiment_plan: shots must be >= 0");
  }
};

// One terminal history of a single operation run: joint probability,
// reported bits split into the channel and measurement parts, and the
// outcome label (label_inconclusive or a conclusive index).
struct leaf_outcome {
  double probability = 0.0;
  std::vector<int> channel_bits;
  std::vector<int> povm_bits;
  int label = label_inconclusive;
};

// Exact branch-tree propagation of operation `op` under the given noise.
// The preparation gate contributes its trailing half-window of cavity
// decay; every circuit layer then adds its own symmetric halves, so the
// state entering the first joint unitary has aged one full gate time.
inline std::vector<leaf_outcome> propagate_exact(const experiment_plan& plan,
                                                 int op,
                                                 const noise_model& nm) {
  plan.validate();
  nm.validate();
  if (op < 0 || op >= static_cast<int>(plan.channel_circuits.size()))
    throw std::out_of_range("propagate_exact: operation index");
  const int d = plan.dim();
  const noise_window gate_half = make_window(nm, d, nm.gate_time / 2.0);
  const noise_window readout = make_readout_window(nm, d);

  sim_branch root;
  root.state = plan.probe.amplitudes() * plan.probe.amplitudes().adjoint();
  apply_cavity(root.state, gate_half.cavity);

  const binary_tree_circuit& channel = plan.channel_circuits[op];
  std::vector<sim_branch> active =
      run_circuit({root}, channel, nm, gate_half, readout);
  const std::size_t channel_bits = channel.layers;
  std::size_t offset = channel_bits;
  std::vector<leaf_outcome> leaves;
  for (const povm_stage& stage : plan.program.stages) {
    if (active.empty()) break;
    active = run_circuit(active, stage.circuit, nm, gate_half, readout);
    const int stage_bits = stage.circuit.layers;
    std::vector<sim_branch> continued;
    for (sim_branch& br : active) {
      const int code = stage_bits == 2
                           ? 2 * br.bits[offset] + br.bits[offset + 1]
                           : br.bits[offset];
      const int label = stage.labels[code];
      if (label == label_continue)
        continued.push_back(std::move(br));
      else
        leaves.push_back(
            {br.probability,
             {br.bits.begin(), br.bits.begin() + channel_bits},
             {br.bits.begin() + channel_bits, br.bits.end()},
             label});
    }
    offset += stage_bits;
    active = std::move(continued);
  }
  if (!active.empty())
    throw std::logic_error("propagate_exact: continue label past last stage");
  return leaves;
}

// Conditional outcome table: row per operation, column per conclusive
// label, rightmost column inconclusive.
inline rmatrix conditional_table(const experiment_plan& plan,
                                 const noise_model& nm) {
  const int n_ops = static_cast<int>(plan.channel_circuits.size());
  const int n_out = plan.program.outcome_count;
  rmatrix table = rmatrix::Zero(n_ops, n_out + 1);
  for (int op = 0; op < n_ops; ++op)
    for (const leaf_outcome& leaf : propagate_exact(plan, op, nm))
      table(op, leaf.label == label_inconclusive ? n_out : leaf.label) +=
          leaf.probability;
  return table;
}

// Full simulated report under uniform priors, sharing the heralding
// relabel logic with the exact POVM evaluation.
inline discrimination_report simulate_report(const experiment_plan& plan,
                                             const noise_model& nm) {
  const int n_ops = static_cast<int>(plan.channel_circuits.size());
  return make_report(conditional_table(plan, nm), uniform_priors(n_ops));
}

// One sampled shot: reported bits plus the outcome label they decode to.
struct shot_record {
  int operation = 0;
  std::vector<int> channel_bits;
  std::vector<int> povm_bits;
  int label = label_inconclusive;
};

// Samples plan.shots shots per operation from the exact leaf distribution.
// Each operation draws from its own deterministic substream, so results
// are reproducible and independent of the order operations are sampled in.
inline std::vector<shot_record> sample_shots(const experiment_plan& plan,
                                             const noise_model& nm) {
  plan.validate();
  std::vector<shot_record> records;
  const int n_ops = static_cast<int>(plan.channel_circuits.size());
  for (int op = 0; op < n_ops; ++op) {
    const std::vector<leaf_outcome> leaves = propagate_exact(plan, op, nm);
    std::vector<double> cumulative(leaves.size());
    double total = 0.0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      total += leaves[i].probability;
      cumulative[i] = total;
    }
    random_source rng(mix_seed(plan.seed, static_cast<std::uint64_t>(op)));
    for (long long s = 0; s < plan.shots; ++s) {
      const double u = rng.uniform() * total;
      const std::size_t idx = static_cast<std::size_t>(
          std::lower_bound(cumulative.begin(), cumulative.end(), u) -
          cumulative.begin());
      const leaf_outcome& leaf = leaves[std::min(idx, leaves.size() - 1)];
      records.push_back({op, leaf.channel_bits, leaf.povm_bits, leaf.label});
    }
  }
  return records;
}

// Infidelity of the probe entering the first joint unitary: one full gate
// time of cavity decay (trailing preparation half plus leading circuit
// half).
inline double prep_infidelity(const state_vector& probe,
                              const noise_model& nm) {
  if (!nm.cavity_noise || nm.gate_time <= 0.0) return 0.0;
  const int d = static_cast<int>(probe.amplitudes().size());
  const noise_window full = make_window(nm, d, nm.gate_time);
  cmatrix rho = probe.amplitudes() * probe.amplitudes().adjoint();
  apply_cavity(rho, full.cavity);
  return 1.0 - state_fidelity(density_matrix(std::move(rho)),
                              density_matrix::pure(probe));
}

// Average map realized by one noisy compiled circuit (all measurement
// branches summed, feedforward routed through the confusion matrix),
// returned as its Choi matrix: block (j, j') holds M(|j><j'|).
inline cmatrix noisy_circuit_choi(const binary_tree_circuit& circ,
                                  const noise_model& nm) {
  const int d = circ.dim;
  const noise_window gate_half = make_window(nm, d, nm.gate_time / 2.0);
  const noise_window readout = make_readout_window(nm, d);
  const rmatrix confusion = nm.confusion_used();
  cmatrix choi = cmatrix::Zero(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int jp = 0; jp < d; ++jp) {
      cmatrix x = cmatrix::Zero(d, d);
      x(j, jp) = 1.0;
      const cmatrix joint1 = evolve_layer(x, circ.U_A, gate_half, readout, d);
      cmatrix mapped = cmatrix::Zero(d, d);
      for (int b1 = 0; b1 < 2; ++b1) {
        const cmatrix block1 = joint1.block(b1 * d, b1 * d, d, d);
        if (circ.layers == 1) {
          mapped += block1;
          continue;
        }
        for (int r1 = 0; r1 < 2; ++r1) {
          const double pr1 = confusion(b1, r1);
          if (pr1 <= 0.0) continue;
          const cmatrix joint2 =
              evolve_layer(block1, r1 == 0 ? circ.U_B0 : circ.U_B1, gate_half,
                           readout, d);
          for (int b2 = 0; b2 < 2; ++b2)
            mapped += pr1 * joint2.block(b2 * d, b2 * d, d, d);
        }
      }
      choi.block(j * d, jp * d, d, d) = mapped;
    }
  return (choi + choi.adjoint().eval()) / 2.0;
}

// Kraus decomposition of a (possibly slightly non-CP) Choi matrix;
// eigenvalues below the cut are dropped.
inline std::vector<cmatrix> kraus_from_choi(const cmatrix& choi, int d,
                                            double cut = 1e-12) {
  Eigen::SelfAdjointEigenSolver<cmatrix> es(choi);
  std::vector<cmatrix> kraus;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()[i];
    if (lambda <= cut) continue;
    cmatrix k(d, d);
    for (int j = 0; j < d; ++j)
      k.col(j) = std::sqrt(lambda) * es.eigenvectors().col(i).segment(j * d, d);
    kraus.push_back(std::move(k));
  }
  return kraus;
}

// Process infidelity of the noisy realized circuit against a target
// channel, in the Heisenberg-Weyl chi representation.
inline double realized_process_infidelity(const binary_tree_circuit& circ,
                                          const kraus_channel& target,
                                          const noise_model& nm) {
  const kraus_channel realized(kraus_from_choi(noisy_circuit_choi(circ, nm),
                                               circ.dim),
                               "realized", 1e-6);
  return 1.0 - process_fidelity(chi_of(realized), chi_of(target));
}

// Error-budget row for one hardware configuration.
struct budget_entry {
  std::string config;
  double distance = 0.0;
  double state_infidelity = 0.0;
  std::vector<double> process_infidelities;
};

inline noise_model budget_config(const noise_model& base,
                                 const std::string& name) {
  noise_model nm = base;
  if (name == "none") {
    nm.cavity_noise = nm.qubit_noise = nm.readout_noise = false;
  } else if (name == "system_only") {
    nm.qubit_noise = nm.readout_noise = false;
  } else if (name != "full") {
    throw std::invalid_argument("budget_config: unknown config " + name);
  }
  return nm;
}

// Ablation budget over the standard configurations.  distance is the mean
// absolute deviation of the conditional table from the noiseless one;
// state_infidelity covers probe preparation; when target channels are
// supplied, per-operation process infidelities of the realized circuits
// are included.
inline std::vector<budget_entry> error_budget(
    const experiment_plan& plan, const noise_model& base,
    const std::vector<kraus_channel>& targets = {}) {
  plan.validate();
  base.validate();
  if (!targets.empty() && targets.size() != plan.channel_circuits.size())
    throw std::invalid_argument("error_budget: target count mismatch");
  const rmatrix ideal = conditional_table(plan, noise_model::none());
  std::vector<budget_entry> rows;
  for (const std::string& name : {"none", "system_only", "full"}) {
    const noise_model nm = budget_config(base, name);
    budget_entry row;
    row.config = name;
    row.distance = name == "none"
                       ? 0.0
                       : distance_D(conditional_table(plan, nm), ideal);
    row.state_infidelity = prep_infidelity(plan.probe, nm);
    for (std::size_t i = 0; i < targets.size(); ++i)
      row.process_infidelities.push_back(realized_process_infidelity(
          plan.channel_circuits[i], targets[i], nm));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace udsim
