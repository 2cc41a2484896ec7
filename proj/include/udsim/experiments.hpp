#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "udsim/channels.hpp"
#include "udsim/core.hpp"
#include "udsim/dilation.hpp"
#include "udsim/discrimination.hpp"
#include "udsim/hilbert.hpp"
#include "udsim/noisesim.hpp"

// Prebuilt discrimination experiments: channel family, probe, and a POVM
// whose effect n heralds channel n, plus assembly into a compiled plan.
namespace udsim {

struct experiment_setup {
  std::string name;
  std::vector<kraus_channel> channels;
  state_vector probe;
  povm_set povm;
};

// N phase-symmetric displacements D(alpha e^{i 2 pi k / N}) probed with
// vacuum; the POVM is the optimal unambiguous set for the resulting
// symmetric coherent states, so its scale saturates the closed-form bound.
inline experiment_setup displacement_ud(int n_ops, double alpha_mag,
                                        int d_trunc = 40) {
  if (n_ops < 2)
    throw std::invalid_argument("displacement_ud: need at least 2 operations");
  const hilbert_dim dim(d_trunc);
  std::vector<kraus_channel> channels;
  std::vector<state_vector> outputs;
  for (int k = 0; k < n_ops; ++k) {
    const complex alpha =
        alpha_mag * std::exp(complex(0.0, 2.0 * pi * k / n_ops));
    cmatrix u = displacement_operator(alpha, dim);
    outputs.emplace_back(cvector(u.col(0)));
    channels.emplace_back(std::vector<cmatrix>{std::move(u)},
                          "displacement_" + std::to_string(k));
  }
  povm_set povm = build_symmetric_povm(outputs);
  return {"displacement_ud", std::move(channels),
          fock_state(0, dim), std::move(povm)};
}

// Two block-dephasing channels on a qutrit that differ in where the
// coherence cut sits; each erases the coherence the other preserves, so
// the heralding effects live on the crosswise difference vectors.
inline experiment_setup block_dephasing_ud_d3() {
  const hilbert_dim dim(3);
  std::vector<kraus_channel> channels = {
      block_dephasing({{0, 1}, {2}}, dim, "dephasing_01|2"),
      block_dephasing({{0}, {1, 2}}, dim, "dephasing_0|12")};
  cvector amps = cvector::Constant(3, 1.0 / std::sqrt(3.0));
  // Effect 0 projects onto (|1> - |2>)/sqrt(2).  Channel 1 keeps levels 1
  // and 2 in their symmetric superposition, exactly orthogonal to that
  // vector; channel 0 cuts the 1-2 coherence and leaves antisymmetric
  // weight behind, so a click heralds channel 0.  Effect 1 mirrors this.
  cmatrix e0 = cmatrix::Zero(3, 3), e1 = cmatrix::Zero(3, 3);
  e0(1, 1) = e0(2, 2) = 1.0 / 3.0;
  e0(1, 2) = e0(2, 1) = -1.0 / 3.0;
  e1(0, 0) = e1(1, 1) = 1.0 / 3.0;
  e1(0, 1) = e1(1, 0) = -1.0 / 3.0;
  povm_set povm = povm_set::from_effects({std::move(e0), std::move(e1)},
                                         2.0 / 9.0);
  return {"block_dephasing_ud_d3", std::move(channels),
          state_vector(std::move(amps)), std::move(povm)};
}

// Three block-dephasing channels on a ququart whose cuts sit after levels
// 0, 1, and 2; effect n projects onto (|n> - |n+1>)/sqrt(2), which only
// channel n (the one that cuts the n, n+1 coherence) can populate.
inline experiment_setup block_dephasing_ud_d4() {
  const hilbert_dim dim(4);
  std::vector<kraus_channel> channels = {
      block_dephasing({{0}, {1, 2, 3}}, dim, "dephasing_0|123"),
      block_dephasing({{0, 1}, {2, 3}}, dim, "dephasing_01|23"),
      block_dephasing({{0, 1, 2}, {3}}, dim, "dephasing_012|3")};
  cvector amps = cvector::Constant(4, 0.5);
  const double c = 1.0 - std::sqrt(0.5);  // (2 - sqrt(2)) / 2
  std::vector<cmatrix> effects;
  for (int n = 0; n < 3; ++n) {
    cmatrix e = cmatrix::Zero(4, 4);
    e(n, n) = e(n + 1, n + 1) = c;
    e(n, n + 1) = e(n + 1, n) = -c;
    effects.push_back(std::move(e));
  }
  povm_set povm = povm_set::from_effects(std::move(effects),
                                         (2.0 - std::sqrt(2.0)) / 4.0);
  return {"block_dephasing_ud_d4", std::move(channels),
          state_vector(std::move(amps)), std::move(povm)};
}

// Three block-Pauli error channels (X, Y, Z error with probability eta on
// the pairs (0,2) and (1,3)) probed with (|0> + |3>)/sqrt(2).  The three
// error images of the probe are mutually orthogonal and orthogonal to the
// probe itself, so each heralding effect is the full projector onto one
// image and the conclusive probability is exactly eta.
inline experiment_setup block_pauli_ud(double eta) {
  const hilbert_dim dim(4);
  const std::vector<std::pair<int, int>> pairs = {{0, 2}, {1, 3}};
  std::vector<kraus_channel> channels;
  for (pauli_kind kind : {pauli_kind::x, pauli_kind::y, pauli_kind::z})
    channels.push_back(block_pauli({eta, kind, pairs}, dim, to_string(kind)));
  cvector amps = cvector::Zero(4);
  amps[0] = amps[3] = 1.0 / std::sqrt(2.0);
  const state_vector probe(std::move(amps));
  std::vector<cmatrix> effects;
  for (pauli_kind kind : {pauli_kind::x, pauli_kind::y, pauli_kind::z}) {
    const cmatrix k1 = block_pauli_operator(kind, pairs, 4);
    const cvector image = k1 * probe.amplitudes();
    effects.push_back(image * image.adjoint());
  }
  povm_set povm = povm_set::from_effects(std::move(effects), eta);
  return {"block_pauli_ud", std::move(channels), probe, std::move(povm)};
}

// Compiles a setup into circuits plus a measurement program.
inline experiment_plan make_plan(const experiment_setup& setup,
                                 long long shots = 0, std::uint64_t seed = 0) {
  experiment_plan plan{setup.probe,
                       {},
                       {},
                       compile_povm_program(setup.povm),
                       shots,
                       seed};
  for (const auto& ch : setup.channels) {
    plan.channel_circuits.push_back(compile_channel(ch));
    plan.channel_labels.push_back(ch.label());
  }
  plan.validate();
  return plan;
}

}  // namespace udsim
