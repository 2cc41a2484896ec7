#pragma once

#include <cctype>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "udsim/channels.hpp"
#include "udsim/core.hpp"
#include "udsim/dilation.hpp"
#include "udsim/discrimination.hpp"
#include "udsim/experiments.hpp"
#include "udsim/noisesim.hpp"

// JSON and CSV interchange.  Complex matrices are row-major lists of rows,
// each entry an [re, im] pair.  Config parsing is fail-closed: unknown keys
// are rejected so typos cannot silently fall back to defaults.  CSV output
// uses 12 significant digits and LF line endings.
namespace udsim {

using json = nlohmann::json;

inline std::string format_sig(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline void expect_keys(const json& j, const std::string& context,
                        std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw std::invalid_argument(context + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument(context + ": unknown key '" + item.key() +
                                  "'");
  }
}

inline const json& require_key(const json& j, const std::string& context,
                               const char* key) {
  if (!j.contains(key))
    throw std::invalid_argument(context + ": missing key '" + key + "'");
  return j.at(key);
}

// ---- matrices and vectors ----

inline json matrix_to_json(const cmatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline cmatrix matrix_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(context + ": expected a non-empty matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  cmatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument(context + ": ragged matrix rows");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& entry = row.at(k);
      if (!entry.is_array() || entry.size() != 2)
        throw std::invalid_argument(context +
                                    ": entries must be [re, im] pairs");
      m(i, k) = complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  return m;
}

inline json vector_to_json(const cvector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back({v[i].real(), v[i].imag()});
  return out;
}

inline cvector vector_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(context + ": expected a non-empty vector");
  cvector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const json& entry = j.at(i);
    if (!entry.is_array() || entry.size() != 2)
      throw std::invalid_argument(context +
                                  ": entries must be [re, im] pairs");
    v[i] = complex(entry.at(0).get<double>(), entry.at(1).get<double>());
  }
  return v;
}

inline json real_matrix_to_json(const rmatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline rmatrix real_matrix_from_json(const json& j,
                                     const std::string& context) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(context + ": expected a non-empty matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  rmatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j.at(i).size()) != cols)
      throw std::invalid_argument(context + ": ragged matrix rows");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

// ---- channels, POVMs, circuits, noise ----

inline json channel_to_json(const kraus_channel& ch) {
  json kraus = json::array();
  for (const auto& k : ch.kraus_ops()) kraus.push_back(matrix_to_json(k));
  return {{"label", ch.label()}, {"dim", ch.dim()}, {"kraus", kraus}};
}

inline kraus_channel channel_from_json(const json& j,
                                       double tolerance = tol::cptp_accept) {
  expect_keys(j, "channel", {"label", "dim", "kraus"});
  const int dim = require_key(j, "channel", "dim").get<int>();
  std::vector<cmatrix> kraus;
  for (const json& k : require_key(j, "channel", "kraus"))
    kraus.push_back(matrix_from_json(k, "channel kraus"));
  for (const auto& k : kraus)
    if (k.rows() != dim || k.cols() != dim)
      throw std::invalid_argument(
          "channel: kraus operator size does not match dim");
  return kraus_channel(std::move(kraus),
                       j.value("label", std::string("channel")), tolerance);
}

inline json povm_to_json(const povm_set& povm) {
  json effects = json::array();
  for (const auto& e : povm.effects()) effects.push_back(matrix_to_json(e));
  return {{"effects", effects},
          {"inconclusive", matrix_to_json(povm.inconclusive())},
          {"scale", povm.scale()}};
}

inline povm_set povm_from_json(const json& j) {
  expect_keys(j, "povm", {"effects", "inconclusive", "scale"});
  std::vector<cmatrix> effects;
  for (const json& e : require_key(j, "povm", "effects"))
    effects.push_back(matrix_from_json(e, "povm effect"));
  if (effects.empty())
    throw std::invalid_argument("povm: no conclusive effects");
  if (j.contains("inconclusive"))
    return povm_set(std::move(effects),
                    matrix_from_json(j.at("inconclusive"), "povm"),
                    j.value("scale", 0.0));
  return povm_set::from_effects(std::move(effects), j.value("scale", 0.0));
}

inline const char* outcome_bit_names[4] = {"00", "01", "10", "11"};
inline const char* outcome_bit_name(int layers, int code) {
  return layers == 1 ? (code == 0 ? "0" : "1") : outcome_bit_names[code];
}

// Single-layer circuits carry one readout bit, so their outcome_map uses
// keys "0"/"1" and the identity-placeholder second layer is omitted.
inline json circuit_to_json(const binary_tree_circuit& circ) {
  json outcome_map = json::object();
  const int codes = circ.layers == 1 ? 2 : 4;
  for (int code = 0; code < codes; ++code)
    outcome_map[outcome_bit_name(circ.layers, code)] =
        circ.outcome_map[code] < 0 ? json() : json(circ.outcome_map[code]);
  json out = {{"dim", circ.dim},
              {"layers", circ.layers},
              {"U_A", matrix_to_json(circ.U_A)},
              {"outcome_map", outcome_map}};
  if (circ.layers == 2) {
    out["U_B0"] = matrix_to_json(circ.U_B0);
    out["U_B1"] = matrix_to_json(circ.U_B1);
  }
  return out;
}

inline binary_tree_circuit circuit_from_json(const json& j) {
  binary_tree_circuit circ;
  circ.layers = j.contains("layers") ? j["layers"].get<int>() : 2;
  if (circ.layers != 1 && circ.layers != 2)
    throw std::invalid_argument("circuit: layers must be 1 or 2");
  if (circ.layers == 1)
    expect_keys(j, "circuit", {"dim", "layers", "U_A", "outcome_map"});
  else
    expect_keys(j, "circuit",
                {"dim", "layers", "U_A", "U_B0", "U_B1", "outcome_map"});
  circ.dim = require_key(j, "circuit", "dim").get<int>();
  circ.U_A = matrix_from_json(require_key(j, "circuit", "U_A"), "circuit U_A");
  if (circ.layers == 2) {
    circ.U_B0 =
        matrix_from_json(require_key(j, "circuit", "U_B0"), "circuit U_B0");
    circ.U_B1 =
        matrix_from_json(require_key(j, "circuit", "U_B1"), "circuit U_B1");
  } else {
    circ.U_B0 = circ.U_B1 = cmatrix::Identity(2 * circ.dim, 2 * circ.dim);
  }
  const json& map = require_key(j, "circuit", "outcome_map");
  const int codes = circ.layers == 1 ? 2 : 4;
  if (circ.layers == 1)
    expect_keys(map, "outcome_map", {"0", "1"});
  else
    expect_keys(map, "outcome_map", {"00", "01", "10", "11"});
  circ.outcome_map = {-1, -1, -1, -1};
  for (int code = 0; code < codes; ++code) {
    const json& entry = require_key(map, "outcome_map",
                                    outcome_bit_name(circ.layers, code));
    circ.outcome_map[code] = entry.is_null() ? -1 : entry.get<int>();
  }
  for (const cmatrix* u : {&circ.U_A, &circ.U_B0, &circ.U_B1})
    if (u->rows() != 2 * circ.dim || u->cols() != 2 * circ.dim)
      throw std::invalid_argument("circuit: unitary size must be 2*dim");
  return circ;
}

inline json noise_to_json(const noise_model& nm) {
  return {{"cavity_t1_us", nm.cavity_t1},
          {"qubit_t1_us", nm.qubit_t1},
          {"qubit_tphi_us", nm.qubit_tphi},
          {"chi_qs_mhz", nm.chi_qs},
          {"gate_time_us", nm.gate_time},
          {"measure_time_us", nm.measure_time},
          {"readout_confusion", real_matrix_to_json(nm.readout_confusion)},
          {"cavity_noise", nm.cavity_noise},
          {"qubit_noise", nm.qubit_noise},
          {"readout_noise", nm.readout_noise}};
}

// Accepts the string "none", or an object of partial overrides on top of
// the device defaults.
inline noise_model noise_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "none") return noise_model::none();
    throw std::invalid_argument("noise: only the string 'none' is accepted");
  }
  expect_keys(j, "noise",
              {"cavity_t1_us", "qubit_t1_us", "qubit_tphi_us", "chi_qs_mhz",
               "gate_time_us", "measure_time_us", "readout_confusion",
               "cavity_noise", "qubit_noise", "readout_noise"});
  noise_model nm;
  nm.cavity_t1 = j.value("cavity_t1_us", nm.cavity_t1);
  nm.qubit_t1 = j.value("qubit_t1_us", nm.qubit_t1);
  nm.qubit_tphi = j.value("qubit_tphi_us", nm.qubit_tphi);
  nm.chi_qs = j.value("chi_qs_mhz", nm.chi_qs);
  nm.gate_time = j.value("gate_time_us", nm.gate_time);
  nm.measure_time = j.value("measure_time_us", nm.measure_time);
  if (j.contains("readout_confusion"))
    nm.readout_confusion =
        real_matrix_from_json(j.at("readout_confusion"), "noise confusion");
  nm.cavity_noise = j.value("cavity_noise", nm.cavity_noise);
  nm.qubit_noise = j.value("qubit_noise", nm.qubit_noise);
  nm.readout_noise = j.value("readout_noise", nm.readout_noise);
  nm.validate();
  return nm;
}

// ---- reports and budgets ----

inline json report_to_json(const discrimination_report& report,
                           const std::vector<std::string>& operations) {
  json conditional = json::array();
  for (Eigen::Index i = 0; i < report.conditional.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index m = 0; m < report.conditional.cols(); ++m)
      row.push_back(report.conditional(i, m));
    conditional.push_back(std::move(row));
  }
  return {{"operations", operations},
          {"priors", report.priors},
          {"conditional", conditional},
          {"p_conclusive", report.p_con},
          {"p_inconclusive", report.p_inc},
          {"p_error", report.p_err}};
}

inline json budget_to_json(const std::vector<budget_entry>& rows,
                           const std::vector<std::string>& proc_labels) {
  double full_distance = 0.0;
  for (const auto& row : rows)
    if (row.config == "full") full_distance = row.distance;
  json out = json::array();
  for (const auto& row : rows) {
    json entry = {{"config", row.config},
                  {"distance", row.distance},
                  {"state_infidelity", row.state_infidelity}};
    entry["distance_percent_of_full"] =
        full_distance > 0.0 ? 100.0 * row.distance / full_distance : 0.0;
    if (!row.process_infidelities.empty()) {
      json proc = json::object();
      for (std::size_t i = 0; i < row.process_infidelities.size(); ++i)
        proc[proc_labels.at(i)] = row.process_infidelities[i];
      entry["process_infidelity"] = std::move(proc);
    }
    out.push_back(std::move(entry));
  }
  return {{"configs", out}};
}

// ---- CSV writers ----

inline void write_conditional_csv(std::ostream& os,
                                  const rmatrix& conditional,
                                  const std::vector<std::string>& operations) {
  const Eigen::Index n_out = conditional.cols() - 1;
  os << "operation,outcome,probability\n";
  for (Eigen::Index i = 0; i < conditional.rows(); ++i)
    for (Eigen::Index m = 0; m < conditional.cols(); ++m) {
      os << operations.at(static_cast<std::size_t>(i)) << ',';
      if (m < n_out)
        os << m;
      else
        os << "inconclusive";
      os << ',' << format_sig(conditional(i, m)) << '\n';
    }
}

struct bound_row {
  double alpha = 0.0;
  double bound = 0.0;
  std::vector<double> c_sq;
};

inline void write_bound_csv(std::ostream& os,
                            const std::vector<bound_row>& rows) {
  if (rows.empty()) return;
  os << "alpha,p_con_bound";
  for (std::size_t r = 0; r < rows.front().c_sq.size(); ++r)
    os << ",c_sq_" << r;
  os << '\n';
  for (const auto& row : rows) {
    os << format_sig(row.alpha) << ',' << format_sig(row.bound);
    for (double c : row.c_sq) os << ',' << format_sig(c);
    os << '\n';
  }
}

inline json bound_rows_to_json(const std::vector<bound_row>& rows) {
  json out = json::array();
  for (const auto& row : rows)
    out.push_back({{"alpha", row.alpha},
                   {"p_con_bound", row.bound},
                   {"c_sq", row.c_sq}});
  return out;
}

inline void write_budget_csv(std::ostream& os,
                             const std::vector<budget_entry>& rows,
                             const std::vector<std::string>& proc_labels) {
  os << "config,distance,state_infid";
  for (const auto& label : proc_labels) os << ",proc_infid_" << label;
  os << '\n';
  for (const auto& row : rows) {
    os << row.config << ',' << format_sig(row.distance) << ','
       << format_sig(row.state_infidelity);
    for (double p : row.process_infidelities) os << ',' << format_sig(p);
    os << '\n';
  }
}

inline std::string bits_to_string(const std::vector<int>& bits) {
  std::string s;
  for (int b : bits) s += static_cast<char>('0' + b);
  return s;
}

inline void write_shots_csv(std::ostream& os,
                            const std::vector<shot_record>& records,
                            int operation) {
  os << "shot,channel_bits,povm_bits,label\n";
  long long shot = 0;
  for (const auto& rec : records) {
    if (rec.operation != operation) continue;
    os << shot++ << ',' << bits_to_string(rec.channel_bits) << ','
       << bits_to_string(rec.povm_bits) << ',' << rec.label << '\n';
  }
}

inline std::string sanitize_filename(const std::string& label) {
  std::string out;
  for (char c : label)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
            c == '-')
               ? c
               : '-';
  return out;
}

// ---- experiment configs ----

struct run_config {
  experiment_setup setup;
  noise_model noise;
  long long shots = 0;
  std::uint64_t seed = 0;
};

// Builds the experiment named by a config object.  For "custom" setups
// without a POVM, the support-based feasibility candidate is used; an
// infeasible custom setup is an error here (the feasibility command
// reports the analysis instead of throwing).
inline experiment_setup setup_from_config(const json& cfg) {
  const std::string experiment =
      require_key(cfg, "config", "experiment").get<std::string>();
  const json params = cfg.value("parameters", json::object());
  experiment_setup setup = [&]() -> experiment_setup {
    if (experiment == "displacement_ud") {
      expect_keys(params, "parameters", {"operations", "alpha", "truncation"});
      return displacement_ud(
          require_key(params, "parameters", "operations").get<int>(),
          require_key(params, "parameters", "alpha").get<double>(),
          params.value("truncation", 40));
    }
    if (experiment == "block_dephasing_ud") {
      expect_keys(params, "parameters", {"levels"});
      const int levels = require_key(params, "parameters", "levels").get<int>();
      if (levels == 3) return block_dephasing_ud_d3();
      if (levels == 4) return block_dephasing_ud_d4();
      throw std::invalid_argument(
          "block_dephasing_ud: levels must be 3 or 4");
    }
    if (experiment == "block_pauli_ud") {
      expect_keys(params, "parameters", {"eta"});
      return block_pauli_ud(
          require_key(params, "parameters", "eta").get<double>());
    }
    if (experiment == "custom") {
      expect_keys(params, "parameters", {"channels", "povm"});
      std::vector<kraus_channel> channels;
      for (const json& c : require_key(params, "parameters", "channels"))
        channels.push_back(channel_from_json(c));
      if (channels.empty())
        throw std::invalid_argument("custom: no channels given");
      const cvector probe_amps = vector_from_json(
          require_key(cfg, "config", "probe"), "config probe");
      if (std::abs(probe_amps.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("config probe: vector is not normalized");
      const state_vector probe = state_vector::normalized(probe_amps);
      if (params.contains("povm"))
        return {"custom", std::move(channels), probe,
                povm_from_json(params.at("povm"))};
      support_analysis analysis = ud_feasibility(channels, probe);
      if (!analysis.candidate)
        throw std::invalid_argument(
            "custom: channel set is not unambiguously discriminable with "
            "this probe (run the feasibility command for the analysis)");
      return {"custom", std::move(channels), probe,
              std::move(*analysis.candidate)};
    }
    throw std::invalid_argument("config: unknown experiment '" + experiment +
                                "'");
  }();
  // Optional probe override for the named experiments.
  if (experiment != "custom" && cfg.contains("probe")) {
    const cvector probe_amps =
        vector_from_json(cfg.at("probe"), "config probe");
    if (std::abs(probe_amps.norm() - 1.0) > 1e-6)
      throw std::invalid_argument("config probe: vector is not normalized");
    if (static_cast<int>(probe_amps.size()) != setup.probe.size())
      throw std::invalid_argument("config probe: dimension mismatch");
    setup.probe = state_vector::normalized(probe_amps);
  }
  return setup;
}

inline run_config run_config_from_json(const json& cfg) {
  expect_keys(cfg, "config",
              {"experiment", "parameters", "probe", "noise", "shots", "seed"});
  run_config rc{setup_from_config(cfg),
                cfg.contains("noise") ? noise_from_json(cfg.at("noise"))
                                      : noise_model::none(),
                cfg.value("shots", 0LL),
                cfg.value("seed", std::uint64_t{0})};
  if (rc.shots < 0)
    throw std::invalid_argument("config: shots must be >= 0");
  return rc;
}

}  // namespace udsim
