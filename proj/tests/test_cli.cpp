#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "udsim/cli.hpp"

using namespace udsim;
namespace fs = std::filesystem;

namespace {

// run_main writes progress to stdout; capture it so test output stays clean.
int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "udsim");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream sink;
  std::streambuf* old = std::cout.rdbuf(sink.rdbuf());
  int rc = -1;
  try {
    rc = cli::run_main(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(old);
    throw;
  }
  std::cout.rdbuf(old);
  return rc;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "udsim_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const json& cfg) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << cfg.dump(2);
  return path;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

}  // namespace

TEST_CASE("matrix and channel JSON round trip") {
  const kraus_channel ch =
      block_pauli({0.3, pauli_kind::y, {{0, 2}, {1, 3}}}, hilbert_dim(4));
  const kraus_channel back = channel_from_json(channel_to_json(ch));
  REQUIRE(back.label() == ch.label());
  REQUIRE(back.dim() == 4);
  REQUIRE(map_distance(ch, back) < 1e-12);

  json bad = channel_to_json(ch);
  bad["extra"] = 1;
  REQUIRE_THROWS_AS(channel_from_json(bad), std::invalid_argument);
  json mismatched = channel_to_json(ch);
  mismatched["dim"] = 3;
  REQUIRE_THROWS_AS(channel_from_json(mismatched), std::invalid_argument);
}

TEST_CASE("povm JSON round trip") {
  const povm_set povm = block_pauli_ud(0.4).povm;
  const povm_set back = povm_from_json(povm_to_json(povm));
  REQUIRE(back.outcome_count() == 3);
  REQUIRE(back.scale() == Catch::Approx(0.4).margin(1e-12));
  REQUIRE(linalg::max_abs(back.inconclusive() - povm.inconclusive()) < 1e-12);
  for (int i = 0; i < 3; ++i)
    REQUIRE(linalg::max_abs(back.effects()[i] - povm.effects()[i]) < 1e-12);
}

TEST_CASE("circuit JSON round trip for both layer counts") {
  // Two layers: a rank-3 measurement channel.
  const binary_tree_circuit two =
      compile_channel(povm_to_kraus(block_dephasing_ud_d3().povm));
  REQUIRE(two.layers == 2);
  const json two_json = circuit_to_json(two);
  REQUIRE(two_json.contains("U_B0"));
  const binary_tree_circuit two_back = circuit_from_json(two_json);
  REQUIRE(two_back.layers == 2);
  REQUIRE(two_back.outcome_map == two.outcome_map);
  REQUIRE(linalg::max_abs(two_back.U_A - two.U_A) < 1e-12);
  REQUIRE(linalg::max_abs(two_back.U_B1 - two.U_B1) < 1e-12);

  // One layer: a rank-2 channel; the identity second layer is omitted from
  // the JSON and restored on load.
  const binary_tree_circuit one = compile_channel(
      block_pauli({0.2, pauli_kind::z, {{0, 1}}}, hilbert_dim(2)));
  REQUIRE(one.layers == 1);
  const json one_json = circuit_to_json(one);
  REQUIRE_FALSE(one_json.contains("U_B0"));
  REQUIRE(one_json["outcome_map"].contains("0"));
  REQUIRE_FALSE(one_json["outcome_map"].contains("00"));
  const binary_tree_circuit one_back = circuit_from_json(one_json);
  REQUIRE(one_back.layers == 1);
  REQUIRE(one_back.outcome_map == one.outcome_map);
  REQUIRE(linalg::max_abs(one_back.U_A - one.U_A) < 1e-12);
  REQUIRE(linalg::max_abs(one_back.U_B0 - cmatrix::Identity(4, 4)) == 0.0);

  json bad = one_json;
  bad["layers"] = 3;
  REQUIRE_THROWS_AS(circuit_from_json(bad), std::invalid_argument);
}

TEST_CASE("noise JSON round trip and the none shorthand") {
  noise_model nm;
  nm.gate_time = 3.5;
  nm.readout_confusion(0, 0) = 0.98;
  nm.readout_confusion(0, 1) = 0.02;
  const noise_model back = noise_from_json(noise_to_json(nm));
  REQUIRE(back.gate_time == 3.5);
  REQUIRE(back.readout_confusion(0, 1) == 0.02);
  REQUIRE(back.cavity_noise == nm.cavity_noise);

  const noise_model off = noise_from_json(json("none"));
  REQUIRE_FALSE(off.cavity_noise);
  REQUIRE_THROWS_AS(noise_from_json(json("all")), std::invalid_argument);
  REQUIRE_THROWS_AS(noise_from_json(json{{"t1", 10.0}}),
                    std::invalid_argument);
  // Partial overrides keep the device defaults elsewhere.
  const noise_model partial = noise_from_json(json{{"gate_time_us", 1.0}});
  REQUIRE(partial.gate_time == 1.0);
  REQUIRE(partial.cavity_t1 == 143.0);
}

TEST_CASE("run_config_from_json builds the named experiments") {
  const json cfg = {{"experiment", "block_pauli_ud"},
                    {"parameters", {{"eta", 0.25}}},
                    {"noise", "none"},
                    {"shots", 100},
                    {"seed", 7}};
  const run_config rc = run_config_from_json(cfg);
  REQUIRE(rc.setup.name == "block_pauli_ud");
  REQUIRE(rc.setup.povm.scale() == Catch::Approx(0.25));
  REQUIRE(rc.shots == 100);
  REQUIRE(rc.seed == 7);
  REQUIRE_FALSE(rc.noise.cavity_noise);

  REQUIRE_THROWS_AS(
      run_config_from_json(json{{"experiment", "unknown_thing"}}),
      std::invalid_argument);
  REQUIRE_THROWS_AS(run_config_from_json(json{{"experiment", "block_pauli_ud"},
                                              {"parameters", {{"eta", 0.2}}},
                                              {"shots", -5}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(
      run_config_from_json(json{{"experiment", "block_dephasing_ud"},
                                {"parameters", {{"levels", 5}}}}),
      std::invalid_argument);
}

TEST_CASE("custom experiments derive a measurement when none is given") {
  const experiment_setup d3 = block_dephasing_ud_d3();
  json channels = json::array();
  for (const auto& ch : d3.channels) channels.push_back(channel_to_json(ch));
  const json cfg = {{"experiment", "custom"},
                    {"parameters", {{"channels", channels}}},
                    {"probe", vector_to_json(d3.probe.amplitudes())}};
  const experiment_setup setup = setup_from_config(cfg);
  REQUIRE(setup.name == "custom");
  REQUIRE(setup.povm.scale() == Catch::Approx(2.0 / 9.0).margin(1e-9));

  // Indistinguishable channels cannot yield a POVM here.
  json twins = json::array();
  twins.push_back(channel_to_json(qubit_dephasing(0.0, "a")));
  twins.push_back(channel_to_json(qubit_dephasing(0.0, "b")));
  cvector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const json infeasible = {{"experiment", "custom"},
                           {"parameters", {{"channels", twins}}},
                           {"probe", vector_to_json(plus)}};
  REQUIRE_THROWS_AS(setup_from_config(infeasible), std::invalid_argument);
}

TEST_CASE("csv writers and filename mangling") {
  std::ostringstream os;
  write_bound_csv(os, {{1.6, 0.876786075828050536, {0.25, 0.75}}});
  REQUIRE(os.str() ==
          "alpha,p_con_bound,c_sq_0,c_sq_1\n1.6,0.876786075828,0.25,0.75\n");

  rmatrix table(1, 2);
  table << 0.25, 0.75;
  std::ostringstream cond;
  write_conditional_csv(cond, table, {"opA"});
  REQUIRE(cond.str() ==
          "operation,outcome,probability\nopA,0,0.25\nopA,inconclusive,0.75\n");

  REQUIRE(bits_to_string({1, 0, 1}) == "101");
  REQUIRE(sanitize_filename("displacement_0") == "displacement_0");
  REQUIRE(sanitize_filename("a/b:c d") == "a-b-c-d");
}

TEST_CASE("cli bound writes the oracle value") {
  const fs::path out = scratch_dir() / "bound.csv";
  REQUIRE(invoke({"bound", "--N", "4", "--alpha-min", "1.6", "--alpha-max",
                  "1.6", "--out", out.string()}) == 0);
  std::ifstream in(out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  REQUIRE(header == "alpha,p_con_bound,c_sq_0,c_sq_1,c_sq_2,c_sq_3");
  REQUIRE(row.rfind("1.6,0.876786075828,", 0) == 0);

  const fs::path out_json = scratch_dir() / "bound.json";
  REQUIRE(invoke({"bound", "--N", "2", "--alpha-min", "0.8", "--alpha-max",
                  "0.8", "--format", "json", "--out", out_json.string()}) ==
          0);
  const json rows = read_json(out_json);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0]["p_con_bound"].get<double>() ==
          Catch::Approx(0.721962699546805868).margin(1e-9));
}

TEST_CASE("cli run produces a report directory") {
  const fs::path cfg = write_config("run_bp.json",
                                    {{"experiment", "block_pauli_ud"},
                                     {"parameters", {{"eta", 0.3}}},
                                     {"noise", "none"},
                                     {"shots", 0},
                                     {"seed", 1}});
  const fs::path dir = scratch_dir() / "run_out";
  REQUIRE(invoke({"run", "--config", cfg.string(), "--out", dir.string(),
                  "--shots", "25"}) == 0);
  const json report = read_json(dir / "report.json");
  REQUIRE(report["experiment"] == "block_pauli_ud");
  REQUIRE(report["shots"] == 25);
  REQUIRE(report["operations"].size() == 3);
  REQUIRE(report["p_conclusive"].get<double>() ==
          Catch::Approx(0.3).margin(1e-9));
  REQUIRE(report["p_error"].get<double>() < 1e-9);
  REQUIRE(report["conditional"][0][0].get<double>() ==
          Catch::Approx(0.3).margin(1e-9));
  REQUIRE(fs::exists(dir / "conditional.csv"));
  // One shots file per operation, each holding the requested sample count.
  for (const char* label : {"X", "Y", "Z"}) {
    const fs::path shots = dir / (std::string("shots_") + label + ".csv");
    REQUIRE(fs::exists(shots));
    std::ifstream in(shots);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    REQUIRE(lines == 26);  // header + 25 shots
  }
}

TEST_CASE("cli budget emits ordered configurations") {
  const fs::path cfg = write_config(
      "budget_bp.json",
      {{"experiment", "block_pauli_ud"}, {"parameters", {{"eta", 0.5}}}});
  const fs::path dir = scratch_dir() / "budget_out";
  REQUIRE(invoke({"budget", "--config", cfg.string(), "--out",
                  dir.string()}) == 0);
  const json budget = read_json(dir / "budget.json");
  const json& rows = budget["configs"];
  REQUIRE(rows.size() == 3);
  REQUIRE(rows[0]["config"] == "none");
  REQUIRE(rows[2]["config"] == "full");
  REQUIRE(rows[0]["distance"].get<double>() == 0.0);
  REQUIRE(rows[2]["distance"].get<double>() >
          rows[1]["distance"].get<double>());
  REQUIRE(rows[2]["distance_percent_of_full"].get<double>() ==
          Catch::Approx(100.0));
  REQUIRE(rows[2]["process_infidelity"].contains("X"));
  REQUIRE(fs::exists(dir / "budget.csv"));
}

TEST_CASE("cli feasibility reports the support analysis") {
  const fs::path cfg = write_config(
      "feas_d3.json",
      {{"experiment", "block_dephasing_ud"}, {"parameters", {{"levels", 3}}}});
  const fs::path out = scratch_dir() / "feas.json";
  REQUIRE(invoke({"feasibility", "--config", cfg.string(), "--out",
                  out.string()}) == 0);
  const json feas = read_json(out);
  REQUIRE(feas["feasible"] == true);
  REQUIRE(feas["union_dim"] == 3);
  REQUIRE(feas["operations"].size() == 2);
  REQUIRE(feas["operations"][0]["feasible"] == true);
  REQUIRE(feas["candidate_p_con"].get<double>() ==
          Catch::Approx(2.0 / 9.0).margin(1e-9));
}

TEST_CASE("cli compile emits circuits and fidelities") {
  const fs::path cfg = write_config(
      "compile_bp.json",
      {{"experiment", "block_pauli_ud"}, {"parameters", {{"eta", 0.3}}}});
  const fs::path out = scratch_dir() / "compiled.json";
  REQUIRE(invoke({"compile", "--config", cfg.string(), "--out",
                  out.string()}) == 0);
  const json compiled = read_json(out);
  REQUIRE(compiled["experiment"] == "block_pauli_ud");
  REQUIRE(compiled["dim"] == 4);
  REQUIRE(compiled["operations"].size() == 3);
  for (const json& op : compiled["operations"]) {
    REQUIRE(op["process_fidelity"].get<double>() >= 1.0 - 1e-9);
    REQUIRE(op["circuit"]["layers"] == 1);  // rank-2 error channels
  }
  REQUIRE(compiled["measurement_stages"].size() == 1);
  REQUIRE(compiled["measurement_stages"][0]["circuit"]["layers"] == 2);
  const json labels = compiled["measurement_stages"][0]["labels"];
  REQUIRE(labels == json({-1, 0, 1, 2}));
}

TEST_CASE("cli rejects bad invocations") {
  REQUIRE(invoke({"run", "--config", "/nonexistent/config.json"}) == 1);
  REQUIRE(invoke({"bound", "--N", "1"}) != 0);         // below the range
  REQUIRE(invoke({"bound", "--N", "4", "--alpha-step", "-1"}) == 1);
  REQUIRE(invoke({}) != 0);                            // missing subcommand
  REQUIRE(invoke({"bound", "--N", "4", "--format", "yaml"}) == 1);
  const fs::path cfg = write_config("typo.json",
                                    {{"experiment", "block_pauli_ud"},
                                     {"parameters", {{"eta", 0.3}}},
                                     {"shotz", 10}});
  REQUIRE(invoke({"run", "--config", cfg.string()}) == 1);
}
