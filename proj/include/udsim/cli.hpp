#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "udsim/serialization.hpp"

// Command-line front end: bound, run, budget, feasibility, compile.
namespace udsim::cli {

inline json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file: " + path);
  return json::parse(in);
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// Channels and probe for analysis commands; the measurement is not needed
// (and for infeasible custom setups cannot be built).
inline std::pair<std::vector<kraus_channel>, state_vector>
channels_probe_from_config(const json& cfg) {
  const std::string experiment =
      require_key(cfg, "config", "experiment").get<std::string>();
  if (experiment != "custom") {
    experiment_setup setup = setup_from_config(cfg);
    return {std::move(setup.channels), std::move(setup.probe)};
  }
  const json params = cfg.value("parameters", json::object());
  expect_keys(params, "parameters", {"channels", "povm"});
  std::vector<kraus_channel> channels;
  for (const json& c : require_key(params, "parameters", "channels"))
    channels.push_back(channel_from_json(c));
  if (channels.empty())
    throw std::invalid_argument("custom: no channels given");
  const cvector probe_amps =
      vector_from_json(require_key(cfg, "config", "probe"), "config probe");
  if (std::abs(probe_amps.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("config probe: vector is not normalized");
  return {std::move(channels), state_vector::normalized(probe_amps)};
}

struct bound_args {
  int n_ops = 2;
  double alpha_min = 0.2;
  double alpha_max = 2.0;
  double alpha_step = 0.1;
  std::string out;
  std::string format = "csv";
};

inline int cmd_bound(const bound_args& args) {
  if (args.alpha_step <= 0.0)
    throw std::invalid_argument("bound: --alpha-step must be > 0");
  if (args.alpha_max < args.alpha_min)
    throw std::invalid_argument("bound: --alpha-max below --alpha-min");
  std::vector<bound_row> rows;
  for (int i = 0;; ++i) {
    const double alpha = args.alpha_min + i * args.alpha_step;
    if (alpha > args.alpha_max + 1e-12) break;
    auto [bound, c_sq] = symmetric_ud_bound(alpha, args.n_ops);
    rows.push_back({alpha, bound, std::move(c_sq)});
  }
  std::string text;
  if (args.format == "json") {
    text = dump_json(bound_rows_to_json(rows));
  } else if (args.format == "csv") {
    std::ostringstream os;
    write_bound_csv(os, rows);
    text = os.str();
  } else {
    throw std::invalid_argument("bound: --format must be csv or json");
  }
  if (args.out.empty())
    std::cout << text;
  else
    write_text_file(args.out, text);
  return 0;
}

struct run_args {
  std::string config;
  std::string out;
  long long shots = -1;        // -1 = keep config value
  long long seed = -1;
};

inline int cmd_run(const run_args& args) {
  const json cfg = load_config(args.config);
  run_config rc = run_config_from_json(cfg);
  if (args.shots >= 0) rc.shots = args.shots;
  if (args.seed >= 0) rc.seed = static_cast<std::uint64_t>(args.seed);
  const experiment_plan plan = make_plan(rc.setup, rc.shots, rc.seed);
  const discrimination_report report = simulate_report(plan, rc.noise);
  json report_json = report_to_json(report, plan.channel_labels);
  report_json["experiment"] = rc.setup.name;
  report_json["noise"] = noise_to_json(rc.noise);
  report_json["shots"] = rc.shots;
  report_json["seed"] = rc.seed;
  if (args.out.empty()) {
    std::cout << dump_json(report_json);
    return 0;
  }
  const std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);
  write_text_file(dir / "report.json", dump_json(report_json));
  std::cout << (dir / "report.json").string() << '\n';
  std::ostringstream cond;
  write_conditional_csv(cond, report.conditional, plan.channel_labels);
  write_text_file(dir / "conditional.csv", cond.str());
  std::cout << (dir / "conditional.csv").string() << '\n';
  if (rc.shots > 0) {
    const std::vector<shot_record> records = sample_shots(plan, rc.noise);
    for (std::size_t op = 0; op < plan.channel_labels.size(); ++op) {
      std::ostringstream shots;
      write_shots_csv(shots, records, static_cast<int>(op));
      const std::filesystem::path path =
          dir / ("shots_" + sanitize_filename(plan.channel_labels[op]) +
                 ".csv");
      write_text_file(path, shots.str());
      std::cout << path.string() << '\n';
    }
  }
  return 0;
}

struct budget_args {
  std::string config;
  std::string out;
};

inline int cmd_budget(const budget_args& args) {
  const json cfg = load_config(args.config);
  run_config rc = run_config_from_json(cfg);
  // An ablation of nothing is useless: without an explicit noise object the
  // budget runs against the full device defaults.
  if (!cfg.contains("noise")) rc.noise = noise_model{};
  const experiment_plan plan = make_plan(rc.setup, rc.shots, rc.seed);
  // Realized-channel process fidelities stay affordable for small spaces.
  const bool with_process = plan.dim() <= 8;
  const std::vector<budget_entry> rows = error_budget(
      plan, rc.noise,
      with_process ? rc.setup.channels : std::vector<kraus_channel>{});
  const json budget_json = budget_to_json(rows, plan.channel_labels);
  if (args.out.empty()) {
    std::cout << dump_json(budget_json);
    return 0;
  }
  const std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);
  write_text_file(dir / "budget.json", dump_json(budget_json));
  std::cout << (dir / "budget.json").string() << '\n';
  std::ostringstream os;
  write_budget_csv(os, rows, with_process ? plan.channel_labels
                                          : std::vector<std::string>{});
  write_text_file(dir / "budget.csv", os.str());
  std::cout << (dir / "budget.csv").string() << '\n';
  return 0;
}

struct feasibility_args {
  std::string config;
  std::string out;
  int search_trials = 0;
  long long seed = 1;
};

inline int cmd_feasibility(const feasibility_args& args) {
  const json cfg = load_config(args.config);
  auto [channels, probe] = channels_probe_from_config(cfg);
  const support_analysis analysis = ud_feasibility(channels, probe);
  json ops = json::array();
  for (std::size_t k = 0; k < channels.size(); ++k)
    ops.push_back({{"label", channels[k].label()},
                   {"feasible", static_cast<bool>(analysis.feasible[k])},
                   {"leave_one_out_dim",
                    static_cast<int>(analysis.S_n[k].cols())}});
  json out = {{"feasible", all_feasible(analysis)},
              {"union_dim", static_cast<int>(analysis.S.cols())},
              {"operations", ops},
              {"candidate_p_con",
               analysis.candidate ? json(analysis.candidate->scale())
                                  : json()}};
  if (args.search_trials > 0) {
    const probe_search_result best = probe_search(
        channels, args.search_trials, static_cast<std::uint64_t>(args.seed));
    json search = {{"trials", args.search_trials},
                   {"found", best.found}};
    if (best.found) {
      search["p_con"] = best.p_con;
      search["probe"] = vector_to_json(best.probe->amplitudes());
    }
    out["probe_search"] = std::move(search);
  }
  if (args.out.empty())
    std::cout << dump_json(out);
  else
    write_text_file(args.out, dump_json(out));
  return 0;
}

struct compile_args {
  std::string config;
  std::string out;
};

inline int cmd_compile(const compile_args& args) {
  const json cfg = load_config(args.config);
  const experiment_setup setup = setup_from_config(cfg);
  const experiment_plan plan = make_plan(setup);
  json ops = json::array();
  for (std::size_t k = 0; k < setup.channels.size(); ++k)
    ops.push_back({{"label", plan.channel_labels[k]},
                   {"process_fidelity",
                    verify_circuit(plan.channel_circuits[k],
                                   setup.channels[k])},
                   {"circuit", circuit_to_json(plan.channel_circuits[k])}});
  json stages = json::array();
  for (const povm_stage& stage : plan.program.stages) {
    // Labels are indexed by the reported bit pair 00, 01, 10, 11;
    // -1 = inconclusive, -2 = continue with the next stage.
    stages.push_back({{"labels", stage.labels},
                      {"circuit", circuit_to_json(stage.circuit)}});
  }
  const json out = {{"experiment", setup.name},
                    {"dim", plan.dim()},
                    {"operations", ops},
                    {"measurement_stages", stages}};
  if (args.out.empty())
    std::cout << dump_json(out);
  else
    write_text_file(args.out, dump_json(out));
  return 0;
}

inline int run_main(int argc, char** argv) {
  CLI::App app{
      "Unambiguous discrimination of quantum operations: bounds, circuit "
      "compilation, and noisy simulation"};
  app.require_subcommand(1);

  bound_args bound;
  CLI::App* bound_cmd = app.add_subcommand(
      "bound", "Conclusive-probability bound for symmetric displacements");
  bound_cmd->add_option("--N", bound.n_ops, "number of operations")
      ->required()
      ->check(CLI::Range(2, 64));
  bound_cmd->add_option("--alpha-min", bound.alpha_min, "smallest magnitude");
  bound_cmd->add_option("--alpha-max", bound.alpha_max, "largest magnitude");
  bound_cmd->add_option("--alpha-step", bound.alpha_step, "magnitude step");
  bound_cmd->add_option("--out", bound.out, "output file (default stdout)");
  bound_cmd->add_option("--format", bound.format, "csv or json");

  run_args run;
  CLI::App* run_cmd =
      app.add_subcommand("run", "Simulate a discrimination experiment");
  run_cmd->add_option("--config", run.config, "experiment config JSON")
      ->required();
  run_cmd->add_option("--out", run.out,
                      "output directory (default: report to stdout)");
  run_cmd->add_option("--shots", run.shots, "override config shot count");
  run_cmd->add_option("--seed", run.seed, "override config seed");

  budget_args budget;
  CLI::App* budget_cmd = app.add_subcommand(
      "budget", "Error budget across hardware noise configurations");
  budget_cmd->add_option("--config", budget.config, "experiment config JSON")
      ->required();
  budget_cmd->add_option("--out", budget.out,
                         "output directory (default: JSON to stdout)");

  feasibility_args feasibility;
  CLI::App* feasibility_cmd = app.add_subcommand(
      "feasibility", "Support-criterion analysis for a channel set");
  feasibility_cmd
      ->add_option("--config", feasibility.config, "experiment config JSON")
      ->required();
  feasibility_cmd->add_option("--out", feasibility.out,
                              "output file (default stdout)");
  feasibility_cmd->add_option("--search-trials", feasibility.search_trials,
                              "random probes to try (0 = off)");
  feasibility_cmd->add_option("--seed", feasibility.seed,
                              "probe search seed");

  compile_args compile;
  CLI::App* compile_cmd = app.add_subcommand(
      "compile", "Compile channels and measurement into circuits");
  compile_cmd->add_option("--config", compile.config, "experiment config JSON")
      ->required();
  compile_cmd->add_option("--out", compile.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (bound_cmd->parsed()) return cmd_bound(bound);
    if (run_cmd->parsed()) return cmd_run(run);
    if (budget_cmd->parsed()) return cmd_budget(budget);
    if (feasibility_cmd->parsed()) return cmd_feasibility(feasibility);
    if (compile_cmd->parsed()) return cmd_compile(compile);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace udsim::cli
