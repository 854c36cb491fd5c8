// Command-line front end for the RMS transmitter simulator.
//
//   rmstx_sim convergence   --out conv.csv
//   rmstx_sim user-sweep    --seeds 20 --out users.csv
//   rmstx_sim element-sweep --config scenario.cfg --out elements.csv
//   rmstx_sim single-run    --algo proposed --pt-dbm 40 --solutions sol/
//   rmstx_sim evaluate      --solution sol/single_s0_proposed.sol --seed 0
//
// Exit status: 0 success, 2 configuration error, 3 infeasible scenario.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rmstx/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

// Every ScenarioConfig key is also a flag: k_users -> --k-users.
const char* const kSettingKeys[] = {
    "k_users", "m_x", "m_z", "l_paths", "pt_dbm", "noise_dbm", "gamma_th_db",
    "cell_radius_m", "rms_height_m", "ref_gain_db", "threads", "pt_list_dbm", "k_list",
    "m_list", "convergence_threshold", "max_outer_iterations", "rank_one_tolerance",
    "optimize_power", "penalty_initial_scale", "penalty_growth", "penalty_cadence",
    "solver_tolerance", "solver_max_iterations"};

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string seeds;
  std::string algo;
  std::string solutions_dir;
  bool quiet = false;
  std::map<std::string, std::string> overrides;
};

std::string flag_name(std::string key) {
  for (auto& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Flat key = value scenario file");
  cmd->add_option("--out", args.out_path, "CSV output path (default: stdout)");
  cmd->add_option("--seeds", args.seeds, "Seed count n (0..n-1) or comma-separated list");
  cmd->add_option("--algo", args.algo, "proposed | ea | zf | ra | all, or a comma list");
  cmd->add_option("--solutions", args.solutions_dir, "Directory for per-run solution files");
  cmd->add_flag("-q,--quiet", args.quiet, "Suppress the summary table");
  for (const char* key : kSettingKeys)
    cmd->add_option(flag_name(key), args.overrides[key], std::string("Override ") + key);
}

rmstx::ScenarioConfig resolve_config(const CommonArgs& args) {
  rmstx::ScenarioConfig config;
  if (!args.config_path.empty()) rmstx::load_config_file(config, args.config_path);
  for (const auto& [key, value] : args.overrides)
    if (!value.empty()) rmstx::apply_setting(config, key, value);
  if (!args.seeds.empty()) rmstx::apply_setting(config, "seeds", args.seeds);
  if (!args.algo.empty()) rmstx::apply_setting(config, "algorithm", args.algo);
  config.validate();
  return config;
}

void write_outputs(const rmstx::ExperimentOutput& output, const CommonArgs& args) {
  if (args.out_path.empty()) {
    rmstx::write_csv(std::cout, output.rows);
  } else {
    std::ofstream out(args.out_path);
    if (!out) throw std::runtime_error("cannot write " + args.out_path);
    rmstx::write_csv(out, output.rows);
  }

  if (!args.solutions_dir.empty()) {
    std::filesystem::create_directories(args.solutions_dir);
    for (const auto& s : output.solutions) {
      const auto path = std::filesystem::path(args.solutions_dir) /
                        (s.scenario + "_s" + std::to_string(s.seed) + "_" +
                         std::string(rmstx::to_string(s.algorithm)) + ".sol");
      std::ofstream out(path);
      rmstx::write_solution(out, s.scenario, s.f, s.p);
    }
  }

  if (!args.quiet) {
    std::fprintf(stderr, "%-20s %-9s %5s %12s %10s\n", "scenario", "algorithm", "runs",
                 "mean_rate", "std_err");
    for (const auto& row : rmstx::summarize(output.rows))
      std::fprintf(stderr, "%-20s %-9s %5d %12.4f %10.4f\n", row.scenario.c_str(),
                   std::string(rmstx::to_string(row.algorithm)).c_str(), row.runs,
                   row.mean_sum_rate, row.std_error);
  }
  if (output.infeasible_runs > 0)
    std::fprintf(stderr, "%d run(s) infeasible under the QoS threshold\n",
                 output.infeasible_runs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmissive RMS transmitter: joint beam and power optimisation"};
  app.require_subcommand(1);

  using Runner = rmstx::ExperimentOutput (*)(const rmstx::ScenarioConfig&);
  const std::pair<const char*, Runner> experiments[] = {
      {"convergence", rmstx::run_convergence},
      {"user-sweep", rmstx::run_user_sweep},
      {"element-sweep", rmstx::run_element_sweep},
      {"single-run", rmstx::run_single}};
  const char* help[] = {"Per-iteration objective for each P_t in pt_list_dbm",
                        "Final sum-rate per algorithm for each K in k_list",
                        "Final sum-rate per algorithm for each M in m_list",
                        "The configured scenario, every configured algorithm"};

  std::map<CLI::App*, std::pair<Runner, CommonArgs>> commands;
  for (std::size_t i = 0; i < std::size(experiments); ++i) {
    CLI::App* cmd = app.add_subcommand(experiments[i].first, help[i]);
    auto& entry = commands[cmd];
    entry.first = experiments[i].second;
    add_common(cmd, entry.second);
  }

  CommonArgs eval_args;
  std::string solution_path;
  std::uint64_t eval_seed = 0;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Recompute the sum-rate of a solution file");
  evaluate->add_option("--solution", solution_path, "Solution file")->required();
  evaluate->add_option("--seed", eval_seed, "Scenario seed");
  add_common(evaluate, eval_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (evaluate->parsed()) {
      const rmstx::ScenarioConfig config = resolve_config(eval_args);
      std::ifstream in(solution_path);
      if (!in) throw rmstx::ConfigError("cannot open " + solution_path);
      const rmstx::SolutionFile sol = rmstx::read_solution(in);
      const rmstx::Scenario scenario = rmstx::build_scenario(config, eval_seed);
      if (sol.f.values.size() != scenario.geometry.size() ||
          sol.p.size() != static_cast<Eigen::Index>(scenario.channels.size()))
        throw rmstx::ConfigError("solution dimensions do not match the scenario");
      const double rate = rmstx::sum_rate(scenario.channels, sol.f, sol.p, scenario.budget);
      const auto qos = rmstx::qos_satisfied(scenario.channels, sol.f, sol.p, scenario.budget);
      std::printf("%s seed=%llu sum_rate_bps_hz=%.17g min_qos_slack=%.17g\n",
                  sol.scenario.c_str(), static_cast<unsigned long long>(eval_seed), rate,
                  qos.min_slack());
      return 0;
    }
    for (auto& [cmd, entry] : commands) {
      if (!cmd->parsed()) continue;
      const rmstx::ScenarioConfig config = resolve_config(entry.second);
      const rmstx::ExperimentOutput output = entry.first(config);
      write_outputs(output, entry.second);
      return output.infeasible_runs > 0 ? kExitInfeasible : 0;
    }
  } catch (const rmstx::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
