#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "reachlab/bridge.hpp"
#include "reachlab/checkpoint.hpp"
#include "reachlab/config_io.hpp"
#include "reachlab/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides,
              int jobs_flag, const std::string& output_root_flag) {
  std::string output_root = output_root_flag;
  if (output_root.empty()) {
    if (const char* env_root = std::getenv("REACHLAB_OUTPUT_ROOT")) output_root = env_root;
  }
  reachlab::Experiment exp = reachlab::load_experiment(config_path, overrides, output_root);
  const int jobs = jobs_flag > 0 ? jobs_flag : exp.jobs;

  std::cout << "running " << exp.runs.size() << " run(s), jobs=" << jobs << "\n";
  const std::vector<reachlab::RunSummary> summaries = reachlab::run_sweep(exp.runs, jobs);

  bool any_failed = false;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    std::cout << s.algorithm << "/" << s.reward_kind << "/s" << s.seed << ": ";
    if (s.failed) {
      any_failed = true;
      std::cout << "FAILED (" << s.failure << ")\n";
      continue;
    }
    if (s.converged)
      std::cout << "E_start=" << s.e_start << " mean_reward=" << s.mean_reward;
    else
      std::cout << "not converged";
    std::cout << " eval_success=" << 100.0 * s.eval_success_rate << "%\n";
    if (!exp.runs[i].output_dir.empty())
      std::cout << "  -> " << exp.runs[i].output_dir << "\n";
  }
  if (summaries.size() > 1) {
    const reachlab::Comparison cmp = reachlab::compare(summaries);
    std::cout << cmp.to_text();
  }
  return any_failed ? kExitRunFailure : kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, int trials, std::uint64_t seed,
             const std::string& out_path) {
  reachlab::LoadedCheckpoint loaded = reachlab::load_checkpoint(checkpoint_path);
  const reachlab::EvalResult result =
      reachlab::evaluate_agent(*loaded.agent, loaded.arm, loaded.reward, trials, seed,
                               loaded.arm.max_steps);
  std::cout << "trials: " << result.trials << "\n"
            << "success_rate: " << result.success_rate << "\n"
            << "mean_reward: " << result.mean_reward << "\n"
            << "mean_steps: " << result.mean_steps << "\n";

  std::string out = out_path;
  if (out.empty()) {
    const std::filesystem::path p(checkpoint_path);
    out = (p.parent_path() / (p.stem().string() + "_eval.json")).string();
  }
  nlohmann::json j;
  j["checkpoint"] = checkpoint_path;
  j["trials"] = result.trials;
  j["success_rate"] = result.success_rate;
  j["mean_reward"] = result.mean_reward;
  j["mean_steps"] = result.mean_steps;
  j["seed"] = seed;
  std::ofstream of(out, std::ios::binary);
  if (!of) throw std::runtime_error("cannot write " + out);
  of << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  std::vector<reachlab::RunSummary> summaries;
  for (const auto& dir : run_dirs) {
    try {
      summaries.push_back(reachlab::read_summary_json(dir + "/summary.json"));
    } catch (const std::exception& e) {
      reachlab::RunSummary bad;
      bad.algorithm = "?";
      bad.reward_kind = dir;
      bad.failed = true;
      bad.failure = e.what();
      summaries.push_back(bad);
      std::cerr << "warning: " << dir << ": " << e.what() << "\n";
    }
  }
  const reachlab::Comparison cmp = reachlab::compare(summaries);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(out_dir + "/table.csv", std::ios::binary);
    csv << cmp.to_csv();
    std::ofstream txt(out_dir + "/table.txt", std::ios::binary);
    txt << cmp.to_text();
  }
  std::cout << cmp.to_text();
  return kExitOk;
}

int cmd_plot_data(const std::vector<std::string>& run_dirs, int window) {
  for (const auto& dir : run_dirs) {
    const std::vector<reachlab::EpisodeRecord> records =
        reachlab::read_episodes_csv(dir + "/episodes.csv");
    std::vector<double> rewards, steps;
    rewards.reserve(records.size());
    for (const auto& r : records) {
      rewards.push_back(r.reward);
      steps.push_back(static_cast<double>(r.steps_used));
    }
    const std::vector<double> reward_ma = reachlab::trailing_moving_average(rewards, window);
    const std::vector<double> steps_ma = reachlab::trailing_moving_average(steps, window);
    const std::string out = dir + "/plot_data.csv";
    std::ofstream of(out, std::ios::binary);
    if (!of) throw std::runtime_error("cannot write " + out);
    of << "episode,reward_ma,steps_ma\n";
    of.precision(17);
    for (std::size_t i = 0; i < reward_ma.size(); ++i)
      of << (i + static_cast<std::size_t>(window)) << ',' << reward_ma[i] << ','
         << steps_ma[i] << '\n';
    std::cout << out << ": " << reward_ma.size() << " rows (window " << window << ")\n";
  }
  return kExitOk;
}

int cmd_env_serve(bool stdio, int port, const std::string& preset,
                  const std::string& env_config_path) {
  reachlab::ArmConfig cfg;
  if (!env_config_path.empty()) {
    std::ifstream in(env_config_path);
    if (!in) throw reachlab::ConfigError("cannot open env config: " + env_config_path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw reachlab::ConfigError(std::string("env config: ") + e.what());
    }
    cfg = reachlab::arm_config_from_json(doc, "env");
  } else if (preset == "arm6") {
    cfg = reachlab::ArmConfig::spatial_6dof();
  } else if (preset == "planar2") {
    cfg = reachlab::ArmConfig::planar_2dof();
  } else {
    throw reachlab::ConfigError("unknown preset \"" + preset + "\"");
  }

  if (stdio) {
    reachlab::serve_stream(cfg, std::cin, std::cout);
    return kExitOk;
  }
  reachlab::TcpServerOptions options;
  options.port = port;
  reachlab::serve_tcp(cfg, options,
                      [](int p) { std::cerr << "env-serve: listening on 127.0.0.1:" << p << "\n"; });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reachlab: dense-reward trajectory-planning experiments on a kinematic reacher"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "run the experiment grid from a config file");
  std::string config_path;
  std::vector<std::string> overrides;
  int jobs = 0;
  std::string output_root;
  train->add_option("--config,-c", config_path, "experiment JSON file")->required();
  train->add_option("--override,-O", overrides,
                    "key=value override (dotted section.key or unique bare key)");
  train->add_option("--jobs,-j", jobs, "parallel runs (default: config value)");
  train->add_option("--output-root", output_root,
                    "output root directory (overrides config and REACHLAB_OUTPUT_ROOT)");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint over random trials");
  std::string checkpoint_path, eval_out;
  int trials = 500;
  std::uint64_t eval_seed = 12345;
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint JSON file")->required();
  eval->add_option("--trials", trials, "number of evaluation episodes (default 500)");
  eval->add_option("--seed", eval_seed, "base seed for trial derivation");
  eval->add_option("--out", eval_out, "where to write the eval JSON");

  auto* compare = app.add_subcommand("compare", "tabulate and diff run summaries");
  std::vector<std::string> compare_dirs;
  std::string compare_out = ".";
  compare->add_option("run_dirs", compare_dirs, "run directories with summary.json")
      ->required()
      ->expected(-1);
  compare->add_option("--out", compare_out, "directory for table.csv/table.txt");

  auto* plot = app.add_subcommand("plot-data", "emit smoothed training curves as CSV");
  std::vector<std::string> plot_dirs;
  int window = 1;
  plot->add_option("run_dirs", plot_dirs, "run directories with episodes.csv")
      ->required()
      ->expected(-1);
  plot->add_option("--window", window, "moving-average width (default 1)");

  auto* serve = app.add_subcommand("env-serve", "serve the env bridge protocol");
  bool stdio = false;
  int port = 7777;
  std::string preset = "arm6", env_config;
  serve->add_flag("--stdio", stdio, "serve a single session on stdin/stdout");
  serve->add_option("--port", port, "TCP port (default 7777)");
  serve->add_option("--preset", preset, "arm preset: arm6 or planar2");
  serve->add_option("--env-config", env_config, "env section JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, overrides, jobs, output_root);
    if (eval->parsed()) return cmd_eval(checkpoint_path, trials, eval_seed, eval_out);
    if (compare->parsed()) return cmd_compare(compare_dirs, compare_out);
    if (plot->parsed()) return cmd_plot_data(plot_dirs, window);
    if (serve->parsed()) return cmd_env_serve(stdio, port, preset, env_config);
  } catch (const reachlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const reachlab::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitUsage;
}
