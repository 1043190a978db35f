#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reachlab/agents.hpp"
#include "reachlab/arm_env.hpp"
#include "reachlab/rewards.hpp"

namespace reachlab {

// Denominator convention for the convergence-window standard deviation:
// `window` divides by (window count - 1); `fixed_n` divides by (episodes - 1)
// regardless of where the window starts.
enum class StdevMode { window, fixed_n };

const char* to_string(StdevMode m);
StdevMode stdev_mode_from_string(const std::string& s);

struct RunConfig {
  int episodes = 10000;
  int steps_per_episode = 50;  // overrides arm.max_steps for the run
  std::uint64_t seed = 0;
  AgentConfig agent;
  ArmConfig arm = ArmConfig::spatial_6dof();
  RewardSpec reward;
  int eval_trials = 500;
  int eval_interval = 0;           // episodes between mid-training evaluations; 0 = none
  int eval_interval_trials = 50;
  int checkpoint_interval = 1000;  // episodes between checkpoints; 0 = final only
  std::string output_dir;       // empty = keep everything in memory
  int convergence_window = 200;
  double convergence_fraction = 0.9;
  StdevMode stdev_mode = StdevMode::window;

  void validate() const;
};

struct EpisodeRecord {
  int episode = 0;  // 1-based
  double reward = 0.0;
  int steps_used = 0;
  bool success = false;
  double final_d_pt = 0.0;
};

struct RunSummary {
  std::string algorithm;
  std::string reward_kind;
  std::uint64_t seed = 0;
  int episodes = 0;
  bool converged = false;
  int e_start = 0;  // meaningful only when converged
  double mean_reward = 0.0;
  std::optional<double> reward_stdev;
  double mean_steps = 0.0;
  int eval_trials = 0;
  double eval_success_rate = 0.0;
  double eval_mean_reward = 0.0;
  double eval_mean_steps = 0.0;
  bool failed = false;
  std::string failure;
  std::string config_hash;
};

// --- metrics -----------------------------------------------------------------

// Sum of the per-step rewards of one episode (terminal step included).
double episode_reward(const std::vector<double>& step_rewards);

// Trailing moving average; element i covers input [i, i + window).
std::vector<double> trailing_moving_average(const std::vector<double>& xs, int window);

// Plateau-based convergence detection. The plateau is the mean of the final
// max(window, 10% of M) episodes; E_start is the first episode whose trailing
// moving average reaches the threshold and never drops below it afterwards.
// A non-positive plateau switches the threshold to an absolute gap of
// (1 - fraction) * |plateau| + 1 below the plateau.
std::optional<int> detect_convergence(const std::vector<double>& episode_rewards,
                                      int window = 200, double fraction = 0.9);

// Mean / stdev / mean-steps over episodes [e_start, M]. A window of one
// episode leaves the stdev unset.
RunSummary summarize(const std::vector<EpisodeRecord>& records,
                     std::optional<int> e_start,
                     StdevMode mode = StdevMode::window);

double median(std::vector<double> values);

// --- training and evaluation --------------------------------------------------

struct EvalPoint {
  int episode = 0;
  double success_rate = 0.0;
  double mean_reward = 0.0;
  double mean_steps = 0.0;
};

struct TrainResult {
  std::vector<EpisodeRecord> records;
  RunSummary summary;
  std::vector<EvalPoint> eval_points;
};

using AgentFactory = std::function<std::unique_ptr<Agent>(
    const RunConfig& config, int obs_dim, int act_dim, const std::string& obs_layout)>;

// Runs the full episode protocol: M episodes of at most T steps, an episode
// ends immediately on success; every episode is recorded. Divergence marks
// the summary failed and preserves the partial records. When output_dir is
// set, episodes.csv / summary.json / checkpoints are written there.
TrainResult train(const RunConfig& config, const AgentFactory& factory = {});

struct EvalResult {
  int trials = 0;
  double success_rate = 0.0;
  double mean_reward = 0.0;
  double mean_steps = 0.0;
};

// Greedy-policy evaluation over independent episodes with per-trial derived
// seeds; never mutates the agent.
EvalResult evaluate_agent(const Agent& agent, const ArmConfig& arm,
                          const RewardSpec& reward, int trials, std::uint64_t seed,
                          int steps_per_episode);

// --- comparison ---------------------------------------------------------------

struct ComparisonRow {
  std::string algorithm;
  std::string reward_kind;
  int runs = 0;
  bool converged = false;  // all aggregated runs converged
  double e_start = 0.0;    // median across runs; episodes + 1 for unconverged runs
  double mean_reward = 0.0;
  double reward_stdev = 0.0;
  double mean_steps = 0.0;
  double eval_success_rate = 0.0;
  double eval_mean_reward = 0.0;
  double eval_mean_steps = 0.0;
  bool valid = true;
  std::string note;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::vector<std::string> delta_lines;

  std::string to_csv() const;
  std::string to_text() const;
};

// Aggregates summaries by (algorithm, reward kind) via medians and emits
// pairwise percentage deltas between reward functions within each algorithm.
Comparison compare(const std::vector<RunSummary>& summaries);

// --- file formats --------------------------------------------------------------

void write_episodes_csv(const std::string& path, const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> read_episodes_csv(const std::string& path);
void write_eval_csv(const std::string& path, const std::vector<EvalPoint>& points);
void write_summary_json(const std::string& path, const RunSummary& summary);
RunSummary read_summary_json(const std::string& path);

std::string run_dir_name(Algorithm algorithm, RewardKind kind, std::uint64_t seed);

// --- sweeps ---------------------------------------------------------------------

// Runs independent configs, up to `jobs` at a time; each run owns its
// environment, agent and RNG, results merge after completion.
std::vector<RunSummary> run_sweep(const std::vector<RunConfig>& configs, int jobs);

}  // namespace reachlab
