#include "reachlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "reachlab/checkpoint.hpp"
#include "reachlab/config_io.hpp"
#include "reachlab/rng.hpp"

namespace reachlab {

namespace {
constexpr std::uint64_t kAgentStream = 0;
constexpr std::uint64_t kEpisodeStream = 1;
constexpr std::uint64_t kEvalStream = 2;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

const char* to_string(StdevMode m) {
  return m == StdevMode::window ? "window" : "fixed_n";
}

StdevMode stdev_mode_from_string(const std::string& s) {
  if (s == "window") return StdevMode::window;
  if (s == "fixed_n") return StdevMode::fixed_n;
  throw std::invalid_argument("unknown stdev_mode: \"" + s + "\"");
}

void RunConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("run: episodes must be >= 1");
  if (steps_per_episode < 1) throw std::invalid_argument("run: steps must be >= 1");
  if (eval_trials < 1) throw std::invalid_argument("run: eval_trials must be >= 1");
  if (eval_interval < 0 || checkpoint_interval < 0)
    throw std::invalid_argument("run: intervals must be >= 0");
  if (convergence_window < 1) throw std::invalid_argument("run: convergence_window must be >= 1");
  if (!(convergence_fraction > 0.0 && convergence_fraction < 1.0))
    throw std::invalid_argument("run: convergence_fraction must be in (0,1)");
  agent.validate();
  ArmConfig effective = arm;
  effective.max_steps = steps_per_episode;
  effective.validate();
  reward.config.validate();
}

// --- metrics -------------------------------------------------------------------

double episode_reward(const std::vector<double>& step_rewards) {
  if (step_rewards.empty())
    throw std::invalid_argument("episode_reward: empty step list");
  double sum = 0.0;
  for (double r : step_rewards) sum += r;
  return sum;
}

std::vector<double> trailing_moving_average(const std::vector<double>& xs, int window) {
  if (window < 1) throw std::invalid_argument("moving average: window must be >= 1");
  if (xs.size() < static_cast<std::size_t>(window))
    throw std::invalid_argument("moving average: window exceeds series length");
  std::vector<double> out;
  out.reserve(xs.size() - static_cast<std::size_t>(window) + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    acc += xs[i];
    if (i + 1 >= static_cast<std::size_t>(window)) {
      out.push_back(acc / window);
      acc -= xs[i + 1 - static_cast<std::size_t>(window)];
    }
  }
  return out;
}

std::optional<int> detect_convergence(const std::vector<double>& episode_rewards,
                                      int window, double fraction) {
  const auto m = episode_rewards.size();
  if (window < 1) throw std::invalid_argument("detect_convergence: window must be >= 1");
  if (m < static_cast<std::size_t>(window)) return std::nullopt;

  const std::size_t plateau_len =
      std::max<std::size_t>(static_cast<std::size_t>(window), m / 10);
  double plateau = 0.0;
  for (std::size_t i = m - plateau_len; i < m; ++i) plateau += episode_rewards[i];
  plateau /= static_cast<double>(plateau_len);

  const double threshold = plateau > 0.0
                               ? fraction * plateau
                               : plateau - ((1.0 - fraction) * std::abs(plateau) + 1.0);

  const std::vector<double> averages = trailing_moving_average(episode_rewards, window);
  // moving average index i corresponds to episode (i + window), 1-based
  std::vector<double> suffix_min(averages.size());
  double running = averages.back();
  for (std::size_t i = averages.size(); i-- > 0;) {
    running = std::min(running, averages[i]);
    suffix_min[i] = running;
  }
  for (std::size_t i = 0; i < averages.size(); ++i)
    if (suffix_min[i] >= threshold) return static_cast<int>(i) + window;
  return std::nullopt;
}

RunSummary summarize(const std::vector<EpisodeRecord>& records,
                     std::optional<int> e_start, StdevMode mode) {
  RunSummary s;
  s.episodes = static_cast<int>(records.size());
  if (!e_start.has_value()) return s;
  if (*e_start < 1 || *e_start > s.episodes)
    throw std::invalid_argument("summarize: e_start out of range");
  s.converged = true;
  s.e_start = *e_start;

  const std::size_t begin = static_cast<std::size_t>(*e_start - 1);
  const std::size_t count = records.size() - begin;
  double mean = 0.0, mean_steps = 0.0;
  for (std::size_t i = begin; i < records.size(); ++i) {
    mean += records[i].reward;
    mean_steps += records[i].steps_used;
  }
  mean /= static_cast<double>(count);
  mean_steps /= static_cast<double>(count);
  s.mean_reward = mean;
  s.mean_steps = mean_steps;

  if (count >= 2) {
    double ss = 0.0;
    for (std::size_t i = begin; i < records.size(); ++i) {
      const double d = records[i].reward - mean;
      ss += d * d;
    }
    const double denom = mode == StdevMode::window
                             ? static_cast<double>(count - 1)
                             : static_cast<double>(records.size() - 1);
    s.reward_stdev = std::sqrt(ss / denom);
  }
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// --- training ---------------------------------------------------------------------

namespace {

std::unique_ptr<Agent> default_agent(const RunConfig& cfg, int obs_dim, int act_dim,
                                     const std::string& layout) {
  return make_agent(cfg.agent, obs_dim, act_dim, layout,
                    derive_seed(cfg.seed, kAgentStream, 0));
}

EvalResult evaluate_impl(const Agent& agent, ArmEnv& env, const RewardSpec& reward,
                         int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("evaluate: trials must be >= 1");
  if (agent.obs_layout() != env.obs_layout())
    throw std::invalid_argument("evaluate: observation layout mismatch (agent \"" +
                                agent.obs_layout() + "\", environment \"" +
                                env.obs_layout() + "\")");
  EvalResult result;
  result.trials = trials;
  double reward_sum = 0.0, steps_sum = 0.0;
  int successes = 0;
  for (int trial = 0; trial < trials; ++trial) {
    env.reset(derive_seed(seed, kEvalStream, static_cast<std::uint64_t>(trial)));
    double episode_sum = 0.0;
    while (true) {
      const Transition tr = env.step(agent.act_greedy(env.observe(env.state())), reward);
      episode_sum += tr.reward;
      if (tr.done) {
        successes += tr.success ? 1 : 0;
        break;
      }
    }
    reward_sum += episode_sum;
    steps_sum += env.state().step_index;
  }
  result.success_rate = static_cast<double>(successes) / trials;
  result.mean_reward = reward_sum / trials;
  result.mean_steps = steps_sum / trials;
  return result;
}

}  // namespace

EvalResult evaluate_agent(const Agent& agent, const ArmConfig& arm,
                          const RewardSpec& reward, int trials, std::uint64_t seed,
                          int steps_per_episode) {
  ArmConfig cfg = arm;
  cfg.max_steps = steps_per_episode;
  ArmEnv env(cfg);
  return evaluate_impl(agent, env, reward, trials, seed);
}

TrainResult train(const RunConfig& config, const AgentFactory& factory) {
  config.validate();
  ArmConfig arm = config.arm;
  arm.max_steps = config.steps_per_episode;
  ArmEnv env(arm);

  std::unique_ptr<Agent> agent =
      factory ? factory(config, env.obs_size(), arm.joint_count, env.obs_layout())
              : default_agent(config, env.obs_size(), arm.joint_count, env.obs_layout());
  if (agent->obs_layout() != env.obs_layout())
    throw std::invalid_argument("train: observation layout mismatch");

  const bool write_files = !config.output_dir.empty();
  if (write_files) std::filesystem::create_directories(config.output_dir);
  const std::string dir = config.output_dir;

  TrainResult result;
  result.records.reserve(static_cast<std::size_t>(config.episodes));
  bool failed = false;
  std::string failure;

  for (int ep = 1; ep <= config.episodes && !failed; ++ep) {
    env.reset(derive_seed(config.seed, kEpisodeStream, static_cast<std::uint64_t>(ep)));
    EpisodeRecord record;
    record.episode = ep;
    try {
      while (true) {
        const VecX action = agent->act(env.observe(env.state()), true);
        const Transition tr = env.step(action, config.reward);
        agent->observe_and_update(tr);
        record.reward += tr.reward;
        if (tr.done) {
          record.success = tr.success;
          break;
        }
      }
      record.steps_used = env.state().step_index;
      record.final_d_pt = env.state().d_pt;
      result.records.push_back(record);
    } catch (const AgentDivergenceError& e) {
      failed = true;
      failure = e.what();
      break;
    }

    if (config.eval_interval > 0 && ep % config.eval_interval == 0) {
      ArmEnv eval_env(arm);
      const EvalResult er = evaluate_impl(*agent, eval_env, config.reward,
                                          config.eval_interval_trials, config.seed);
      result.eval_points.push_back({ep, er.success_rate, er.mean_reward, er.mean_steps});
    }
    if (write_files && config.checkpoint_interval > 0 &&
        ep % config.checkpoint_interval == 0 && ep < config.episodes) {
      save_checkpoint(dir + "/checkpoint_ep" + std::to_string(ep) + ".json", *agent,
                      config.arm, config.reward);
    }
  }

  std::vector<double> rewards;
  rewards.reserve(result.records.size());
  for (const auto& r : result.records) rewards.push_back(r.reward);
  const std::optional<int> e_start =
      rewards.empty() ? std::nullopt
                      : detect_convergence(rewards, config.convergence_window,
                                           config.convergence_fraction);
  result.summary = summarize(result.records, e_start, config.stdev_mode);
  result.summary.algorithm =
      factory ? std::string("custom") : std::string(to_string(config.agent.algorithm));
  result.summary.reward_kind = to_string(config.reward.kind);
  result.summary.seed = config.seed;
  result.summary.failed = failed;
  result.summary.failure = failure;
  result.summary.config_hash = run_config_hash(config);

  if (!failed) {
    ArmEnv eval_env(arm);
    const EvalResult er =
        evaluate_impl(*agent, eval_env, config.reward, config.eval_trials, config.seed);
    result.summary.eval_trials = er.trials;
    result.summary.eval_success_rate = er.success_rate;
    result.summary.eval_mean_reward = er.mean_reward;
    result.summary.eval_mean_steps = er.mean_steps;
  }

  if (write_files) {
    write_episodes_csv(dir + "/episodes.csv", result.records);
    write_summary_json(dir + "/summary.json", result.summary);
    if (config.eval_interval > 0) write_eval_csv(dir + "/eval.csv", result.eval_points);
    save_checkpoint(dir + "/checkpoint_final.json", *agent, config.arm, config.reward);
  }
  return result;
}

// --- comparison ---------------------------------------------------------------------

namespace {

// Deltas are truncated (not rounded) to one decimal; reported figures follow
// the truncation convention of the reference results they are compared with.
std::string format_delta(double percent) {
  const double truncated = std::trunc(percent * 10.0) / 10.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.1f", truncated);
  return buf;
}

std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

Comparison compare(const std::vector<RunSummary>& summaries) {
  if (summaries.empty()) throw std::invalid_argument("compare: no summaries");
  Comparison cmp;

  std::map<std::pair<std::string, std::string>, std::vector<const RunSummary*>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& s : summaries) {
    auto key = std::make_pair(s.algorithm, s.reward_kind);
    if (groups.find(key) == groups.end()) order.push_back(key);
    groups[key].push_back(&s);
  }

  for (const auto& key : order) {
    const auto& group = groups[key];
    ComparisonRow row;
    row.algorithm = key.first;
    row.reward_kind = key.second;
    row.runs = static_cast<int>(group.size());

    std::vector<double> e_starts, rewards, stdevs, steps, eval_sr, eval_r, eval_st;
    bool all_converged = true;
    bool any_failed = false;
    for (const auto* s : group) {
      if (s->failed) {
        any_failed = true;
        continue;
      }
      all_converged = all_converged && s->converged;
      e_starts.push_back(s->converged ? static_cast<double>(s->e_start)
                                      : static_cast<double>(s->episodes + 1));
      rewards.push_back(s->mean_reward);
      stdevs.push_back(s->reward_stdev.value_or(0.0));
      steps.push_back(s->mean_steps);
      eval_sr.push_back(s->eval_success_rate);
      eval_r.push_back(s->eval_mean_reward);
      eval_st.push_back(s->eval_mean_steps);
    }
    if (e_starts.empty()) {
      row.valid = false;
      row.note = any_failed ? "all runs failed" : "no data";
    } else {
      row.converged = all_converged;
      row.e_start = median(e_starts);
      row.mean_reward = median(rewards);
      row.reward_stdev = median(stdevs);
      row.mean_steps = median(steps);
      row.eval_success_rate = median(eval_sr);
      row.eval_mean_reward = median(eval_r);
      row.eval_mean_steps = median(eval_st);
      if (!all_converged) row.note = "includes unconverged runs";
      if (any_failed) row.note += (row.note.empty() ? "" : "; ") + std::string("failed runs dropped");
    }
    cmp.rows.push_back(row);
  }

  // pairwise deltas between reward functions within each algorithm
  for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
    for (std::size_t j = 0; j < cmp.rows.size(); ++j) {
      if (i == j) continue;
      const auto& a = cmp.rows[i];
      const auto& b = cmp.rows[j];
      if (a.algorithm != b.algorithm || !a.valid || !b.valid) continue;
      if (i > j) continue;  // one line per unordered pair
      std::ostringstream line;
      line << a.algorithm << ": " << a.reward_kind << " vs " << b.reward_kind << ":";
      if (b.e_start > 0.0)
        line << " convergence episodes " << format_delta(100.0 * (a.e_start - b.e_start) / b.e_start) << "%";
      if (b.mean_reward != 0.0)
        line << ", mean reward "
             << format_delta(100.0 * (a.mean_reward - b.mean_reward) / std::abs(b.mean_reward)) << "%";
      if (b.reward_stdev > 0.0)
        line << ", reward stdev "
             << format_delta(100.0 * (a.reward_stdev - b.reward_stdev) / b.reward_stdev) << "%";
      line << ", eval success "
           << format_delta(100.0 * (a.eval_success_rate - b.eval_success_rate)) << "pp";
      cmp.delta_lines.push_back(line.str());
    }
  }
  return cmp;
}

std::string Comparison::to_csv() const {
  std::ostringstream os;
  os << "algorithm,reward,runs,episode,mean_reward,reward_stdev,mean_steps,"
        "eval_reward,eval_steps,eval_success_rate,valid,note\n";
  for (const auto& r : rows) {
    os << r.algorithm << ',' << r.reward_kind << ',' << r.runs << ',';
    if (r.valid) {
      os << format_double(r.e_start) << ',' << format_double(r.mean_reward) << ','
         << format_double(r.reward_stdev) << ',' << format_double(r.mean_steps) << ','
         << format_double(r.eval_mean_reward) << ',' << format_double(r.eval_mean_steps)
         << ',' << format_double(r.eval_success_rate);
    } else {
      os << ",,,,,,";
    }
    os << ',' << (r.valid ? "1" : "0") << ',' << r.note << '\n';
  }
  return os.str();
}

std::string Comparison::to_text() const {
  std::ostringstream os;
  os << std::left << std::setw(8) << "algo" << std::setw(10) << "reward" << std::setw(6)
     << "runs" << std::right << std::setw(10) << "episode" << std::setw(12) << "reward"
     << std::setw(12) << "stdev" << std::setw(9) << "steps" << std::setw(12) << "eval_rew"
     << std::setw(11) << "eval_step" << std::setw(10) << "success" << "\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(8) << r.algorithm << std::setw(10) << r.reward_kind
       << std::setw(6) << r.runs << std::right;
    if (r.valid) {
      os << std::setw(10) << format_cell(r.e_start) << std::setw(12)
         << format_cell(r.mean_reward) << std::setw(12) << format_cell(r.reward_stdev)
         << std::setw(9) << format_cell(r.mean_steps) << std::setw(12)
         << format_cell(r.eval_mean_reward) << std::setw(11)
         << format_cell(r.eval_mean_steps) << std::setw(10)
         << format_cell(100.0 * r.eval_success_rate) + "%";
      if (!r.note.empty()) os << "  (" << r.note << ")";
    } else {
      os << "  (invalid: " << r.note << ")";
    }
    os << "\n";
  }
  for (const auto& line : delta_lines) os << line << "\n";
  return os.str();
}

// --- file formats ----------------------------------------------------------------------

void write_episodes_csv(const std::string& path, const std::vector<EpisodeRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "episode,reward,steps,success,final_d_pt\n";
  for (const auto& r : records)
    out << r.episode << ',' << format_double(r.reward) << ',' << r.steps_used << ','
        << (r.success ? 1 : 0) << ',' << format_double(r.final_d_pt) << '\n';
}

std::vector<EpisodeRecord> read_episodes_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  std::vector<EpisodeRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EpisodeRecord r;
    int success = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%d,%d,%lf", &r.episode, &r.reward,
                    &r.steps_used, &success, &r.final_d_pt) != 5)
      throw std::runtime_error("bad csv row in " + path + ": " + line);
    r.success = success != 0;
    records.push_back(r);
  }
  return records;
}

void write_eval_csv(const std::string& path, const std::vector<EvalPoint>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "episode,success_rate,mean_reward,mean_steps\n";
  for (const auto& p : points)
    out << p.episode << ',' << format_double(p.success_rate) << ','
        << format_double(p.mean_reward) << ',' << format_double(p.mean_steps) << '\n';
}

void write_summary_json(const std::string& path, const RunSummary& s) {
  nlohmann::json j;
  j["algorithm"] = s.algorithm;
  j["reward_kind"] = s.reward_kind;
  j["seed"] = s.seed;
  j["episodes"] = s.episodes;
  j["converged"] = s.converged;
  if (s.converged) j["e_start"] = s.e_start;
  j["mean_reward"] = s.mean_reward;
  if (s.reward_stdev) j["reward_stdev"] = *s.reward_stdev;
  j["mean_steps"] = s.mean_steps;
  j["eval_trials"] = s.eval_trials;
  j["eval_success_rate"] = s.eval_success_rate;
  j["eval_mean_reward"] = s.eval_mean_reward;
  j["eval_mean_steps"] = s.eval_mean_steps;
  j["failed"] = s.failed;
  if (s.failed) j["failure"] = s.failure;
  if (!s.config_hash.empty()) j["config_hash"] = s.config_hash;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

RunSummary read_summary_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  RunSummary s;
  s.algorithm = j.at("algorithm").get<std::string>();
  s.reward_kind = j.at("reward_kind").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.episodes = j.at("episodes").get<int>();
  s.converged = j.at("converged").get<bool>();
  if (s.converged) s.e_start = j.at("e_start").get<int>();
  s.mean_reward = j.at("mean_reward").get<double>();
  if (j.contains("reward_stdev")) s.reward_stdev = j.at("reward_stdev").get<double>();
  s.mean_steps = j.at("mean_steps").get<double>();
  s.eval_trials = j.at("eval_trials").get<int>();
  s.eval_success_rate = j.at("eval_success_rate").get<double>();
  s.eval_mean_reward = j.at("eval_mean_reward").get<double>();
  s.eval_mean_steps = j.at("eval_mean_steps").get<double>();
  s.failed = j.at("failed").get<bool>();
  if (j.contains("failure")) s.failure = j.at("failure").get<std::string>();
  if (j.contains("config_hash")) s.config_hash = j.at("config_hash").get<std::string>();
  return s;
}

std::string run_dir_name(Algorithm algorithm, RewardKind kind, std::uint64_t seed) {
  return std::string(to_string(algorithm)) + "_" + to_string(kind) + "_s" +
         std::to_string(seed);
}

// --- sweeps -------------------------------------------------------------------------------

std::vector<RunSummary> run_sweep(const std::vector<RunConfig>& configs, int jobs) {
  if (configs.empty()) return {};
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<RunSummary> summaries(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::string first_error;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        summaries[i] = train(configs[i]).summary;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        summaries[i].failed = true;
        summaries[i].failure = e.what();
        summaries[i].algorithm = to_string(configs[i].agent.algorithm);
        summaries[i].reward_kind = to_string(configs[i].reward.kind);
        summaries[i].seed = configs[i].seed;
        if (first_error.empty()) first_error = e.what();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return summaries;
}

}  // namespace reachlab
