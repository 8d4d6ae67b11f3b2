// Copyright 2026 The VISA-VIS Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Self-play data generation and the training loop, including value-informed
// action selection (VIS) and value-informed symmetric augmentation (VISA).

#ifndef VISAVIS_SELFPLAY_HPP_
#define VISAVIS_SELFPLAY_HPP_

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "visavis/errors.hpp"
#include "visavis/evaluator.hpp"
#include "visavis/game.hpp"
#include "visavis/neural.hpp"
#include "visavis/parallel.hpp"
#include "visavis/random.hpp"
#include "visavis/search.hpp"

namespace visavis {

// How successor values enter the value policy. Values are mover-relative, so
// v(s'_a) belongs to the opponent; kNegated flips it back, kLiteral uses the
// raw successor value.
enum class LookaheadSign { kNegated, kLiteral };

struct VisConfig {
  bool enabled = false;
  double epsilon = 0.5;  // probability of acting with the search policy
  LookaheadSign lookahead_sign = LookaheadSign::kNegated;
  // When the value branch picks the move, train the policy head towards
  // pi_v instead of the visit distribution.
  bool value_branch_policy_target = true;

  void validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
      throw ConfigInvalid("vis.epsilon must lie in [0, 1]");
  }
};

struct VisaConfig {
  bool enabled = false;
  std::vector<Transform> transforms;  // empty: the game's full group

  std::vector<Transform> resolved(GameId game) const {
    return transforms.empty() ? symmetry_group(game) : transforms;
  }
};

enum class Branch { kPolicy, kValue };

struct ReplayEntry {
  StateEncoding encoding;
  LegalMask mask;
  std::vector<double> pi_target;
  double z_target = 0.0;  // relative to `mover`
  Player mover = Player::kP1;
  std::optional<Transform> augmented;  // nullopt for original entries
  std::string state_key;

  // The same target expressed from P1's fixed point of view.
  double z_p1() const { return mover == Player::kP1 ? z_target : -z_target; }
};

// FIFO ring; the oldest entry is evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 65536) : capacity_(capacity) {
    if (capacity == 0) throw ConfigInvalid("replay capacity must be > 0");
  }

  void push(ReplayEntry entry) {
    if (entries_.size() == capacity_) entries_.pop_front();
    entries_.push_back(std::move(entry));
    ++total_pushed_;
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::int64_t total_pushed() const { return total_pushed_; }
  // 0 is the oldest entry.
  const ReplayEntry& at(std::size_t i) const { return entries_.at(i); }

  // Uniform sample without replacement (within one batch).
  TrainBatch sample(std::size_t batch_size, Rng& rng) const {
    const std::size_t n = std::min(batch_size, entries_.size());
    TrainBatch batch;
    batch.reserve(n);
    // Partial Fisher-Yates over an index map keeps this O(n).
    std::unordered_map<std::size_t, std::size_t> swapped;
    auto get = [&](std::size_t i) {
      auto it = swapped.find(i);
      return it == swapped.end() ? i : it->second;
    };
    for (std::size_t k = 0; k < n; ++k) {
      std::uniform_int_distribution<std::size_t> dist(k, entries_.size() - 1);
      const std::size_t j = dist(rng);
      const std::size_t pick = get(j);
      swapped[j] = get(k);
      const ReplayEntry& e = entries_[pick];
      batch.push_back({e.encoding, e.mask, e.pi_target, e.z_target});
    }
    return batch;
  }

 private:
  std::size_t capacity_;
  std::deque<ReplayEntry> entries_;
  std::int64_t total_pushed_ = 0;
};

// ---------------------------------------------------------------------------

// Draws an index from a distribution (entries need not be normalised).
inline Action sample_action(const std::vector<double>& probs, Rng& rng) {
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  double r = uniform01(rng) * total;
  Action last = -1;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    if (probs[a] <= 0.0) continue;
    last = static_cast<Action>(a);
    if (r < probs[a]) return last;
    r -= probs[a];
  }
  if (last < 0) throw DistributionMismatch("cannot sample from an empty distribution");
  return last;
}

// Softmax of the one-step lookahead values over legal actions. Terminal
// successors use their exact outcome.
template <Evaluator E>
std::vector<double> value_policy(const GameState& s, E& evaluator,
                                 LookaheadSign sign = LookaheadSign::kNegated) {
  const auto actions = legal_actions(s);
  std::vector<double> pi(s.shape().num_actions, 0.0);
  if (actions.empty()) throw TerminalRoot("value policy of a terminal state");
  std::vector<double> u(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const GameState next = apply_action(s, actions[i]);
    double v;
    if (auto outcome = terminal_outcome(next))
      v = relative_to(outcome->z, next.to_move());
    else
      v = evaluator.evaluate(next).v;
    u[i] = sign == LookaheadSign::kNegated ? -v : v;
  }
  const double max_u = *std::max_element(u.begin(), u.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i)
    sum += (pi[actions[i]] = std::exp(u[i] - max_u));
  for (double& x : pi) x /= sum;
  return pi;
}

struct VisChoice {
  Action action;
  Branch branch;
};

// With probability epsilon act from pi_p, otherwise from pi_v.
inline VisChoice vis_select(const std::vector<double>& pi_p,
                            const std::vector<double>& pi_v,
                            const VisConfig& cfg, Rng& rng) {
  if (pi_p.size() != pi_v.size())
    throw DistributionMismatch("pi_p and pi_v cover different action spaces");
  for (std::size_t a = 0; a < pi_p.size(); ++a)
    if (pi_p[a] > 0.0 && !(pi_v[a] > 0.0))
      throw DistributionMismatch("pi_p puts mass on action " + std::to_string(a) +
                                 " outside the support of pi_v");
  const double eta = uniform01(rng);
  if (eta < cfg.epsilon) return {sample_action(pi_p, rng), Branch::kPolicy};
  return {sample_action(pi_v, rng), Branch::kValue};
}

inline ReplayEntry make_entry(const GameState& s, std::vector<double> pi,
                              double z, std::optional<Transform> augmented) {
  return {encode(s), legal_mask(s), std::move(pi), z, s.to_move(), augmented,
          to_string(s)};
}

// Index of the transform whose predicted value differs most from v(s);
// ties keep the earliest transform.
template <Evaluator E>
std::size_t most_uncertain_transform(const GameState& s, E& evaluator,
                                     const std::vector<Transform>& transforms) {
  const double v = evaluator.evaluate(s).v;
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    const double vt = evaluator.evaluate(apply_transform(s, transforms[i])).v;
    const double d = (v - vt) * (v - vt);
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Emits the original entry and the augmented entry for the transform with
// the largest squared value disagreement. z_target is mover-relative, and the
// inverted position has the same mover-relative value (its P1-fixed value is
// the negation); see ReplayEntry::z_p1().
template <Evaluator E>
std::vector<ReplayEntry> visa_augment(const GameState& s, E& evaluator,
                                      const std::vector<double>& pi_target,
                                      double z_target,
                                      const std::vector<Transform>& transforms) {
  if (transforms.empty())
    throw ConfigInvalid("visa needs at least one transform");
  const Transform t = transforms[most_uncertain_transform(s, evaluator, transforms)];
  const GameState ts = apply_transform(s, t);
  const auto map = transform_action_map(s.game(), t);
  std::vector<ReplayEntry> out;
  out.reserve(2);
  out.push_back(make_entry(s, pi_target, z_target, std::nullopt));
  out.push_back(make_entry(
      ts, permute_policy<double>(pi_target, map), z_target, t));
  return out;
}

// ---------------------------------------------------------------------------

struct PlayConfig {
  SearchConfig search;
  VisConfig vis;
};

struct TrajectoryStep {
  GameState state;
  std::vector<double> pi_p;       // visit policy at the scheduled temperature
  std::vector<double> pi_search;  // visit policy at tau = 1
  std::vector<double> pi_v;       // empty unless the value branch is on
  Branch branch = Branch::kPolicy;
  Action action = 0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  Outcome outcome;
};

template <Evaluator E>
Trajectory play_game(E& evaluator, const PlayConfig& cfg, Rng& rng,
                     const GameState& start) {
  Trajectory traj;
  GameState s = start;
  while (!is_terminal(s)) {
    const SearchTree tree = run_search(s, evaluator, cfg.search, rng);
    TrajectoryStep step;
    step.state = s;
    const double tau = s.ply() < cfg.search.tau_drop_ply ? cfg.search.tau : 0.0;
    step.pi_search = search_policy(tree, 1.0);
    step.pi_p = tau == 1.0 ? step.pi_search : search_policy(tree, tau);
    if (cfg.vis.enabled) {
      step.pi_v = value_policy(s, evaluator, cfg.vis.lookahead_sign);
      const VisChoice choice = vis_select(step.pi_p, step.pi_v, cfg.vis, rng);
      step.action = choice.action;
      step.branch = choice.branch;
    } else {
      step.action = sample_action(step.pi_p, rng);
    }
    s = apply_action(s, step.action);
    traj.steps.push_back(std::move(step));
  }
  traj.outcome = *terminal_outcome(s);
  return traj;
}

template <Evaluator E>
Trajectory play_game(E& evaluator, const PlayConfig& cfg, Rng& rng,
                     GameId game) {
  return play_game(evaluator, cfg, rng, initial_state(game));
}

// Replay rows for one finished game: z is the final outcome seen from each
// step's mover, the policy target is the tau = 1 visit distribution (or pi_v
// for value-branch moves when configured). With VISA every row is paired
// with its most value-uncertain symmetric copy.
template <Evaluator E>
std::vector<ReplayEntry> finalize_targets(const Trajectory& traj, E& evaluator,
                                          const VisConfig& vis,
                                          const VisaConfig& visa) {
  std::vector<ReplayEntry> entries;
  if (traj.steps.empty()) return entries;
  const auto transforms =
      visa.enabled ? visa.resolved(traj.steps.front().state.game())
                   : std::vector<Transform>{};
  entries.reserve(traj.steps.size() * (visa.enabled ? 2 : 1));
  for (const TrajectoryStep& step : traj.steps) {
    const double z = relative_to(traj.outcome.z, step.state.to_move());
    const bool use_pi_v = vis.enabled && vis.value_branch_policy_target &&
                          step.branch == Branch::kValue;
    const std::vector<double>& pi = use_pi_v ? step.pi_v : step.pi_search;
    if (visa.enabled) {
      for (auto& e : visa_augment(step.state, evaluator, pi, z, transforms))
        entries.push_back(std::move(e));
    } else {
      entries.push_back(make_entry(step.state, pi, z, std::nullopt));
    }
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Training loop.

struct TrainRunConfig {
  GameId game = GameId::kTicTacToe;
  std::int64_t num_games = 500'000;
  int batch_size = 64;
  NetConfig net = NetConfig::for_game(GameId::kTicTacToe);
  SearchConfig search = SearchConfig::for_game(GameId::kTicTacToe);
  VisConfig vis;
  VisaConfig visa;
  std::uint64_t seed = 0;

  // Games generated against one frozen parameter snapshot before training.
  int games_per_round = 16;
  // Expected number of times each pushed replay row is sampled.
  double replay_reuse = 16.0;
  std::size_t replay_capacity = 65536;
  std::int64_t metrics_every = 500;     // games between metrics rows
  std::int64_t checkpoint_every = 0;    // games between checkpoints; 0 = final only
  std::string output_dir;               // empty: keep everything in memory

  // Defaults for a game profile; only num_games and seed are expected to be
  // overridden by experiment configs.
  static TrainRunConfig for_game(GameId game) {
    TrainRunConfig c;
    c.game = game;
    c.net = NetConfig::for_game(game);
    c.search = SearchConfig::for_game(game);
    switch (game) {
      case GameId::kTicTacToe:
        c.num_games = 500'000;
        c.batch_size = 64;
        break;
      case GameId::kTicTacToe4:
        c.num_games = 1'750'000;
        c.batch_size = 128;
        break;
      case GameId::kConnectFour:
        c.num_games = 7'500'000;
        c.batch_size = 256;
        break;
    }
    return c;
  }

  void validate() const {
    const GameShape sh = shape_of(game);
    if (num_games < 0) throw ConfigInvalid("num_games must be >= 0");
    if (batch_size <= 0) throw ConfigInvalid("batch_size must be > 0");
    if (games_per_round <= 0) throw ConfigInvalid("games_per_round must be > 0");
    if (!(replay_reuse > 0)) throw ConfigInvalid("replay_reuse must be > 0");
    if (replay_capacity == 0) throw ConfigInvalid("replay_capacity must be > 0");
    if (metrics_every <= 0) throw ConfigInvalid("metrics_every must be > 0");
    if (checkpoint_every < 0) throw ConfigInvalid("checkpoint_every must be >= 0");
    if (net.rows != sh.rows || net.cols != sh.cols ||
        net.action_count != sh.num_actions)
      throw ConfigInvalid("net shape does not match game " +
                          std::string(game_name(game)));
    net.validate();
    search.validate();
    vis.validate();
    for (const Transform& t : visa.transforms)
      if (t == kIdentityTransform || !is_symmetry_of(game, t))
        throw ConfigInvalid("visa.transforms: " + transform_name(t) +
                            " is not a symmetry of " + std::string(game_name(game)));
  }
};

struct MetricsRow {
  std::int64_t games_played = 0;
  double loss_total = 0.0;
  double value_mse = 0.0;
  double policy_ce = 0.0;
  double l2 = 0.0;
  std::int64_t train_steps = 0;
  std::int64_t p1_wins = 0;
  std::int64_t p2_wins = 0;
  std::int64_t draws = 0;
  double mean_game_length = 0.0;
  std::int64_t value_branch_moves = 0;
  std::int64_t total_moves = 0;
  std::size_t buffer_size = 0;
  std::int64_t buffer_pushed = 0;
};

inline nlohmann::ordered_json to_json(const MetricsRow& r) {
  return {{"games_played", r.games_played}, {"loss_total", r.loss_total},
          {"value_mse", r.value_mse},       {"policy_ce", r.policy_ce},
          {"l2", r.l2},                     {"train_steps", r.train_steps},
          {"p1_wins", r.p1_wins},           {"p2_wins", r.p2_wins},
          {"draws", r.draws},               {"mean_game_length", r.mean_game_length},
          {"value_branch_moves", r.value_branch_moves},
          {"total_moves", r.total_moves},   {"buffer_size", r.buffer_size},
          {"buffer_pushed", r.buffer_pushed}};
}

// How often each state appeared in a self-play trajectory.
class VisitTable {
 public:
  void add(const GameState& s) { ++counts_[to_string(s)]; }
  std::int64_t count(const GameState& s) const { return count(to_string(s)); }
  std::int64_t count(const std::string& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }
  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& [k, n] : counts_) t += n;
    return t;
  }
  std::size_t distinct() const { return counts_.size(); }
  const std::map<std::string, std::int64_t>& counts() const { return counts_; }

  // One JSON object per line, sorted by state.
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& [k, n] : counts_)
      out << nlohmann::json{{"state", k}, {"count", n}}.dump() << '\n';
  }
  static VisitTable load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    VisitTable table;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        table.counts_[j.at("state").get<std::string>()] += j.at("count").get<std::int64_t>();
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad visit table line: " + std::string(e.what()));
      }
    }
    return table;
  }

 private:
  std::map<std::string, std::int64_t> counts_;
};

struct TrainResult {
  Network<float> net;
  std::vector<MetricsRow> metrics;
  VisitTable visits;
  std::int64_t games_played = 0;
  std::int64_t train_steps = 0;
  std::optional<std::string> halted;  // set when training stopped early
};

// Called after each metrics row; handy for progress output.
using TrainObserver = std::function<void(const MetricsRow&)>;

inline TrainResult train(const TrainRunConfig& cfg,
                         const TrainObserver& observer = nullptr) {
  cfg.validate();
  namespace fs = std::filesystem;
  TrainResult result;
  NetConfig net_cfg = cfg.net;
  net_cfg.seed = derive_seed(cfg.seed, {0x6e6574});
  result.net = init_network<float>(net_cfg);

  std::ofstream metrics_out, timing_out;
  if (!cfg.output_dir.empty()) {
    fs::create_directories(fs::path(cfg.output_dir) / "checkpoints");
    metrics_out.open(fs::path(cfg.output_dir) / "metrics.jsonl", std::ios::trunc);
    timing_out.open(fs::path(cfg.output_dir) / "timing.jsonl", std::ios::trunc);
  }
  const auto start_time = std::chrono::steady_clock::now();

  ReplayBuffer buffer(cfg.replay_capacity);
  SgdState opt;
  Rng train_rng(derive_seed(cfg.seed, {0x747261696e}));
  const PlayConfig play{cfg.search, cfg.vis};
  const int workers = worker_count();

  MetricsRow pending;
  std::int64_t pending_games = 0, pending_steps = 0, pending_length = 0;
  std::int64_t next_metrics = cfg.metrics_every;
  std::int64_t next_checkpoint = cfg.checkpoint_every;
  double pending_new_rows = 0.0;

  auto flush_metrics = [&] {
    MetricsRow row = pending;
    row.games_played = result.games_played;
    row.train_steps = result.train_steps;
    if (pending_steps > 0) {
      row.loss_total /= pending_steps;
      row.value_mse /= pending_steps;
      row.policy_ce /= pending_steps;
      row.l2 /= pending_steps;
    }
    row.mean_game_length =
        pending_games ? static_cast<double>(pending_length) / pending_games : 0.0;
    row.buffer_size = buffer.size();
    row.buffer_pushed = buffer.total_pushed();
    result.metrics.push_back(row);
    if (metrics_out.is_open()) {
      metrics_out << to_json(row).dump() << '\n';
      metrics_out.flush();
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start_time)
                              .count();
      timing_out << nlohmann::ordered_json{{"games_played", row.games_played},
                                           {"wall_seconds", secs}}
                        .dump()
                 << '\n';
    }
    if (observer) observer(row);
    pending = MetricsRow{};
    pending_games = pending_steps = pending_length = 0;
  };

  std::int64_t round = 0;
  while (result.games_played < cfg.num_games && !result.halted) {
    const int n = static_cast<int>(
        std::min<std::int64_t>(cfg.games_per_round, cfg.num_games - result.games_played));
    std::vector<std::vector<ReplayEntry>> rows(n);
    std::vector<Trajectory> trajectories(n);
    {
      std::vector<NetworkEvaluator> evaluators;
      for (int w = 0; w < std::min(workers, n); ++w) evaluators.emplace_back(result.net);
      parallel_for(n, workers, [&](int i, int w) {
        Rng rng(derive_seed(cfg.seed, {0x706c6179, static_cast<std::uint64_t>(round),
                                       static_cast<std::uint64_t>(i)}));
        trajectories[i] = play_game(evaluators[w], play, rng, cfg.game);
        rows[i] = finalize_targets(trajectories[i], evaluators[w], cfg.vis, cfg.visa);
      });
    }
    std::size_t new_rows = 0;
    for (int i = 0; i < n; ++i) {
      const Trajectory& t = trajectories[i];
      for (const auto& step : t.steps) {
        result.visits.add(step.state);
        pending.value_branch_moves += step.branch == Branch::kValue;
      }
      pending.total_moves += t.steps.size();
      pending_length += t.steps.size();
      pending.p1_wins += t.outcome.z > 0;
      pending.p2_wins += t.outcome.z < 0;
      pending.draws += t.outcome.z == 0;
      for (auto& e : rows[i]) buffer.push(std::move(e));
      new_rows += rows[i].size();
    }
    result.games_played += n;
    pending_games += n;
    ++round;

    pending_new_rows += new_rows * cfg.replay_reuse / cfg.batch_size;
    if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
      const auto steps = static_cast<std::int64_t>(pending_new_rows);
      pending_new_rows -= steps;
      for (std::int64_t k = 0; k < steps; ++k) {
        const TrainBatch batch = buffer.sample(cfg.batch_size, train_rng);
        try {
          const StepStats st = grad_step(result.net, batch, opt);
          pending.loss_total += st.loss.total;
          pending.value_mse += st.loss.value_mse;
          pending.policy_ce += st.loss.policy_ce;
          pending.l2 += st.loss.l2;
          ++pending_steps;
          ++result.train_steps;
        } catch (const NonFiniteGradient& e) {
          result.halted = e.what();
          break;
        }
      }
    }

    if (result.games_played >= next_metrics || result.games_played == cfg.num_games ||
        result.halted) {
      flush_metrics();
      while (next_metrics <= result.games_played) next_metrics += cfg.metrics_every;
    }
    if (!cfg.output_dir.empty() && cfg.checkpoint_every > 0 &&
        result.games_played >= next_checkpoint) {
      save_checkpoint(result.net, fs::path(cfg.output_dir) / "checkpoints" /
                                      ("games_" + std::to_string(result.games_played) + ".vvis"));
      while (next_checkpoint <= result.games_played) next_checkpoint += cfg.checkpoint_every;
    }
  }

  if (!cfg.output_dir.empty()) {
    save_checkpoint(result.net, fs::path(cfg.output_dir) / "final.vvis");
    result.visits.save(fs::path(cfg.output_dir) / "visits.jsonl");
  }
  return result;
}

}  // namespace visavis

#endif  // VISAVIS_SELFPLAY_HPP_
