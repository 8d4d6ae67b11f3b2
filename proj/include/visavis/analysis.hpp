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

// Evaluation against the exact oracle: value error, policy-value
// misalignment, visit-binned generalization error, oracle matches and the
// minimum-probability adversarial state detector.

#ifndef VISAVIS_ANALYSIS_HPP_
#define VISAVIS_ANALYSIS_HPP_

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "visavis/errors.hpp"
#include "visavis/evaluator.hpp"
#include "visavis/game.hpp"
#include "visavis/neural.hpp"
#include "visavis/oracle.hpp"
#include "visavis/parallel.hpp"
#include "visavis/random.hpp"
#include "visavis/search.hpp"
#include "visavis/selfplay.hpp"

namespace visavis {

// Above this squared error a prediction has the wrong sign.
inline constexpr double kHighErrorThreshold = 1.0;

// D_KL(pi_p || pi_v); zero-probability terms of pi_p contribute nothing and
// pi_v is floored at kLogFloor.
inline double misalignment(const std::vector<double>& pi_p,
                           const std::vector<double>& pi_v) {
  if (pi_p.size() != pi_v.size())
    throw DistributionMismatch("distributions cover different action spaces");
  const double sp = std::accumulate(pi_p.begin(), pi_p.end(), 0.0);
  const double sv = std::accumulate(pi_v.begin(), pi_v.end(), 0.0);
  if (std::abs(sp - 1.0) > 1e-6 || std::abs(sv - 1.0) > 1e-6)
    throw DistributionMismatch("distributions must be normalised");
  double kl = 0.0;
  for (std::size_t a = 0; a < pi_p.size(); ++a) {
    if (pi_p[a] <= 0.0) continue;
    kl += pi_p[a] * std::log(pi_p[a] / std::max(pi_v[a], kLogFloor));
  }
  return std::max(kl, 0.0);
}

struct EvalRecord {
  std::string state_key;
  int oracle_value = 0;  // mover-relative
  double predicted_v = 0.0;
  double value_error = 0.0;
  double misalignment = 0.0;      // search policy vs value policy
  double misalignment_raw = 0.0;  // raw network policy vs value policy
  std::int64_t visit_count = 0;
};

inline nlohmann::ordered_json to_json(const EvalRecord& r) {
  return {{"state", r.state_key},
          {"oracle_value", r.oracle_value},
          {"predicted_v", r.predicted_v},
          {"value_error", r.value_error},
          {"misalignment", r.misalignment},
          {"misalignment_raw", r.misalignment_raw},
          {"visit_count", r.visit_count}};
}

// Settings for the search that produces pi_p during evaluation: training
// search settings at tau = 1.
struct EvalSettings {
  SearchConfig search;
  LookaheadSign lookahead_sign = LookaheadSign::kNegated;
  SolveBudget budget;
  std::size_t state_limit = 2'000'000;
};

// Scores one non-terminal state.
template <Evaluator E>
EvalRecord evaluate_state(const GameState& s, int oracle_value, E& evaluator,
                          const EvalSettings& settings, Rng& rng) {
  EvalRecord r;
  r.state_key = to_string(s);
  r.oracle_value = oracle_value;
  const Prediction pred = evaluator.evaluate(s);
  r.predicted_v = pred.v;
  r.value_error = (oracle_value - pred.v) * (oracle_value - pred.v);
  const auto pi_v = value_policy(s, evaluator, settings.lookahead_sign);
  const SearchTree tree = run_search(s, evaluator, settings.search, rng);
  const auto root_visits = tree.root_visits();
  const bool visited = std::any_of(root_visits.begin(), root_visits.end(),
                                   [](int n) { return n > 0; });
  const auto pi_p = visited ? search_policy(tree, 1.0) : pred.p;
  r.misalignment = misalignment(pi_p, pi_v);
  r.misalignment_raw = misalignment(pred.p, pi_v);
  return r;
}

// One record per reachable non-terminal state, in enumeration order.
inline std::vector<EvalRecord> exhaustive_eval(const Network<float>& net,
                                               GameId game,
                                               const VisitTable& visits,
                                               const EvalSettings& settings,
                                               std::uint64_t seed = 0) {
  const auto states = enumerate_reachable(game, settings.state_limit);
  std::vector<GameState> open;
  for (const auto& s : states)
    if (!is_terminal(s)) open.push_back(s);

  std::vector<int> values(open.size());
  {
    Solver solver;
    for (std::size_t i = 0; i < open.size(); ++i)
      values[i] = solver.solve(open[i], settings.budget).value;
  }

  std::vector<EvalRecord> records(open.size());
  const int workers = worker_count();
  std::vector<NetworkEvaluator> evaluators;
  for (int w = 0; w < workers; ++w) evaluators.emplace_back(net);
  parallel_for(static_cast<int>(open.size()), workers, [&](int i, int w) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    records[i] = evaluate_state(open[i], values[i], evaluators[w], settings, rng);
    records[i].visit_count = visits.count(records[i].state_key);
  });
  return records;
}

// ---------------------------------------------------------------------------

struct Summary {
  static constexpr std::array<double, 8> kEdges = {0.0, 0.25, 0.5, 1.0,
                                                   2.0, 3.0,  3.5, 4.0};
  std::array<std::int64_t, 7> counts{};
  std::size_t n = 0;
  double share_above_1 = 0.0;
  double share_above_3 = 0.0;
  double share_above_3_5 = 0.0;
  double mean_error = 0.0;
  double mean_misalignment = 0.0;
  double mean_misalignment_raw = 0.0;
};

inline Summary summarize(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  Summary s;
  s.n = records.size();
  for (const auto& r : records) {
    int bin = 6;
    for (int b = 0; b < 6; ++b)
      if (r.value_error < Summary::kEdges[b + 1]) {
        bin = b;
        break;
      }
    ++s.counts[bin];
    s.share_above_1 += r.value_error > 1.0;
    s.share_above_3 += r.value_error > 3.0;
    s.share_above_3_5 += r.value_error > 3.5;
    s.mean_error += r.value_error;
    s.mean_misalignment += r.misalignment;
    s.mean_misalignment_raw += r.misalignment_raw;
  }
  const double n = static_cast<double>(s.n);
  s.share_above_1 /= n;
  s.share_above_3 /= n;
  s.share_above_3_5 /= n;
  s.mean_error /= n;
  s.mean_misalignment /= n;
  s.mean_misalignment_raw /= n;
  return s;
}

inline nlohmann::ordered_json to_json(const Summary& s) {
  nlohmann::ordered_json hist = nlohmann::ordered_json::array();
  for (int b = 0; b < 7; ++b)
    hist.push_back({{"lo", Summary::kEdges[b]},
                    {"hi", Summary::kEdges[b + 1]},
                    {"count", s.counts[b]}});
  return {{"states", s.n},
          {"histogram", hist},
          {"share_e_gt_1", s.share_above_1},
          {"share_e_gt_3", s.share_above_3},
          {"share_e_gt_3_5", s.share_above_3_5},
          {"mean_error", s.mean_error},
          {"mean_misalignment", s.mean_misalignment},
          {"mean_misalignment_raw", s.mean_misalignment_raw}};
}

struct VisitBin {
  std::string label;
  std::int64_t lo;
  std::int64_t hi;  // inclusive; -1 for unbounded
  std::size_t count = 0;
  std::optional<double> mean_error;
};

struct GeneralizationReport {
  std::vector<VisitBin> bins;
  // Mean error over states never visited in training; absent if none.
  std::optional<double> generalization_error;
};

inline GeneralizationReport generalization_report(
    const std::vector<EvalRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("generalization_report: no records");
  GeneralizationReport rep;
  rep.bins = {{"0", 0, 0},
              {"1-10", 1, 10},
              {"11-100", 11, 100},
              {"101-1000", 101, 1000},
              {">1000", 1001, -1}};
  std::vector<double> sums(rep.bins.size(), 0.0);
  for (const auto& r : records) {
    for (std::size_t b = 0; b < rep.bins.size(); ++b) {
      const auto& bin = rep.bins[b];
      if (r.visit_count >= bin.lo && (bin.hi < 0 || r.visit_count <= bin.hi)) {
        ++rep.bins[b].count;
        sums[b] += r.value_error;
        break;
      }
    }
  }
  for (std::size_t b = 0; b < rep.bins.size(); ++b)
    if (rep.bins[b].count) rep.bins[b].mean_error = sums[b] / rep.bins[b].count;
  rep.generalization_error = rep.bins[0].mean_error;
  return rep;
}

inline nlohmann::ordered_json to_json(const GeneralizationReport& g) {
  nlohmann::ordered_json bins = nlohmann::ordered_json::array();
  for (const auto& b : g.bins)
    bins.push_back({{"visits", b.label},
                    {"states", b.count},
                    {"mean_error", b.mean_error ? nlohmann::ordered_json(*b.mean_error)
                                                : nlohmann::ordered_json(nullptr)}});
  return {{"bins", bins},
          {"generalization_error",
           g.generalization_error ? nlohmann::ordered_json(*g.generalization_error)
                                  : nlohmann::ordered_json(nullptr)}};
}

// ---------------------------------------------------------------------------

struct MatchScore {
  int wins = 0;
  int draws = 0;
  int losses = 0;
  int games() const { return wins + draws + losses; }
  double non_loss_rate() const {
    return games() ? static_cast<double>(wins + draws) / games() : 0.0;
  }
};

// Uniform choice among the oracle's optimal moves.
inline Action oracle_move(Solver& solver, const GameState& s, Rng& rng,
                          const SolveBudget& budget = {}) {
  const SolveResult r = solver.solve(s, budget);
  std::uniform_int_distribution<std::size_t> pick(0, r.best_actions.size() - 1);
  return r.best_actions[pick(rng)];
}

// Plays `agent` (GameState -> Action) against the oracle and tallies results
// from the agent's point of view.
template <typename Agent>
MatchScore match_against_oracle(Agent&& agent, GameId game, int n_games,
                                bool agent_moves_first, Solver& solver,
                                Rng& rng, const SolveBudget& budget = {}) {
  MatchScore score;
  const Player agent_player = agent_moves_first ? Player::kP1 : Player::kP2;
  for (int g = 0; g < n_games; ++g) {
    GameState s = initial_state(game);
    while (!is_terminal(s)) {
      const Action a = s.to_move() == agent_player
                           ? agent(s)
                           : oracle_move(solver, s, rng, budget);
      s = apply_action(s, a);
    }
    const int z = relative_to(terminal_outcome(s)->z, agent_player);
    score.wins += z > 0;
    score.draws += z == 0;
    score.losses += z < 0;
  }
  return score;
}

// The network agent: search then argmax (tau = 0).
inline MatchScore oracle_match(const Network<float>& net, GameId game,
                               int n_games, bool agent_moves_first,
                               const SearchConfig& search, Rng& rng,
                               const SolveBudget& budget = {}) {
  NetworkEvaluator evaluator(net);
  Solver solver;
  Rng search_rng(rng());
  auto agent = [&](const GameState& s) {
    const SearchTree tree = run_search(s, evaluator, search, search_rng);
    const auto pi = search_policy(tree, 0.0);
    return static_cast<Action>(std::max_element(pi.begin(), pi.end()) - pi.begin());
  };
  return match_against_oracle(agent, game, n_games, agent_moves_first, solver,
                              rng, budget);
}

// ---------------------------------------------------------------------------

struct AdversarialStateRecord {
  std::string state_key;
  int oracle_value = 0;
  double predicted_v = 0.0;
  double value_error = 0.0;
  double misalignment = 0.0;
  int discovered_in_game = 0;
};

inline nlohmann::ordered_json to_json(const AdversarialStateRecord& r) {
  return {{"state", r.state_key},         {"oracle_value", r.oracle_value},
          {"predicted_v", r.predicted_v}, {"value_error", r.value_error},
          {"misalignment", r.misalignment},
          {"discovered_in_game", r.discovered_in_game}};
}

struct AdversarialReport {
  std::vector<AdversarialStateRecord> records;  // sorted by state_key
  std::int64_t games = 0;
  std::int64_t moves = 0;
  std::int64_t illegal_moves = 0;
  std::int64_t endgame_states = 0;  // distinct endgame states seen
  std::int64_t budget_skipped = 0;
};

// Detection search runs with root Dirichlet noise by default: without it the
// search, and therefore every min-probability game, would be identical.
struct DetectSettings {
  SearchConfig search = with_root_noise(SearchConfig{});
  LookaheadSign lookahead_sign = LookaheadSign::kNegated;
  int endgame_plies = kDefaultEndgamePlies;
  SolveBudget budget{5'000'000, std::nullopt};

  static SearchConfig with_root_noise(SearchConfig cfg) {
    cfg.root_noise = true;
    return cfg;
  }
};

// The least likely legal action under the tau = 1 visit policy; ties go to
// the lowest action.
inline Action min_probability_action(const std::vector<double>& pi,
                                     const LegalMask& mask) {
  Action best = -1;
  for (std::size_t a = 0; a < pi.size(); ++a) {
    if (!mask[a]) continue;
    if (best < 0 || pi[a] < pi[best]) best = static_cast<Action>(a);
  }
  if (best < 0) throw IllegalAction("no legal action available");
  return best;
}

// Self-play where every move is the minimum-probability action. Every
// endgame state met on the way is solved; those predicted with squared error
// above kHighErrorThreshold are collected once each.
template <Evaluator E>
AdversarialReport adversarial_detect(E& evaluator, GameId game, int n_games,
                                     const DetectSettings& settings, Rng& rng) {
  AdversarialReport report;
  Solver solver;
  std::map<std::string, AdversarialStateRecord> found;
  std::map<std::string, bool> checked;
  for (int g = 0; g < n_games; ++g) {
    GameState s = initial_state(game);
    while (!is_terminal(s)) {
      const std::string key = to_string(s);
      if (!checked.count(key)) {
        bool endgame = false;
        try {
          SolveBudget bounded = settings.budget;
          bounded.max_plies = settings.endgame_plies;
          const SolveResult r = solver.solve(s, bounded);
          endgame = true;
          const double v = evaluator.evaluate(s).v;
          const double e = (r.value - v) * (r.value - v);
          if (e > kHighErrorThreshold) {
            SearchConfig quiet = settings.search;
            quiet.root_noise = false;
            EvalSettings es{quiet, settings.lookahead_sign};
            Rng eval_rng(derive_seed(0, {StateKeyHash{}(state_key(s))}));
            EvalRecord rec = evaluate_state(s, r.value, evaluator, es, eval_rng);
            found[key] = {key, r.value, v, e, rec.misalignment, g};
          }
        } catch (const BudgetExceeded& e) {
          if (e.kind() == BudgetExceeded::Kind::kNodes) ++report.budget_skipped;
        }
        checked[key] = endgame;
        report.endgame_states += endgame;
      }
      const SearchTree tree = run_search(s, evaluator, settings.search, rng);
      const LegalMask mask = legal_mask(s);
      const Action a = min_probability_action(search_policy(tree, 1.0), mask);
      if (!mask[a]) ++report.illegal_moves;
      s = apply_action(s, a);
      ++report.moves;
    }
    ++report.games;
  }
  for (auto& [key, rec] : found) report.records.push_back(std::move(rec));
  return report;
}

inline AdversarialReport adversarial_detect(const Network<float>& net,
                                            GameId game, int n_games,
                                            const DetectSettings& settings,
                                            Rng& rng) {
  NetworkEvaluator evaluator(net);
  return adversarial_detect(evaluator, game, n_games, settings, rng);
}

// ---------------------------------------------------------------------------
// Report files: one JSON object per line.

template <typename Record>
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<Record>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

}  // namespace visavis

#endif  // VISAVIS_ANALYSIS_HPP_
