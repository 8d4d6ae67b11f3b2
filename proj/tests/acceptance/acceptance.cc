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

// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reference_minimax.hpp"
#include "unit_test_binaries.h"
#include "visavis/analysis.hpp"

namespace visavis {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

void progress(const std::string& msg) { std::cerr << "  .. " << msg << std::endl; }

// ---------------------------------------------------------------------------
// 1. Oracle correctness on tic-tac-toe.

Verdict oracle_correctness() {
  const auto t0 = Clock::now();
  const auto states = enumerate_reachable(GameId::kTicTacToe, 1'000'000);
  std::size_t bfs_terminal = 0;
  for (const auto& s : states) bfs_terminal += is_terminal(s);

  std::set<std::string> seen, terminal;
  testing::collect_states(initial_state(GameId::kTicTacToe), seen, terminal);

  Solver solver;
  std::size_t mismatches = 0;
  for (const auto& s : states)
    if (solver.solve(s).value != testing::plain_minimax(s)) ++mismatches;
  const double secs = seconds_since(t0);

  const bool counts_ok = states.size() == 5478 && bfs_terminal == 958 &&
                         seen.size() == 5478 && terminal.size() == 958;
  Verdict out;
  out.pass = counts_ok && mismatches == 0 && secs < 60.0;
  out.detail = "states " + std::to_string(states.size()) + "/" +
               std::to_string(seen.size()) + " terminal " +
               std::to_string(bfs_terminal) + "/" + std::to_string(terminal.size()) +
               " non-terminal " + std::to_string(states.size() - bfs_terminal) +
               ", value mismatches " + std::to_string(mismatches) + ", " +
               fmt(secs, 1) + "s";
  return out;
}

// ---------------------------------------------------------------------------
// 2. Property suites: every unit-test binary passes within five minutes.

Verdict property_suites(const std::vector<std::string>& binaries) {
  const auto t0 = Clock::now();
  std::vector<std::string> failed;
  for (const auto& bin : binaries) {
    const std::string cmd = "\"" + bin + "\" --gtest_brief=1 > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) failed.push_back(bin);
  }
  const double secs = seconds_since(t0);
  Verdict out;
  out.pass = !binaries.empty() && failed.empty() && secs < 300.0;
  out.detail = std::to_string(binaries.size() - failed.size()) + "/" +
               std::to_string(binaries.size()) + " suites passed in " +
               fmt(secs, 1) + "s";
  for (const auto& f : failed) out.detail += "; failed: " + f;
  return out;
}

// ---------------------------------------------------------------------------
// Tic-tac-toe runs shared by criteria 3 to 5.

constexpr std::int64_t kTttGames = 20'000;
constexpr int kMatchGames = 1000;
const std::vector<std::uint64_t> kSeeds = {1, 2, 3};

struct TttRun {
  std::uint64_t seed = 0;
  TrainResult train;
  MatchScore first, second;
  Summary summary;
  GeneralizationReport gen;
};

TttRun run_ttt(std::uint64_t seed, bool visa_vis) {
  TrainRunConfig cfg = TrainRunConfig::for_game(GameId::kTicTacToe);
  cfg.num_games = kTttGames;
  cfg.seed = seed;
  cfg.vis.enabled = visa_vis;
  cfg.visa.enabled = visa_vis;
  const auto t0 = Clock::now();
  TttRun run{seed, train(cfg)};
  if (run.train.halted)
    throw std::runtime_error("training halted: " + *run.train.halted);
  Rng rng(derive_seed(seed, {0x6d61746368}));
  run.first = oracle_match(run.train.net, cfg.game, kMatchGames, true, cfg.search, rng);
  run.second = oracle_match(run.train.net, cfg.game, kMatchGames, false, cfg.search, rng);
  EvalSettings es;
  es.search = cfg.search;
  const auto records = exhaustive_eval(run.train.net, cfg.game, run.train.visits, es, seed);
  run.summary = summarize(records);
  run.gen = generalization_report(records);
  progress(std::string(visa_vis ? "VISA-VIS" : "baseline") + " seed " +
           std::to_string(seed) + ": " + fmt(seconds_since(t0), 1) + "s");
  return run;
}

std::optional<double> high_visit_error(const GeneralizationReport& g) {
  return g.bins.back().mean_error;
}

// 3. Baseline reaches near-optimal play against the oracle.
Verdict baseline_strength(const std::vector<TttRun>& runs) {
  Verdict out{true, ""};
  for (const auto& r : runs) {
    out.pass = out.pass && r.first.non_loss_rate() >= 0.99 &&
               r.second.non_loss_rate() >= 0.99;
    out.detail += "seed " + std::to_string(r.seed) + " non-loss first " +
                  fmt(r.first.non_loss_rate()) + " second " +
                  fmt(r.second.non_loss_rate()) + "; ";
  }
  out.detail += "need >= 0.990 everywhere";
  return out;
}

// 4. Value errors persist and concentrate on unvisited states.
Verdict value_errors(const std::vector<TttRun>& runs) {
  int ok = 0;
  Verdict out;
  for (const auto& r : runs) {
    const auto zero = r.gen.generalization_error;
    const auto high = high_visit_error(r.gen);
    const bool seed_ok = r.summary.share_above_1 > 0.0 && zero && high && *zero > *high;
    ok += seed_ok;
    out.detail += "seed " + std::to_string(r.seed) + " e>1 share " +
                  fmt(r.summary.share_above_1) + " err(0 visits) " +
                  (zero ? fmt(*zero) : "n/a") + " err(>1000) " +
                  (high ? fmt(*high) : "n/a") + (seed_ok ? " ok; " : " no; ");
  }
  out.pass = ok >= 2;
  out.detail += std::to_string(ok) + "/3 seeds hold";
  return out;
}

// 5. VISA-VIS reduces misalignment and generalization error.
Verdict visa_vis_gains(const std::vector<TttRun>& base, const std::vector<TttRun>& vv) {
  auto mean_of = [](const std::vector<TttRun>& runs, auto field) {
    double s = 0.0;
    for (const auto& r : runs) s += field(r);
    return s / runs.size();
  };
  auto kl = [](const TttRun& r) { return r.summary.mean_misalignment; };
  auto gen = [](const TttRun& r) { return r.gen.generalization_error.value_or(0.0); };
  for (const auto& r : base)
    if (!r.gen.generalization_error)
      return {false, "baseline seed " + std::to_string(r.seed) + " has no unvisited states"};
  const double kl_ratio = mean_of(vv, kl) / mean_of(base, kl);
  const double gen_ratio = mean_of(vv, gen) / mean_of(base, gen);
  Verdict out;
  out.pass = kl_ratio <= 0.7 && gen_ratio <= 0.8;
  out.detail = "misalignment " + fmt(mean_of(vv, kl)) + " vs " + fmt(mean_of(base, kl)) +
               " (ratio " + fmt(kl_ratio) + ", need <= 0.700); unvisited error " +
               fmt(mean_of(vv, gen)) + " vs " + fmt(mean_of(base, gen)) + " (ratio " +
               fmt(gen_ratio) + ", need <= 0.800); VISA-VIS non-loss second " +
               fmt(mean_of(vv, [](const TttRun& r) { return r.second.non_loss_rate(); }));
  out.detail += "; per-seed unvisited error baseline/VISA-VIS";
  for (std::size_t i = 0; i < base.size() && i < vv.size(); ++i)
    out.detail += " " + fmt(gen(base[i])) + "/" + fmt(gen(vv[i]));
  return out;
}

// ---------------------------------------------------------------------------
// 6. Adversarial detection on an undertrained 4x4 agent.

constexpr std::int64_t kTtt4Games = 5'000;
constexpr int kDetectGames = 1000;

Verdict adversarial_detection() {
  const auto t0 = Clock::now();
  TrainRunConfig cfg = TrainRunConfig::for_game(GameId::kTicTacToe4);
  cfg.num_games = kTtt4Games;
  cfg.seed = 1;
  const TrainResult trained = train(cfg);
  if (trained.halted) return {false, "training halted: " + *trained.halted};
  progress("4x4 training: " + fmt(seconds_since(t0), 1) + "s");

  DetectSettings settings;
  settings.search = DetectSettings::with_root_noise(cfg.search);
  Rng rng(derive_seed(cfg.seed, {0x646574}));
  const AdversarialReport rep =
      adversarial_detect(trained.net, cfg.game, kDetectGames, settings, rng);

  std::set<std::string> keys;
  std::size_t bad_error = 0, not_endgame = 0, wrong_value = 0;
  Solver solver;
  for (const auto& r : rep.records) {
    keys.insert(r.state_key);
    bad_error += !(r.value_error > kHighErrorThreshold);
    const GameState s = parse_state(cfg.game, r.state_key);
    if (!solver.is_endgame(s, settings.endgame_plies)) {
      ++not_endgame;
      continue;
    }
    wrong_value += solver.solve(s).value != r.oracle_value;
  }
  Verdict out;
  out.pass = !rep.records.empty() && keys.size() == rep.records.size() &&
             bad_error == 0 && not_endgame == 0 && wrong_value == 0 &&
             rep.illegal_moves == 0 && rep.games == kDetectGames;
  out.detail = std::to_string(rep.records.size()) + " states (" +
               std::to_string(keys.size()) + " distinct) over " +
               std::to_string(rep.games) + " games after " +
               std::to_string(kTtt4Games) + " training games; e<=1 " +
               std::to_string(bad_error) + ", not endgame " +
               std::to_string(not_endgame) + ", wrong oracle value " +
               std::to_string(wrong_value) + ", illegal moves " +
               std::to_string(rep.illegal_moves) + ", " +
               fmt(seconds_since(t0), 1) + "s";
  return out;
}

// ---------------------------------------------------------------------------
// 7. Connect Four: bounded endgame solves and a stable training run.

constexpr int kEndgamePositions = 500;
constexpr int kEndgameHorizon = 8;
constexpr std::int64_t kC4Games = 10'000;

std::string connect_four_endgames() {
  Rng rng(derive_seed(7, {0x6334}));
  Solver solver;
  int decided = 0, undecided = 0, mismatches = 0;
  while (decided < kEndgamePositions) {
    GameState s = initial_state(GameId::kConnectFour);
    const int plies = std::uniform_int_distribution<int>(24, 38)(rng);
    for (int i = 0; i < plies && !is_terminal(s); ++i) {
      const auto actions = legal_actions(s);
      s = apply_action(s, actions[std::uniform_int_distribution<std::size_t>(
                              0, actions.size() - 1)(rng)]);
    }
    if (is_terminal(s)) continue;
    const testing::RefScore ref = testing::bounded_minimax(s, kEndgameHorizon);
    std::optional<SolveResult> got;
    try {
      got = solver.solve(s, {100'000'000, kEndgameHorizon});
    } catch (const BudgetExceeded& e) {
      if (e.kind() == BudgetExceeded::Kind::kNodes) throw;
    }
    if (!ref.decided) {
      ++undecided;
      mismatches += got.has_value();
      continue;
    }
    ++decided;
    mismatches += !got || got->value != ref.value || got->plies_to_end != ref.plies;
  }
  return std::to_string(mismatches) + " mismatches over " + std::to_string(decided) +
         " solvable and " + std::to_string(undecided) + " unsolvable positions";
}

Verdict connect_four() {
  const auto t0 = Clock::now();
  const std::string endgames = connect_four_endgames();
  const bool endgames_ok = endgames.rfind("0 mismatches", 0) == 0;
  progress("endgame solves: " + fmt(seconds_since(t0), 1) + "s");

  TrainRunConfig cfg = TrainRunConfig::for_game(GameId::kConnectFour);
  cfg.num_games = kC4Games;
  cfg.seed = 1;
  const TrainResult trained = train(cfg);
  const auto& rows = trained.metrics;
  const std::size_t q = std::max<std::size_t>(1, rows.size() / 5);
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < q && i < rows.size(); ++i) {
    head += rows[i].loss_total / q;
    tail += rows[rows.size() - 1 - i].loss_total / q;
  }
  const bool trained_ok = !trained.halted && trained.games_played == kC4Games &&
                          rows.size() >= 5 && tail < head;
  Verdict out;
  out.pass = endgames_ok && trained_ok;
  out.detail = "endgames: " + endgames + "; training: " +
               std::to_string(trained.games_played) + " games, " +
               std::to_string(trained.train_steps) + " steps, " +
               (trained.halted ? "halted (" + *trained.halted + ")" : "no halt") +
               ", loss first fifth " + fmt(head) + " last fifth " + fmt(tail) + ", " +
               fmt(seconds_since(t0), 1) + "s";
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ':');)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace
}  // namespace visavis

int main(int argc, char** argv) {
  using namespace visavis;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int id) { return only.empty() || only.count(id); };

  int failures = 0;
  auto report = [&](int id, const std::string& name, const Verdict& o) {
    failures += !o.pass;
    std::cout << "[" << (o.pass ? "PASS" : "FAIL") << "] criterion " << id << " "
              << name << ": " << o.detail << std::endl;
  };
  auto guarded = [&](int id, const std::string& name, const std::function<Verdict()>& fn) {
    if (!wanted(id)) return;
    try {
      report(id, name, fn());
    } catch (const std::exception& e) {
      report(id, name, {false, std::string("exception: ") + e.what()});
    }
  };

  guarded(1, "oracle correctness", oracle_correctness);
  guarded(2, "property suites", [] {
    return property_suites(split_list(VISAVIS_UNIT_TEST_BINARIES));
  });

  if (wanted(3) || wanted(4) || wanted(5)) {
    std::vector<TttRun> base, vv;
    try {
      for (auto seed : kSeeds) base.push_back(run_ttt(seed, false));
      if (wanted(5))
        for (auto seed : kSeeds) vv.push_back(run_ttt(seed, true));
    } catch (const std::exception& e) {
      for (int id : {3, 4, 5})
        if (wanted(id))
          report(id, "tic-tac-toe runs", {false, std::string("exception: ") + e.what()});
      base.clear();
    }
    if (!base.empty()) {
      if (wanted(3)) report(3, "baseline vs oracle", baseline_strength(base));
      if (wanted(4)) report(4, "value errors concentrate off-distribution", value_errors(base));
      if (wanted(5)) report(5, "VISA-VIS improvements", visa_vis_gains(base, vv));
    }
  }

  guarded(6, "adversarial detection", adversarial_detection);
  guarded(7, "Connect Four endgames and training", connect_four);
  return failures == 0 ? 0 : 1;
}
