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

#include "visavis/selfplay.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "test_util.hpp"
#include "visavis/oracle.hpp"

namespace visavis {
namespace {

// Rebuilds a position from its encoding planes.
GameState decode(GameId game, const StateEncoding& enc) {
  const int cells = enc.rows * enc.cols;
  std::vector<Cell> board(cells, Cell::kEmpty);
  for (int i = 0; i < cells; ++i) {
    if (enc.planes[i] == 1.0f) board[i] = Cell::kP1;
    if (enc.planes[cells + i] == 1.0f) board[i] = Cell::kP2;
  }
  const Player mover = enc.planes[2 * cells] == 1.0f ? Player::kP1 : Player::kP2;
  return GameState::from_cells(game, board, mover);
}

// Value lookup by exact position; anything else evaluates to `fallback`.
struct TableEvaluator {
  std::unordered_map<StateKey, double, StateKeyHash> values;
  double fallback = 0.0;
  Prediction evaluate(const GameState& s) const {
    Prediction p = UniformEvaluator{}.evaluate(s);
    auto it = values.find(state_key(s));
    p.v = it == values.end() ? fallback : it->second;
    return p;
  }
};

TEST(ValuePolicyTest, UniformWhenValuesAgree) {
  UniformEvaluator eval{0.3};
  const auto pi = value_policy(initial_state(GameId::kTicTacToe), eval);
  for (double p : pi) EXPECT_NEAR(p, 1.0 / 9, 1e-12);
}

TEST(ValuePolicyTest, TwoActionExample) {
  // Find a position with two legal moves and two non-terminal successors.
  Rng rng(51);
  GameState s;
  std::vector<Action> acts;
  for (;;) {
    s = testing::random_nonterminal_state(GameId::kTicTacToe, rng);
    acts = legal_actions(s);
    if (acts.size() == 2 && !is_terminal(apply_action(s, acts[0])) &&
        !is_terminal(apply_action(s, acts[1])))
      break;
  }
  TableEvaluator eval;
  eval.values[state_key(apply_action(s, acts[0]))] = -1.0;  // opponent lost
  eval.values[state_key(apply_action(s, acts[1]))] = 0.0;
  const auto pi = value_policy(s, eval);
  EXPECT_NEAR(pi[acts[0]], 0.7310585786, 1e-9);
  EXPECT_NEAR(pi[acts[1]], 0.2689414214, 1e-9);
  // The literal sign flips the preference.
  const auto lit = value_policy(s, eval, LookaheadSign::kLiteral);
  EXPECT_NEAR(lit[acts[1]], 0.7310585786, 1e-9);
}

TEST(ValuePolicyTest, ImmediateWinUsesExactOutcome) {
  // X completes the top row at 2; four other moves are neutral.
  const GameState s = parse_state(GameId::kTicTacToe, "XX./OO./... X");
  UniformEvaluator eval{0.0};
  const auto pi = value_policy(s, eval);
  const double e = std::exp(1.0);
  EXPECT_NEAR(pi[2], e / (e + 4), 1e-12);
  for (Action a : {5, 6, 7, 8}) EXPECT_NEAR(pi[a], 1.0 / (e + 4), 1e-12);
  EXPECT_EQ(pi[0], 0.0);
}

TEST(VisSelectTest, EpsilonExtremesAndMix) {
  Rng rng(52);
  const std::vector<double> pi_p{0.0, 1.0, 0.0};
  const std::vector<double> pi_v{1.0, 1e-9, 0.0};
  VisConfig cfg;
  cfg.enabled = true;
  cfg.epsilon = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const auto c = vis_select(pi_p, pi_v, cfg, rng);
    ASSERT_EQ(c.branch, Branch::kPolicy);
    ASSERT_EQ(c.action, 1);
  }
  cfg.epsilon = 0.0;
  for (int i = 0; i < 1000; ++i)
    ASSERT_EQ(vis_select(pi_p, pi_v, cfg, rng).branch, Branch::kValue);
  cfg.epsilon = 0.5;
  int policy = 0;
  for (int i = 0; i < 10000; ++i)
    policy += vis_select(pi_p, pi_v, cfg, rng).branch == Branch::kPolicy;
  EXPECT_NEAR(policy / 10000.0, 0.5, 0.02);
}

TEST(VisSelectTest, RejectsMismatchedDistributions) {
  Rng rng(53);
  VisConfig cfg;
  EXPECT_THROW(vis_select({0.5, 0.5}, {1.0}, cfg, rng), DistributionMismatch);
  EXPECT_THROW(vis_select({0.5, 0.5}, {1.0, 0.0}, cfg, rng), DistributionMismatch);
}

class VisaTest : public ::testing::Test {
 protected:
  // No spatial symmetry fixes this position, so all 15 images are distinct.
  const GameState s = parse_state(GameId::kTicTacToe, "OX./.../... X");
  const std::vector<double> pi{0, 0, 0.5, 0.25, 0, 0.25, 0, 0, 0};
};

TEST_F(VisaTest, PicksLargestDisagreement) {
  const auto group = symmetry_group(GameId::kTicTacToe);
  std::set<StateKey> images;
  for (const Transform& t : group) images.insert(state_key(apply_transform(s, t)));
  ASSERT_EQ(images.size(), group.size());
  ASSERT_FALSE(images.count(state_key(s)));

  for (std::size_t k = 0; k < group.size(); ++k) {
    TableEvaluator eval;
    for (std::size_t j = 0; j < group.size(); ++j)
      eval.values[state_key(apply_transform(s, group[j]))] = j == k ? 0.9 : 0.1;
    const auto entries = visa_augment(s, eval, pi, 1.0, group);
    ASSERT_EQ(entries.size(), 2u);
    EXPECT_FALSE(entries[0].augmented.has_value());
    ASSERT_TRUE(entries[1].augmented.has_value());
    EXPECT_EQ(*entries[1].augmented, group[k]);
  }
  // Ties keep the first transform.
  UniformEvaluator flat;
  EXPECT_EQ(*visa_augment(s, flat, pi, 1.0, group)[1].augmented, group[0]);
}

TEST_F(VisaTest, MirrorKeepsValueAndMirrorsPolicy) {
  UniformEvaluator eval;
  const Transform mirror{Dihedral::kMirror, false};
  const auto entries = visa_augment(s, eval, pi, -1.0, {mirror});
  const ReplayEntry& aug = entries[1];
  EXPECT_EQ(aug.z_target, -1.0);
  EXPECT_EQ(aug.z_p1(), entries[0].z_p1());
  // Column c maps to column 2 - c.
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(aug.pi_target[r * 3 + 2 - c], pi[r * 3 + c]);
  EXPECT_EQ(aug.state_key, ".XO/.../... X");
}

TEST_F(VisaTest, InversionNegatesFixedPerspectiveValue) {
  UniformEvaluator eval;
  const Transform invert{Dihedral::kIdentity, true};
  const auto entries = visa_augment(s, eval, pi, 1.0, {invert});
  EXPECT_EQ(entries[0].z_p1(), 1.0);
  EXPECT_EQ(entries[1].z_p1(), -1.0);
  EXPECT_EQ(entries[1].z_target, 1.0);
  EXPECT_EQ(entries[1].pi_target, pi);
}

TEST_F(VisaTest, AugmentedTargetsMatchOracle) {
  // With exact targets for the original, the augmented row's target is the
  // exact value of the transformed position for every transform.
  Rng rng(59);
  UniformEvaluator eval;
  Solver solver;
  const auto group = symmetry_group(GameId::kTicTacToe);
  for (int i = 0; i < 300; ++i) {
    const GameState st = testing::random_nonterminal_state(GameId::kTicTacToe, rng);
    const double z = solver.solve(st).value;
    for (const Transform& t : group) {
      const auto entries = visa_augment(st, eval, pi, z, {t});
      const GameState ts = apply_transform(st, t);
      ASSERT_EQ(entries[1].z_target, solver.solve(ts).value) << transform_name(t);
      ASSERT_EQ(entries[1].z_p1(), t.invert ? -entries[0].z_p1() : entries[0].z_p1());
    }
  }
}

TEST_F(VisaTest, DecodingRecoversOriginal) {
  Rng rng(54);
  UniformEvaluator eval;
  for (GameId g : kAllGames) {
    const auto group = symmetry_group(g);
    for (int i = 0; i < 200; ++i) {
      const GameState st = testing::random_nonterminal_state(g, rng);
      std::vector<double> p(shape_of(g).num_actions, 0.0);
      for (Action a : legal_actions(st)) p[a] = 1.0 + a;
      const Transform t = group[rng() % group.size()];
      const auto entries = visa_augment(st, eval, p, 0.5, {t});
      const GameState back =
          apply_transform(decode(g, entries[1].encoding), inverse(t));
      ASSERT_TRUE(back == st) << to_string(st) << " " << transform_name(t);
      const auto inv_map = transform_action_map(g, inverse(t));
      ASSERT_EQ(permute_policy<double>(entries[1].pi_target, inv_map), p);
      ASSERT_EQ(entries[1].mask, legal_mask(apply_transform(st, t)));
    }
  }
}

TEST(ReplayBufferTest, FifoAndSampling) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) {
    ReplayEntry e;
    e.z_target = i;
    buf.push(e);
  }
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.total_pushed(), 5);
  EXPECT_EQ(buf.at(0).z_target, 2);
  EXPECT_EQ(buf.at(2).z_target, 4);

  Rng rng(55);
  for (int k = 0; k < 100; ++k) {
    const TrainBatch b = buf.sample(3, rng);
    std::set<double> zs;
    for (const auto& ex : b) zs.insert(ex.z);
    ASSERT_EQ(zs, (std::set<double>{2, 3, 4}));
  }
  EXPECT_EQ(buf.sample(10, rng).size(), 3u);
  EXPECT_THROW(ReplayBuffer(0), ConfigInvalid);
}

TEST(SelfPlayTest, TrajectoriesAndTargets) {
  Rng rng(56);
  UniformEvaluator eval;
  for (GameId g : kAllGames) {
    PlayConfig cfg{SearchConfig::for_game(g), {}};
    cfg.search.n_sims = 8;
    for (int i = 0; i < 20; ++i) {
      const Trajectory t = play_game(eval, cfg, rng, g);
      const GameShape sh = shape_of(g);
      ASSERT_GE(static_cast<int>(t.steps.size()), 2 * sh.line_length - 1);
      ASSERT_LE(static_cast<int>(t.steps.size()), sh.rows * sh.cols);
      GameState s = initial_state(g);
      for (const auto& step : t.steps) {
        ASSERT_TRUE(step.state == s);
        ASSERT_TRUE(legal_mask(s)[step.action]);
        if (s.ply() >= cfg.search.tau_drop_ply)
          ASSERT_EQ(step.pi_p[step.action], 1.0);
        s = apply_action(s, step.action);
      }
      ASSERT_EQ(terminal_outcome(s)->z, t.outcome.z);

      const auto rows = finalize_targets(t, eval, VisConfig{}, VisaConfig{});
      ASSERT_EQ(rows.size(), t.steps.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        ASSERT_EQ(rows[k].z_p1(), t.outcome.z);
        if (k > 0 && t.outcome.z != 0)
          ASSERT_EQ(rows[k].z_target, -rows[k - 1].z_target);
        ASSERT_EQ(rows[k].pi_target, t.steps[k].pi_search);
      }
      VisaConfig visa{true, {}};
      ASSERT_EQ(finalize_targets(t, eval, VisConfig{}, visa).size(),
                2 * t.steps.size());
    }
  }
}

TEST(SelfPlayTest, DeterministicWithoutVis) {
  UniformEvaluator eval;
  PlayConfig cfg{SearchConfig::for_game(GameId::kConnectFour), {}};
  cfg.search.n_sims = 10;
  Rng a(57), b(57);
  const Trajectory ta = play_game(eval, cfg, a, GameId::kConnectFour);
  const Trajectory tb = play_game(eval, cfg, b, GameId::kConnectFour);
  ASSERT_EQ(ta.steps.size(), tb.steps.size());
  for (std::size_t i = 0; i < ta.steps.size(); ++i)
    EXPECT_EQ(ta.steps[i].action, tb.steps[i].action);
}

TEST(SelfPlayTest, VisMixesBranchesAndTargets) {
  Rng rng(58);
  UniformEvaluator eval;
  PlayConfig cfg{SearchConfig::for_game(GameId::kTicTacToe), {}};
  cfg.vis.enabled = true;
  cfg.vis.epsilon = 0.5;
  int value = 0, total = 0;
  for (int i = 0; i < 50; ++i) {
    const Trajectory t = play_game(eval, cfg, rng, GameId::kTicTacToe);
    const auto rows = finalize_targets(t, eval, cfg.vis, VisaConfig{});
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      const auto& step = t.steps[k];
      ++total;
      if (step.branch == Branch::kValue) {
        ++value;
        ASSERT_EQ(rows[k].pi_target, step.pi_v);
      } else {
        ASSERT_EQ(rows[k].pi_target, step.pi_search);
      }
    }
  }
  EXPECT_GT(value, total / 4);
  EXPECT_LT(value, 3 * total / 4);
}

TrainRunConfig tiny_run(std::int64_t games) {
  TrainRunConfig cfg = TrainRunConfig::for_game(GameId::kTicTacToe);
  cfg.num_games = games;
  cfg.net.hidden_width = 16;
  cfg.search.n_sims = 6;
  cfg.batch_size = 16;
  cfg.metrics_every = 10;
  cfg.games_per_round = 5;
  cfg.seed = 9;
  return cfg;
}

TEST(TrainTest, ZeroGamesReturnsInitialNetwork) {
  const TrainRunConfig cfg = tiny_run(0);
  const TrainResult r = train(cfg);
  NetConfig nc = cfg.net;
  nc.seed = derive_seed(cfg.seed, {0x6e6574});
  EXPECT_TRUE(r.net == init_network<float>(nc));
  EXPECT_EQ(r.games_played, 0);
  EXPECT_EQ(r.train_steps, 0);
  EXPECT_EQ(r.visits.total(), 0);
}

TEST(TrainTest, BookkeepingAndThreadIndependence) {
  TrainRunConfig cfg = tiny_run(40);
  cfg.vis.enabled = true;
  cfg.visa.enabled = true;
  setenv("VISAVIS_THREADS", "1", 1);
  const TrainResult one = train(cfg);
  setenv("VISAVIS_THREADS", "3", 1);
  const TrainResult three = train(cfg);
  unsetenv("VISAVIS_THREADS");

  EXPECT_TRUE(one.net == three.net);
  EXPECT_EQ(one.visits.counts(), three.visits.counts());
  EXPECT_EQ(one.games_played, 40);
  ASSERT_EQ(one.metrics.size(), 4u);
  std::int64_t moves = 0, games = 0;
  for (const auto& m : one.metrics) {
    moves += m.total_moves;
    games += m.p1_wins + m.p2_wins + m.draws;
  }
  EXPECT_EQ(games, 40);
  EXPECT_EQ(one.visits.total(), moves);
  EXPECT_GT(one.train_steps, 0);
  EXPECT_EQ(one.metrics.back().train_steps, one.train_steps);
  EXPECT_FALSE(one.halted.has_value());
}

TEST(TrainTest, RejectsBadConfig) {
  TrainRunConfig cfg = tiny_run(1);
  cfg.batch_size = 0;
  EXPECT_THROW(train(cfg), ConfigInvalid);
  cfg = tiny_run(1);
  cfg.net = NetConfig::for_game(GameId::kConnectFour);
  EXPECT_THROW(train(cfg), ConfigInvalid);
  cfg = tiny_run(1);
  cfg.visa.transforms = {{Dihedral::kRot90, false}};
  cfg.game = GameId::kConnectFour;
  cfg.net = NetConfig::for_game(GameId::kConnectFour);
  EXPECT_THROW(train(cfg), ConfigInvalid);
}

}  // namespace
}  // namespace visavis
