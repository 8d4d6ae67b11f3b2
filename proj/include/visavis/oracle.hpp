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

// Exact game-tree values by negamax with a transposition table.
//
// Scores are ordered win-fast / lose-slow, so plies_to_end is the length of
// the game under optimal play by both sides. A drawn game always runs until
// the board is full.

#ifndef VISAVIS_ORACLE_HPP_
#define VISAVIS_ORACLE_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "visavis/errors.hpp"
#include "visavis/game.hpp"

namespace visavis {

// Lower bound on the plies left before `s` can become terminal: the mover
// needs 2m-1 plies to finish a line missing m pieces, the opponent 2m, and a
// draw needs every empty cell filled. Gravity is ignored, so it stays a bound
// for Connect Four.
inline int min_plies_to_end(const GameState& s) {
  const std::uint64_t mine = s.pieces(s.to_move());
  const std::uint64_t theirs = s.pieces(opponent(s.to_move()));
  int best = std::popcount(internal::full_board(s.game()) & ~s.occupied());
  for (std::uint64_t line : internal::win_lines(s.game())) {
    if (!(line & theirs))
      best = std::min(best, 2 * std::popcount(line & ~mine) - 1);
    if (!(line & mine))
      best = std::min(best, 2 * std::popcount(line & ~theirs));
  }
  return std::max(best, 0);
}

struct SolveBudget {
  std::int64_t max_nodes = 100'000'000;
  std::optional<int> max_plies;
};

struct SolveResult {
  int value = 0;  // mover-relative: +1 win, 0 draw, -1 loss
  std::vector<Action> best_actions;
  std::optional<int> plies_to_end;
};

inline constexpr int kDefaultEndgamePlies = 6;

class Solver {
 public:
  Solver() = default;

  // Terminal states short-circuit to their outcome. Throws BudgetExceeded
  // when the node budget runs out, or when max_plies is set and the value is
  // not decided within that many plies.
  SolveResult solve(const GameState& s, const SolveBudget& budget = {}) {
    nodes_ = 0;
    max_nodes_ = budget.max_nodes;
    const int horizon = budget.max_plies.value_or(kUnbounded);
    if (auto outcome = terminal_outcome(s))
      return {relative_to(outcome->z, s.to_move()), {}, 0};

    const auto root = search(s, horizon);
    if (!root)
      throw BudgetExceeded(BudgetExceeded::Kind::kPlies,
                           "value not decided within " +
                               std::to_string(horizon) + " plies");
    SolveResult result{root->value, {}, root->plies};
    for (Action a : legal_actions(s)) {
      const auto child = search(apply_action(s, a), horizon - 1);
      if (child && -child->value == root->value)
        result.best_actions.push_back(a);
    }
    return result;
  }

  // True iff the position's exact value is proven with at most k plies left.
  bool is_endgame(const GameState& s, int k, const SolveBudget& budget = {}) {
    SolveBudget bounded = budget;
    bounded.max_plies = k;
    try {
      const SolveResult r = solve(s, bounded);
      return r.plies_to_end && *r.plies_to_end <= k;
    } catch (const BudgetExceeded& e) {
      if (e.kind() == BudgetExceeded::Kind::kPlies) return false;
      throw;
    }
  }

  std::size_t memo_size() const { return memo_.size(); }
  std::int64_t nodes_last_solve() const { return nodes_; }

  // On-disk memo cache. Only proven entries are written; a missing or stale
  // cache never changes results.
  static constexpr char kCacheMagic[4] = {'V', 'V', 'O', 'C'};
  static constexpr std::uint32_t kCacheVersion = 1;

  void save_cache(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write oracle cache " + path.string());
    std::uint64_t count = 0;
    for (const auto& [key, e] : memo_) count += e.exact;
    out.write(kCacheMagic, 4);
    write_pod(out, kCacheVersion);
    write_pod(out, count);
    for (const auto& [key, e] : memo_) {
      if (!e.exact) continue;
      write_pod(out, key.p1);
      write_pod(out, key.p2);
      write_pod(out, e.value);
      write_pod(out, e.plies);
    }
  }

  // Returns false (and loads nothing) for a missing, foreign or damaged file.
  bool load_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t count = 0;
    if (!in.read(magic, 4) || std::memcmp(magic, kCacheMagic, 4) != 0)
      return false;
    if (!read_pod(in, version) || version != kCacheVersion) return false;
    if (!read_pod(in, count)) return false;
    std::vector<std::pair<StateKey, Entry>> loaded;
    loaded.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      StateKey key;
      Entry e;
      if (!read_pod(in, key.p1) || !read_pod(in, key.p2) ||
          !read_pod(in, e.value) || !read_pod(in, e.plies))
        return false;
      e.exact = 1;
      loaded.emplace_back(key, e);
    }
    for (const auto& [key, e] : loaded) memo_[key] = e;
    return true;
  }

 private:
  static constexpr int kUnbounded = 1 << 20;

  struct Score {
    int value;
    int plies;
  };

  struct Entry {
    std::int8_t value = 0;
    std::uint8_t plies = 0;
    std::uint8_t exact = 0;
    // For undecided entries: the value is not decided within this many plies.
    std::int32_t horizon = 0;
  };

  static bool better(const Score& a, const Score& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.value > 0) return a.plies < b.plies;
    if (a.value < 0) return a.plies > b.plies;
    return false;
  }

  std::optional<Score> search(const GameState& s, int horizon) {
    if (auto outcome = terminal_outcome(s))
      return Score{relative_to(outcome->z, s.to_move()), 0};
    if (horizon <= 0) return std::nullopt;
    if (horizon < kUnbounded && min_plies_to_end(s) > horizon)
      return std::nullopt;

    const StateKey key = state_key(s);
    if (auto it = memo_.find(key); it != memo_.end()) {
      const Entry& e = it->second;
      if (e.exact) {
        if (e.plies <= horizon) return Score{e.value, e.plies};
        return std::nullopt;
      }
      if (e.horizon >= horizon) return std::nullopt;
    }

    if (++nodes_ > max_nodes_)
      throw BudgetExceeded(BudgetExceeded::Kind::kNodes,
                           "node budget of " + std::to_string(max_nodes_) +
                               " exhausted");

    std::optional<Score> best;
    bool undecided_child = false;
    const GameShape sh = s.shape();
    for (Action a = 0; a < sh.num_actions; ++a) {
      if (target_cell(s, a) < 0) continue;
      const auto child = search(apply_action(s, a), horizon - 1);
      if (!child) {
        undecided_child = true;
        continue;
      }
      const Score mine{-child->value, child->plies + 1};
      if (!best || better(mine, *best)) best = mine;
    }

    // An undecided child can only hide a result beyond the horizon, so a
    // proven win still stands; anything else stays open.
    if (undecided_child && !(best && best->value > 0)) {
      Entry& e = memo_[key];
      e.exact = 0;
      e.horizon = std::max(e.horizon, horizon);
      return std::nullopt;
    }
    memo_[key] = Entry{static_cast<std::int8_t>(best->value),
                       static_cast<std::uint8_t>(best->plies), 1, 0};
    return best;
  }

  template <typename T>
  static void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <typename T>
  static bool read_pod(std::istream& in, T& v) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
  }

  std::unordered_map<StateKey, Entry, StateKeyHash> memo_;
  std::int64_t nodes_ = 0;
  std::int64_t max_nodes_ = 0;
};

// One-shot solve with a private memo table.
inline SolveResult solve(const GameState& s, const SolveBudget& budget = {}) {
  return Solver().solve(s, budget);
}

inline bool is_endgame(const GameState& s, int k = kDefaultEndgamePlies,
                       const SolveBudget& budget = {}) {
  return Solver().is_endgame(s, k, budget);
}

// Breadth-first closure of apply_action from the empty board, deduplicated on
// exact state identity. Terminal states are included but not expanded.
// Throws LimitExceeded once more than `limit` states are discovered.
inline std::vector<GameState> enumerate_reachable(GameId game,
                                                  std::size_t limit) {
  std::vector<GameState> states;
  std::unordered_set<StateKey, StateKeyHash> seen;
  states.push_back(initial_state(game));
  seen.insert(state_key(states.front()));
  for (std::size_t head = 0; head < states.size(); ++head) {
    const GameState s = states[head];
    for (Action a : legal_actions(s)) {
      GameState next = apply_action(s, a);
      if (!seen.insert(state_key(next)).second) continue;
      if (states.size() >= limit)
        throw LimitExceeded("more than " + std::to_string(limit) +
                            " reachable states");
      states.push_back(next);
    }
  }
  return states;
}

}  // namespace visavis

#endif  // VISAVIS_ORACLE_HPP_
