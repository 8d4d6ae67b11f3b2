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

// Monte-Carlo tree search with PUCT edge selection.
//
// Bookkeeping conventions:
//  * The first simulation only expands and evaluates the root; every later
//    simulation descends at least one edge. After n simulations the root's
//    edge visits sum to n - 1.
//  * Values are mover-relative. Q(s, a) is from the point of view of the
//    player moving at s, so a leaf value is negated once per ply on the way
//    back up.
//  * Terminal leaves back up their exact outcome, never a network value.

#ifndef VISAVIS_SEARCH_HPP_
#define VISAVIS_SEARCH_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "visavis/errors.hpp"
#include "visavis/evaluator.hpp"
#include "visavis/game.hpp"
#include "visavis/random.hpp"

namespace visavis {

struct SearchConfig {
  int n_sims = 25;
  double c = 2.0;
  double tau = 1.0;
  int tau_drop_ply = 5;
  // Dirichlet noise at the root; off unless explicitly requested.
  bool root_noise = false;
  double noise_alpha = 0.3;
  double noise_fraction = 0.25;

  static SearchConfig for_game(GameId game) {
    SearchConfig cfg;
    switch (game) {
      case GameId::kTicTacToe:
        cfg.tau_drop_ply = 5;
        break;
      case GameId::kTicTacToe4:
        cfg.tau_drop_ply = 9;
        break;
      case GameId::kConnectFour:
        cfg.n_sims = 50;
        cfg.tau_drop_ply = 21;
        break;
    }
    return cfg;
  }

  void validate() const {
    if (n_sims <= 0) throw ConfigInvalid("search.n_sims must be > 0");
    if (!(c > 0)) throw ConfigInvalid("search.c must be > 0");
    if (!(tau >= 0)) throw ConfigInvalid("search.tau must be >= 0");
    if (tau_drop_ply < 0) throw ConfigInvalid("search.tau_drop_ply must be >= 0");
  }
};

struct EdgeStats {
  Action action = 0;
  int n = 0;
  double w = 0.0;
  double q = 0.0;
  double p = 0.0;
  int child = -1;  // node index once the child has been reached
};

struct SearchNode {
  GameState state;
  bool expanded = false;
  bool terminal = false;
  double value = 0.0;  // network (or exact terminal) value, mover-relative
  std::vector<EdgeStats> edges;

  int visit_sum() const {
    int n = 0;
    for (const auto& e : edges) n += e.n;
    return n;
  }
};

class SearchTree {
 public:
  explicit SearchTree(const GameState& root) { nodes_.push_back({root}); }

  const SearchNode& root() const { return nodes_.front(); }
  const SearchNode& node(int index) const { return nodes_[index]; }
  std::size_t size() const { return nodes_.size(); }
  int simulations() const { return simulations_; }

  // Visit counts of the root over the full action space.
  std::vector<int> root_visits() const {
    std::vector<int> n(root().state.shape().num_actions, 0);
    for (const auto& e : root().edges) n[e.action] = e.n;
    return n;
  }

  // One line per expanded node: id, state, then action:N/W/Q/P per edge.
  std::string dump() const {
    std::ostringstream out;
    out.precision(6);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const SearchNode& nd = nodes_[i];
      out << i << " \"" << to_string(nd.state) << "\"";
      if (nd.terminal) out << " terminal=" << nd.value;
      for (const auto& e : nd.edges)
        out << ' ' << e.action << ':' << e.n << '/' << e.w << '/' << e.q << '/'
            << e.p;
      out << '\n';
    }
    return out.str();
  }

 private:
  template <Evaluator E>
  friend SearchTree run_search(const GameState&, E&, const SearchConfig&, Rng&);

  std::vector<SearchNode> nodes_;
  int simulations_ = 0;
};

// PUCT: argmax of Q + c * P * sqrt(sum_b N_b) / (1 + N). Ties go to the
// higher prior, then the lower action. Returns an index into `edges`.
inline std::size_t select_edge(const std::vector<EdgeStats>& edges, double c) {
  int total = 0;
  for (const auto& e : edges) total += e.n;
  const double sqrt_total = std::sqrt(static_cast<double>(total));
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const EdgeStats& e = edges[i];
    const double score = e.q + c * e.p * sqrt_total / (1.0 + e.n);
    if (score > best_score ||
        (score == best_score && e.p > edges[best].p)) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

namespace internal {

inline void add_dirichlet_noise(std::vector<EdgeStats>& edges,
                                const SearchConfig& cfg, Rng& rng) {
  std::gamma_distribution<double> gamma(cfg.noise_alpha, 1.0);
  std::vector<double> noise(edges.size());
  double sum = 0.0;
  for (double& x : noise) sum += (x = gamma(rng));
  if (sum <= 0) return;
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i].p = (1 - cfg.noise_fraction) * edges[i].p +
                 cfg.noise_fraction * noise[i] / sum;
}

}  // namespace internal

template <Evaluator E>
SearchTree run_search(const GameState& root_state, E& evaluator,
                      const SearchConfig& cfg, Rng& rng) {
  if (is_terminal(root_state))
    throw TerminalRoot("search started from a terminal state");
  SearchTree tree(root_state);
  auto& nodes = tree.nodes_;

  // Expands nodes[index] and returns its mover-relative value.
  auto expand = [&](int index) -> double {
    SearchNode& nd = nodes[index];
    if (auto outcome = terminal_outcome(nd.state)) {
      nd.terminal = true;
      nd.expanded = true;
      nd.value = relative_to(outcome->z, nd.state.to_move());
      return nd.value;
    }
    const Prediction pred = evaluator.evaluate(nd.state);
    nd.value = pred.v;
    for (Action a : legal_actions(nd.state))
      nd.edges.push_back({a, 0, 0.0, 0.0, pred.p[a], -1});
    nd.expanded = true;
    if (index == 0 && cfg.root_noise) internal::add_dirichlet_noise(nd.edges, cfg, rng);
    return nd.value;
  };

  std::vector<std::pair<int, std::size_t>> path;  // (node, edge)
  for (int sim = 0; sim < cfg.n_sims; ++sim) {
    ++tree.simulations_;
    if (!nodes[0].expanded) {
      expand(0);
      continue;
    }
    path.clear();
    int current = 0;
    double leaf_value = 0.0;
    while (true) {
      const std::size_t e = select_edge(nodes[current].edges, cfg.c);
      path.emplace_back(current, e);
      int child = nodes[current].edges[e].child;
      if (child < 0) {
        const GameState next =
            apply_action(nodes[current].state, nodes[current].edges[e].action);
        nodes.push_back({next});
        child = static_cast<int>(nodes.size()) - 1;
        nodes[current].edges[e].child = child;
        leaf_value = expand(child);
        break;
      }
      if (nodes[child].terminal) {
        leaf_value = nodes[child].value;
        break;
      }
      current = child;
    }
    // leaf_value is relative to the leaf's mover; the edge into the leaf
    // belongs to the other player.
    double v = -leaf_value;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      EdgeStats& edge = nodes[it->first].edges[it->second];
      edge.n += 1;
      edge.w += v;
      edge.q = edge.w / edge.n;
      v = -v;
    }
  }
  return tree;
}

// pi(a) = N(a)^(1/tau) / sum_b N(b)^(1/tau) over the full action space.
// tau == 0 is a deterministic argmax (lowest action on ties).
inline std::vector<double> policy_from_visits(const std::vector<int>& visits,
                                              const LegalMask& mask,
                                              double tau) {
  std::vector<double> pi(visits.size(), 0.0);
  int total = 0, best = -1;
  for (std::size_t a = 0; a < visits.size(); ++a) {
    if (!mask[a]) continue;
    total += visits[a];
    if (best < 0 || visits[a] > visits[best]) best = static_cast<int>(a);
  }
  if (tau <= 0.0) {
    if (best < 0) throw EmptyVisits("no legal action to choose from");
    pi[best] = 1.0;
    return pi;
  }
  if (total == 0) throw EmptyVisits("no root edge has been visited");
  // Normalise by the max first so large counts with small tau stay finite.
  const double max_n = visits[best];
  double sum = 0.0;
  for (std::size_t a = 0; a < visits.size(); ++a) {
    if (!mask[a] || visits[a] == 0) continue;
    pi[a] = std::pow(visits[a] / max_n, 1.0 / tau);
    sum += pi[a];
  }
  for (double& x : pi) x /= sum;
  return pi;
}

inline std::vector<double> search_policy(const SearchTree& tree, double tau) {
  return policy_from_visits(tree.root_visits(), legal_mask(tree.root().state),
                            tau);
}

}  // namespace visavis

#endif  // VISAVIS_SEARCH_HPP_
