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

#ifndef VISAVIS_EVALUATOR_HPP_
#define VISAVIS_EVALUATOR_HPP_

#include <concepts>
#include <cstddef>
#include <functional>
#include <unordered_map>
#include <utility>

#include "visavis/game.hpp"
#include "visavis/neural.hpp"

namespace visavis {

// Anything that maps a non-terminal state to (policy, mover-relative value).
template <typename E>
concept Evaluator = requires(E& e, const GameState& s) {
  { e.evaluate(s) } -> std::convertible_to<Prediction>;
};

// Evaluates states with a shared, read-only network. Each worker owns its
// own instance; the memo only short-circuits recomputation and returns the
// exact values a fresh forward pass would produce.
class NetworkEvaluator {
 public:
  explicit NetworkEvaluator(const Network<float>& net, bool use_cache = true,
                            std::size_t max_entries = 1 << 20)
      : net_(&net), use_cache_(use_cache), max_entries_(max_entries) {}

  const Prediction& evaluate(const GameState& s) {
    if (!use_cache_) {
      scratch_ = forward(*net_, s);
      return scratch_;
    }
    const StateKey key = state_key(s);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
    if (cache_.size() >= max_entries_) cache_.clear();
    ++misses_;
    return cache_.emplace(key, forward(*net_, s)).first->second;
  }

  double value(const GameState& s) { return evaluate(s).v; }

  const Network<float>& network() const { return *net_; }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  const Network<float>* net_;
  bool use_cache_;
  std::size_t max_entries_;
  std::unordered_map<StateKey, Prediction, StateKeyHash> cache_;
  Prediction scratch_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

// Adapts any callable GameState -> Prediction (handy in tests).
template <typename F>
class FunctionEvaluator {
 public:
  explicit FunctionEvaluator(F fn) : fn_(std::move(fn)) {}
  Prediction evaluate(const GameState& s) { return fn_(s); }

 private:
  F fn_;
};

// Uniform policy over legal actions, constant value.
struct UniformEvaluator {
  double value = 0.0;
  Prediction evaluate(const GameState& s) const {
    const auto mask = legal_mask(s);
    Prediction p{std::vector<double>(mask.size(), 0.0), value};
    int n = 0;
    for (auto m : mask) n += m;
    for (std::size_t a = 0; a < mask.size(); ++a)
      if (mask[a]) p.p[a] = 1.0 / n;
    return p;
  }
};

}  // namespace visavis

#endif  // VISAVIS_EVALUATOR_HPP_
