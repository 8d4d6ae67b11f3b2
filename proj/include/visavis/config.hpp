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

// Run configuration as JSON. A config names a game profile (ttt3, ttt4, c4)
// whose defaults are loaded first; every other key overrides one field.
// Unknown keys and ill-typed values are rejected with the offending path.
//
//   {
//     "profile": "ttt3",
//     "num_games": 20000,
//     "seed": 1,
//     "net": {"hidden_width": 128, "depth": 2, "learning_rate": 0.001},
//     "search": {"n_sims": 25, "c": 2.0, "tau_drop_ply": 5},
//     "vis": {"enabled": true, "epsilon": 0.5, "lookahead_sign": "negated"},
//     "visa": {"enabled": true, "transforms": ["rot90", "mirror+invert"]}
//   }

#ifndef VISAVIS_CONFIG_HPP_
#define VISAVIS_CONFIG_HPP_

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "visavis/errors.hpp"
#include "visavis/game.hpp"
#include "visavis/selfplay.hpp"

namespace visavis {

namespace internal {

class JsonReader {
 public:
  JsonReader(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigInvalid(where() + "expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigInvalid("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw ConfigInvalid("");
        if constexpr (std::is_unsigned_v<T>)
          if (!it->is_number_unsigned() && it->get<std::int64_t>() < 0)
            throw ConfigInvalid("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw ConfigInvalid("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw ConfigInvalid("");
      }
      out = it->get<T>();
    } catch (const std::exception&) {
      throw ConfigInvalid(where(key) + "has the wrong type (" +
                          std::string(it->type_name()) + ")");
    }
  }

  std::optional<JsonReader> child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return JsonReader(*it, path_ + key + ".");
  }

  const nlohmann::json* raw(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigInvalid(where(key) + "unknown key");
  }

  std::string where(const std::string& key = "") const {
    return "config field '" + path_ + key + "': ";
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace internal

inline const char* lookahead_sign_name(LookaheadSign s) {
  return s == LookaheadSign::kNegated ? "negated" : "literal";
}

inline GameId parse_game(const std::string& name) {
  if (auto g = game_from_name(name)) return *g;
  throw ConfigInvalid("unknown game '" + name + "' (expected ttt3, ttt4 or c4)");
}

// The game a network was built for, recovered from its input shape.
inline GameId game_of(const NetConfig& net) {
  for (GameId g : kAllGames) {
    const GameShape sh = shape_of(g);
    if (sh.rows == net.rows && sh.cols == net.cols &&
        sh.num_actions == net.action_count)
      return g;
  }
  throw ShapeMismatch("network shape matches no known game");
}

inline TrainRunConfig config_from_json(const nlohmann::json& j) {
  using internal::JsonReader;
  JsonReader root(j, "");
  std::string profile = "ttt3";
  root.read("profile", profile);
  TrainRunConfig cfg;
  try {
    cfg = TrainRunConfig::for_game(parse_game(profile));
  } catch (const ConfigInvalid& e) {
    throw ConfigInvalid(root.where("profile") + e.what());
  }
  root.read("num_games", cfg.num_games);
  root.read("batch_size", cfg.batch_size);
  root.read("seed", cfg.seed);
  root.read("games_per_round", cfg.games_per_round);
  root.read("replay_reuse", cfg.replay_reuse);
  root.read("replay_capacity", cfg.replay_capacity);
  root.read("metrics_every", cfg.metrics_every);
  root.read("checkpoint_every", cfg.checkpoint_every);
  root.read("output_dir", cfg.output_dir);
  if (auto net = root.child("net")) {
    net->read("hidden_width", cfg.net.hidden_width);
    net->read("depth", cfg.net.depth);
    net->read("learning_rate", cfg.net.learning_rate);
    net->read("l2_lambda", cfg.net.l2_lambda);
    net->reject_unknown();
  }
  if (auto s = root.child("search")) {
    s->read("n_sims", cfg.search.n_sims);
    s->read("c", cfg.search.c);
    s->read("tau", cfg.search.tau);
    s->read("tau_drop_ply", cfg.search.tau_drop_ply);
    s->read("root_noise", cfg.search.root_noise);
    s->read("noise_alpha", cfg.search.noise_alpha);
    s->read("noise_fraction", cfg.search.noise_fraction);
    s->reject_unknown();
  }
  if (auto v = root.child("vis")) {
    v->read("enabled", cfg.vis.enabled);
    v->read("epsilon", cfg.vis.epsilon);
    std::string sign = lookahead_sign_name(cfg.vis.lookahead_sign);
    v->read("lookahead_sign", sign);
    if (sign == "negated")
      cfg.vis.lookahead_sign = LookaheadSign::kNegated;
    else if (sign == "literal")
      cfg.vis.lookahead_sign = LookaheadSign::kLiteral;
    else
      throw ConfigInvalid(v->where("lookahead_sign") +
                          "expected 'negated' or 'literal', got '" + sign + "'");
    v->read("value_branch_policy_target", cfg.vis.value_branch_policy_target);
    v->reject_unknown();
  }
  if (auto v = root.child("visa")) {
    v->read("enabled", cfg.visa.enabled);
    if (const nlohmann::json* ts = v->raw("transforms")) {
      if (!ts->is_array())
        throw ConfigInvalid(v->where("transforms") + "expected an array");
      cfg.visa.transforms.clear();
      for (const auto& t : *ts) {
        const auto parsed = t.is_string() ? transform_from_name(t.get<std::string>())
                                          : std::nullopt;
        if (!parsed)
          throw ConfigInvalid(v->where("transforms") + "unknown transform " + t.dump());
        cfg.visa.transforms.push_back(*parsed);
      }
    }
    v->reject_unknown();
  }
  root.reject_unknown();

  const GameShape sh = shape_of(cfg.game);
  cfg.net.rows = sh.rows;
  cfg.net.cols = sh.cols;
  cfg.net.action_count = sh.num_actions;
  cfg.validate();
  return cfg;
}

inline nlohmann::ordered_json to_json(const TrainRunConfig& c) {
  nlohmann::ordered_json transforms = nlohmann::ordered_json::array();
  for (const Transform& t : c.visa.transforms) transforms.push_back(transform_name(t));
  return {
      {"profile", game_name(c.game)},
      {"num_games", c.num_games},
      {"batch_size", c.batch_size},
      {"seed", c.seed},
      {"games_per_round", c.games_per_round},
      {"replay_reuse", c.replay_reuse},
      {"replay_capacity", c.replay_capacity},
      {"metrics_every", c.metrics_every},
      {"checkpoint_every", c.checkpoint_every},
      {"output_dir", c.output_dir},
      {"net",
       {{"hidden_width", c.net.hidden_width},
        {"depth", c.net.depth},
        {"learning_rate", c.net.learning_rate},
        {"l2_lambda", c.net.l2_lambda}}},
      {"search",
       {{"n_sims", c.search.n_sims},
        {"c", c.search.c},
        {"tau", c.search.tau},
        {"tau_drop_ply", c.search.tau_drop_ply},
        {"root_noise", c.search.root_noise},
        {"noise_alpha", c.search.noise_alpha},
        {"noise_fraction", c.search.noise_fraction}}},
      {"vis",
       {{"enabled", c.vis.enabled},
        {"epsilon", c.vis.epsilon},
        {"lookahead_sign", lookahead_sign_name(c.vis.lookahead_sign)},
        {"value_branch_policy_target", c.vis.value_branch_policy_target}}},
      {"visa", {{"enabled", c.visa.enabled}, {"transforms", transforms}}},
  };
}

inline TrainRunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigInvalid(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace visavis

#endif  // VISAVIS_CONFIG_HPP_
