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

// Command-line front end.
//
//   visavis train  --game ttt3 --games 20000 --seed 1 [--vis on] [--visa on]
//   visavis eval   --checkpoint run/final.vvis --mode exhaustive|match|
//                  adversarial|misalign
//   visavis solve  --game ttt3 --state "X../.O./... X"
//   visavis detect --checkpoint run/final.vvis --n 1000
//
// Exit status: 0 success, 2 configuration or input error, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "run_manifest.hpp"
#include "visavis/analysis.hpp"
#include "visavis/config.hpp"
#include "visavis/oracle.hpp"
#include "visavis/selfplay.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace visavis {
namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

bool parse_switch(const std::string& flag, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigInvalid(flag + " expects on/off, got '" + v + "'");
}

// Applies "a.b.c=value" to a JSON object; the value is parsed as JSON when
// possible and kept as a string otherwise.
void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigInvalid("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null())
      throw ConfigInvalid("--set " + path + ": '" + key + "' is not a section");
    start = dot + 1;
  }
}

struct TrainArgs {
  std::string config_file;
  std::string game;
  std::optional<std::int64_t> games;
  std::optional<std::int64_t> seed;
  std::string vis, visa;
  std::string out;
  std::vector<std::string> overrides;
};

int cmd_train(const TrainArgs& a) {
  json j = json::object();
  if (!a.config_file.empty()) {
    std::ifstream in(a.config_file);
    if (!in) throw ConfigInvalid("cannot read config file " + a.config_file);
    j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigInvalid(a.config_file + " is not valid JSON");
  }
  if (!a.game.empty()) {
    parse_game(a.game);
    j["profile"] = a.game;
  }
  if (a.games) j["num_games"] = *a.games;
  if (a.seed) {
    if (*a.seed < 0) throw ConfigInvalid("--seed must be >= 0");
    j["seed"] = *a.seed;
  }
  if (!a.vis.empty()) j["vis"]["enabled"] = parse_switch("--vis", a.vis);
  if (!a.visa.empty()) j["visa"]["enabled"] = parse_switch("--visa", a.visa);
  if (!a.out.empty()) j["output_dir"] = a.out;
  for (const auto& o : a.overrides) apply_override(j, o);
  TrainRunConfig cfg = config_from_json(j);
  if (cfg.output_dir.empty())
    cfg.output_dir = "runs/" + std::string(game_name(cfg.game)) + "_seed" +
                     std::to_string(cfg.seed);
  if (fs::exists(fs::path(cfg.output_dir) / tools::kManifestName))
    throw ConfigInvalid("run directory " + cfg.output_dir +
                        " already holds a finished run");

  tools::RunManifest manifest("train", to_json(cfg), cfg.seed);
  const TrainResult r = train(cfg, [&](const MetricsRow& m) {
    std::cerr << "games " << m.games_played << "  loss " << m.loss_total
              << "  steps " << m.train_steps << '\n';
  });
  const fs::path dir(cfg.output_dir);
  for (const auto& entry : fs::directory_iterator(dir / "checkpoints"))
    manifest.add_output(entry.path());
  manifest.add_output(dir / "final.vvis");
  manifest.add_output(dir / "metrics.jsonl");
  manifest.add_output(dir / "visits.jsonl");
  manifest.set("games_played", r.games_played);
  manifest.set("train_steps", r.train_steps);
  if (r.halted) manifest.set("halted", *r.halted);
  manifest.write(dir);
  std::cout << ordered_json{{"run_dir", dir.string()},
                            {"games_played", r.games_played},
                            {"train_steps", r.train_steps},
                            {"halted", r.halted ? ordered_json(*r.halted)
                                                : ordered_json(nullptr)}}
                   .dump()
            << '\n';
  return r.halted ? kExitRuntime : 0;
}

struct EvalArgs {
  std::string checkpoint;
  std::string mode = "exhaustive";
  std::string visits;
  std::string out;
  int n = 1000;
  bool first = false, second = false;
  std::uint64_t seed = 0;
  int sims = 0;
  int endgame_plies = kDefaultEndgamePlies;
  std::int64_t max_nodes = 0;
};

int cmd_eval(const EvalArgs& a) {
  static const std::set<std::string> kModes = {"exhaustive", "match",
                                               "adversarial", "misalign"};
  if (!kModes.count(a.mode))
    throw ConfigInvalid("unknown eval mode '" + a.mode + "'");
  if (a.n <= 0) throw ConfigInvalid("--n must be > 0");
  const fs::path ckpt(a.checkpoint);
  const Network<float> net = load_checkpoint(ckpt);
  const GameId game = game_of(net.config());
  SearchConfig search = SearchConfig::for_game(game);
  if (a.sims > 0) search.n_sims = a.sims;
  const fs::path out = a.out.empty() ? ckpt.parent_path() / ("eval_" + a.mode)
                                     : fs::path(a.out);
  if (fs::exists(out / tools::kManifestName))
    throw ConfigInvalid("report directory " + out.string() +
                        " already holds a finished evaluation");
  fs::create_directories(out);

  ordered_json settings{{"mode", a.mode},        {"game", game_name(game)},
                        {"n", a.n},              {"n_sims", search.n_sims},
                        {"c", search.c},         {"endgame_plies", a.endgame_plies}};
  tools::RunManifest manifest("eval", settings, a.seed);
  manifest.add_input(ckpt);
  ordered_json summary;
  Rng rng(a.seed);

  if (a.mode == "exhaustive") {
    fs::path visits_path = a.visits.empty() ? ckpt.parent_path() / "visits.jsonl"
                                            : fs::path(a.visits);
    VisitTable visits;
    if (fs::exists(visits_path)) {
      visits = VisitTable::load(visits_path);
      manifest.add_input(visits_path);
    } else if (!a.visits.empty()) {
      throw ConfigInvalid("visit table " + a.visits + " not found");
    }
    EvalSettings es;
    es.search = search;
    if (a.max_nodes > 0) es.budget.max_nodes = a.max_nodes;
    const auto records = exhaustive_eval(net, game, visits, es, a.seed);
    write_jsonl(out / "records.jsonl", records);
    manifest.add_output(out / "records.jsonl");
    summary = {{"summary", to_json(summarize(records))},
               {"generalization", to_json(generalization_report(records))}};
  } else if (a.mode == "match") {
    const bool both = a.first == a.second;
    summary = ordered_json::object();
    for (bool first : {true, false}) {
      if (!both && first != a.first) continue;
      const MatchScore m = oracle_match(net, game, a.n, first, search, rng);
      summary[first ? "agent_first" : "agent_second"] = {
          {"wins", m.wins}, {"draws", m.draws}, {"losses", m.losses},
          {"non_loss_rate", m.non_loss_rate()}};
    }
  } else if (a.mode == "adversarial") {
    DetectSettings ds;
    ds.search = DetectSettings::with_root_noise(search);
    ds.endgame_plies = a.endgame_plies;
    if (a.max_nodes > 0) ds.budget.max_nodes = a.max_nodes;
    const AdversarialReport r = adversarial_detect(net, game, a.n, ds, rng);
    write_jsonl(out / "adversarial.jsonl", r.records);
    manifest.add_output(out / "adversarial.jsonl");
    summary = {{"states", r.records.size()},     {"games", r.games},
               {"moves", r.moves},               {"illegal_moves", r.illegal_moves},
               {"endgame_states", r.endgame_states},
               {"budget_skipped", r.budget_skipped}};
  } else {  // misalign: states reached by n self-play games, no oracle needed
    NetworkEvaluator evaluator(net);
    PlayConfig play{search, {}};
    std::map<std::string, GameState> states;
    for (int g = 0; g < a.n; ++g)
      for (const auto& step : play_game(evaluator, play, rng, game).steps)
        states.emplace(to_string(step.state), step.state);
    std::vector<EvalRecord> records;
    std::vector<double> kls;
    for (const auto& [key, s] : states) {
      EvalRecord r;
      r.state_key = key;
      const Prediction pred = evaluator.evaluate(s);
      r.predicted_v = pred.v;
      const auto pi_v = value_policy(s, evaluator);
      Rng srng(derive_seed(a.seed, {StateKeyHash{}(state_key(s))}));
      const auto pi_p = search_policy(run_search(s, evaluator, search, srng), 1.0);
      r.misalignment = misalignment(pi_p, pi_v);
      r.misalignment_raw = misalignment(pred.p, pi_v);
      records.push_back(r);
    }
    std::ofstream f(out / "misalign.jsonl");
    double mean = 0, mean_raw = 0;
    for (const auto& r : records) {
      f << ordered_json{{"state", r.state_key},
                        {"predicted_v", r.predicted_v},
                        {"misalignment", r.misalignment},
                        {"misalignment_raw", r.misalignment_raw}}
               .dump()
        << '\n';
      mean += r.misalignment / records.size();
      mean_raw += r.misalignment_raw / records.size();
    }
    f.close();
    manifest.add_output(out / "misalign.jsonl");
    summary = {{"states", records.size()},
               {"mean_misalignment", mean},
               {"mean_misalignment_raw", mean_raw}};
  }
  {
    std::ofstream f(out / "summary.json");
    f << summary.dump(2) << '\n';
  }
  manifest.add_output(out / "summary.json");
  manifest.write(out);
  std::cout << summary.dump() << '\n';
  return 0;
}

struct SolveArgs {
  std::string game;
  std::string state;
  std::int64_t max_nodes = 0;
  int max_plies = -1;
};

int cmd_solve(const SolveArgs& a) {
  const GameId game = parse_game(a.game);
  const GameState s = parse_state(game, a.state);
  SolveBudget budget;
  if (a.max_nodes > 0) budget.max_nodes = a.max_nodes;
  if (a.max_plies >= 0) budget.max_plies = a.max_plies;
  if (game == GameId::kConnectFour && !budget.max_plies)
    budget.max_plies = 12;  // full-board solving is out of reach
  const SolveResult r = solve(s, budget);
  std::cout << ordered_json{{"state", to_string(s)},
                            {"value", r.value},
                            {"best_actions", r.best_actions},
                            {"plies_to_end", r.plies_to_end
                                                 ? ordered_json(*r.plies_to_end)
                                                 : ordered_json(nullptr)}}
                   .dump()
            << '\n';
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"AlphaZero with value-informed selection and augmentation"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "self-play training run");
  train_cmd->add_option("--config", train_args.config_file, "JSON config file");
  train_cmd->add_option("--game", train_args.game, "profile: ttt3, ttt4 or c4");
  train_cmd->add_option("--games", train_args.games, "number of self-play games");
  train_cmd->add_option("--seed", train_args.seed, "root seed");
  train_cmd->add_option("--vis", train_args.vis, "value-informed selection on/off");
  train_cmd->add_option("--visa", train_args.visa, "symmetric augmentation on/off");
  train_cmd->add_option("--out", train_args.out, "run directory");
  train_cmd->add_option("--set", train_args.overrides, "config override key=value");

  EvalArgs eval_args;
  auto add_eval_options = [&](CLI::App* cmd, bool with_mode) {
    cmd->add_option("--checkpoint", eval_args.checkpoint, "checkpoint file")->required();
    if (with_mode)
      cmd->add_option("--mode", eval_args.mode,
                      "exhaustive, match, adversarial or misalign");
    cmd->add_option("--n", eval_args.n, "games (match, adversarial, misalign)");
    cmd->add_option("--visits", eval_args.visits, "visit table (exhaustive)");
    cmd->add_option("--out", eval_args.out, "report directory");
    cmd->add_option("--seed", eval_args.seed, "seed");
    cmd->add_option("--sims", eval_args.sims, "search simulations (default: profile)");
    cmd->add_option("--endgame-plies", eval_args.endgame_plies, "endgame horizon");
    cmd->add_option("--max-nodes", eval_args.max_nodes, "oracle node budget per solve");
  };
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  add_eval_options(eval_cmd, true);
  eval_cmd->add_flag("--first", eval_args.first, "match: agent moves first");
  eval_cmd->add_flag("--second", eval_args.second, "match: agent moves second");
  auto* detect_cmd =
      app.add_subcommand("detect", "adversarial state detection (eval --mode adversarial)");
  add_eval_options(detect_cmd, false);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "exact value of a position");
  solve_cmd->add_option("--game", solve_args.game, "ttt3, ttt4 or c4")->required();
  solve_cmd->add_option("--state", solve_args.state, "position text")->required();
  solve_cmd->add_option("--max-nodes", solve_args.max_nodes, "node budget");
  solve_cmd->add_option("--max-plies", solve_args.max_plies, "ply horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*train_cmd) return cmd_train(train_args);
    if (*eval_cmd) return cmd_eval(eval_args);
    if (*detect_cmd) {
      eval_args.mode = "adversarial";
      return cmd_eval(eval_args);
    }
    if (*solve_cmd) return cmd_solve(solve_args);
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace
}  // namespace visavis

int main(int argc, char** argv) { return visavis::run(argc, argv); }
