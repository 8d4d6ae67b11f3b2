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

// Trains a baseline and a VISA-VIS agent on tic-tac-toe with the same budget
// and compares them against the exact solver.
//
//   compare_ttt [games] [seed]

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "visavis/analysis.hpp"

namespace {

using namespace visavis;

void report(const char* name, const TrainRunConfig& cfg) {
  const TrainResult run = train(cfg);
  Rng rng(derive_seed(cfg.seed, {1}));
  const MatchScore first = oracle_match(run.net, cfg.game, 200, true, cfg.search, rng);
  const MatchScore second = oracle_match(run.net, cfg.game, 200, false, cfg.search, rng);
  EvalSettings es;
  es.search = cfg.search;
  const auto records = exhaustive_eval(run.net, cfg.game, run.visits, es, cfg.seed);
  const Summary s = summarize(records);
  const GeneralizationReport g = generalization_report(records);
  std::cout << std::fixed << std::setprecision(3) << std::setw(9) << name
            << "  non-loss first " << first.non_loss_rate() << "  second "
            << second.non_loss_rate() << "  mean error " << s.mean_error
            << "  misalignment " << s.mean_misalignment << "  unvisited error "
            << g.generalization_error.value_or(0.0) << " (" << g.bins[0].count
            << " states)\n";
}

}  // namespace

int main(int argc, char** argv) {
  TrainRunConfig cfg = TrainRunConfig::for_game(GameId::kTicTacToe);
  cfg.num_games = argc > 1 ? std::atoll(argv[1]) : 5000;
  cfg.seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  report("baseline", cfg);
  cfg.vis.enabled = true;
  cfg.visa.enabled = true;
  report("VISA-VIS", cfg);
}
