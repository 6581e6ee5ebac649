#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "bbsp_tools/config.hpp"

namespace bbsp::tools {

struct ExperimentOutput {
  std::string csv;
  nlohmann::json json;
};

// Runs the experiment named by cfg.command. `threads` only affects speed.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

// One line of the two-update walkthrough replay.
struct ReplayStep {
  int update = 0;
  double time = 0.0;
  Edge edge;
  std::vector<int> black, red, pink, white;
  std::vector<int> red_labels, white_labels;  // vertex per label, 0 = none
  int marked = 0;
};

struct ReplayResult {
  std::vector<ReplayStep> steps;  // initial state plus one entry per update
  bool blacks_unchanged_first = false;
  bool one_labelled_white_moved_first = false;
  bool marked_ends_on_2 = false;
  bool pair_pinkened_on_2_and_3 = false;
  bool ok() const {
    return blacks_unchanged_first && one_labelled_white_moved_first && marked_ends_on_2 && pair_pinkened_on_2_and_3;
  }
};

ReplayResult replay_walkthrough();

}  // namespace bbsp::tools
