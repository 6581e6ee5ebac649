#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbsp/event_stream.hpp"
#include "bbsp/graph.hpp"
#include "bbsp/split_kernel.hpp"

namespace bbsp::tools {

// Everything that determines an experiment's output. Output paths and the
// thread count are deliberately not part of it.
struct ExperimentConfig {
  std::string command = "simulate";
  std::string graph = "line";  // line | cycle | complete | file:<path>
  int n = 4;
  std::string s = "1/1";
  int m = 4;
  std::uint64_t seed = 1;
  std::uint64_t replicas = 1;
  double t_end = 10.0;
  std::vector<double> times;
  std::vector<int> init;  // occupancy; empty means a default
  int marked = 1;         // mark location (mabb) or start vertex (cham)
  std::string round_length = "auto";
  std::string mode = "standard";
  std::string record = "ink";
  double eps = 0.25;
  double c_eps = 0.0;
  bool raw_rate = false;

  // Canonical key=value text, sorted by key.
  std::string to_text() const;
  static ExperimentConfig from_text(const std::string& text);
  // Reads key=value lines or a JSON object, by content.
  static ExperimentConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  std::string hash_hex() const;

  WeightedGraph make_graph() const;
  SplitParam param() const { return SplitParam::parse(s); }
  TimeScale scale() const { return raw_rate ? TimeScale::Raw : TimeScale::Canonical; }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::uint64_t fnv1a(const std::string& s);
std::string format_double(double x);

// Version string baked in at configure time.
const char* version_string();

}  // namespace bbsp::tools
