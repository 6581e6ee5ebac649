#pragma once

#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

namespace bbsp::verify {

enum class Level { Quick, Full };

struct CheckResult {
  std::string id;    // "1a", "3f", ...
  std::string name;  // what is checked
  bool pass = false;
  bool informational = false;  // reported, never fails the suite
  double metric = 0.0;         // max error, violation count or |z|
  double threshold = 0.0;
  std::string metric_kind;     // "abs_error", "violations", "z", ...
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  Level level = Level::Full;
  std::vector<CheckResult> checks;
  bool ok() const;
  nlohmann::json to_json() const;
  std::string table() const;
};

// One table row.
std::string format_line(const CheckResult& c);

using Progress = std::function<void(const CheckResult&)>;

// Runs every check at the given level. `only` restricts to ids with that
// prefix ("3" runs 3a..3g); empty runs all.
VerifyReport run_verify(Level level, unsigned threads = 0, const std::string& only = "", const Progress& progress = {});

}  // namespace bbsp::verify
