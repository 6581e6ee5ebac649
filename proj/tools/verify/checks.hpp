#pragma once

#include <string>
#include <vector>

#include "bbsp/split_kernel.hpp"
#include "verify.hpp"

namespace bbsp::verify {

struct Ctx {
  Level level = Level::Full;
  unsigned threads = 0;
  bool full() const { return level == Level::Full; }
  // Full count or the reduced count used by the quick level.
  std::size_t count(std::size_t full_count, std::size_t quick_count) const { return full() ? full_count : quick_count; }
};

// s in {1/2, 1, 3/2, 2, 5, 40}
const std::vector<SplitParam>& s_grid();

using Check = CheckResult (*)(const Ctx&);

struct CheckEntry {
  const char* id;
  Check run;
};

std::vector<CheckEntry> kernel_checks();
std::vector<CheckEntry> chameleon_checks();
std::vector<CheckEntry> mixing_checks();

// Shared helpers.
std::string fmtd(double x, int digits = 4);
CheckResult max_error_result(std::string id, std::string name, double err, double tol, std::string detail = {});
CheckResult violation_result(std::string id, std::string name, long long violations, long long trials,
                             std::string detail = {});
CheckResult z_result(std::string id, std::string name, double z, double bound, std::string detail = {});

}  // namespace bbsp::verify
