#include "verify.hpp"

#include <chrono>
#include <cstdio>
#include <exception>

#include "bbsp_tools/config.hpp"
#include "checks.hpp"

namespace bbsp::verify {

const std::vector<SplitParam>& s_grid() {
  static const std::vector<SplitParam> grid = {{2, 1}, {1, 1}, {2, 3}, {1, 2}, {1, 5}, {1, 40}};
  return grid;
}

std::string fmtd(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

CheckResult max_error_result(std::string id, std::string name, double err, double tol, std::string detail) {
  CheckResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  r.metric = err;
  r.threshold = tol;
  r.metric_kind = "max_abs_error";
  r.pass = err <= tol;
  r.detail = std::move(detail);
  return r;
}

CheckResult violation_result(std::string id, std::string name, long long violations, long long trials,
                             std::string detail) {
  CheckResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  r.metric = static_cast<double>(violations);
  r.threshold = 0;
  r.metric_kind = "violations";
  r.pass = violations == 0 && trials > 0;
  r.detail = std::to_string(trials) + " cases" + (detail.empty() ? "" : "; " + detail);
  return r;
}

CheckResult z_result(std::string id, std::string name, double z, double bound, std::string detail) {
  CheckResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  r.metric = z;
  r.threshold = bound;
  r.metric_kind = "max_abs_z";
  r.pass = z <= bound;
  r.detail = std::move(detail);
  return r;
}

bool VerifyReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass && !c.informational) return false;
  return !checks.empty();
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["version"] = tools::version_string();
  j["level"] = level == Level::Full ? "full" : "quick";
  j["ok"] = ok();
  auto arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"id", c.id},
                   {"name", c.name},
                   {"status", c.informational ? "info" : (c.pass ? "pass" : "fail")},
                   {"metric", c.metric},
                   {"metric_kind", c.metric_kind},
                   {"threshold", c.threshold},
                   {"detail", c.detail},
                   {"seconds", c.seconds}});
  }
  j["checks"] = arr;
  return j;
}

std::string format_line(const CheckResult& c) {
  const char* status = c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL");
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-4s %-3s %-58s %s=%s (limit %s) %.1fs", status, c.id.c_str(), c.name.c_str(),
                c.metric_kind.c_str(), fmtd(c.metric).c_str(), fmtd(c.threshold).c_str(), c.seconds);
  std::string s = buf;
  if (!c.detail.empty()) s += "  [" + c.detail + "]";
  return s;
}

std::string VerifyReport::table() const {
  std::string s;
  for (const auto& c : checks) s += format_line(c) + "\n";
  return s;
}

VerifyReport run_verify(Level level, unsigned threads, const std::string& only, const Progress& progress) {
  Ctx ctx{level, threads};
  std::vector<CheckEntry> all;
  for (auto part : {kernel_checks(), chameleon_checks(), mixing_checks()}) all.insert(all.end(), part.begin(), part.end());
  VerifyReport rep;
  rep.level = level;
  for (const auto& e : all) {
    if (!only.empty() && std::string(e.id).rfind(only, 0) != 0) continue;
    auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = e.run(ctx);
    } catch (const std::exception& ex) {
      r.id = e.id;
      r.name = "check raised an error";
      r.pass = false;
      r.metric_kind = "error";
      r.detail = ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) progress(r);
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace bbsp::verify
