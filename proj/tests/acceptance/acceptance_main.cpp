// Runs the full check suite and prints one line per criterion.
#include <cstdio>
#include <iostream>
#include <map>

#include "verify.hpp"

int main() {
  using namespace bbsp::verify;
  auto rep = run_verify(Level::Full, 0, "", [](const CheckResult& r) { std::cout << format_line(r) << std::endl; });
  std::map<std::string, std::pair<bool, int>> crit;  // criterion -> (all pass, checks)
  for (const auto& c : rep.checks) {
    auto& e = crit.try_emplace(c.id.substr(0, 1), true, 0).first->second;
    e.first = e.first && (c.pass || c.informational);
    ++e.second;
  }
  std::cout << "\n";
  for (const auto& [id, e] : crit)
    std::cout << (e.first ? "PASS" : "FAIL") << " criterion " << id << " (" << e.second << " checks)\n";
  std::cout << (rep.ok() ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << std::endl;
  return rep.ok() ? 0 : 1;
}
