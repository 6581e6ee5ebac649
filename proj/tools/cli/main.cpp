#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "bbsp/error.hpp"
#include "bbsp_tools/config.hpp"
#include "bbsp_tools/experiments.hpp"
#include "verify.hpp"

namespace {

using bbsp::tools::ExperimentConfig;

struct Flag {
  const char* name;  // command line flag
  const char* key;   // config key
  const char* help;
};

const Flag kFlags[] = {
    {"--graph", "graph", "line | cycle | complete | file:PATH"},
    {"--n", "n", "number of vertices"},
    {"--s", "s", "splitting parameter as B/A or an integer"},
    {"--m", "m", "number of particles (including the marked one)"},
    {"--seed", "seed", "stream seed"},
    {"--replicas", "replicas", "independent replicas"},
    {"--t-end", "t_end", "time horizon"},
    {"--times", "times", "comma separated sample times"},
    {"--init", "init", "comma separated initial occupancy"},
    {"--marked", "marked", "marked particle vertex / chameleon start vertex"},
    {"--T", "T", "round length, or auto"},
    {"--mode", "mode", "standard | modified"},
    {"--record", "record", "ink | full"},
    {"--eps", "eps", "mixing threshold"},
    {"--c-eps", "c_eps", "constant in the line lower bound"},
};

struct Common {
  std::map<std::string, std::string> values;
  std::string config_path, out_path, json_path;
  bool raw_rate = false;
  unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  for (const auto& f : kFlags) sub->add_option(f.name, c.values[f.key], f.help);
  sub->add_flag("--raw-rate", c.raw_rate, "use absolute edge rates instead of total rate 1");
  sub->add_option("--config", c.config_path, "key=value or JSON config file; flags override it");
  sub->add_option("--out", c.out_path, "CSV output file (default stdout)");
  sub->add_option("--json", c.json_path, "JSON summary file (default stderr)");
  sub->add_option("--threads", c.threads, "worker threads, 0 = all cores");
}

ExperimentConfig build_config(const std::string& command, CLI::App* sub, const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::from_file(c.config_path);
  cfg.command = command;
  for (const auto& f : kFlags)
    if (sub->count(f.name)) cfg.set(f.key, c.values.at(f.key));
  if (c.raw_rate) cfg.raw_rate = true;
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw bbsp::InvalidArgument("cannot write '" + path + "'");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beta-splitting particle processes: simulation, exact analysis and checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bbsp::tools::version_string());

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"simulate", "simulate the particle process, CSV of occupancies"},
      {"mabb", "simulate with a marked particle"},
      {"cham", "run the coloured (chameleon) process"},
      {"meet", "expected meeting times of two walks"},
      {"mix-exact", "exact TV curve and mixing time"},
      {"mix-mc", "Monte Carlo TV estimates next to the exact curve"},
      {"lower-bound", "line lower bound and its second-moment check"},
      {"bounds", "constants and the upper bound coefficient"},
      {"replay-appendix-c", "two-update coloured walkthrough on the 7-vertex line"},
  };
  std::map<std::string, Common> common;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : experiments) {
    subs[name] = app.add_subcommand(name, help);
    add_common(subs[name], common[name]);
  }

  auto* verify = app.add_subcommand("verify", "run the property and exactness checks");
  std::string level = "quick", verify_json, only;
  unsigned verify_threads = 0;
  verify->add_option("--level", level, "quick | full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--json", verify_json, "write the report as JSON");
  verify->add_option("--only", only, "run only checks whose id starts with this");
  verify->add_option("--threads", verify_threads, "worker threads, 0 = all cores");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      auto rep = bbsp::verify::run_verify(level == "full" ? bbsp::verify::Level::Full : bbsp::verify::Level::Quick,
                                          verify_threads, only, [](const bbsp::verify::CheckResult& r) {
                                            std::cout << bbsp::verify::format_line(r) << std::endl;
                                          });
      if (!verify_json.empty()) write_file(verify_json, rep.to_json().dump(2) + "\n");
      std::cout << (rep.ok() ? "all checks passed" : "some checks FAILED") << std::endl;
      return rep.ok() ? 0 : 1;
    }
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      const auto& c = common[name];
      auto cfg = build_config(name, sub, c);
      auto out = bbsp::tools::run_experiment(cfg, c.threads);
      if (c.out_path.empty()) std::cout << out.csv;
      else write_file(c.out_path, out.csv);
      std::string js = out.json.dump(2) + "\n";
      if (c.json_path.empty()) std::cerr << js;
      else write_file(c.json_path, js);
      if (name == "replay-appendix-c" && !out.json.value("ok", false)) return 1;
    }
  } catch (const bbsp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
