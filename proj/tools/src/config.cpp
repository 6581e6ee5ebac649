#include "bbsp_tools/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "bbsp/error.hpp"

#ifndef BBSP_VERSION
#define BBSP_VERSION "unknown"
#endif

namespace bbsp::tools {

const char* version_string() { return BBSP_VERSION; }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Shortest %g form that reads back to the same double.
std::string format_double(double x) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>) out += format_double(v[i]);
    else out += std::to_string(v[i]);
  }
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ParseError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ParseError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ParseError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

template <class T, class F>
std::vector<T> split_list(const std::string& v, F conv) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<T>(conv(trim(item))));
  return out;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  if (key == "command") command = v;
  else if (key == "graph") graph = v;
  else if (key == "n") n = static_cast<int>(to_int(key, v));
  else if (key == "s") {
    s = SplitParam::parse(v).str();
  } else if (key == "m") m = static_cast<int>(to_int(key, v));
  else if (key == "seed") seed = static_cast<std::uint64_t>(to_int(key, v));
  else if (key == "replicas") {
    long long r = to_int(key, v);
    if (r < 1) throw ParseError("replicas must be positive");
    replicas = static_cast<std::uint64_t>(r);
  } else if (key == "t_end") t_end = to_double(key, v);
  else if (key == "times") times = split_list<double>(v, [&](const std::string& x) { return to_double(key, x); });
  else if (key == "init") init = split_list<int>(v, [&](const std::string& x) { return to_int(key, x); });
  else if (key == "marked") marked = static_cast<int>(to_int(key, v));
  else if (key == "T") {
    if (v != "auto") to_double(key, v);
    round_length = v;
  } else if (key == "mode") {
    if (v != "standard" && v != "modified") throw ParseError("mode must be standard or modified");
    mode = v;
  } else if (key == "record") {
    if (v != "ink" && v != "full") throw ParseError("record must be ink or full");
    record = v;
  } else if (key == "eps") eps = to_double(key, v);
  else if (key == "c_eps") c_eps = to_double(key, v);
  else if (key == "raw_rate") raw_rate = to_bool(key, v);
  else throw ParseError("unknown config key '" + key + "'");
}

std::string ExperimentConfig::to_text() const {
  std::map<std::string, std::string> kv{
      {"command", command},
      {"graph", graph},
      {"n", std::to_string(n)},
      {"s", SplitParam::parse(s).str()},
      {"m", std::to_string(m)},
      {"seed", std::to_string(seed)},
      {"replicas", std::to_string(replicas)},
      {"t_end", format_double(t_end)},
      {"times", join(times)},
      {"init", join(init)},
      {"marked", std::to_string(marked)},
      {"T", round_length},
      {"mode", mode},
      {"record", record},
      {"eps", format_double(eps)},
      {"c_eps", format_double(c_eps)},
      {"raw_rate", raw_rate ? "true" : "false"},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  std::string text = buf.str();
  std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad JSON config: ") + e.what());
    }
    ExperimentConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& val = it.value();
      std::string sval;
      if (val.is_string()) sval = val.get<std::string>();
      else if (val.is_array()) {
        for (std::size_t i = 0; i < val.size(); ++i) {
          if (i) sval += ",";
          sval += val[i].is_number_integer() ? std::to_string(val[i].get<long long>()) : format_double(val[i].get<double>());
        }
      } else if (val.is_boolean()) sval = val.get<bool>() ? "true" : "false";
      else if (val.is_number_integer()) sval = std::to_string(val.get<long long>());
      else if (val.is_number()) sval = format_double(val.get<double>());
      else throw ParseError("unsupported JSON value for key '" + it.key() + "'");
      c.set(it.key(), sval);
    }
    return c;
  }
  return from_text(text);
}

std::string ExperimentConfig::hash_hex() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_text())));
  return buf;
}

WeightedGraph ExperimentConfig::make_graph() const {
  if (graph == "line") return make_line(n);
  if (graph == "cycle") return make_cycle(n);
  if (graph == "complete") return make_complete(n);
  if (graph.rfind("file:", 0) == 0) return load_graph_file(graph.substr(5));
  throw ParseError("unknown graph '" + graph + "' (line, cycle, complete or file:<path>)");
}

}  // namespace bbsp::tools
