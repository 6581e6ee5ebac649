#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "bbsp/error.hpp"
#include "bbsp_tools/config.hpp"
#include "bbsp_tools/experiments.hpp"

using namespace bbsp;
using namespace bbsp::tools;

TEST(Config, TextRoundTrip) {
  ExperimentConfig c;
  c.set("command", "cham");
  c.set("graph", "cycle");
  c.set("n", "6");
  c.set("s", "6/4");
  c.set("times", "0.5,1,2.25");
  c.set("init", "1,0,2,0,0,0");
  c.set("T", "12.5");
  c.set("raw_rate", "yes");
  auto back = ExperimentConfig::from_text(c.to_text());
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.to_text(), c.to_text());
  EXPECT_EQ(back.hash_hex(), c.hash_hex());
  EXPECT_EQ(back.param(), SplitParam(2, 3));
  ExperimentConfig d = c;
  d.set("seed", "2");
  EXPECT_NE(d.hash_hex(), c.hash_hex());
}

TEST(Config, Rejections) {
  ExperimentConfig c;
  EXPECT_THROW(c.set("s", "1.5"), ParseError);
  EXPECT_THROW(c.set("n", "four"), ParseError);
  EXPECT_THROW(c.set("mode", "fast"), ParseError);
  EXPECT_THROW(c.set("bogus", "1"), ParseError);
  EXPECT_THROW(ExperimentConfig::from_text("n 4\n"), ParseError);
  c.set("init", "1,1");
  EXPECT_THROW(run_experiment(c), InvalidArgument);
}

TEST(Config, JsonFile) {
  std::string path = testing::TempDir() + "bbsp_cfg.json";
  {
    std::ofstream f(path);
    f << R"({"command": "simulate", "n": 3, "s": "2", "times": [1, 2], "raw_rate": false})";
  }
  auto c = ExperimentConfig::from_file(path);
  EXPECT_EQ(c.n, 3);
  EXPECT_EQ(c.param(), SplitParam(1, 2));
  EXPECT_EQ(c.times, (std::vector<double>{1, 2}));
  std::remove(path.c_str());
}

TEST(Experiments, MinimalRunEndToEnd) {
  ExperimentConfig c;
  c.set("n", "2");
  c.set("m", "2");
  c.set("t_end", "3");
  auto out = run_experiment(c);
  EXPECT_EQ(out.csv.substr(0, out.csv.find('\n')), "time,x1,x2");
  EXPECT_EQ(out.json["config_hash"], c.hash_hex());
}

TEST(Experiments, ByteIdenticalReruns) {
  for (const char* cmd : {"simulate", "mabb", "cham", "meet", "mix-exact", "lower-bound", "bounds"}) {
    ExperimentConfig c;
    c.set("command", cmd);
    c.set("n", "4");
    c.set("m", "3");
    c.set("seed", "9");
    auto a = run_experiment(c, 1), b = run_experiment(c, 3);
    EXPECT_EQ(a.csv, b.csv) << cmd;
    EXPECT_EQ(a.json.dump(), b.json.dump()) << cmd;
  }
  ExperimentConfig c;
  c.set("command", "cham");
  c.set("replicas", "1000");
  auto a = run_experiment(c, 1), b = run_experiment(c, 4);
  EXPECT_EQ(a.csv, b.csv);
}

TEST(Experiments, ChamSummary) {
  ExperimentConfig c;
  c.set("command", "cham");
  c.set("n", "2");
  c.set("m", "3");
  c.set("init", "1,1");
  c.set("replicas", "4000");
  c.set("t_end", "100000");
  auto out = run_experiment(c);
  EXPECT_DOUBLE_EQ(out.json["absorbed_fraction"].get<double>(), 1.0);
  double f = out.json["fill_fraction"];
  EXPECT_NEAR(f, 0.5, 4 * std::sqrt(0.25 / 4000));
  EXPECT_DOUBLE_EQ(out.json["expected_fill_probability"].get<double>(), 0.5);
}

TEST(Replay, WalkthroughOnSevenVertexLine) {
  auto r = replay_walkthrough();
  ASSERT_EQ(r.steps.size(), 3u);
  EXPECT_TRUE(r.ok());
  const auto& s0 = r.steps[0];
  EXPECT_EQ(s0.red, (std::vector<int>{0, 0, 1, 0, 0, 0, 0}));
  EXPECT_EQ(s0.marked, 3);
  EXPECT_EQ(s0.red_labels, (std::vector<int>{3}));
  EXPECT_EQ(r.steps[1].black, s0.black);
  EXPECT_NE(r.steps[1].white_labels[0], s0.white_labels[0]);
  EXPECT_EQ(r.steps[2].pink, (std::vector<int>{0, 1, 1, 0, 0, 0, 0}));
  EXPECT_EQ(r.steps[2].marked, 2);
}
