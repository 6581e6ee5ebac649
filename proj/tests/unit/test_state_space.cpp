#include <gtest/gtest.h>

#include <cmath>

#include "bbsp/analysis.hpp"
#include "bbsp/error.hpp"
#include "bbsp/graph.hpp"
#include "bbsp/state_space.hpp"

using namespace bbsp;

TEST(StateSpace, EnumerationOrder) {
  auto s = enumerate_states(2, 2);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], (Occupancy{2, 0}));
  EXPECT_EQ(s[1], (Occupancy{1, 1}));
  EXPECT_EQ(s[2], (Occupancy{0, 2}));
  auto t = enumerate_states(3, 1);
  EXPECT_EQ(t, (std::vector<Occupancy>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
}

TEST(StateSpace, CountsAndRanks) {
  for (int n = 1; n <= 5; ++n)
    for (int m = 0; m <= 6; ++m) {
      auto s = enumerate_states(n, m);
      EXPECT_EQ(static_cast<double>(s.size()), count_states(n, m));
      StateIndex idx(n, m);
      EXPECT_EQ(idx.size(), s.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(total(s[i]), m);
        EXPECT_EQ(idx.rank(s[i]), i);
        if (i) EXPECT_TRUE(s[i - 1] > s[i]);
      }
    }
}

TEST(StateSpace, Cap) { EXPECT_THROW(enumerate_states(30, 30, 1000), StateSpaceTooLarge); }

TEST(StateSpace, StationaryExample) {
  auto s = enumerate_states(2, 2);
  auto pi = stationary_dist(s, SplitParam(2, 1));
  EXPECT_NEAR(pi[0], 3.0 / 8, 1e-15);
  EXPECT_NEAR(pi[1], 1.0 / 4, 1e-15);
  EXPECT_NEAR(pi[2], 3.0 / 8, 1e-15);
}

TEST(StateSpace, DetailedBalance) {
  for (auto p : {SplitParam(2, 1), SplitParam(1, 1), SplitParam(2, 3), SplitParam(1, 5), SplitParam(1, 40)}) {
    for (auto [n, m] : {std::pair{2, 2}, {2, 3}, {3, 3}, {4, 3}}) {
      for (const auto& g : {make_line(n), make_complete(n)}) {
        ExactChain c(g, p, m);
        const auto& pi = c.stationary();
        for (std::size_t i = 0; i < c.size(); ++i)
          for (std::size_t j = 0; j < c.size(); ++j)
            EXPECT_NEAR(pi[i] * c.rate(i, j), pi[j] * c.rate(j, i), 1e-13);
      }
    }
  }
}
