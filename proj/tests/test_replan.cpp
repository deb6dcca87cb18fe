#include <gtest/gtest.h>

#include "wpnav/replan.hpp"

using namespace wpnav;

TEST(ShouldReplan, RuleBasedTruthTable) {
    const auto rule = ReplanPolicy::rule_based(0.3);
    // distance clause: strict inequality at the threshold
    EXPECT_TRUE(should_replan(0.31, 0, 10, rule, 1));
    EXPECT_FALSE(should_replan(0.30, 0, 10, rule, 1));
    EXPECT_FALSE(should_replan(0.29, 0, 10, rule, 1));
    // index clause: strictly more than half the waypoints
    EXPECT_TRUE(should_replan(0.1, 6, 10, rule, 1));
    EXPECT_FALSE(should_replan(0.1, 5, 10, rule, 1));
    EXPECT_FALSE(should_replan(0.1, 4, 10, rule, 1));
    // either clause suffices
    EXPECT_TRUE(should_replan(0.31, 6, 10, rule, 1));
    EXPECT_TRUE(should_replan(0.31, 4, 10, rule, 1));
    EXPECT_TRUE(should_replan(0.0, 7, 10, rule, 1));
    EXPECT_FALSE(should_replan(0.0, 0, 10, rule, 1000));  // step count is irrelevant
}

TEST(ShouldReplan, BoundaryCombinations) {
    const auto rule = ReplanPolicy::rule_based(0.3);
    const double ds[] = {0.29, 0.3, 0.31};
    const int nnis[] = {4, 5, 6};
    for (double d : ds) {
        for (int k : nnis) {
            const bool expect = (d > 0.3) || (k > 5);
            EXPECT_EQ(should_replan(d, k, 10, rule, 3), expect) << "d=" << d << " nni=" << k;
        }
    }
}

TEST(ShouldReplan, FixedInterval) {
    const auto fixed = ReplanPolicy::fixed(5);
    EXPECT_FALSE(should_replan(10.0, 10, 10, fixed, 4));
    EXPECT_TRUE(should_replan(0.0, 0, 10, fixed, 5));
    EXPECT_TRUE(should_replan(0.0, 0, 10, fixed, 6));
}

TEST(ShouldReplan, OddWaypointCount) {
    const auto rule = ReplanPolicy::rule_based(0.3);
    // count 9: trigger strictly above 4.5, i.e. nni >= 5
    EXPECT_FALSE(should_replan(0.0, 4, 9, rule, 1));
    EXPECT_TRUE(should_replan(0.0, 5, 9, rule, 1));
}

TEST(ReplanPolicy, NamesAndParsing) {
    EXPECT_EQ(ReplanPolicy::rule_based().name(), "rule_based");
    EXPECT_EQ(ReplanPolicy::fixed(7).name(), "fixed_7");
    auto p = replan_policy_from_string("fixed_12");
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(p->mode, ReplanPolicy::Mode::fixed_interval);
    EXPECT_EQ(p->interval, 12);
    EXPECT_TRUE(replan_policy_from_string("rule_based").has_value());
    EXPECT_FALSE(replan_policy_from_string("sometimes").has_value());
}
