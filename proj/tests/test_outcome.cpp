#include <random>

#include <gtest/gtest.h>

#include "ipcw/outcome.hpp"

using namespace ipcw;

TEST(Outcome, DisplayedExamples) {
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::survival(1.0), 2.0, 1), 1.0);
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::restricted_time(1.0), 0.4, 1), 0.4);
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::time_lost(1, 1.0), 0.4, 2), 0.0);
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::failure(1, 1.0), 0.4, 1), 1.0);
}

TEST(Outcome, CensoredBeforeHorizonIsUnobserved) {
    EXPECT_THROW(evaluate_outcome(OutcomeSpec::survival(1.0), 0.5, 0), OutcomeUnobserved);
    EXPECT_FALSE(outcome_observed(1.0, 0.5, 0));
}

TEST(Outcome, ExitExactlyAtHorizon) {
    // Censored at t: observed, nothing happened by t.
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::survival(1.0), 1.0, 0), 1.0);
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::restricted_time(1.0), 1.0, 0), 1.0);
    // Failure at t counts as failure by t.
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::failure(1, 1.0), 1.0, 1), 1.0);
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::survival(1.0), 1.0, 1), 0.0);
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::time_lost(1, 1.0), 1.0, 1), 0.0);
}

TEST(Outcome, FailureAfterHorizonIsSurvival) {
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::failure(1, 1.0), 3.0, 1), 0.0);
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::time_lost(1, 2.0), 3.0, 1), 0.0);
    EXPECT_EQ(evaluate_outcome(OutcomeSpec::restricted_time(2.0), 3.0, 1), 2.0);
}

TEST(Outcome, InvalidSpecsRejected) {
    EXPECT_THROW(OutcomeSpec::survival(0.0), std::invalid_argument);
    EXPECT_THROW(OutcomeSpec::failure(0, 1.0), std::invalid_argument);
    EXPECT_THROW(parse_outcome_kind("hazard"), std::invalid_argument);
}

TEST(Outcome, PartitionIdentitiesOnRandomRecords) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> time(0.01, 3.0), horizon(0.1, 2.5);
    std::uniform_int_distribution<int> type(0, 3);
    int checked = 0;
    for (int trial = 0; trial < 5000; ++trial) {
        const double t = horizon(rng);
        const double x = trial % 10 == 0 ? t : time(rng);  // exercise ties with t
        const int d = type(rng);
        if (!outcome_observed(t, x, d)) continue;
        ++checked;
        double risk = 0.0, lost = 0.0;
        for (int j = 1; j <= 3; ++j) {
            risk += evaluate_outcome(OutcomeSpec::failure(j, t), x, d);
            lost += evaluate_outcome(OutcomeSpec::time_lost(j, t), x, d);
        }
        EXPECT_DOUBLE_EQ(evaluate_outcome(OutcomeSpec::survival(t), x, d) + risk, 1.0);
        EXPECT_NEAR(evaluate_outcome(OutcomeSpec::restricted_time(t), x, d) + lost, t, 1e-14);
        for (auto spec : {OutcomeSpec::survival(t), OutcomeSpec::failure(2, t), OutcomeSpec::restricted_time(t),
                          OutcomeSpec::time_lost(3, t)}) {
            const double y = evaluate_outcome(spec, x, d);
            EXPECT_GE(y, 0.0);
            EXPECT_LE(y, std::max(1.0, t));
        }
    }
    EXPECT_GT(checked, 1000);
}
