#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "ipcw/censoring.hpp"
#include "oracles.hpp"

using namespace ipcw;

namespace {

ObservedRecord rec(double time, int type, int stratum = 0) { return ObservedRecord{time, type, {1.0}, stratum}; }

Dataset four_records(double t) {
    return Dataset({rec(1, 1), rec(2, 0), rec(3, 1), rec(4, 0)}, OutcomeSpec::survival(t), 1);
}

}  // namespace

TEST(Censoring, HandDerivedFourRecords) {
    const auto fit = fit_censoring(four_records(3.5));
    const auto& c = fit[0];
    ASSERT_EQ(c.jumps(), 2u);
    EXPECT_EQ(c.jump_times, (std::vector<double>{2, 4}));
    EXPECT_DOUBLE_EQ(c.hazard_increments[0], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.hazard_increments[1], 1.0);
    EXPECT_DOUBLE_EQ(c.survival_values[0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.survival_values[1], 0.0);
    EXPECT_EQ(c.at_risk_counts, (std::vector<std::size_t>{3, 1}));
    EXPECT_DOUBLE_EQ(c.survival(2.0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.survival_left(2.0), 1.0);
    EXPECT_DOUBLE_EQ(c.survival_left(4.0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.survival(5.0), 0.0);
}

TEST(Censoring, HandDerivedWeights) {
    const auto data = four_records(3.5);
    const auto w = compute_weights(data, fit_censoring(data));
    ASSERT_EQ(w.size(), 4u);
    EXPECT_DOUBLE_EQ(w[0], 1.0);
    EXPECT_DOUBLE_EQ(w[1], 0.0);
    EXPECT_DOUBLE_EQ(w[2], 1.5);
    EXPECT_DOUBLE_EQ(w[3], 1.5);
}

TEST(Censoring, EventsTakePriorityOnTies) {
    const std::vector<double> times{2, 2, 3};
    const std::vector<int> types{1, 0, 1};
    const auto c = fit_curve(times, types);
    ASSERT_EQ(c.jumps(), 1u);
    EXPECT_DOUBLE_EQ(c.hazard_increments[0], 0.5);
    EXPECT_DOUBLE_EQ(c.survival_left(2.0), 1.0);
    EXPECT_DOUBLE_EQ(c.survival_left(3.0), 0.5);
    Dataset data({rec(2, 1), rec(2, 0), rec(3, 1)}, OutcomeSpec::survival(2.5), 1);
    const auto fit = fit_censoring(data);
    EXPECT_DOUBLE_EQ(fit[0].survival_left(3.0), 0.5);
}

TEST(Censoring, NoCensoringGivesUnitWeights) {
    Dataset data({rec(1, 1), rec(2, 2), rec(3, 1)}, OutcomeSpec::survival(2.5), 1);
    const auto fit = fit_censoring(data);
    EXPECT_EQ(fit[0].jumps(), 0u);
    for (double w : compute_weights(data, fit)) EXPECT_EQ(w, 1.0);
}

TEST(Censoring, ZeroDenominatorRaisesPositivity) {
    // A fitted curve never reaches 0 before an observed exit, so use a
    // hand-made one.
    Dataset data({rec(1, 1), rec(3, 1)}, OutcomeSpec::survival(4.0), 1);
    StratifiedCensoring fake;
    CensoringCurve c;
    c.jump_times = {2.0};
    c.hazard_increments = {1.0};
    c.survival_values = {0.0};
    c.at_risk_counts = {1};
    c.censoring_counts = {1};
    fake.curves.push_back(c);
    fake.stratum_sizes = {2};
    try {
        compute_weights(data, fake);
        FAIL();
    } catch (const PositivityViolation& e) {
        EXPECT_EQ(e.stratum(), 0);
        EXPECT_DOUBLE_EQ(e.time(), 3.0);
    }
}

TEST(Censoring, MatchesDefinitionOnRandomData) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto records = oracle_ref::random_records(rng, 40, 1, 3, 2);
        Dataset data(records, OutcomeSpec::failure(1, 3.25), 3);
        const auto fit = fit_censoring(data);
        for (int z = 0; z < 3; ++z) {
            const auto obs = oracle_ref::stratum_obs(data, z);
            const auto& c = fit[z];
            // Product-limit identity and monotonicity.
            double g = 1.0, prev = 1.0;
            for (std::size_t k = 0; k < c.jumps(); ++k) {
                g *= 1.0 - c.hazard_increments[k];
                EXPECT_NEAR(c.survival_values[k], g, 1e-15);
                EXPECT_LE(c.survival_values[k], prev);
                EXPECT_GE(c.survival_values[k], 0.0);
                prev = c.survival_values[k];
            }
            for (double s = 0.25; s < 7.0; s += 0.25) {
                EXPECT_NEAR(c.survival(s), oracle_ref::censoring_survival(obs, s, false), 1e-14);
                EXPECT_NEAR(c.survival_left(s), oracle_ref::censoring_survival(obs, s, true), 1e-14);
            }
        }
        const auto w = compute_weights(data, fit);
        const auto ref = oracle_ref::weights(data);
        for (std::size_t i = 0; i < w.size(); ++i) {
            EXPECT_NEAR(w[i], ref[i], 1e-12);
            EXPECT_GE(w[i], 0.0);
            if (data.observed(i)) EXPECT_GE(w[i], 1.0);
            else EXPECT_EQ(w[i], 0.0);
        }
    }
}

TEST(Censoring, MeanWeightIsOnePerStratum) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto records = oracle_ref::random_records(rng, 60, 1, 2, 2, 0.3, 10);
        Dataset data(records, OutcomeSpec::survival(2.75), 2);
        const auto w = compute_weights(data, fit_censoring(data));
        for (int z = 0; z < 2; ++z) {
            double sum = 0.0, count = 0.0;
            double max_time = 0.0;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (data[i].stratum != z) continue;
                sum += w[i];
                count += 1;
                max_time = std::max(max_time, data[i].exit_time);
            }
            if (max_time >= 2.75) EXPECT_NEAR(sum / count, 1.0, 1e-12);
        }
    }
}

TEST(Censoring, PermutationInvariant) {
    std::mt19937_64 rng(3);
    auto records = oracle_ref::random_records(rng, 50, 1, 2);
    Dataset data(records, OutcomeSpec::survival(3.0), 2);
    const auto w = compute_weights(data, fit_censoring(data));
    std::vector<std::size_t> perm(records.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ObservedRecord> shuffled;
    for (auto i : perm) shuffled.push_back(records[i]);
    Dataset other(shuffled, OutcomeSpec::survival(3.0), 2);
    const auto w2 = compute_weights(other, fit_censoring(other));
    for (std::size_t k = 0; k < perm.size(); ++k) EXPECT_DOUBLE_EQ(w2[k], w[perm[k]]);
}

TEST(Censoring, LeaveOneOutMatchesRefit) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto records = oracle_ref::random_records(rng, 30, 1, 2, 2);
        Dataset data(records, OutcomeSpec::failure(2, 2.75), 2);
        for (std::size_t i = 0; i < data.size(); ++i) {
            LeaveOneOutWeights loo;
            try {
                loo = leave_one_out_weights(data, i);
            } catch (const PositivityViolation&) {
                continue;
            }
            const auto ref = oracle_ref::loo_weights(data, i);
            EXPECT_EQ(loo.stratum, data[i].stratum);
            EXPECT_EQ(std::count(loo.members.begin(), loo.members.end(), i), 0);
            for (std::size_t m = 0; m < loo.members.size(); ++m) {
                EXPECT_NEAR(loo.weights[m], ref[loo.members[m]], 1e-12);
            }
        }
    }
}

TEST(Censoring, LeaveOneOutNeedsTwoRecords) {
    Dataset data({rec(1, 1, 0), rec(2, 0, 1), rec(3, 1, 1)}, OutcomeSpec::survival(2.5), 2);
    EXPECT_THROW(leave_one_out_weights(data, 0), StratumTooSmall);
    EXPECT_NO_THROW(leave_one_out_weights(data, 1));
}
