#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "ipcw/simulate.hpp"

using namespace ipcw;
using namespace ipcw::sim;

TEST(Rng, CounterStreamsAreReproducibleAndDistinct) {
    CounterRng a(1, 5, StreamTag::EventTime), b(1, 5, StreamTag::EventTime), c(1, 6, StreamTag::EventTime),
        d(1, 5, StreamTag::CensorTime);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
        EXPECT_NE(x, d());
    }
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = a.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Stats, Helpers) {
    const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
    EXPECT_DOUBLE_EQ(stats::mean(v), 31.0 / 8.0);
    EXPECT_DOUBLE_EQ(stats::median(v), 3.5);
    EXPECT_NEAR(stats::variance(v), 52.875 / 7.0, 1e-12);
    EXPECT_DOUBLE_EQ(stats::mad(v), 2.0);
    EXPECT_TRUE(std::isnan(stats::variance({1.0})));
}

TEST(Simulate, ScenarioOneSample) {
    ScenarioConfig config;
    config.n = 4000;
    config.censoring = CensoringLaw::point_mass(0.2);
    const auto sample = generate(config, 0);
    const auto& data = sample.data;
    ASSERT_EQ(data.size(), 4000u);
    double x1 = 0, censored = 0, y1 = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        x1 += data[i].covariates[1];
        if (data[i].exit_type == 0) {
            ++censored;
            EXPECT_DOUBLE_EQ(data[i].exit_time, 0.2);
        }
        if (data[i].covariates[1] == 1.0) y1 += sample.true_outcomes[i];
        if (data.observed(i)) EXPECT_EQ(data.outcome(i), sample.true_outcomes[i]);
    }
    EXPECT_NEAR(x1 / 4000, 0.5, 0.03);
    EXPECT_NEAR(y1 / x1, 0.5, 0.04);
    // P(C = 0.2 and T > 0.2) = 0.5 * (1 - 0.2 (p0 + p1) / 2).
    EXPECT_NEAR(censored / 4000, 0.5 * (1 - 0.2 * (1.0 / 6 + 0.5) / 2), 0.03);
}

TEST(Simulate, ScenarioTwoAndThreeShapes) {
    ScenarioConfig two;
    two.scenario = Scenario::II;
    two.n = 500;
    two.strata_k = 4;
    const auto s2 = generate(two, 3);
    EXPECT_EQ(s2.data.dimension(), 4u);
    EXPECT_EQ(s2.data.stratum_count(), 4);
    for (double y : s2.true_outcomes) {
        EXPECT_GT(y, 0.0);
        EXPECT_LE(y, 1.0);
    }

    ScenarioConfig three;
    three.scenario = Scenario::III;
    three.per_stratum = 12;
    three.strata_factors = 3;
    const auto s3 = generate(three, 0);
    EXPECT_EQ(s3.data.size(), 384u);
    EXPECT_EQ(s3.data.dimension(), 6u);
    EXPECT_EQ(s3.data.stratum_count(), 8);
    for (auto size : s3.data.stratum_sizes()) EXPECT_EQ(size, 48u);
    for (const auto& r : s3.data.records()) EXPECT_LT(r.exit_time, 5.0 / 3.0 + 1e-12);
}

TEST(Simulate, TruthValues) {
    const auto t1 = truth_for(Scenario::I);
    ASSERT_TRUE(t1);
    EXPECT_DOUBLE_EQ((*t1)[1], 1.0 / 3.0);
    EXPECT_FALSE(truth_for(Scenario::II));
    EXPECT_DOUBLE_EQ((*truth_for(Scenario::III))[0], std::log(0.1));
}

TEST(Simulate, ResultsIndependentOfThreadCount) {
    ScenarioConfig config;
    config.n = 200;
    config.replications = 12;
    config.seed = 99;
    config.threads = 1;
    const auto one = run_replications(config);
    config.threads = 3;
    const auto three = run_replications(config);
    for (std::size_t r = 0; r < one.size(); ++r) {
        for (std::size_t a = 0; a < 4; ++a) {
            ASSERT_EQ(one[r].fits[a].converged, three[r].fits[a].converged);
            if (one[r].fits[a].converged) EXPECT_EQ(one[r].fits[a].beta, three[r].fits[a].beta);
        }
    }
}

TEST(Simulate, SummaryFields) {
    ScenarioConfig config;
    config.n = 400;
    config.replications = 40;
    config.censoring = CensoringLaw::point_mass(0.8);
    const auto summary = run_campaign(config);
    for (const auto& a : summary.approaches) {
        EXPECT_EQ(a.convergence_pct, 100.0);
        ASSERT_EQ(a.coefficients.size(), 2u);
        EXPECT_NEAR(a.coefficients[1].mean_beta, 1.0 / 3.0, 0.05);
        EXPECT_GT(a.coefficients[1].scaled_mc_variance, 0.0);
        EXPECT_GE(a.coefficients[1].coverage_pct, 70.0);
    }
}

TEST(Simulate, ConfigValidation) {
    ScenarioConfig config;
    config.censoring = CensoringLaw::point_mass(1.5);
    EXPECT_THROW(config.validate(), std::invalid_argument);
    config = {};
    config.scenario = Scenario::III;
    config.strata_factors = 6;
    EXPECT_THROW(config.validate(), std::invalid_argument);
    config = {};
    config.replications = 0;
    EXPECT_THROW(config.validate(), std::invalid_argument);
}
