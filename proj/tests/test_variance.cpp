#include <random>

#include <gtest/gtest.h>

#include "ipcw/variance.hpp"
#include "oracles.hpp"

using namespace ipcw;

TEST(Variance, NormalQuantile) {
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-13);
    EXPECT_NEAR(normal_quantile(0.75), 0.6744897501960817, 1e-13);
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
    for (double p : {1e-10, 0.01, 0.2, 0.6, 0.99, 1 - 1e-9}) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-13 + 1e-12 * p);
    EXPECT_EQ(normal_quantile(0.0), -INFINITY);
    EXPECT_EQ(normal_quantile(1.0), INFINITY);
    EXPECT_THROW(normal_quantile(1.5), std::invalid_argument);
}

TEST(Variance, WaldIntervalExample) {
    Eigen::VectorXd beta(1), se(1);
    beta << -1.0 / 3.0;
    se << 0.05;
    const auto ci = wald_ci(beta, se);
    EXPECT_NEAR(ci[0].lower, -0.431, 5e-4);
    EXPECT_NEAR(ci[0].upper, -0.235, 5e-4);
    EXPECT_TRUE(ci[0].contains(-0.3));
    EXPECT_FALSE(ci[0].contains(-0.2));
}

TEST(Variance, SandwichMatchesTwoGroupHc0) {
    std::mt19937_64 rng(41);
    std::bernoulli_distribution group(0.5);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 150;
        Eigen::MatrixXd x(n, 2);
        std::vector<double> xs(n), ys(n);
        for (int i = 0; i < n; ++i) {
            xs[i] = group(rng) ? 1.0 : 0.0;
            ys[i] = 0.5 + xs[i] * (1.0 + noise(rng)) + noise(rng);
            x(i, 0) = 1.0;
            x(i, 1) = xs[i];
        }
        const auto fit = solve(x, {}, uncensored_inputs(ys));
        const auto est = sandwich(fit);
        const auto [v0, v1] = oracle_ref::two_group_hc0(xs, ys);
        EXPECT_NEAR(est.covariance(0, 0), v0, 1e-5 * v0);
        EXPECT_NEAR(est.covariance(1, 1), v1, 1e-5 * v1);
        EXPECT_NEAR(est.se_beta[1], std::sqrt(v1 / n), 1e-8);
    }
}

TEST(Variance, SandwichIsSymmetricPsd) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        auto records = oracle_ref::random_records(rng, 90, 3, 2, 2);
        Dataset data(records, OutcomeSpec::failure(1, 3.0), 2);
        for (auto approach : {Approach::Individual, Approach::Outcome, Approach::Pseudo}) {
            const auto fit = fit_approach(approach, data, {Link::Logistic, AChoice::Covariate});
            const auto est = sandwich(fit);
            EXPECT_TRUE(est.covariance.isApprox(est.covariance.transpose(), 1e-14));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.covariance);
            EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10 * eig.eigenvalues().cwiseAbs().maxCoeff());
        }
    }
}
