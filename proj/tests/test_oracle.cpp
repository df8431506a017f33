#include <gtest/gtest.h>

#include "ipcw/oracle.hpp"

using namespace ipcw::oracle;

namespace {

ExampleParams params(double p, double q, double s, Eigen::Vector2d a = {0.0, 1.0}) {
    ExampleParams out;
    out.p = p;
    out.q = q;
    out.s = s;
    out.a = a;
    return out;
}

}  // namespace

TEST(Oracle, ConditionalMeanExample) { EXPECT_NEAR(moments(0.5, 1.0 / 6.0, 0.5).f1, 0.2, 1e-15); }

TEST(Oracle, SlopeVariancesAtReferencePoints) {
    const auto lo = sigma_report(params(0.5, 1.0 / 6.0, 0.2));
    EXPECT_NEAR(lo.sigma_uncensored, 0.7778, 1e-4);
    EXPECT_NEAR(lo.sigma[Ind], 1.4587, 1e-4);
    EXPECT_NEAR(lo.sigma[Out], 1.7683, 1e-4);
    EXPECT_NEAR(lo.sigma[Pse], 1.4522, 1e-4);
    EXPECT_NEAR(lo.sigma_prime[Ind], 1.4593, 1e-4);
    EXPECT_NEAR(lo.sigma_prime[Out], 1.8444, 1e-4);
    EXPECT_NEAR(lo.sigma_prime[Pse], 1.5397, 1e-4);
    const auto hi = sigma_report(params(0.5, 1.0 / 6.0, 0.8));
    EXPECT_NEAR(hi.sigma[Ind], 1.1596, 1e-4);
    EXPECT_NEAR(hi.sigma[Out], 1.0384, 1e-4);
    EXPECT_NEAR(hi.sigma[Pse], 1.0089, 1e-4);
    EXPECT_NEAR(hi.sigma_prime[Ind], 1.1704, 1e-4);
    EXPECT_NEAR(hi.sigma_prime[Out], 1.0444, 1e-4);
    EXPECT_NEAR(hi.sigma_prime[Pse], 1.0202, 1e-4);
}

TEST(Oracle, ClosedFormsMatchEnumeration) {
    for (const Eigen::Vector2d a : {Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0, 0.0)}) {
        for (double p = 0.05; p < 1.0; p += 0.15) {
            for (double q = 0.05; q < 1.0; q += 0.15) {
                for (double s = 0.05; s < 1.0; s += 0.1) {
                    const auto pr = params(p, q, s, a);
                    const auto d = phi_differences(pr);
                    const auto r = sigma_report(pr);
                    EXPECT_NEAR(d.pse_out, r.phi[Pse] - r.phi[Out], 1e-12);
                    EXPECT_NEAR(d.ind_out, r.phi[Ind] - r.phi[Out], 1e-12);
                    EXPECT_NEAR(d.pse_ind, r.phi[Pse] - r.phi[Ind], 1e-12);
                }
            }
        }
    }
}

TEST(Oracle, InterceptSignThresholds) {
    const Eigen::Vector2d a(1.0, 0.0);
    for (double p = 0.05; p < 1.0; p += 0.1) {
        for (double q = 0.05; q < 1.0; q += 0.1) {
            for (double s = 0.02; s < 1.0; s += 0.07) {
                const auto d = phi_differences(params(p, q, s, a));
                const double ind_cut = 1.0 / (2.0 - q);
                if (std::abs(s - ind_cut) > 1e-9) EXPECT_EQ(d.ind_out < 0.0, s < ind_cut);
                const double pse_cut = (3.0 * q - p) / (q * (p + q));
                if (std::abs(s - pse_cut) > 1e-9) EXPECT_EQ(d.pse_out < 0.0, s < pse_cut);
            }
        }
    }
}

TEST(Oracle, SlopePseudoNeverWorseThanOutcome) {
    for (double p = 0.05; p < 1.0; p += 0.1)
        for (double q = 0.05; q < 1.0; q += 0.1)
            for (double s = 0.05; s < 1.0; s += 0.1) EXPECT_LT(phi_differences(params(p, q, s)).pse_out, 0.0);
}

TEST(Oracle, SandwichLimitDominates) {
    for (const Eigen::Vector2d a : {Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, 1.0)}) {
        for (double s = 0.05; s < 1.0; s += 0.05) {
            const auto r = sigma_report(params(0.3, 0.7, s, a));
            for (int t = 0; t < 3; ++t) EXPECT_GE(r.sigma_prime[t] - r.sigma[t], -1e-12);
        }
    }
}

TEST(Oracle, Validation) {
    EXPECT_THROW(phi_differences(params(0.5, 0.5, 0.5, {1.0, 1.0})), ipcw::UnsupportedContrast);
    EXPECT_THROW(sigma_report(params(1.5, 0.5, 0.5)), std::invalid_argument);
    EXPECT_THROW(sigma_report(params(0.5, 0.5, 0.0)), std::invalid_argument);
}
