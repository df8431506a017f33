#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ipcw/errors.hpp"
#include "ipcw/solver.hpp"

namespace ipcw {

// Inverse of the standard normal CDF. Acklam's rational approximation
// (relative error about 1e-9) polished by one Halley step on erfc.
inline double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) {
        if (prob == 0.0) return -INFINITY;
        if (prob == 1.0) return INFINITY;
        throw std::invalid_argument("normal_quantile: probability outside [0, 1]");
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double low = 0.02425;

    double x;
    if (prob < low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - low) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - prob;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct SandwichEstimate {
    Eigen::MatrixXd covariance;  // asymptotic scale: n J^-1 (sum u u^T) J^-T
    Eigen::VectorXd se_beta;     // sqrt(diag(covariance) / n)
    Eigen::Index n = 0;
};

inline SandwichEstimate sandwich(const FitResult& fit) {
    const Eigen::Index n = fit.contributions.rows();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(fit.jacobian);
    if (!lu.isInvertible()) throw SingularSystem("score Jacobian is singular; sandwich undefined");
    const Eigen::MatrixXd bread = lu.inverse();
    const Eigen::MatrixXd meat = fit.contributions.transpose() * fit.contributions;
    Eigen::MatrixXd cov = static_cast<double>(n) * bread * meat * bread.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();

    SandwichEstimate est;
    est.n = n;
    est.covariance = cov;
    est.se_beta = (cov.diagonal().cwiseMax(0.0) / static_cast<double>(n)).cwiseSqrt();
    return est;
}

struct Interval {
    double lower;
    double upper;

    bool contains(double value) const noexcept { return lower <= value && value <= upper; }
};

inline std::vector<Interval> wald_ci(const Eigen::VectorXd& beta, const Eigen::VectorXd& se, double level = 0.95) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must be in (0, 1)");
    if (beta.size() != se.size()) throw DimensionMismatch("coefficients and standard errors differ in length");
    const double z = normal_quantile(0.5 + level / 2.0);
    std::vector<Interval> out;
    out.reserve(static_cast<std::size_t>(beta.size()));
    for (Eigen::Index j = 0; j < beta.size(); ++j) out.push_back({beta[j] - z * se[j], beta[j] + z * se[j]});
    return out;
}

inline std::vector<Interval> wald_ci(const FitResult& fit, const SandwichEstimate& est, double level = 0.95) {
    return wald_ci(fit.beta, est.se_beta, level);
}

}  // namespace ipcw
