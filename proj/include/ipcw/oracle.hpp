#pragma once

// Closed-form asymptotic variances for the two-group uniform example:
//
//   P(X = 0) = P(X = 1) = 1/2,  P(T <= u | X = 1) = p u,  P(T <= u | X = 0) = q u,
//   Y = 1{T <= 1},  mu(beta; X) = beta0 + beta1 X,  A(beta; X) = (1, X)^T,
//
// with censoring C = s with probability 1/2 and no censoring otherwise, no
// stratification. For this censoring law the censoring integral collapses to
// its integrand at s, so Sigma_type = Sigma + Phi_type(s) S(s) and the
// sandwich limit is Sigma'_type = Sigma + Phi'_type(s) S(s), where Phi is a
// conditional variance given T > s and Phi' the conditional raw second moment.

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "ipcw/errors.hpp"

namespace ipcw::oracle {

struct ExampleParams {
    double p = 0.5;   // slope of the X = 1 distribution function
    double q = 1.0 / 6.0;
    double s = 0.2;   // censoring time
    Eigen::Vector2d a{0.0, 1.0};

    void validate() const {
        auto unit = [](double v) { return v > 0.0 && v < 1.0; };
        if (!unit(p) || !unit(q) || !unit(s)) throw std::invalid_argument("p, q and s must lie in (0, 1)");
    }
};

struct Moments {
    double f1;  // E(Y | T > s)
    double f2;  // Cov(Y, X | T > s)
    double f3;  // Cov(YX, X | T > s)
    double f4;  // Var(X | T > s)
};

inline Moments moments(double p, double q, double s) {
    const double d = 2.0 - p * s - q * s;
    const double f1 = (p + q) * (1.0 - s) / d;
    return {
        f1,
        (p * (1.0 - s) / (1.0 - p * s) - f1) * (1.0 - p * s) / d,
        p * (1.0 - s) / d * (1.0 - q * s) / d,
        (1.0 - p * s) / d * (1.0 - q * s) / d,
    };
}

struct PhiDifferences {
    double pse_out;  // a^T (Phi_pse - Phi_out) a
    double ind_out;  // a^T (Phi_ind - Phi_out) a
    double pse_ind;
};

inline PhiDifferences phi_differences(const ExampleParams& params) {
    params.validate();
    const double p = params.p, q = params.q, s = params.s;
    const double d = 2.0 - p * s - q * s;
    PhiDifferences out{};
    if (params.a == Eigen::Vector2d(0.0, 1.0)) {
        out.pse_out = -16.0 * (p + q) * (1.0 - s) / d *
                      (q * (1.0 - s) / d * std::pow((1.0 - p * s) / d, 2) +
                       p * (1.0 - s) / d * std::pow((1.0 - q * s) / d, 2));
        out.ind_out = 4.0 * (p + q) / (d * d) *
                      (q * (s * (1.0 - q) - (1.0 - s)) * (1.0 - p * s) + p * (s * (1.0 - p) - (1.0 - s)) * (1.0 - q * s));
    } else if (params.a == Eigen::Vector2d(1.0, 0.0)) {
        out.pse_out = 4.0 * (p + q) * std::pow(1.0 - s, 2) * (1.0 - p * s) / (d * d * d) *
                      ((p + q) * (1.0 - q * s) / d - 2.0 * q);
        out.ind_out = 4.0 * q * q * (1.0 - p * s) / d * (s * (2.0 - q) - 1.0) / d;
    } else {
        throw UnsupportedContrast();
    }
    out.pse_ind = out.pse_out - out.ind_out;
    return out;
}

// Index order used for per-approach arrays in the report.
enum Type { Ind = 0, Out = 1, Pse = 2 };

struct OracleReport {
    ExampleParams params;
    Moments f{};
    Eigen::Matrix2d j_inv;
    std::array<double, 3> phi{};        // a^T Phi_type(s) a
    std::array<double, 3> phi_prime{};  // a^T Phi'_type(s) a
    double survival_at_s = 0.0;         // S(s) = P(T > s)
    double sigma_uncensored = 0.0;      // a^T Sigma a
    std::array<double, 3> sigma{};      // a^T Sigma_type a
    std::array<double, 3> sigma_prime{};
};

// Everything is computed by enumerating the four (X, Y) cells, which keeps it
// independent of the closed forms in phi_differences().
inline OracleReport sigma_report(const ExampleParams& params) {
    params.validate();
    const double p = params.p, q = params.q, s = params.s;
    OracleReport r;
    r.params = params;
    r.f = moments(p, q, s);

    // J = E[(1, X)^T (1, X)] = [[1, 1/2], [1/2, 1/2]].
    r.j_inv << 2.0, -2.0, -2.0, 4.0;
    const std::array<double, 2> mu{q, p};  // E(Y | X = x)
    std::array<double, 2> aB{};            // a^T B(x), B(x) = J^-1 (1, x)^T
    for (int x = 0; x < 2; ++x) aB[x] = params.a.dot(r.j_inv * Eigen::Vector2d(1.0, x));

    for (int x = 0; x < 2; ++x) r.sigma_uncensored += 0.5 * aB[x] * aB[x] * mu[x] * (1.0 - mu[x]);

    const double d = 2.0 - p * s - q * s;
    r.survival_at_s = d / 2.0;
    const std::array<double, 2> px{(1.0 - q * s) / d, (1.0 - p * s) / d};                          // P(X = x | T > s)
    const std::array<double, 2> py{q * (1.0 - s) / (1.0 - q * s), p * (1.0 - s) / (1.0 - p * s)};  // P(Y = 1 | X = x, T > s)
    double f1 = 0.0;
    for (int x = 0; x < 2; ++x) f1 += px[x] * py[x];

    for (int type = 0; type < 3; ++type) {
        double mean = 0.0, raw = 0.0;
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                const double prob = px[x] * (y == 1 ? py[x] : 1.0 - py[x]);
                const double centre = type == Ind ? mu[x] : type == Pse ? f1 : 0.0;
                const double phi = aB[x] * (y - centre);
                mean += prob * phi;
                raw += prob * phi * phi;
            }
        }
        r.phi[type] = raw - mean * mean;
        r.phi_prime[type] = raw;
        // dLambda(s) / G(s) = (1/2) / (1/2) = 1 for this censoring law.
        r.sigma[type] = r.sigma_uncensored + r.phi[type] * r.survival_at_s;
        r.sigma_prime[type] = r.sigma_uncensored + r.phi_prime[type] * r.survival_at_s;
    }
    return r;
}

}  // namespace ipcw::oracle
