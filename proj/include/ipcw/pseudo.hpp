#pragma once

// Jack-knife pseudo-observations of the inverse-probability-weighted mean.

#include <cstddef>
#include <vector>

#include "ipcw/censoring.hpp"
#include "ipcw/dataset.hpp"
#include "ipcw/errors.hpp"
#include "ipcw/parallel.hpp"

namespace ipcw {

struct PseudoSet {
    double theta_hat = 0.0;             // (1/n) sum_j W_j Y_j
    std::vector<double> values;         // n theta_hat - (n-1) theta_hat^(i)
    std::vector<double> loo_estimates;  // theta_hat^(i)
};

inline double weighted_mean(const std::vector<double>& weights, const std::vector<double>& y, double horizon) {
    double sum = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (weights[j] != 0.0) {
            any = true;
            sum += weights[j] * y[j];
        }
    }
    // Every record censored before the horizon: nothing to reweight.
    if (!any) throw PositivityViolation(std::nullopt, horizon);
    return sum / static_cast<double>(y.size());
}

inline double theta_hat(const Dataset& data, const StratifiedCensoring& censoring) {
    return weighted_mean(compute_weights(data, censoring), data.observed_outcomes(), data.horizon());
}

namespace detail {

inline void require_pairs(const Dataset& data) {
    const auto sizes = data.stratum_sizes();
    for (std::size_t z = 0; z < sizes.size(); ++z) {
        if (sizes[z] < 2) throw StratumTooSmall(static_cast<int>(z), sizes[z]);
    }
}

}  // namespace detail

// theta_hat^(i) from the full-sample estimator refit without record i; only
// the weights of i's stratum change.
inline PseudoSet pseudo_observations(const Dataset& data, const StratifiedCensoring& censoring,
                                     unsigned threads = 1) {
    detail::require_pairs(data);
    const std::size_t n = data.size();
    const auto y = data.observed_outcomes();
    const auto w = compute_weights(data, censoring);

    PseudoSet out;
    out.theta_hat = weighted_mean(w, y, data.horizon());
    out.values.assign(n, 0.0);
    out.loo_estimates.assign(n, 0.0);

    const double nn = static_cast<double>(n);
    for (int z = 0; z < data.stratum_count(); ++z) {
        const StratumRefitter refit(data, z);
        const auto& members = refit.members();

        // Contribution of every other stratum, in record order.
        double others = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (data[j].stratum != z) others += w[j] * y[j];
        }

        detail::parallel_blocks(members.size(), threads, [&](std::size_t begin, std::size_t end) {
            std::vector<double> loo, scratch;
            for (std::size_t m = begin; m < end; ++m) {
                refit.weights(m, loo, scratch);
                double within = 0.0;
                for (std::size_t k = 0; k < members.size(); ++k) within += loo[k] * y[members[k]];
                const double estimate = (others + within) / (nn - 1.0);
                const std::size_t i = members[m];
                out.loo_estimates[i] = estimate;
                out.values[i] = nn * out.theta_hat - (nn - 1.0) * estimate;
            }
        });
    }
    return out;
}

// Stratum-local form: W_i Y_i + sum_{j != i, Z_j = Z_i} (W_j - W_j^(i)) Y_j.
inline std::vector<double> pseudo_observations_local(const Dataset& data, const StratifiedCensoring& censoring) {
    detail::require_pairs(data);
    const auto y = data.observed_outcomes();
    const auto w = compute_weights(data, censoring);
    std::vector<double> values(data.size(), 0.0);
    std::vector<double> loo, scratch;
    for (int z = 0; z < data.stratum_count(); ++z) {
        const StratumRefitter refit(data, z);
        const auto& members = refit.members();
        for (std::size_t m = 0; m < members.size(); ++m) {
            refit.weights(m, loo, scratch);
            const std::size_t i = members[m];
            double value = w[i] * y[i];
            for (std::size_t k = 0; k < members.size(); ++k) {
                if (k == m) continue;
                const std::size_t j = members[k];
                value += (w[j] - loo[k]) * y[j];
            }
            values[i] = value;
        }
    }
    return values;
}

}  // namespace ipcw
