#pragma once

// Stratified product-limit estimation of the censoring survival function G
// and the inverse-probability-of-censoring weights built from it.
//
// Ties follow the "event first" convention: at a time s the censoring risk
// set is {T~ > s} plus the records censored exactly at s, so a record that
// fails at s is not at risk of being censored at s.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "ipcw/dataset.hpp"
#include "ipcw/errors.hpp"

namespace ipcw {

struct CensoringCurve {
    int stratum = 0;
    std::vector<double> jump_times;          // distinct censoring times, increasing
    std::vector<double> hazard_increments;   // dLambda = censored / at risk
    std::vector<double> survival_values;     // G at each jump
    std::vector<std::size_t> at_risk_counts;
    std::vector<std::size_t> censoring_counts;

    std::size_t jumps() const noexcept { return jump_times.size(); }

    // G(s), right-continuous; constant past the last jump.
    double survival(double s) const {
        const auto k = std::upper_bound(jump_times.begin(), jump_times.end(), s) - jump_times.begin();
        return k == 0 ? 1.0 : survival_values[static_cast<std::size_t>(k - 1)];
    }

    // G(s-): product over jumps strictly before s.
    double survival_left(double s) const {
        const auto k = std::lower_bound(jump_times.begin(), jump_times.end(), s) - jump_times.begin();
        return k == 0 ? 1.0 : survival_values[static_cast<std::size_t>(k - 1)];
    }
};

inline double eval_survival_left(const CensoringCurve& curve, double s) { return curve.survival_left(s); }

// Product-limit fit on one group of (exit time, exit type) pairs.
inline CensoringCurve fit_curve(std::span<const double> times, std::span<const int> types, int stratum = 0) {
    if (times.size() != types.size()) throw DimensionMismatch("times and types differ in length");
    CensoringCurve curve;
    curve.stratum = stratum;

    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    std::size_t remaining = times.size();  // #{T~ >= current time}
    double g = 1.0;
    for (std::size_t k = 0; k < order.size();) {
        const double u = times[order[k]];
        std::size_t tied = 0, censored = 0;
        for (; k < order.size() && times[order[k]] == u; ++k) {
            ++tied;
            if (types[order[k]] == 0) ++censored;
        }
        if (censored > 0) {
            const std::size_t at_risk = remaining - tied + censored;
            const double dl = static_cast<double>(censored) / static_cast<double>(at_risk);
            g *= 1.0 - dl;
            curve.jump_times.push_back(u);
            curve.hazard_increments.push_back(dl);
            curve.survival_values.push_back(g);
            curve.at_risk_counts.push_back(at_risk);
            curve.censoring_counts.push_back(censored);
        }
        remaining -= tied;
    }
    return curve;
}

struct StratifiedCensoring {
    std::vector<CensoringCurve> curves;      // indexed by stratum label
    std::vector<std::size_t> stratum_sizes;

    const CensoringCurve& operator[](int stratum) const { return curves.at(static_cast<std::size_t>(stratum)); }
};

inline StratifiedCensoring fit_censoring(const Dataset& data) {
    const auto k = static_cast<std::size_t>(data.stratum_count());
    std::vector<std::vector<double>> times(k);
    std::vector<std::vector<int>> types(k);
    for (const auto& r : data.records()) {
        times[static_cast<std::size_t>(r.stratum)].push_back(r.exit_time);
        types[static_cast<std::size_t>(r.stratum)].push_back(r.exit_type);
    }
    StratifiedCensoring fit;
    for (std::size_t z = 0; z < k; ++z) {
        if (times[z].empty()) throw StratumEmpty(static_cast<int>(z));
        fit.curves.push_back(fit_curve(times[z], types[z], static_cast<int>(z)));
        fit.stratum_sizes.push_back(times[z].size());
    }
    return fit;
}

// Numerator of the weight: 1{T~ >= t} + 1{T~ < t, D~ != 0}.
inline bool weight_numerator(const ObservedRecord& r, double horizon) noexcept {
    return outcome_observed(horizon, r.exit_time, r.exit_type);
}

// W_i = numerator / G(T~_i ^ t- | Z_i).
inline std::vector<double> compute_weights(const Dataset& data, const StratifiedCensoring& censoring) {
    if (censoring.curves.size() != static_cast<std::size_t>(data.stratum_count())) {
        throw DimensionMismatch("censoring fit does not match the dataset's strata");
    }
    const double t = data.horizon();
    std::vector<double> w(data.size(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& r = data[i];
        if (!weight_numerator(r, t)) continue;
        const double at = std::min(r.exit_time, t);
        const double g = censoring[r.stratum].survival_left(at);
        if (!(g > 0.0)) throw PositivityViolation(r.stratum, at);
        w[i] = 1.0 / g;
    }
    return w;
}

struct LeaveOneOutWeights {
    int stratum = 0;
    std::vector<std::size_t> members;  // indices into the dataset, excluding the left-out record
    std::vector<double> weights;       // W_j^(i), aligned with members
};

// Exact leave-one-out refits of one stratum's censoring curve. The stratum
// is sorted once; each refit is then a linear pass over its distinct times.
class StratumRefitter {
public:
    StratumRefitter(const Dataset& data, int stratum) : stratum_(stratum), horizon_(data.horizon()) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data[i].stratum == stratum) members_.push_back(i);
        }
        std::vector<double> all_times;
        all_times.reserve(members_.size());
        for (auto i : members_) all_times.push_back(data[i].exit_time);
        times_ = all_times;
        std::sort(times_.begin(), times_.end());
        times_.erase(std::unique(times_.begin(), times_.end()), times_.end());

        const std::size_t groups = times_.size();
        tied_.assign(groups, 0);
        censored_.assign(groups, 0);
        group_.resize(members_.size());
        eval_index_.resize(members_.size());
        numerator_.resize(members_.size());
        censored_member_.resize(members_.size());
        for (std::size_t m = 0; m < members_.size(); ++m) {
            const auto& r = data[members_[m]];
            const auto g = static_cast<std::size_t>(
                std::lower_bound(times_.begin(), times_.end(), r.exit_time) - times_.begin());
            group_[m] = g;
            ++tied_[g];
            censored_member_[m] = r.exit_type == 0;
            if (censored_member_[m]) ++censored_[g];
            numerator_[m] = weight_numerator(r, horizon_);
            eval_point_.push_back(std::min(r.exit_time, horizon_));
            eval_index_[m] = static_cast<std::size_t>(
                std::lower_bound(times_.begin(), times_.end(), eval_point_.back()) - times_.begin());
        }
        greater_.assign(groups, 0);
        std::size_t above = 0;
        for (std::size_t g = groups; g-- > 0;) {
            greater_[g] = above;
            above += tied_[g];
        }
    }

    int stratum() const noexcept { return stratum_; }
    std::size_t size() const noexcept { return members_.size(); }
    const std::vector<std::size_t>& members() const noexcept { return members_; }

    // Weights of every stratum member when member `left_out` (a position in
    // members(), or none) is dropped from the fit. The dropped member's own
    // slot is set to 0.
    void weights(std::optional<std::size_t> left_out, std::vector<double>& out, std::vector<double>& scratch) const {
        const std::size_t groups = times_.size();
        scratch.assign(groups + 1, 1.0);
        const std::size_t gi = left_out ? group_[*left_out] : groups;
        const bool drop_censored = left_out && censored_member_[*left_out];
        double g = 1.0;
        for (std::size_t k = 0; k < groups; ++k) {
            std::size_t c = censored_[k];
            std::size_t greater = greater_[k];
            if (left_out) {
                if (k < gi) --greater;
                if (k == gi && drop_censored) --c;
            }
            if (c > 0) g *= 1.0 - static_cast<double>(c) / static_cast<double>(greater + c);
            scratch[k + 1] = g;
        }
        out.assign(members_.size(), 0.0);
        for (std::size_t m = 0; m < members_.size(); ++m) {
            if ((left_out && m == *left_out) || !numerator_[m]) continue;
            const double denom = scratch[eval_index_[m]];
            if (!(denom > 0.0)) {
                std::optional<std::size_t> dropped;
                if (left_out) dropped = members_[*left_out];
                throw PositivityViolation(stratum_, eval_point_[m], dropped);
            }
            out[m] = 1.0 / denom;
        }
    }

private:
    int stratum_;
    double horizon_;
    std::vector<std::size_t> members_;
    std::vector<double> times_;             // distinct exit times
    std::vector<std::size_t> tied_;         // records per distinct time
    std::vector<std::size_t> censored_;     // censored records per distinct time
    std::vector<std::size_t> greater_;      // #{T~ > time}
    std::vector<std::size_t> group_;        // distinct-time index of each member
    std::vector<std::size_t> eval_index_;   // #{distinct times < T~ ^ t}
    std::vector<double> eval_point_;
    std::vector<bool> numerator_;
    std::vector<bool> censored_member_;
};

inline LeaveOneOutWeights leave_one_out_weights(const Dataset& data, std::size_t i) {
    if (i >= data.size()) throw std::out_of_range("record index out of range");
    const int z = data[i].stratum;
    const StratumRefitter refit(data, z);
    if (refit.size() < 2) throw StratumTooSmall(z, refit.size());

    const auto& members = refit.members();
    const auto pos = static_cast<std::size_t>(std::find(members.begin(), members.end(), i) - members.begin());
    std::vector<double> all, scratch;
    refit.weights(pos, all, scratch);

    LeaveOneOutWeights out;
    out.stratum = z;
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (m == pos) continue;
        out.members.push_back(members[m]);
        out.weights.push_back(all[m]);
    }
    return out;
}

}  // namespace ipcw
