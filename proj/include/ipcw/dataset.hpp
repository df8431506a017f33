#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "ipcw/errors.hpp"
#include "ipcw/outcome.hpp"

namespace ipcw {

struct ObservedRecord {
    double exit_time = 0.0;           // T~ = T ^ C
    int exit_type = 0;                // D~, 0 = censored
    std::vector<double> covariates;   // design vector X
    int stratum = 0;                  // Z
};

// Maps a design vector to a dense stratum label in [0, count()).
class Stratifier {
public:
    // Everything in stratum 0.
    static Stratifier single() { return Stratifier(Single{}); }

    // Bins a covariate expected in (0, 1]: label j when j/k < x <= (j+1)/k.
    // Values outside the unit interval are clamped to the end bins.
    static Stratifier covariate_bins(std::size_t column, int k) {
        if (k < 1) throw std::invalid_argument("number of bins must be at least 1");
        return Stratifier(Bins{column, k});
    }

    // Cross-classification of binary (0/1) factors; label = sum_m x[col_m] 2^m.
    static Stratifier factors(std::vector<std::size_t> columns) {
        if (columns.size() > 20) throw std::invalid_argument("too many stratification factors");
        return Stratifier(Factors{std::move(columns)});
    }

    int count() const {
        if (std::holds_alternative<Bins>(rule_)) return std::get<Bins>(rule_).k;
        if (std::holds_alternative<Factors>(rule_)) return 1 << std::get<Factors>(rule_).columns.size();
        return 1;
    }

    int operator()(std::span<const double> x) const {
        if (const auto* bins = std::get_if<Bins>(&rule_)) {
            const double v = at(x, bins->column);
            const int j = static_cast<int>(std::ceil(v * bins->k)) - 1;
            return std::clamp(j, 0, bins->k - 1);
        }
        if (const auto* f = std::get_if<Factors>(&rule_)) {
            int label = 0;
            for (std::size_t m = 0; m < f->columns.size(); ++m) {
                const double v = at(x, f->columns[m]);
                if (v != 0.0 && v != 1.0) throw std::invalid_argument("stratification factor must be 0 or 1");
                if (v == 1.0) label |= 1 << m;
            }
            return label;
        }
        return 0;
    }

private:
    struct Single {};
    struct Bins {
        std::size_t column;
        int k;
    };
    struct Factors {
        std::vector<std::size_t> columns;
    };

    explicit Stratifier(std::variant<Single, Bins, Factors> rule) : rule_(std::move(rule)) {}

    static double at(std::span<const double> x, std::size_t column) {
        if (column >= x.size()) throw DimensionMismatch("stratification column out of range");
        return x[column];
    }

    std::variant<Single, Bins, Factors> rule_;
};

// Immutable collection of observed records sharing one outcome definition.
class Dataset {
public:
    Dataset(std::vector<ObservedRecord> records, OutcomeSpec outcome, int stratum_count)
        : records_(std::move(records)), outcome_(outcome), stratum_count_(stratum_count) {
        validate();
    }

    Dataset(std::vector<ObservedRecord> records, OutcomeSpec outcome, const Stratifier& stratifier)
        : records_(std::move(records)), outcome_(outcome), stratum_count_(stratifier.count()) {
        for (auto& r : records_) r.stratum = stratifier(r.covariates);
        validate();
    }

    std::size_t size() const noexcept { return records_.size(); }
    std::size_t dimension() const noexcept { return records_.front().covariates.size(); }
    int stratum_count() const noexcept { return stratum_count_; }
    const OutcomeSpec& outcome() const noexcept { return outcome_; }
    double horizon() const noexcept { return outcome_.horizon; }
    const std::vector<ObservedRecord>& records() const noexcept { return records_; }
    const ObservedRecord& operator[](std::size_t i) const { return records_[i]; }

    bool observed(std::size_t i) const noexcept {
        return outcome_observed(outcome_.horizon, records_[i].exit_time, records_[i].exit_type);
    }

    double outcome(std::size_t i) const {
        return evaluate_outcome(outcome_, records_[i].exit_time, records_[i].exit_type);
    }

    // Y_i where observed, 0 otherwise. Only meaningful multiplied by a weight
    // that vanishes on unobserved records.
    std::vector<double> observed_outcomes() const {
        std::vector<double> y(size(), 0.0);
        for (std::size_t i = 0; i < size(); ++i) {
            if (observed(i)) y[i] = outcome(i);
        }
        return y;
    }

    Eigen::MatrixXd design() const {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dimension()));
        for (std::size_t i = 0; i < size(); ++i) {
            for (std::size_t j = 0; j < dimension(); ++j) {
                x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = records_[i].covariates[j];
            }
        }
        return x;
    }

    std::vector<std::size_t> stratum_sizes() const {
        std::vector<std::size_t> sizes(static_cast<std::size_t>(stratum_count_), 0);
        for (const auto& r : records_) ++sizes[static_cast<std::size_t>(r.stratum)];
        return sizes;
    }

    // Same records and strata with a different outcome definition.
    Dataset with_outcome(OutcomeSpec outcome) const { return Dataset(records_, outcome, stratum_count_); }

    // Copy without record i; strata labels are kept.
    Dataset without(std::size_t i) const {
        std::vector<ObservedRecord> rest;
        rest.reserve(size() - 1);
        for (std::size_t j = 0; j < size(); ++j) {
            if (j != i) rest.push_back(records_[j]);
        }
        return Dataset(std::move(rest), outcome_, stratum_count_, Unchecked{});
    }

private:
    struct Unchecked {};
    Dataset(std::vector<ObservedRecord> records, OutcomeSpec outcome, int stratum_count, Unchecked)
        : records_(std::move(records)), outcome_(outcome), stratum_count_(stratum_count) {}

    void validate() const {
        outcome_.validate();
        if (records_.empty()) throw std::invalid_argument("dataset must contain at least one record");
        if (stratum_count_ < 1) throw std::invalid_argument("stratum count must be at least 1");
        const std::size_t p = records_.front().covariates.size();
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& r = records_[i];
            if (!(r.exit_time > 0.0) || !std::isfinite(r.exit_time)) {
                throw std::invalid_argument("record " + std::to_string(i) + ": exit time must be positive and finite");
            }
            if (r.exit_type < 0) {
                throw std::invalid_argument("record " + std::to_string(i) + ": exit type must be non-negative");
            }
            if (r.covariates.size() != p) {
                throw DimensionMismatch("record " + std::to_string(i) + ": covariate length differs");
            }
            if (r.stratum < 0 || r.stratum >= stratum_count_) {
                throw std::invalid_argument("record " + std::to_string(i) + ": stratum label out of range");
            }
        }
        const auto sizes = stratum_sizes();
        for (std::size_t z = 0; z < sizes.size(); ++z) {
            if (sizes[z] == 0) throw StratumEmpty(static_cast<int>(z));
        }
    }

    std::vector<ObservedRecord> records_;
    OutcomeSpec outcome_;
    int stratum_count_;
};

}  // namespace ipcw
