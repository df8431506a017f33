#pragma once

// Generators and replication runner for the three simulation scenarios:
//
//   I    two groups, uniform event times, linear risk-difference model;
//        point-mass censoring at 0.2 or 0.8, or unit-rate exponential.
//   II   restricted mean T ^ 1 with three continuous covariates, Weibull
//        event and censoring times; strata from binning X2.
//   III  2^5 factorial design, log-linear risk model with A = d mu / d beta,
//        uniform censoring on (0, 5/3); strata from the first factors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ipcw/censoring.hpp"
#include "ipcw/dataset.hpp"
#include "ipcw/parallel.hpp"
#include "ipcw/pseudo.hpp"
#include "ipcw/rng.hpp"
#include "ipcw/solver.hpp"
#include "ipcw/variance.hpp"

namespace ipcw::sim {

enum class Scenario { I = 1, II = 2, III = 3 };

struct CensoringLaw {
    enum class Kind { PointMass, Exponential } kind = Kind::PointMass;
    double value = 0.2;  // point-mass location or exponential rate

    static CensoringLaw point_mass(double s) { return {Kind::PointMass, s}; }
    static CensoringLaw exponential(double rate = 1.0) { return {Kind::Exponential, rate}; }

    std::string label() const {
        if (kind == Kind::Exponential) return "exp";
        std::string s = std::to_string(value);
        s.erase(s.find_last_not_of('0') + 1);
        return s;
    }
};

struct ScenarioConfig {
    Scenario scenario = Scenario::I;
    std::size_t n = 800;                 // ignored by scenario III (32 x per_stratum)
    CensoringLaw censoring{};            // scenario I
    int strata_k = 1;                    // scenario II
    int strata_factors = 0;              // scenario III
    std::size_t per_stratum = 12;        // scenario III
    std::size_t replications = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    std::size_t sample_size() const { return scenario == Scenario::III ? 32 * per_stratum : n; }

    void validate() const {
        if (replications < 1) throw std::invalid_argument("replications must be at least 1");
        switch (scenario) {
            case Scenario::I:
                if (n < 2) throw std::invalid_argument("scenario I needs n >= 2");
                if (censoring.kind == CensoringLaw::Kind::PointMass && !(censoring.value > 0.0 && censoring.value < 1.0)) {
                    throw std::invalid_argument("point-mass censoring time must lie in (0, 1)");
                }
                if (censoring.kind == CensoringLaw::Kind::Exponential && !(censoring.value > 0.0)) {
                    throw std::invalid_argument("exponential censoring rate must be positive");
                }
                break;
            case Scenario::II:
                if (n < 2) throw std::invalid_argument("scenario II needs n >= 2");
                if (strata_k < 1) throw std::invalid_argument("scenario II needs strata_k >= 1");
                break;
            case Scenario::III:
                if (strata_factors < 0 || strata_factors > 5) throw std::invalid_argument("strata_factors must be in 0..5");
                if (per_stratum < 2) throw std::invalid_argument("scenario III needs at least 2 records per cell");
                break;
            default:
                throw std::invalid_argument("unknown scenario");
        }
    }
};

inline constexpr double scenario1_p0 = 1.0 / 6.0;
inline constexpr double scenario1_p1 = 0.5;
inline constexpr double scenario3_base_risk = 0.1;
inline constexpr double scenario3_risk_ratio = 1.25;
inline constexpr double scenario3_censoring_max = 5.0 / 3.0;

// Variable tags for the per-replication random streams.
enum StreamTag : std::uint64_t { Group = 1, EventTime = 2, CensorTime = 3, CovX1 = 11, CovX2 = 12, CovX3 = 13 };

struct GeneratedSample {
    Dataset data;
    std::vector<double> true_outcomes;  // Y computed from the latent event time
};

inline ModelSpec model_for(Scenario scenario) {
    if (scenario == Scenario::III) return {Link::Exponential, AChoice::GaussianScore};
    return {Link::Identity, AChoice::Covariate};
}

inline SolverOptions solver_for(Scenario scenario) {
    SolverOptions options;
    if (scenario == Scenario::III) options.max_iter = 20;
    return options;
}

// True coefficients, where the model is correctly specified.
inline std::optional<Eigen::VectorXd> truth_for(Scenario scenario) {
    if (scenario == Scenario::I) {
        Eigen::VectorXd b(2);
        b << scenario1_p0, scenario1_p1 - scenario1_p0;
        return b;
    }
    if (scenario == Scenario::III) {
        Eigen::VectorXd b = Eigen::VectorXd::Constant(6, std::log(scenario3_risk_ratio));
        b[0] = std::log(scenario3_base_risk);
        return b;
    }
    return std::nullopt;
}

namespace detail {

// Weibull with S(t) = exp(-(rate t)^shape).
inline double weibull(CounterRng& rng, double shape, double rate) {
    return std::pow(-std::log(rng.uniform()), 1.0 / shape) / rate;
}

inline void add_record(std::vector<ObservedRecord>& out, double event, double censor, std::vector<double> x) {
    ObservedRecord r;
    r.exit_time = std::min(event, censor);
    r.exit_type = event <= censor ? 1 : 0;
    r.covariates = std::move(x);
    out.push_back(std::move(r));
}

}  // namespace detail

inline GeneratedSample generate(const ScenarioConfig& config, std::size_t rep) {
    config.validate();
    const std::uint64_t seed = config.seed;
    CounterRng event_rng(seed, rep, EventTime), censor_rng(seed, rep, CensorTime);
    std::vector<ObservedRecord> records;
    std::vector<double> truth;
    const double inf = std::numeric_limits<double>::infinity();

    switch (config.scenario) {
        case Scenario::I: {
            CounterRng group_rng(seed, rep, Group);
            for (std::size_t i = 0; i < config.n; ++i) {
                const int x = group_rng.uniform() < 0.5 ? 1 : 0;
                const double slope = x == 1 ? scenario1_p1 : scenario1_p0;
                const double t = event_rng.uniform() / slope;
                double c;
                if (config.censoring.kind == CensoringLaw::Kind::PointMass) {
                    c = censor_rng.uniform() < 0.5 ? config.censoring.value : inf;
                } else {
                    c = -std::log(censor_rng.uniform()) / config.censoring.value;
                }
                detail::add_record(records, t, c, {1.0, static_cast<double>(x)});
                truth.push_back(t <= 1.0 ? 1.0 : 0.0);
            }
            return {Dataset(std::move(records), OutcomeSpec::failure(1, 1.0), Stratifier::single()), std::move(truth)};
        }
        case Scenario::II: {
            CounterRng x1_rng(seed, rep, CovX1), x2_rng(seed, rep, CovX2), x3_rng(seed, rep, CovX3);
            std::normal_distribution<double> normal(0.0, 1.0);
            std::gamma_distribution<double> gamma(3.0, 0.5);
            for (std::size_t i = 0; i < config.n; ++i) {
                const double x1 = normal(x1_rng);
                const double x2 = x2_rng.uniform();
                const double x3 = gamma(x3_rng);
                const double rate = std::exp(-2.0 + x1 + x2 / 6.0 + x3 / 2.0 + x2 * x3 / 4.0);
                const double t = detail::weibull(event_rng, 1.5, rate);
                const double c = detail::weibull(censor_rng, 1.5, std::exp(-0.5 + x2));
                detail::add_record(records, t, c, {1.0, x1, x2, x3});
                truth.push_back(std::min(t, 1.0));
            }
            return {Dataset(std::move(records), OutcomeSpec::restricted_time(1.0), Stratifier::covariate_bins(2, config.strata_k)),
                    std::move(truth)};
        }
        case Scenario::III: {
            for (int cell = 0; cell < 32; ++cell) {
                std::vector<double> x{1.0};
                int level = 0;
                for (int m = 0; m < 5; ++m) {
                    const int bit = (cell >> m) & 1;
                    x.push_back(bit);
                    level += bit;
                }
                const double upper = 1.0 / (scenario3_base_risk * std::pow(scenario3_risk_ratio, level));
                for (std::size_t k = 0; k < config.per_stratum; ++k) {
                    const double t = event_rng.uniform() * upper;
                    const double c = censor_rng.uniform() * scenario3_censoring_max;
                    detail::add_record(records, t, c, x);
                    truth.push_back(t <= 1.0 ? 1.0 : 0.0);
                }
            }
            std::vector<std::size_t> factors;
            for (int m = 0; m < config.strata_factors; ++m) factors.push_back(static_cast<std::size_t>(m + 1));
            return {Dataset(std::move(records), OutcomeSpec::failure(1, 1.0), Stratifier::factors(std::move(factors))),
                    std::move(truth)};
        }
    }
    throw std::invalid_argument("unknown scenario");
}

// Per-approach arrays are indexed ind, out, pse, uncensored.
inline constexpr std::array<Approach, 4> all_approaches{Approach::Individual, Approach::Outcome, Approach::Pseudo,
                                                        Approach::Uncensored};

struct ApproachFit {
    bool converged = false;
    Eigen::VectorXd beta;
    Eigen::VectorXd scaled_sandwich;  // diagonal of the n-scaled sandwich
    std::vector<bool> covers;         // Wald 95% interval contains the truth
};

struct ReplicationResult {
    std::array<ApproachFit, 4> fits;

    bool all_weighted_converged() const { return fits[0].converged && fits[1].converged && fits[2].converged; }
};

inline ApproachFit fit_one(const Eigen::MatrixXd& design, const ModelSpec& model, const SolverOptions& options,
                           const ScoreInputs& inputs, const std::optional<Eigen::VectorXd>& truth) {
    ApproachFit out;
    try {
        const FitResult fit = solve(design, model, inputs, options);
        if (!fit.converged) return out;
        const SandwichEstimate est = sandwich(fit);
        out.beta = fit.beta;
        out.scaled_sandwich = est.covariance.diagonal();
        if (truth) {
            const auto ci = wald_ci(fit, est);
            for (std::size_t j = 0; j < ci.size(); ++j) out.covers.push_back(ci[j].contains((*truth)[static_cast<Eigen::Index>(j)]));
        }
        out.converged = out.beta.allFinite() && out.scaled_sandwich.allFinite();
    } catch (const Error&) {
        out.converged = false;
    }
    return out;
}

inline ReplicationResult run_replication(const ScenarioConfig& config, std::size_t rep) {
    const GeneratedSample sample = generate(config, rep);
    const Dataset& data = sample.data;
    const Eigen::MatrixXd design = data.design();
    const ModelSpec model = model_for(config.scenario);
    const SolverOptions options = solver_for(config.scenario);
    const auto truth = truth_for(config.scenario);

    ReplicationResult result;
    const auto censoring = fit_censoring(data);
    const auto weights = compute_weights(data, censoring);
    const auto y = data.observed_outcomes();
    result.fits[0] = fit_one(design, model, options, individual_inputs(weights, y), truth);
    result.fits[1] = fit_one(design, model, options, outcome_inputs(weights, y), truth);
    try {
        result.fits[2] = fit_one(design, model, options, pseudo_inputs(pseudo_observations(data, censoring)), truth);
    } catch (const Error&) {
        result.fits[2].converged = false;
    }
    result.fits[3] = fit_one(design, model, options, uncensored_inputs(sample.true_outcomes), truth);
    return result;
}

struct CoefficientSummary {
    double mean_beta = NAN;
    double scaled_mc_variance = NAN;     // n Var(beta_hat) over replications
    double scaled_mc_variance_se = NAN;  // Monte Carlo standard error of the above
    double mean_scaled_sandwich = NAN;
    double median_scaled_sandwich = NAN;
    double mad_variance = NAN;           // n MAD^2 / z_{3/4}^2
    double coverage_pct = NAN;
};

struct ApproachSummary {
    double convergence_pct = 0.0;
    std::size_t used = 0;  // replications entering the coefficient summaries
    std::vector<CoefficientSummary> coefficients;
};

struct CampaignSummary {
    ScenarioConfig config;
    std::array<ApproachSummary, 4> approaches;
};

namespace stats {

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? NAN : s / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
    if (v.empty()) return NAN;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double variance(const std::vector<double>& v) {
    if (v.size() < 2) return NAN;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

// Standard error of the sample variance: sqrt((m4 - (R-3)/(R-1) s^4) / R).
inline double variance_se(const std::vector<double>& v) {
    const double r = static_cast<double>(v.size());
    if (v.size() < 4) return NAN;
    const double m = mean(v);
    double m4 = 0.0;
    for (double x : v) m4 += std::pow(x - m, 4);
    m4 /= r;
    const double s2 = variance(v);
    return std::sqrt(std::max(0.0, (m4 - (r - 3.0) / (r - 1.0) * s2 * s2) / r));
}

inline double mad(const std::vector<double>& v) {
    const double med = median(v);
    std::vector<double> dev;
    dev.reserve(v.size());
    for (double x : v) dev.push_back(std::abs(x - med));
    return median(std::move(dev));
}

}  // namespace stats

inline CampaignSummary summarize(const ScenarioConfig& config, const std::vector<ReplicationResult>& reps) {
    CampaignSummary summary;
    summary.config = config;
    const double n = static_cast<double>(config.sample_size());
    const double z75 = normal_quantile(0.75);
    const bool filter_all = config.scenario == Scenario::III;
    const bool has_truth = truth_for(config.scenario).has_value();

    for (std::size_t a = 0; a < 4; ++a) {
        ApproachSummary& out = summary.approaches[a];
        std::vector<const ApproachFit*> used;
        std::size_t converged = 0;
        for (const auto& rep : reps) {
            const ApproachFit& fit = rep.fits[a];
            if (fit.converged) ++converged;
            const bool keep = filter_all ? fit.converged && rep.all_weighted_converged() : fit.converged;
            if (keep) used.push_back(&fit);
        }
        out.convergence_pct = 100.0 * static_cast<double>(converged) / static_cast<double>(reps.size());
        out.used = used.size();
        if (used.empty()) continue;

        const auto p = static_cast<std::size_t>(used.front()->beta.size());
        out.coefficients.resize(p);
        for (std::size_t j = 0; j < p; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            std::vector<double> beta, sand;
            std::size_t covered = 0;
            for (const ApproachFit* fit : used) {
                beta.push_back(fit->beta[jj]);
                sand.push_back(fit->scaled_sandwich[jj]);
                if (has_truth && fit->covers[j]) ++covered;
            }
            CoefficientSummary& c = out.coefficients[j];
            c.mean_beta = stats::mean(beta);
            c.scaled_mc_variance = n * stats::variance(beta);
            c.scaled_mc_variance_se = n * stats::variance_se(beta);
            c.mean_scaled_sandwich = stats::mean(sand);
            c.median_scaled_sandwich = stats::median(sand);
            const double m = stats::mad(beta);
            c.mad_variance = n * m * m / (z75 * z75);
            if (has_truth) c.coverage_pct = 100.0 * static_cast<double>(covered) / static_cast<double>(used.size());
        }
    }
    return summary;
}

inline std::vector<ReplicationResult> run_replications(const ScenarioConfig& config) {
    config.validate();
    std::vector<ReplicationResult> reps(config.replications);
    ipcw::detail::parallel_blocks(config.replications, config.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) reps[r] = run_replication(config, r);
    });
    return reps;
}

inline CampaignSummary run_campaign(const ScenarioConfig& config) { return summarize(config, run_replications(config)); }

}  // namespace ipcw::sim
