#pragma once

// Estimating equations of the form
//
//   U_n(beta) = sum_i A(beta; X_i) (r_i - m_i mu(beta; X_i))
//
// which covers the three weighting approaches and the uncensored problem:
//
//   ind:        r_i = W_i Y_i,   m_i = W_i
//   out:        r_i = W_i Y_i,   m_i = 1
//   pse:        r_i = theta_i,   m_i = 1
//   uncensored: r_i = Y_i,       m_i = 1

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ipcw/censoring.hpp"
#include "ipcw/dataset.hpp"
#include "ipcw/errors.hpp"
#include "ipcw/model.hpp"
#include "ipcw/pseudo.hpp"

namespace ipcw {

enum class Approach { Individual, Outcome, Pseudo, Uncensored };

inline std::string to_string(Approach a) {
    switch (a) {
        case Approach::Individual: return "ind";
        case Approach::Outcome: return "out";
        case Approach::Pseudo: return "pse";
        case Approach::Uncensored: return "uncensored";
    }
    return "unknown";
}

inline Approach parse_approach(const std::string& name) {
    if (name == "ind") return Approach::Individual;
    if (name == "out") return Approach::Outcome;
    if (name == "pse") return Approach::Pseudo;
    if (name == "uncensored") return Approach::Uncensored;
    throw std::invalid_argument("unknown approach '" + name + "'");
}

struct ScoreInputs {
    Approach approach = Approach::Uncensored;
    std::vector<double> response;   // r_i
    std::vector<double> mu_weight;  // m_i
};

inline ScoreInputs individual_inputs(std::span<const double> weights, std::span<const double> y) {
    ScoreInputs in{Approach::Individual, {}, {weights.begin(), weights.end()}};
    in.response.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) in.response[i] = weights[i] == 0.0 ? 0.0 : weights[i] * y[i];
    return in;
}

inline ScoreInputs outcome_inputs(std::span<const double> weights, std::span<const double> y) {
    ScoreInputs in = individual_inputs(weights, y);
    in.approach = Approach::Outcome;
    in.mu_weight.assign(y.size(), 1.0);
    return in;
}

inline ScoreInputs pseudo_inputs(const PseudoSet& pseudo) {
    return {Approach::Pseudo, pseudo.values, std::vector<double>(pseudo.values.size(), 1.0)};
}

inline ScoreInputs uncensored_inputs(std::span<const double> y) {
    return {Approach::Uncensored, {y.begin(), y.end()}, std::vector<double>(y.size(), 1.0)};
}

// Uncensored inputs evaluated from the records; every outcome must be observed.
inline ScoreInputs uncensored_inputs(const Dataset& data) {
    std::vector<double> y(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) y[i] = data.outcome(i);
    return uncensored_inputs(y);
}

inline ScoreInputs make_inputs(Approach approach, const Dataset& data, const StratifiedCensoring& censoring,
                               unsigned threads = 1) {
    switch (approach) {
        case Approach::Individual:
            return individual_inputs(compute_weights(data, censoring), data.observed_outcomes());
        case Approach::Outcome:
            return outcome_inputs(compute_weights(data, censoring), data.observed_outcomes());
        case Approach::Pseudo:
            return pseudo_inputs(pseudo_observations(data, censoring, threads));
        case Approach::Uncensored:
            return uncensored_inputs(data);
    }
    throw std::invalid_argument("unknown approach");
}

struct Score {
    Eigen::VectorXd total;          // U_n(beta)
    Eigen::MatrixXd contributions;  // row i = u_i(beta)
    Eigen::MatrixXd jacobian;       // dU_n / dbeta^T
};

inline Score assemble_score(const Eigen::MatrixXd& design, const ModelSpec& model, const ScoreInputs& in,
                            const Eigen::VectorXd& beta) {
    const Eigen::Index n = design.rows();
    const Eigen::Index p = design.cols();
    if (static_cast<std::size_t>(n) != in.response.size() || in.response.size() != in.mu_weight.size()) {
        throw DimensionMismatch("design rows do not match the working responses");
    }
    if (beta.size() != p) throw DimensionMismatch("coefficient vector does not match the design");

    Score s{Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(n, p), Eigen::MatrixXd::Zero(p, p)};
    const bool gaussian = model.a_choice == AChoice::GaussianScore;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto x = design.row(i);
        const LinkValues lv = link_values(model.link, x.dot(beta));
        const double m = in.mu_weight[static_cast<std::size_t>(i)];
        const double resid = in.response[static_cast<std::size_t>(i)] - m * lv.mu;
        const double a = gaussian ? lv.d1 : 1.0;      // A = a x
        const double da = gaussian ? lv.d2 : 0.0;     // dA/dbeta^T = da x x^T
        s.contributions.row(i) = a * resid * x;
        s.total += s.contributions.row(i).transpose();
        const double curvature = da * resid - m * a * lv.d1;
        s.jacobian.noalias() += curvature * x.transpose() * x;
    }
    return s;
}

struct SolverOptions {
    int max_iter = 50;
    double tol_score = 1e-8;  // on max_j |U_j| / n
    int max_halvings = 10;
};

struct FitResult {
    Eigen::VectorXd beta;
    Approach approach = Approach::Uncensored;
    bool converged = false;
    int iterations = 0;
    double score_norm = std::numeric_limits<double>::quiet_NaN();  // max_j |U_j| / n at beta
    Eigen::MatrixXd jacobian;
    Eigen::MatrixXd contributions;
};

namespace detail {

inline double scaled_norm(const Eigen::VectorXd& u, Eigen::Index n) {
    return u.cwiseAbs().maxCoeff() / static_cast<double>(n);
}

inline Eigen::VectorXd initial_beta(const Eigen::MatrixXd& design, const ModelSpec& model, const ScoreInputs& in) {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.cols());
    if (model.link != Link::Identity) return beta;
    // Weighted least squares: sum m_i x x^T beta = sum x r_i.
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(design.cols(), design.cols());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(design.cols());
    for (Eigen::Index i = 0; i < design.rows(); ++i) {
        const auto x = design.row(i);
        lhs.noalias() += in.mu_weight[static_cast<std::size_t>(i)] * x.transpose() * x;
        rhs += in.response[static_cast<std::size_t>(i)] * x.transpose();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    if (lu.isInvertible()) beta = lu.solve(rhs);
    return beta;
}

}  // namespace detail

// Damped Newton iteration on U_n(beta) = 0. Returns the last iterate with
// converged = false when the iteration budget runs out or the iterate stops
// being finite; throws SingularSystem when the Jacobian cannot be inverted.
inline FitResult solve(const Eigen::MatrixXd& design, const ModelSpec& model, const ScoreInputs& in,
                       const SolverOptions& options = {}, const Eigen::VectorXd* init = nullptr) {
    if (options.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    const Eigen::Index n = design.rows();
    Eigen::VectorXd beta = init ? *init : detail::initial_beta(design, model, in);
    if (beta.size() != design.cols()) throw DimensionMismatch("initial value does not match the design");
    if (!beta.allFinite()) throw std::invalid_argument("initial value must be finite");

    FitResult fit;
    fit.approach = in.approach;
    Score score = assemble_score(design, model, in, beta);
    for (int iter = 0;; ++iter) {
        fit.iterations = iter;
        fit.score_norm = detail::scaled_norm(score.total, n);
        if (!std::isfinite(fit.score_norm)) break;
        if (fit.score_norm <= options.tol_score) {
            fit.converged = true;
            break;
        }
        if (iter == options.max_iter) break;

        Eigen::FullPivLU<Eigen::MatrixXd> lu(score.jacobian);
        if (!lu.isInvertible()) throw SingularSystem("score Jacobian is singular at iteration " + std::to_string(iter));
        const Eigen::VectorXd step = lu.solve(-score.total);

        const double current = score.total.norm();
        double scale = 1.0;
        Eigen::VectorXd candidate = beta + step;
        Score trial = assemble_score(design, model, in, candidate);
        for (int h = 0; h < options.max_halvings && !(trial.total.allFinite() && trial.total.norm() < current); ++h) {
            scale *= 0.5;
            candidate = beta + scale * step;
            trial = assemble_score(design, model, in, candidate);
        }
        beta = std::move(candidate);
        score = std::move(trial);
    }
    fit.beta = beta;
    fit.jacobian = score.jacobian;
    fit.contributions = score.contributions;
    return fit;
}

// Convenience: weights or pseudo-values from the data, then solve.
inline FitResult fit_approach(Approach approach, const Dataset& data, const ModelSpec& model,
                              const SolverOptions& options = {}, unsigned threads = 1) {
    const auto censoring = fit_censoring(data);
    return solve(data.design(), model, make_inputs(approach, data, censoring, threads), options);
}

}  // namespace ipcw
