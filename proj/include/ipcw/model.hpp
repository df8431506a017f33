#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ipcw {

enum class Link { Identity, Exponential, Logistic };

// A(beta; x): the covariate itself, or d mu / d beta (Gaussian family).
enum class AChoice { Covariate, GaussianScore };

struct ModelSpec {
    Link link = Link::Identity;
    AChoice a_choice = AChoice::Covariate;
};

// mu(eta) and its first two derivatives with respect to eta.
struct LinkValues {
    double mu;
    double d1;
    double d2;
};

inline LinkValues link_values(Link link, double eta) {
    switch (link) {
        case Link::Identity:
            return {eta, 1.0, 0.0};
        case Link::Exponential: {
            const double e = std::exp(eta);
            return {e, e, e};
        }
        case Link::Logistic: {
            const double mu = eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
            const double d1 = mu * (1.0 - mu);
            return {mu, d1, d1 * (1.0 - 2.0 * mu)};
        }
    }
    return {eta, 1.0, 0.0};
}

inline Link parse_link(const std::string& name) {
    if (name == "identity") return Link::Identity;
    if (name == "exp" || name == "log") return Link::Exponential;
    if (name == "logit" || name == "logistic") return Link::Logistic;
    throw std::invalid_argument("unknown link '" + name + "'");
}

inline AChoice parse_a_choice(const std::string& name) {
    if (name == "covariate") return AChoice::Covariate;
    if (name == "gaussian") return AChoice::GaussianScore;
    throw std::invalid_argument("unknown A choice '" + name + "'");
}

inline std::string to_string(Link link) {
    switch (link) {
        case Link::Identity: return "identity";
        case Link::Exponential: return "exp";
        case Link::Logistic: return "logit";
    }
    return "unknown";
}

inline std::string to_string(AChoice a) { return a == AChoice::Covariate ? "covariate" : "gaussian"; }

}  // namespace ipcw
