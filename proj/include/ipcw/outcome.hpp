#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ipcw/errors.hpp"

namespace ipcw {

enum class OutcomeKind {
    SurvivalIndicator,      // 1{T > t}
    CauseFailureIndicator,  // 1{T <= t, D = j}
    RestrictedTime,         // T ^ t
    TimeLostToCause,        // (t - T ^ t) 1{D = j}
};

// An outcome Y = y(T ^ t, D 1{T <= t}) determined by the horizon t.
struct OutcomeSpec {
    OutcomeKind kind = OutcomeKind::SurvivalIndicator;
    double horizon = 1.0;
    int cause = 1;  // only used by the cause-specific kinds

    static OutcomeSpec survival(double t) { return make(OutcomeKind::SurvivalIndicator, t, 1); }
    static OutcomeSpec failure(int cause, double t) { return make(OutcomeKind::CauseFailureIndicator, t, cause); }
    static OutcomeSpec restricted_time(double t) { return make(OutcomeKind::RestrictedTime, t, 1); }
    static OutcomeSpec time_lost(int cause, double t) { return make(OutcomeKind::TimeLostToCause, t, cause); }

    bool cause_specific() const noexcept {
        return kind == OutcomeKind::CauseFailureIndicator || kind == OutcomeKind::TimeLostToCause;
    }

    void validate() const {
        if (!(horizon > 0.0) || !std::isfinite(horizon)) {
            throw std::invalid_argument("outcome horizon must be positive and finite");
        }
        if (cause_specific() && cause < 1) {
            throw std::invalid_argument("cause must be a positive event type");
        }
    }

private:
    static OutcomeSpec make(OutcomeKind kind, double t, int cause) {
        OutcomeSpec spec{kind, t, cause};
        spec.validate();
        return spec;
    }
};

// Whether the outcome at the horizon is observed: the record left the study
// at or after t, or it failed (any cause) before t.
inline bool outcome_observed(double horizon, double exit_time, int exit_type) noexcept {
    return exit_time >= horizon || exit_type != 0;
}

inline double evaluate_outcome(const OutcomeSpec& spec, double exit_time, int exit_type) {
    const double t = spec.horizon;
    if (!outcome_observed(t, exit_time, exit_type)) throw OutcomeUnobserved(exit_time, t);

    const double stopped = std::min(exit_time, t);
    const int type_by_horizon = exit_time <= t ? exit_type : 0;

    switch (spec.kind) {
        case OutcomeKind::SurvivalIndicator:
            return type_by_horizon == 0 ? 1.0 : 0.0;
        case OutcomeKind::CauseFailureIndicator:
            return type_by_horizon == spec.cause ? 1.0 : 0.0;
        case OutcomeKind::RestrictedTime:
            return stopped;
        case OutcomeKind::TimeLostToCause:
            return type_by_horizon == spec.cause ? t - stopped : 0.0;
    }
    return 0.0;
}

inline std::string to_string(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::SurvivalIndicator: return "survival";
        case OutcomeKind::CauseFailureIndicator: return "failure";
        case OutcomeKind::RestrictedTime: return "restricted";
        case OutcomeKind::TimeLostToCause: return "lost";
    }
    return "unknown";
}

inline OutcomeKind parse_outcome_kind(const std::string& name) {
    if (name == "survival") return OutcomeKind::SurvivalIndicator;
    if (name == "failure") return OutcomeKind::CauseFailureIndicator;
    if (name == "restricted") return OutcomeKind::RestrictedTime;
    if (name == "lost") return OutcomeKind::TimeLostToCause;
    throw std::invalid_argument("unknown outcome kind '" + name + "'");
}

}  // namespace ipcw
