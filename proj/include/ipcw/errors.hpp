#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ipcw {

// Base class for every error raised by the library. Callers that only need
// to distinguish "bad data" from "bad usage" can catch this and
// std::invalid_argument respectively.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutcomeUnobserved : public Error {
public:
    OutcomeUnobserved(double exit_time, double horizon)
        : Error(describe(exit_time, horizon)), exit_time_(exit_time), horizon_(horizon) {}

    double exit_time() const noexcept { return exit_time_; }
    double horizon() const noexcept { return horizon_; }

private:
    static std::string describe(double exit_time, double horizon) {
        std::ostringstream os;
        os << "outcome unobserved: record censored at " << exit_time << " before horizon " << horizon;
        return os.str();
    }
    double exit_time_;
    double horizon_;
};

class StratumEmpty : public Error {
public:
    explicit StratumEmpty(int stratum)
        : Error("stratum " + std::to_string(stratum) + " has no records"), stratum_(stratum) {}
    int stratum() const noexcept { return stratum_; }

private:
    int stratum_;
};

class StratumTooSmall : public Error {
public:
    StratumTooSmall(int stratum, std::size_t size)
        : Error("stratum " + std::to_string(stratum) + " has " + std::to_string(size) +
                " record(s); leave-one-out needs at least 2"),
          stratum_(stratum) {}
    int stratum() const noexcept { return stratum_; }

private:
    int stratum_;
};

// A weight was demanded whose censoring-survival denominator is zero.
class PositivityViolation : public Error {
public:
    PositivityViolation(std::optional<int> stratum, double time, std::optional<std::size_t> left_out = {})
        : Error(describe(stratum, time, left_out)), stratum_(stratum), time_(time), left_out_(left_out) {}

    std::optional<int> stratum() const noexcept { return stratum_; }
    double time() const noexcept { return time_; }
    std::optional<std::size_t> left_out() const noexcept { return left_out_; }

private:
    static std::string describe(std::optional<int> stratum, double time, std::optional<std::size_t> left_out) {
        std::ostringstream os;
        os << "positivity violation: censoring survival is zero";
        if (stratum) os << " in stratum " << *stratum;
        os << " at time " << time;
        if (left_out) os << " (leave-one-out refit without record " << *left_out << ")";
        return os.str();
    }
    std::optional<int> stratum_;
    double time_;
    std::optional<std::size_t> left_out_;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class UnsupportedContrast : public Error {
public:
    UnsupportedContrast() : Error("closed forms exist only for the contrasts (1,0) and (0,1)") {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Malformed input file. `line` is 1-based and counts the header line.
class DataFormatError : public Error {
public:
    DataFormatError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace ipcw
