#pragma once
// Error taxonomy shared across the toolkit. Every error that relates to a
// specific input location carries that location (line number, step index,
// trajectory key) so callers can report it without string parsing.

#include <stdexcept>
#include <string>
#include <vector>

namespace coact {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- ingest -----------------------------------------------------------

struct ParseError : Error {
    int line_no;
    ParseError(int line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_no(line) {}
};

struct ValidationError : Error {
    std::string task_id;
    std::string user_id;
    std::vector<std::string> violations;
    ValidationError(std::string task, std::string user, std::vector<std::string> v)
        : Error(format(task, user, v)),
          task_id(std::move(task)),
          user_id(std::move(user)),
          violations(std::move(v)) {}

  private:
    static std::string format(const std::string& task, const std::string& user,
                              const std::vector<std::string>& v) {
        std::string msg = "trajectory (" + task + ", " + user + ") invalid:";
        for (const auto& s : v) msg += " [" + s + "]";
        return msg;
    }
};

struct IoError : Error {
    using Error::Error;
};

struct UnknownStepError : Error {
    std::string task_id, user_id;
    int step;
    UnknownStepError(std::string task, std::string user, int s)
        : Error("unknown step " + std::to_string(s) + " for trajectory (" + task + ", " + user +
                ")"),
          task_id(std::move(task)),
          user_id(std::move(user)),
          step(s) {}
};

struct DuplicateEntryError : Error {
    using Error::Error;
};

// --- corpus / features -------------------------------------------------

struct EmptyCorpusError : Error {
    using Error::Error;
};

struct EmptyInputError : Error {
    using Error::Error;
};

struct UnknownUserError : Error {
    UnknownUserError(const std::string& user) : Error("unknown user: " + user) {}
};

// --- clustering ---------------------------------------------------------

struct TooFewRowsError : Error {
    using Error::Error;
};

struct WrongKError : Error {
    using Error::Error;
};

struct KeyMismatchError : Error {
    using Error::Error;
};

// --- metrics -------------------------------------------------------------

struct LengthMismatchError : Error {
    using Error::Error;
};

struct EmptyCountsError : Error {
    using Error::Error;
};

struct BadThresholdError : Error {
    using Error::Error;
};

struct MissingPredictionError : Error {
    std::string task_id, user_id;
    int step;
    MissingPredictionError(std::string task, std::string user, int s)
        : Error("missing prediction for step " + std::to_string(s) + " of trajectory (" + task +
                ", " + user + ")"),
          task_id(std::move(task)),
          user_id(std::move(user)),
          step(s) {}
};

struct DegenerateInputError : Error {
    using Error::Error;
};

// --- predictors ------------------------------------------------------------

struct IndexOutOfRangeError : Error {
    using Error::Error;
};

struct SingleClassError : Error {
    using Error::Error;
};

struct UnfittedModelError : Error {
    using Error::Error;
};

struct EmptyValidationError : Error {
    using Error::Error;
};

struct InfeasibleSplitError : Error {
    using Error::Error;
};

// --- synth / config --------------------------------------------------------

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace coact
