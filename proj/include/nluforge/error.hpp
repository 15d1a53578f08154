#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nluforge {

enum class ErrorCode {
    Io,
    MalformedRecord,
    SchemaMismatch,
    EmptyCorpus,
    UnknownLabel,
    TemplateTaskMismatch,
    EmptySchema,
    TaskMismatch,
    EmptyTarget,
    UnsupportedFormat,
    ParseFailure,
    NoLegalCandidate,
    NotDeterministic,
    TaskNotApplicable,
    WrongExemplarCount,
    MissingField,
    UnparsableLabel,
    InvalidNewGold,
    LlmUnavailable,
    CacheMiss,
    ResponseTooLong,
    InvalidDistribution,
    PoolExhausted,
    LengthMismatch,
    GoldNotInChoices,
    StyleMismatch,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for every recoverable failure in the toolkit; the
/// code drives CLI exit status and machine-readable error reports.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace nluforge
