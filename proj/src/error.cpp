#include "nluforge/error.hpp"

namespace nluforge {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Io: return "IoError";
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::TemplateTaskMismatch: return "TemplateTaskMismatch";
        case ErrorCode::EmptySchema: return "EmptySchema";
        case ErrorCode::TaskMismatch: return "TaskMismatch";
        case ErrorCode::EmptyTarget: return "EmptyTarget";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::ParseFailure: return "ParseFailure";
        case ErrorCode::NoLegalCandidate: return "NoLegalCandidate";
        case ErrorCode::NotDeterministic: return "NotDeterministic";
        case ErrorCode::TaskNotApplicable: return "TaskNotApplicable";
        case ErrorCode::WrongExemplarCount: return "WrongExemplarCount";
        case ErrorCode::MissingField: return "MissingField";
        case ErrorCode::UnparsableLabel: return "UnparsableLabel";
        case ErrorCode::InvalidNewGold: return "InvalidNewGold";
        case ErrorCode::LlmUnavailable: return "LlmUnavailable";
        case ErrorCode::CacheMiss: return "CacheMiss";
        case ErrorCode::ResponseTooLong: return "ResponseTooLong";
        case ErrorCode::InvalidDistribution: return "InvalidDistribution";
        case ErrorCode::PoolExhausted: return "PoolExhausted";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::GoldNotInChoices: return "GoldNotInChoices";
        case ErrorCode::StyleMismatch: return "StyleMismatch";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace nluforge
