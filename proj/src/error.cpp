#include "linlaw/error.hpp"

namespace linlaw {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SplitInfeasible: return "SplitInfeasible";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::MalformedTable: return "MalformedTable";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    }
    return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace linlaw
