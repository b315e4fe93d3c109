#pragma once

#include <stdexcept>
#include <string>

namespace linlaw {

/// Failure categories surfaced by the library. The CLI maps
/// NumericalFailure to exit code 2 and everything else to exit code 1.
enum class ErrorCode {
    SeriesTooShort,
    InvalidConfig,
    NumericalFailure,
    EmptyDataset,
    HeaderMismatch,
    ParseError,
    SplitInfeasible,
    InvalidRatio,
    IoError,
    DimensionMismatch,
    EmptyGroup,
    MalformedTable,
    LengthMismatch,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

} // namespace linlaw
