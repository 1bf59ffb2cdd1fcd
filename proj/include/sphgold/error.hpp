// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sphgold {

enum class ErrorCode {
    InvalidArgument,
    SizeOutOfRange,
    ZeroState,
    NonPrimitivePolynomial,
    NoPreferredPair,
    LengthMismatch,
    NonDivisible,
    Infeasible,
    IndexOutOfRange,
    SupportMismatch,
    EmptyCodebook,
    CodeLengthMismatch,
    EmptyBeams,
    UnknownBeam,
    AngleOffGrid,
    EmptyWindow,
    EmptyCurve,
    MissingM,
    MalformedCsv,
    DimensionMismatch,
    ConfigError,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Process exit codes used by the CLI: 2 config, 3 data, 4 infeasible.
int exit_code_for(ErrorCode code);

} // namespace sphgold
