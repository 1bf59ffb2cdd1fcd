// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#include "sphgold/error.hpp"

namespace sphgold {

std::string_view error_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SizeOutOfRange: return "SizeOutOfRange";
    case ErrorCode::ZeroState: return "ZeroState";
    case ErrorCode::NonPrimitivePolynomial: return "NonPrimitivePolynomial";
    case ErrorCode::NoPreferredPair: return "NoPreferredPair";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonDivisible: return "NonDivisible";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::EmptyCodebook: return "EmptyCodebook";
    case ErrorCode::CodeLengthMismatch: return "CodeLengthMismatch";
    case ErrorCode::EmptyBeams: return "EmptyBeams";
    case ErrorCode::UnknownBeam: return "UnknownBeam";
    case ErrorCode::AngleOffGrid: return "AngleOffGrid";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::EmptyCurve: return "EmptyCurve";
    case ErrorCode::MissingM: return "MissingM";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Infeasible:
        return 4;
    case ErrorCode::MalformedCsv:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::LengthMismatch:
    case ErrorCode::SupportMismatch:
    case ErrorCode::CodeLengthMismatch:
    case ErrorCode::EmptyCodebook:
    case ErrorCode::EmptyBeams:
    case ErrorCode::UnknownBeam:
    case ErrorCode::AngleOffGrid:
    case ErrorCode::EmptyWindow:
    case ErrorCode::EmptyCurve:
        return 3;
    default:
        return 2;
    }
}

} // namespace sphgold
