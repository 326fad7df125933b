// Copyright 2026 The Dynatomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynatomo {

enum class ErrorCode {
    InvalidArgument,
    ShapeMismatch,
    NotHermitian,
    NoConvergence,
    NotPositiveDefinite,
    Singular,
    ZeroVector,
    DimensionTooSmall,
    OverrideViolatesReality,
    RealityViolated,
    OverrideNotOrthogonal,
    CertificationFailed,
    NegativeTime,
    SingularDesign,
    InvalidEffect,
    InvalidState,
    NotInformationallyComplete,
    LambdaOutOfRange,
    NotAFiducial,
    ParseError,
    SchemaError,
    InvariantError,
    GoldenMismatch,
    IoError,
};

/// Coarse grouping used by the command line front end to pick exit codes.
enum class ErrorCategory { Config, Numerical, Golden, Io };

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::Singular: return "Singular";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorCode::OverrideViolatesReality: return "OverrideViolatesReality";
        case ErrorCode::RealityViolated: return "RealityViolated";
        case ErrorCode::OverrideNotOrthogonal: return "OverrideNotOrthogonal";
        case ErrorCode::CertificationFailed: return "CertificationFailed";
        case ErrorCode::NegativeTime: return "NegativeTime";
        case ErrorCode::SingularDesign: return "SingularDesign";
        case ErrorCode::InvalidEffect: return "InvalidEffect";
        case ErrorCode::InvalidState: return "InvalidState";
        case ErrorCode::NotInformationallyComplete: return "NotInformationallyComplete";
        case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
        case ErrorCode::NotAFiducial: return "NotAFiducial";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::InvariantError: return "InvariantError";
        case ErrorCode::GoldenMismatch: return "GoldenMismatch";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

constexpr ErrorCategory category(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::SchemaError:
        case ErrorCode::InvariantError:
        case ErrorCode::InvalidArgument:
            return ErrorCategory::Config;
        case ErrorCode::GoldenMismatch:
            return ErrorCategory::Golden;
        case ErrorCode::IoError:
            return ErrorCategory::Io;
        default:
            return ErrorCategory::Numerical;
    }
}

class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

   private:
    ErrorCode code_;
};

}  // namespace dynatomo
