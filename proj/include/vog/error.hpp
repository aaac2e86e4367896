#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vog {

enum class ErrorCode {
    InvalidArgument,
    GeometryOutOfBounds,
    FrameMalformed,
    PupilNotFound,
    P1NotFound,
    P4NotFound,
    EmptyAOI,
    TooFewPoints,
    RankDeficient,
    ParseError,
    SchemaError,
    NoSegments,
    SegmentTooShort,
    TooFewAmplitudes,
    DegenerateDrivenSlope,
    NonMonotoneTimestamps,
    ScheduleMismatch,
    CorruptSegment,
    ManifestMismatch,
    StorageFull,
    IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; code() identifies the
// contract violation, what() carries a human-readable description.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GeometryOutOfBounds: return "GeometryOutOfBounds";
    case ErrorCode::FrameMalformed: return "FrameMalformed";
    case ErrorCode::PupilNotFound: return "PupilNotFound";
    case ErrorCode::P1NotFound: return "P1NotFound";
    case ErrorCode::P4NotFound: return "P4NotFound";
    case ErrorCode::EmptyAOI: return "EmptyAOI";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::NoSegments: return "NoSegments";
    case ErrorCode::SegmentTooShort: return "SegmentTooShort";
    case ErrorCode::TooFewAmplitudes: return "TooFewAmplitudes";
    case ErrorCode::DegenerateDrivenSlope: return "DegenerateDrivenSlope";
    case ErrorCode::NonMonotoneTimestamps: return "NonMonotoneTimestamps";
    case ErrorCode::ScheduleMismatch: return "ScheduleMismatch";
    case ErrorCode::CorruptSegment: return "CorruptSegment";
    case ErrorCode::ManifestMismatch: return "ManifestMismatch";
    case ErrorCode::StorageFull: return "StorageFull";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace vog
