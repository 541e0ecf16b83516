#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace palmtex {

enum class ErrorCode {
    UnreadableFile,
    UnsupportedFormat,
    NotGrayConvertible,
    OutOfBounds,
    KernelTooLarge,
    InvalidArgument,
    ImageTooSmall,
    MixedKernelSizes,
    InvalidFilterBank,
    EmptyCodeImage,
    TagMismatch,
    TooFewVectors,
    DegenerateZeroVector,
    EmptyTemplateSet,
    EmptyGallery,
    InsufficientSamples,
    MissingSession,
    EmptyScores,
    DegenerateRoc,
    EmptyCorpus,
    RankDeficient,
    DimensionMismatch,
    IoFailure,
    InvalidManifest,
};

std::string_view to_string(ErrorCode code);

//! Library-wide exception; every failure mode carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace palmtex
