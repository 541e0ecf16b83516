#include "palmtex/error.hpp"

namespace palmtex {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnreadableFile: return "UnreadableFile";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::NotGrayConvertible: return "NotGrayConvertible";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::KernelTooLarge: return "KernelTooLarge";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ImageTooSmall: return "ImageTooSmall";
        case ErrorCode::MixedKernelSizes: return "MixedKernelSizes";
        case ErrorCode::InvalidFilterBank: return "InvalidFilterBank";
        case ErrorCode::EmptyCodeImage: return "EmptyCodeImage";
        case ErrorCode::TagMismatch: return "TagMismatch";
        case ErrorCode::TooFewVectors: return "TooFewVectors";
        case ErrorCode::DegenerateZeroVector: return "DegenerateZeroVector";
        case ErrorCode::EmptyTemplateSet: return "EmptyTemplateSet";
        case ErrorCode::EmptyGallery: return "EmptyGallery";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::MissingSession: return "MissingSession";
        case ErrorCode::EmptyScores: return "EmptyScores";
        case ErrorCode::DegenerateRoc: return "DegenerateRoc";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::InvalidManifest: return "InvalidManifest";
    }
    return "Unknown";
}

}  // namespace palmtex
