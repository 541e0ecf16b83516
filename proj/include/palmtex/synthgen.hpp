#pragma once

#include "palmtex/evaluation.hpp"
#include "palmtex/image.hpp"
#include "palmtex/manifest.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace palmtex {

struct SynthConfig {
    int subjects = 20;
    int samples_per_subject = 12;
    int sessions = 2;
    int image_side = 128;
    std::uint64_t seed = 1;
    double noise_sigma = 25.0;
    //! Largest per-sample translation in pixels; rotation, scale and
    //! illumination drift scale with it.
    double jitter = 5.0;

    //! throws InvalidArgument when an invariant is violated
    void validate() const;
};

struct SynthSample {
    SampleKey key;
    GrayImage image;
};

//! Renders the dataset in memory. Each subject owns 3-6 dark Catmull-Rom
//! curves on a mid-gray field; samples add seeded affine jitter, an
//! illumination ramp and Gaussian noise. With sessions = 2 the second half
//! of a subject's samples is session 2 and gets an extra fixed shift and
//! ramp. Deterministic for a given config.
std::vector<SynthSample> synthesize(const SynthConfig& cfg, unsigned threads = 1);

//! Writes `<out>/<subject>/<session>_<index>.pgm` plus `<out>/manifest.csv`
//! (relative paths). Throws IoFailure.
std::vector<ManifestRow> generate(const SynthConfig& cfg, const std::filesystem::path& out_dir, unsigned threads = 1);

}  // namespace palmtex
