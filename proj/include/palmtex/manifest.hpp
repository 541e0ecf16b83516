#pragma once

#include "palmtex/evaluation.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace palmtex {

struct ManifestRow {
    SampleKey key;
    std::filesystem::path path;
    std::string band;
};

//! CSV with header `subject_id,session,sample_index,path,band`. Relative
//! paths resolve against the manifest's directory. Throws InvalidManifest
//! on malformed rows or duplicate (subject_id, session, sample_index).
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

//! Writes rows in the given order; paths are written as stored.
void write_manifest(const std::vector<ManifestRow>& rows, const std::filesystem::path& path);

std::vector<SampleKey> keys_of(const std::vector<ManifestRow>& rows);

}  // namespace palmtex
