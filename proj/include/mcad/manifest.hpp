#pragma once

#include <string>
#include <vector>

#include "mcad/image.hpp"

namespace mcad::harness {

struct ManifestEntry {
    std::string path;  // as written in the CSV, resolved against the manifest's directory
    int label = 0;     // 0 benign, 1 malignant
    img::Laterality laterality = img::Laterality::Unknown;
    std::string split;  // "train" or "val"
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::string base_dir;

    std::vector<ManifestEntry> split(const std::string& name) const;
};

/// CSV schema (exact): header `path,label,laterality,split`; label in {0,1};
/// laterality in {L,R,U}; split in {train,val}. Malformed rows raise
/// ParseError with the line number; rows whose image file is missing raise
/// IoError with the line number and path. A header-only file yields an empty
/// manifest (with a warning on stderr).
DatasetManifest load_manifest(const std::string& path);

void save_manifest(const DatasetManifest& manifest, const std::string& path);

std::string resolve_path(const DatasetManifest& manifest, const ManifestEntry& entry);

/// read_pgm + laterality tag from the manifest entry.
img::GrayImage load_entry_image(const DatasetManifest& manifest, const ManifestEntry& entry);

}  // namespace mcad::harness
