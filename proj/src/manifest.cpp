#include "mcad/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcad/errors.hpp"

namespace fs = std::filesystem;

namespace mcad::harness {

namespace {

constexpr const char* kHeader = "path,label,laterality,split";

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

std::vector<ManifestEntry> DatasetManifest::split(const std::string& name) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : entries) {
        if (e.split == name) out.push_back(e);
    }
    return out;
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open manifest: " + path);

    DatasetManifest manifest;
    manifest.base_dir = fs::path(path).parent_path().string();

    std::string line;
    if (!std::getline(is, line)) throw ParseError("manifest is empty (missing header): " + path);
    if (strip_cr(line) != kHeader) {
        throw ParseError("manifest " + path + " line 1: header must be exactly \"" +
                         std::string(kHeader) + "\"");
    }

    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::string where = "manifest " + path + " line " + std::to_string(line_no);

        const auto fields = split_fields(line);
        if (fields.size() != 4) {
            throw ParseError(where + ": expected 4 fields, got " + std::to_string(fields.size()));
        }
        ManifestEntry e;
        e.path = fields[0];
        if (e.path.empty()) throw ParseError(where + ": empty image path");
        if (fields[1] == "0") {
            e.label = 0;
        } else if (fields[1] == "1") {
            e.label = 1;
        } else {
            throw ParseError(where + ": label must be 0 or 1, got \"" + fields[1] + "\"");
        }
        if (fields[2].size() != 1) throw ParseError(where + ": bad laterality \"" + fields[2] + "\"");
        try {
            e.laterality = img::laterality_from_code(fields[2][0]);
        } catch (const ParseError& pe) {
            throw ParseError(where + ": " + pe.what());
        }
        if (fields[3] != "train" && fields[3] != "val") {
            throw ParseError(where + ": split must be train or val, got \"" + fields[3] + "\"");
        }
        e.split = fields[3];

        const std::string resolved = resolve_path(manifest, e);
        if (!fs::exists(resolved)) {
            throw IoError(where + ": image file not found: " + resolved);
        }
        manifest.entries.push_back(std::move(e));
    }

    if (manifest.entries.empty()) {
        std::cerr << "warning: manifest " << path << " has no data rows\n";
    }
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open manifest for writing: " + path);
    os << kHeader << "\n";
    for (const auto& e : manifest.entries) {
        os << e.path << "," << e.label << "," << img::laterality_code(e.laterality) << ","
           << e.split << "\n";
    }
    if (!os) throw IoError("manifest write failed: " + path);
}

std::string resolve_path(const DatasetManifest& manifest, const ManifestEntry& entry) {
    const fs::path p(entry.path);
    if (p.is_absolute() || manifest.base_dir.empty()) return entry.path;
    return (fs::path(manifest.base_dir) / p).string();
}

img::GrayImage load_entry_image(const DatasetManifest& manifest, const ManifestEntry& entry) {
    img::GrayImage im = img::read_pgm(resolve_path(manifest, entry));
    im.laterality = entry.laterality;
    return im;
}

}  // namespace mcad::harness
