#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "omnigraph/equirect.hpp"

namespace omnigraph {

/// 8-bit binary PGM (P5) of an equirectangular signal, min-max normalised;
/// the northernmost row is written first. A constant signal maps to 0.
void write_pgm(const std::filesystem::path& path, const EquirectImage& img);

/// Raw values as CSV with header "v,u,value", one row per node.
void write_values_csv(const std::filesystem::path& path, const EquirectImage& img);

struct ManifestEntry {
    std::string name;
    std::uintmax_t size;
};

/// Output directory of one command. Every file written through it is listed
/// in manifest.txt ("<name>\t<bytes>" per line, sorted by name).
class RunDirectory {
public:
    explicit RunDirectory(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    /// Path for `name` inside the run directory; records it for the manifest.
    std::filesystem::path file(const std::string& name);
    /// Extra key/value lines appended after the file list ("# key=value").
    void note(const std::string& key, const std::string& value);

    std::vector<ManifestEntry> write_manifest() const;

private:
    std::filesystem::path root_;
    std::vector<std::string> files_;
    std::vector<std::pair<std::string, std::string>> notes_;
};

}  // namespace omnigraph
