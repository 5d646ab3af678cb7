#include "omnigraph/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "omnigraph/error.hpp"

namespace omnigraph {

void write_pgm(const std::filesystem::path& path, const EquirectImage& img) {
    const auto [lo_it, hi_it] = std::minmax_element(img.values.begin(), img.values.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const int w = img.grid.width();
    const int h = img.grid.height();
    out << "P5\n" << w << ' ' << h << "\n255\n";
    std::vector<char> row(w);
    for (int v = h - 1; v >= 0; --v) {
        for (int u = 0; u < w; ++u) {
            const double t = range > 0.0 ? (img.values[img.grid.node(u, v)] - lo) / range : 0.0;
            row[u] = static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0)));
        }
        out.write(row.data(), w);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_values_csv(const std::filesystem::path& path, const EquirectImage& img) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "v,u,value\n";
    char buf[64];
    for (int v = 0; v < img.grid.height(); ++v) {
        for (int u = 0; u < img.grid.width(); ++u) {
            std::snprintf(buf, sizeof buf, "%.17g", img.values[img.grid.node(u, v)]);
            out << v << ',' << u << ',' << buf << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_)) {
        throw IoError("cannot create run directory " + root_.string());
    }
}

std::filesystem::path RunDirectory::file(const std::string& name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
    return root_ / name;
}

void RunDirectory::note(const std::string& key, const std::string& value) { notes_.emplace_back(key, value); }

std::vector<ManifestEntry> RunDirectory::write_manifest() const {
    std::vector<ManifestEntry> entries;
    for (const auto& name : files_) {
        std::error_code ec;
        const auto size = std::filesystem::file_size(root_ / name, ec);
        if (ec) throw IoError("listed output " + (root_ / name).string() + " was not written");
        entries.push_back({name, size});
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    std::ofstream out(root_ / "manifest.txt");
    if (!out) throw IoError("cannot write manifest in " + root_.string());
    for (const auto& e : entries) out << e.name << '\t' << e.size << '\n';
    for (const auto& [k, v] : notes_) out << "# " << k << '=' << v << '\n';
    if (!out) throw IoError("write failed: manifest.txt");
    return entries;
}

}  // namespace omnigraph
