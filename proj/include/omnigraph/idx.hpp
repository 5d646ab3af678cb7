#pragma once

#include <filesystem>
#include <vector>

#include "omnigraph/equirect.hpp"

namespace omnigraph {

struct LabeledImage {
    PlanarImage image;
    int label;
};

// IDX layout (all header integers 32-bit big-endian):
//   images: magic 0x00000803, count, rows, cols, then count*rows*cols bytes
//   labels: magic 0x00000801, count, then count bytes
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Loads an IDX image/label pair, scaling pixel bytes to [0, 1].
/// Throws FormatError on bad magic, non-square images, truncation or a count
/// mismatch; IoError when a file cannot be read.
std::vector<LabeledImage> load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

}  // namespace omnigraph
