#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "omnigraph/equirect.hpp"
#include "omnigraph/idx.hpp"

namespace omnigraph {

/// The nine tangency points {0, 1/8, 1/4} x {-1/8, 0, 1/8} (radians),
/// latitude-major.
std::vector<SphericalPoint> default_positions();

struct DatasetSpec {
    std::vector<SphericalPoint> positions = default_positions();
    std::vector<int> classes = {0, 1, 2};
    int train = 600;
    int val = 200;
    int test = 300;
    std::uint64_t seed = 1;
    double half_extent = 0.5;

    int total() const { return train + val + test; }
    bool operator==(const DatasetSpec& o) const;
};

struct Sample {
    EquirectImage image;
    int label;          // index into DatasetSpec::classes
    int position;       // index into DatasetSpec::positions
};

struct Dataset {
    EquirectGrid grid;
    DatasetSpec spec;
    std::vector<Sample> train;
    std::vector<Sample> val;
    std::vector<Sample> test;
};

/// Draws spec.total() source images of the requested classes, assigns each a
/// uniformly sampled tangency position and renders it onto `grid`. The result
/// depends only on (spec, grid, source). Throws InsufficientData when the
/// source holds too few images of the requested classes.
Dataset build_mnist012(const DatasetSpec& spec, const EquirectGrid& grid, const std::vector<LabeledImage>& source);

/// One source image per requested class that none of the splits drew, in
/// class order. Throws InsufficientData when a class has none left.
std::vector<PlanarImage> held_out_images(const DatasetSpec& spec, const std::vector<LabeledImage>& source);

// Cache file, all little-endian:
//   "OGDS", u32 version, u32 W, u32 H,
//   u32 n_positions, n_positions x (f64 phi, f64 theta),
//   u32 train, u32 val, u32 test, u64 seed, f64 half_extent,
//   u32 n_classes, n_classes x i32 digit,
//   then for train, val, test: u32 count, count x
//     (i32 label, u32 position, f64 phi, f64 theta, W*H x f64 value)
inline constexpr std::uint32_t kDatasetCacheVersion = 1;

void save_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace omnigraph
