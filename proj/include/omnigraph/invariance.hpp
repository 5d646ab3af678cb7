#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "omnigraph/network.hpp"
#include "omnigraph/pattern.hpp"

namespace omnigraph {

struct ResidualRow {
    double phi;
    double delta_theta;
    double residual_geometry;
    double residual_grid;
};

struct ResidualSweepOptions {
    int patterns = 100;
    std::uint64_t seed = 2018;
    double delta_phi_ratio = 1.0;  // delta_phi = ratio * delta_theta
};

/// Edge weights of the geometry graph around a node at latitude phi,
/// normalised so the horizontal equator weight is 1.
PatternWeights geometry_pattern_weights(double phi, double delta_theta, double delta_phi);

/// Mean pattern residual over random patterns (uniform in [0, 1]) for every
/// (phi, delta_theta) pair, under geometry weights and under unit grid
/// weights. Each pair sees the same pattern sequence.
std::vector<ResidualRow> residual_sweep(std::span<const double> phis, std::span<const double> delta_thetas,
                                        const ResidualSweepOptions& opts = {});

void write_residuals_csv(const std::filesystem::path& path, std::span<const ResidualRow> rows);

struct ProbeImage {
    EquirectImage image;
    int label;
    int position;
};

/// One source image per class rendered at every position, class-major.
std::vector<ProbeImage> make_probe_set(std::span<const PlanarImage> per_class, std::span<const SphericalPoint> positions,
                                       const EquirectGrid& grid, double half_extent);

/// Symmetric matrix of Euclidean distances between statistical-layer features,
/// taken after the network's fixed feature standardisation so that networks
/// on different graphs are compared on the same scale.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> values;  // row-major n x n
    std::vector<int> labels;
    std::vector<int> positions;

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// Throws ShapeError unless there are classes x positions images.
DistanceMatrix feature_distance_matrix(const NetworkParams& params, const NetworkConfig& cfg,
                                       std::span<const ProbeImage> images, const SparseLaplacian& ls,
                                       std::size_t expected = 27);

struct BlockMeans {
    double intra;  // same label, off the diagonal
    double inter;  // different labels
};

BlockMeans block_means(const DistanceMatrix& m);

void write_distance_matrix_csv(const std::filesystem::path& path, const DistanceMatrix& m);

/// Writes fm_l<layer>_<j>.pgm (min-max normalised) and fm_l<layer>_<j>.csv
/// for each requested filter of layer 1 or 2, before pooling. Returns the
/// written paths. Throws IndexError on a bad layer or filter index.
std::vector<std::filesystem::path> export_feature_maps(const NetworkParams& params, const NetworkConfig& cfg,
                                                       const EquirectImage& image, const SparseLaplacian& ls,
                                                       int layer, std::span<const int> filters,
                                                       const std::filesystem::path& dir);

/// Pulls an equirectangular signal back onto the tangent plane at `frame`:
/// side x side samples over [-a, a]^2, bilinear in (theta, phi).
PlanarImage tangent_plane_view(const EquirectImage& map, const TangentFrame& frame, double half_extent, int side);

/// Pearson correlation; 0 when either input is constant.
double correlation(std::span<const double> a, std::span<const double> b);

/// Mean pairwise correlation of every layer-2 feature map across the given
/// latitudes (theta = 0), after viewing every map on its own tangent plane.
double aligned_map_correlation(const NetworkParams& params, const NetworkConfig& cfg, const PlanarImage& object,
                               std::span<const double> phis, const EquirectGrid& grid, double half_extent,
                               const SparseLaplacian& ls);

}  // namespace omnigraph
