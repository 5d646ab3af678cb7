#pragma once

#include <cstddef>
#include <vector>

#include "omnigraph/sphere_geometry.hpp"

namespace omnigraph {

/// Regular (theta, phi) sampling lattice of an equirectangular image.
///
/// Column u sits at longitude theta_u = -pi + u * delta_theta, row v at the
/// cell-centred latitude phi_v = -pi/2 + (v + 0.5) * delta_phi, so no sample
/// falls on a pole. Row 0 is the southernmost row. Node index n = v * W + u.
class EquirectGrid {
public:
    EquirectGrid(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return static_cast<std::size_t>(width_) * height_; }
    double delta_theta() const { return delta_theta_; }
    double delta_phi() const { return delta_phi_; }

    double phi(int v) const { return -kPi / 2 + (v + 0.5) * delta_phi_; }
    double theta(int u) const { return -kPi + u * delta_theta_; }
    std::size_t node(int u, int v) const { return static_cast<std::size_t>(v) * width_ + u; }
    int column(std::size_t n) const { return static_cast<int>(n % width_); }
    int row(std::size_t n) const { return static_cast<int>(n / width_); }
    SphericalPoint point(std::size_t n) const { return {phi(row(n)), theta(column(n))}; }

    bool operator==(const EquirectGrid& o) const { return width_ == o.width_ && height_ == o.height_; }

private:
    int width_;
    int height_;
    double delta_theta_;
    double delta_phi_;
};

/// Scalar signal on an equirectangular grid.
struct EquirectImage {
    EquirectImage(EquirectGrid g, std::vector<double> v);
    explicit EquirectImage(EquirectGrid g) : grid(g), values(g.size(), 0.0) {}

    EquirectGrid grid;
    std::vector<double> values;
};

/// Square planar image, row 0 at the top, intensities in [0, 1].
struct PlanarImage {
    PlanarImage(int side, std::vector<double> v);

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * side + col]; }

    /// Bilinear sample at continuous pixel coordinates (pixel centres on
    /// integers), clamping to the border pixels.
    double sample(double row, double col) const;

    int side;
    std::vector<double> values;
};

/// Projects a planar image lying on the tangent plane `frame` onto the grid.
/// The plane square [-a, a]^2 maps onto the image; nodes outside it or on the
/// far hemisphere are set to 0.
EquirectImage render_equirect(const PlanarImage& img, const TangentFrame& frame, const EquirectGrid& grid,
                              double half_extent);

/// Single-threaded reference for render_equirect.
EquirectImage render_equirect_serial(const PlanarImage& img, const TangentFrame& frame, const EquirectGrid& grid,
                                     double half_extent);

/// Circular shift by k columns: out(u + k, v) = in(u, v).
EquirectImage shift_columns(const EquirectImage& img, int k);

}  // namespace omnigraph
