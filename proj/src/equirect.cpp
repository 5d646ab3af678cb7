#include "omnigraph/equirect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omnigraph/error.hpp"

namespace omnigraph {

EquirectGrid::EquirectGrid(int width, int height)
    : width_(width), height_(height), delta_theta_(2.0 * kPi / width), delta_phi_(kPi / height) {
    if (width < 4 || height < 2) {
        throw DomainError("equirectangular grid needs W >= 4 and H >= 2, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
}

EquirectImage::EquirectImage(EquirectGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
        throw ShapeError("equirectangular image has " + std::to_string(values.size()) + " values, grid needs " +
                         std::to_string(grid.size()));
    }
}

PlanarImage::PlanarImage(int s, std::vector<double> v) : side(s), values(std::move(v)) {
    if (s <= 0 || values.size() != static_cast<std::size_t>(s) * s) {
        throw ShapeError("planar image must be square with side*side values");
    }
}

double PlanarImage::sample(double row, double col) const {
    const double last = side - 1;
    row = std::clamp(row, 0.0, last);
    col = std::clamp(col, 0.0, last);
    const int r0 = std::min(static_cast<int>(row), side - 1);
    const int c0 = std::min(static_cast<int>(col), side - 1);
    const int r1 = std::min(r0 + 1, side - 1);
    const int c1 = std::min(c0 + 1, side - 1);
    const double fr = row - r0;
    const double fc = col - c0;
    return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c1)) + fr * ((1 - fc) * at(r1, c0) + fc * at(r1, c1));
}

namespace {

double render_node(const PlanarImage& img, const TangentFrame& frame, const EquirectGrid& grid, double a,
                   std::size_t n) {
    const auto q = try_gnomonic_fwd(frame, grid.point(n));
    if (!q || std::abs(q->x) > a || std::abs(q->y) > a) return 0.0;
    // plane x grows to the right, plane y grows upwards (north)
    const double scale = img.side / (2.0 * a);
    const double col = (q->x + a) * scale - 0.5;
    const double row = (a - q->y) * scale - 0.5;
    return img.sample(row, col);
}

void check_extent(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("tangent half extent must be positive");
}

}  // namespace

EquirectImage render_equirect(const PlanarImage& img, const TangentFrame& frame, const EquirectGrid& grid,
                              double half_extent) {
    check_extent(half_extent);
    EquirectImage out(grid);
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out.values[i] = render_node(img, frame, grid, half_extent, static_cast<std::size_t>(i));
    }
    return out;
}

EquirectImage render_equirect_serial(const PlanarImage& img, const TangentFrame& frame, const EquirectGrid& grid,
                                     double half_extent) {
    check_extent(half_extent);
    EquirectImage out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = render_node(img, frame, grid, half_extent, i);
    return out;
}

EquirectImage shift_columns(const EquirectImage& img, int k) {
    const int w = img.grid.width();
    const int shift = ((k % w) + w) % w;
    EquirectImage out(img.grid);
    for (int v = 0; v < img.grid.height(); ++v) {
        for (int u = 0; u < w; ++u) out.values[img.grid.node((u + shift) % w, v)] = img.values[img.grid.node(u, v)];
    }
    return out;
}

}  // namespace omnigraph
