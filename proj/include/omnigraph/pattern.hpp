#pragma once

#include <array>
#include <utility>

#include "omnigraph/sphere_geometry.hpp"

namespace omnigraph {

// A node p0 and its four grid neighbours: p1 at +delta_theta, p3 at
// -delta_theta (same row), p2 at +delta_phi, p4 at -delta_phi (same column).
// `values` holds the planar pattern sampled at the equator, `phi` is the
// latitude of the tangency node it is moved to.
struct FivePointPattern {
    std::array<double, 5> values{};
    double delta_theta = 0.0;
    double delta_phi = 0.0;
    double phi = 0.0;
};

/// Bilinear weights of a displaced neighbour inside the cell spanned by p0,
/// the horizontal neighbour and the vertical neighbour. a + b spans the cell
/// horizontally, c + d vertically, e = (c + d)(a + b).
struct InterpWeights {
    double a = 0.0;  // horizontal distance from p0
    double b = 0.0;  // horizontal distance from the horizontal neighbour
    double c = 0.0;  // vertical distance from p0
    double d = 0.0;  // vertical distance from the vertical neighbour
    double e = 0.0;
};

struct PatternWeights {
    double w_h = 1.0;   // horizontal, equator
    double w_v = 1.0;   // vertical, equator
    double w_ih = 1.0;  // horizontal, at the displaced latitude
    double w_iv = 1.0;  // vertical, at the displaced latitude
};

/// Tangent-plane positions of the pattern at the equator:
/// (0,0), (tan dtheta, 0), (0, tan dphi), (-tan dtheta, 0), (0, -tan dphi).
std::array<PlanePoint, 5> equator_plane_positions(double delta_theta, double delta_phi);

/// Closed-form tangent-plane positions of the grid neighbours of a node at
/// latitude phi, on the plane tangent at that node.
std::array<PlanePoint, 5> displaced_plane_positions(double phi, double delta_theta, double delta_phi);

/// Weights of the displaced p1 position (p3 is its mirror image).
/// Throws DegenerateGeometry when the position leaves the interpolation cell.
InterpWeights interp_weights(const FivePointPattern& pat);

/// Pattern values at the displaced p1 and p3 positions, interpolated from
/// p0, the horizontal neighbour and the vertical neighbour on the side the
/// displacement points to. The missing far corner of the cell carries no
/// value, so the three corner weights are renormalised to sum to one.
std::pair<double, double> interp_pattern(const FivePointPattern& pat);

/// Degree-1 response L y at p0 with all four neighbours at their equator
/// positions.
double response_at_equator(const FivePointPattern& pat, const PatternWeights& w);

/// Degree-1 response at the tangency node after moving the pattern to
/// latitude pat.phi; horizontal neighbours take interpolated values.
double response_displaced(const FivePointPattern& pat, const PatternWeights& w);

/// |response_at_equator - response_displaced|
double pattern_residual(const FivePointPattern& pat, const PatternWeights& w);

}  // namespace omnigraph
