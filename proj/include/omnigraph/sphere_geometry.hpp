#pragma once

#include <optional>

namespace omnigraph {

inline constexpr double kPi = 3.14159265358979323846;

// Points with cos c at or below this value are treated as lying on the far
// hemisphere of a tangent plane and are not projectable.
inline constexpr double kHemisphereCutoff = 1e-9;

/// Position on the unit sphere. Latitude phi lies in [-pi/2, pi/2];
/// longitude theta is wrapped into [-pi, pi) on construction.
class SphericalPoint {
public:
    SphericalPoint() = default;
    SphericalPoint(double phi, double theta);

    double phi() const { return phi_; }
    double theta() const { return theta_; }

private:
    double phi_ = 0.0;
    double theta_ = 0.0;
};

struct Cart3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Tangent plane touching the sphere at `tangency`. Requires |phi| < pi/2.
class TangentFrame {
public:
    explicit TangentFrame(SphericalPoint tangency);

    const SphericalPoint& tangency() const { return tangency_; }
    double sin_phi() const { return sin_phi_; }
    double cos_phi() const { return cos_phi_; }

private:
    SphericalPoint tangency_;
    double sin_phi_ = 0.0;
    double cos_phi_ = 1.0;
};

/// Coordinates on a tangent plane, in sphere radii.
struct PlanePoint {
    double x = 0.0;
    double y = 0.0;
};

double wrap_longitude(double theta);

Cart3 sph_to_cart(const SphericalPoint& p);

double cos_angular_distance(const TangentFrame& frame, const SphericalPoint& p);

/// Great-circle angle between the tangency point and p, in [0, pi].
double angular_distance(const TangentFrame& frame, const SphericalPoint& p);

/// Gnomonic projection of p onto the frame's plane, or nullopt when p is not
/// on the visible hemisphere (cos c <= kHemisphereCutoff).
std::optional<PlanePoint> try_gnomonic_fwd(const TangentFrame& frame, const SphericalPoint& p);

/// Throws HemisphereError where try_gnomonic_fwd returns nullopt.
PlanePoint gnomonic_fwd(const TangentFrame& frame, const SphericalPoint& p);

SphericalPoint gnomonic_inv(const TangentFrame& frame, const PlanePoint& q);

/// Straight-line (chord) distance through the sphere between two points.
double chord_distance(const SphericalPoint& a, const SphericalPoint& b);

}  // namespace omnigraph
