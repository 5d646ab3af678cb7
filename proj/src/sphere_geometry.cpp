#include "omnigraph/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omnigraph/error.hpp"

namespace omnigraph {

double wrap_longitude(double theta) {
    if (theta >= -kPi && theta < kPi) return theta;
    double t = std::fmod(theta + kPi, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    t -= kPi;
    // fmod can land exactly on +pi after the shift for inputs just below -pi
    return t >= kPi ? t - 2.0 * kPi : t;
}

SphericalPoint::SphericalPoint(double phi, double theta) : phi_(phi), theta_(wrap_longitude(theta)) {
    if (!(phi >= -kPi / 2 && phi <= kPi / 2) || !std::isfinite(theta)) {
        throw DomainError("spherical point out of range: phi=" + std::to_string(phi) +
                          " theta=" + std::to_string(theta));
    }
}

TangentFrame::TangentFrame(SphericalPoint tangency)
    : tangency_(tangency), sin_phi_(std::sin(tangency.phi())), cos_phi_(std::cos(tangency.phi())) {
    if (!(std::abs(tangency.phi()) < kPi / 2)) {
        throw DomainError("tangent frame at a pole is not supported");
    }
}

Cart3 sph_to_cart(const SphericalPoint& p) {
    const double cp = std::cos(p.phi());
    return {std::cos(p.theta()) * cp, std::sin(p.theta()) * cp, std::sin(p.phi())};
}

double cos_angular_distance(const TangentFrame& frame, const SphericalPoint& p) {
    const double dtheta = p.theta() - frame.tangency().theta();
    return frame.sin_phi() * std::sin(p.phi()) + frame.cos_phi() * std::cos(p.phi()) * std::cos(dtheta);
}

double angular_distance(const TangentFrame& frame, const SphericalPoint& p) {
    // atan2 of |t x p| and t.p stays accurate for tiny and near-antipodal angles
    const Cart3 t = sph_to_cart(frame.tangency());
    const Cart3 q = sph_to_cart(p);
    const double cx = t.y * q.z - t.z * q.y;
    const double cy = t.z * q.x - t.x * q.z;
    const double cz = t.x * q.y - t.y * q.x;
    const double sin_c = std::sqrt(cx * cx + cy * cy + cz * cz);
    return std::atan2(sin_c, cos_angular_distance(frame, p));
}

std::optional<PlanePoint> try_gnomonic_fwd(const TangentFrame& frame, const SphericalPoint& p) {
    const double dtheta = p.theta() - frame.tangency().theta();
    const double sp = std::sin(p.phi());
    const double cp = std::cos(p.phi());
    const double cdt = std::cos(dtheta);
    const double cos_c = frame.sin_phi() * sp + frame.cos_phi() * cp * cdt;
    if (!(cos_c > kHemisphereCutoff)) return std::nullopt;
    return PlanePoint{cp * std::sin(dtheta) / cos_c, (frame.cos_phi() * sp - frame.sin_phi() * cp * cdt) / cos_c};
}

PlanePoint gnomonic_fwd(const TangentFrame& frame, const SphericalPoint& p) {
    auto q = try_gnomonic_fwd(frame, p);
    if (!q) {
        throw HemisphereError("point (" + std::to_string(p.phi()) + ", " + std::to_string(p.theta()) +
                              ") is not on the visible hemisphere of the tangent plane");
    }
    return *q;
}

SphericalPoint gnomonic_inv(const TangentFrame& frame, const PlanePoint& q) {
    const double rho = std::hypot(q.x, q.y);
    if (rho == 0.0) return frame.tangency();
    const double c = std::atan(rho);
    const double sc = std::sin(c);
    const double cc = std::cos(c);
    const double s = std::clamp(cc * frame.sin_phi() + q.y * sc * frame.cos_phi() / rho, -1.0, 1.0);
    const double phi = std::asin(s);
    const double theta =
        frame.tangency().theta() + std::atan2(q.x * sc, rho * frame.cos_phi() * cc - q.y * frame.sin_phi() * sc);
    return {phi, theta};
}

double chord_distance(const SphericalPoint& a, const SphericalPoint& b) {
    // haversine form: d = 2 sin(c/2)
    const double sdp = std::sin(0.5 * (b.phi() - a.phi()));
    const double sdt = std::sin(0.5 * (b.theta() - a.theta()));
    const double h = sdp * sdp + std::cos(a.phi()) * std::cos(b.phi()) * sdt * sdt;
    return 2.0 * std::sqrt(std::min(h, 1.0));
}

}  // namespace omnigraph
