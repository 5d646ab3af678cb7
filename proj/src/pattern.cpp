#include "omnigraph/pattern.hpp"

#include <cmath>

#include "omnigraph/error.hpp"

namespace omnigraph {

std::array<PlanePoint, 5> equator_plane_positions(double delta_theta, double delta_phi) {
    const double tt = std::tan(delta_theta);
    const double tp = std::tan(delta_phi);
    return {{{0.0, 0.0}, {tt, 0.0}, {0.0, tp}, {-tt, 0.0}, {0.0, -tp}}};
}

std::array<PlanePoint, 5> displaced_plane_positions(double phi, double delta_theta, double delta_phi) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double cdt = std::cos(delta_theta);
    const double den = s * s + c * c * cdt;
    const double x = c * std::sin(delta_theta) / den;
    const double y = s * c * (1.0 - cdt) / den;
    const double tp = std::tan(delta_phi);
    return {{{0.0, 0.0}, {x, y}, {0.0, tp}, {-x, y}, {0.0, -tp}}};
}

InterpWeights interp_weights(const FivePointPattern& pat) {
    if (!(pat.delta_theta > 0.0) || !(pat.delta_phi > 0.0)) {
        throw DegenerateGeometry("pattern steps must be positive");
    }
    const auto pos = displaced_plane_positions(pat.phi, pat.delta_theta, pat.delta_phi);
    // sin/cos rather than tan so that phi = 0 gives b == 0 exactly
    const double width = std::sin(pat.delta_theta) / std::cos(pat.delta_theta);
    const double height = std::tan(pat.delta_phi);
    InterpWeights w;
    w.a = pos[1].x;
    w.b = width - pos[1].x;
    w.c = std::abs(pos[1].y);
    w.d = height - w.c;
    w.e = (w.c + w.d) * (w.a + w.b);
    if (w.a < 0.0 || w.b < 0.0 || w.c < 0.0 || w.d < 0.0 || !(w.e > 0.0)) {
        throw DegenerateGeometry("displaced neighbour falls outside its interpolation cell");
    }
    return w;
}

std::pair<double, double> interp_pattern(const FivePointPattern& pat) {
    const InterpWeights w = interp_weights(pat);
    const auto& y = pat.values;
    const double mass = w.e - w.a * w.c;  // total weight of the three known corners
    if (!(mass > 0.0)) throw DegenerateGeometry("interpolation weights vanish");
    const double vertical = pat.phi >= 0.0 ? y[2] : y[4];
    const double common = w.b * w.d * y[0] + w.c * w.b * vertical;
    return {(w.a * w.d * y[1] + common) / mass, (w.a * w.d * y[3] + common) / mass};
}

double response_at_equator(const FivePointPattern& pat, const PatternWeights& w) {
    const auto& y = pat.values;
    return 2.0 * (w.w_v + w.w_h) * y[0] - w.w_v * (y[2] + y[4]) - w.w_h * (y[1] + y[3]);
}

double response_displaced(const FivePointPattern& pat, const PatternWeights& w) {
    const auto& y = pat.values;
    const auto [y1, y3] = interp_pattern(pat);
    return 2.0 * (w.w_iv + w.w_ih) * y[0] - w.w_iv * (y[2] + y[4]) - w.w_ih * (y1 + y3);
}

double pattern_residual(const FivePointPattern& pat, const PatternWeights& w) {
    return std::abs(response_at_equator(pat, w) - response_displaced(pat, w));
}

}  // namespace omnigraph
