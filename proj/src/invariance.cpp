#include "omnigraph/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "omnigraph/error.hpp"
#include "omnigraph/output.hpp"
#include "omnigraph/rng.hpp"

namespace omnigraph {

PatternWeights geometry_pattern_weights(double phi, double delta_theta, double delta_phi) {
    const double d_h = chord_distance({0.0, 0.0}, {0.0, delta_theta});
    const double d_v = chord_distance({0.0, 0.0}, {delta_phi, 0.0});
    const double d_ih = chord_distance({phi, 0.0}, {phi, delta_theta});
    PatternWeights w;
    w.w_h = 1.0;
    w.w_v = d_h / d_v;
    w.w_ih = d_h / d_ih;
    w.w_iv = w.w_v;  // vertical chords do not depend on latitude
    return w;
}

std::vector<ResidualRow> residual_sweep(std::span<const double> phis, std::span<const double> delta_thetas,
                                        const ResidualSweepOptions& opts) {
    if (opts.patterns < 1) throw DomainError("residual sweep needs at least one pattern");
    for (double phi : phis) {
        if (!(std::abs(phi) < kPi / 2)) throw DomainError("sweep latitude must lie strictly inside (-pi/2, pi/2)");
    }
    const PatternWeights grid_weights{};
    std::vector<ResidualRow> rows;
    for (double phi : phis) {
        for (double dt : delta_thetas) {
            const double dp = opts.delta_phi_ratio * dt;
            const auto geo = geometry_pattern_weights(phi, dt, dp);
            Rng rng(opts.seed);
            double sum_geo = 0.0;
            double sum_grid = 0.0;
            for (int k = 0; k < opts.patterns; ++k) {
                FivePointPattern pat;
                for (auto& v : pat.values) v = rng.uniform();
                pat.delta_theta = dt;
                pat.delta_phi = dp;
                pat.phi = phi;
                sum_geo += pattern_residual(pat, geo);
                sum_grid += pattern_residual(pat, grid_weights);
            }
            rows.push_back({phi, dt, sum_geo / opts.patterns, sum_grid / opts.patterns});
        }
    }
    return rows;
}

void write_residuals_csv(const std::filesystem::path& path, std::span<const ResidualRow> rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "phi,delta_theta,residual_geometry,residual_grid\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.phi, r.delta_theta, r.residual_geometry,
                      r.residual_grid);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<ProbeImage> make_probe_set(std::span<const PlanarImage> per_class, std::span<const SphericalPoint> positions,
                                       const EquirectGrid& grid, double half_extent) {
    std::vector<ProbeImage> out;
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        for (std::size_t p = 0; p < positions.size(); ++p) {
            out.push_back({render_equirect(per_class[c], TangentFrame(positions[p]), grid, half_extent),
                           static_cast<int>(c), static_cast<int>(p)});
        }
    }
    return out;
}

DistanceMatrix feature_distance_matrix(const NetworkParams& params, const NetworkConfig& cfg,
                                       std::span<const ProbeImage> images, const SparseLaplacian& ls,
                                       std::size_t expected) {
    if (images.size() != expected) {
        throw ShapeError("distance matrix expects " + std::to_string(expected) + " images, got " +
                         std::to_string(images.size()));
    }
    const std::size_t n = images.size();
    std::vector<std::vector<double>> features(n);
    for (std::size_t i = 0; i < n; ++i) {
        features[i] = forward(params, cfg, images[i].image, ls).features;
        for (std::size_t k = 0; k < features[i].size(); ++k) {
            features[i][k] = (features[i][k] - params.feature_shift[k]) * params.feature_scale[k];
        }
    }

    DistanceMatrix m;
    m.n = n;
    m.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m.labels.push_back(images[i].label);
        m.positions.push_back(images[i].position);
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < features[i].size(); ++k) {
                const double d = features[i][k] - features[j][k];
                s += d * d;
            }
            m.values[i * n + j] = m.values[j * n + i] = std::sqrt(s);
        }
    }
    return m;
}

BlockMeans block_means(const DistanceMatrix& m) {
    double intra = 0.0;
    double inter = 0.0;
    std::size_t n_intra = 0;
    std::size_t n_inter = 0;
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.n; ++j) {
            if (i == j) continue;
            if (m.labels[i] == m.labels[j]) {
                intra += m.at(i, j);
                ++n_intra;
            } else {
                inter += m.at(i, j);
                ++n_inter;
            }
        }
    }
    return {n_intra ? intra / n_intra : 0.0, n_inter ? inter / n_inter : 0.0};
}

void write_distance_matrix_csv(const std::filesystem::path& path, const DistanceMatrix& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "label,position";
    for (std::size_t j = 0; j < m.n; ++j) out << ",d" << j;
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < m.n; ++i) {
        out << m.labels[i] << ',' << m.positions[i];
        for (std::size_t j = 0; j < m.n; ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", m.at(i, j));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::filesystem::path> export_feature_maps(const NetworkParams& params, const NetworkConfig& cfg,
                                                       const EquirectImage& image, const SparseLaplacian& ls,
                                                       int layer, std::span<const int> filters,
                                                       const std::filesystem::path& dir) {
    if (layer != 1 && layer != 2) throw IndexError("feature map layer must be 1 or 2, got " + std::to_string(layer));
    const int count = layer == 1 ? cfg.j1 : cfg.j2;
    for (int j : filters) {
        if (j < 0 || j >= count) {
            throw IndexError("filter index " + std::to_string(j) + " out of range for layer " + std::to_string(layer) +
                             " with " + std::to_string(count) + " filters");
        }
    }
    const auto maps = feature_maps(params, cfg, image, ls);
    const auto& chosen = layer == 1 ? maps.layer1 : maps.layer2;
    std::vector<std::filesystem::path> written;
    for (int j : filters) {
        const EquirectImage map(image.grid, chosen[j]);
        const std::string stem = "fm_l" + std::to_string(layer) + "_" + std::to_string(j);
        write_pgm(dir / (stem + ".pgm"), map);
        write_values_csv(dir / (stem + ".csv"), map);
        written.push_back(dir / (stem + ".pgm"));
        written.push_back(dir / (stem + ".csv"));
    }
    return written;
}

PlanarImage tangent_plane_view(const EquirectImage& map, const TangentFrame& frame, double half_extent, int side) {
    const auto& g = map.grid;
    const double step = 2.0 * half_extent / side;
    std::vector<double> out(static_cast<std::size_t>(side) * side);
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            const PlanePoint q{-half_extent + (c + 0.5) * step, half_extent - (r + 0.5) * step};
            const auto p = gnomonic_inv(frame, q);
            double fu = (p.theta() + kPi) / g.delta_theta();
            const double fv = std::clamp((p.phi() - g.phi(0)) / g.delta_phi(), 0.0, g.height() - 1.0);
            fu = std::fmod(fu, g.width());
            if (fu < 0.0) fu += g.width();
            const int u0 = static_cast<int>(fu) % g.width();
            const int u1 = (u0 + 1) % g.width();
            const int v0 = std::min(static_cast<int>(fv), g.height() - 1);
            const int v1 = std::min(v0 + 1, g.height() - 1);
            const double tu = fu - std::floor(fu);
            const double tv = fv - v0;
            auto at = [&](int u, int v) { return map.values[g.node(u, v)]; };
            out[static_cast<std::size_t>(r) * side + c] =
                (1 - tv) * ((1 - tu) * at(u0, v0) + tu * at(u1, v0)) + tv * ((1 - tu) * at(u0, v1) + tu * at(u1, v1));
        }
    }
    return PlanarImage(side, std::move(out));
}

double correlation(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double aligned_map_correlation(const NetworkParams& params, const NetworkConfig& cfg, const PlanarImage& object,
                               std::span<const double> phis, const EquirectGrid& grid, double half_extent,
                               const SparseLaplacian& ls) {
    const int side = object.side;
    // views[latitude][filter]
    std::vector<std::vector<PlanarImage>> views;
    for (double phi : phis) {
        const TangentFrame frame({phi, 0.0});
        const auto img = render_equirect(object, frame, grid, half_extent);
        const auto maps = feature_maps(params, cfg, img, ls);
        std::vector<PlanarImage> per_filter;
        for (const auto& m : maps.layer2) {
            per_filter.push_back(tangent_plane_view(EquirectImage(grid, m), frame, half_extent, side));
        }
        views.push_back(std::move(per_filter));
    }
    double total = 0.0;
    int pairs = 0;
    for (std::size_t a = 0; a < views.size(); ++a) {
        for (std::size_t b = a + 1; b < views.size(); ++b) {
            for (std::size_t k = 0; k < views[a].size(); ++k) {
                total += correlation(views[a][k].values, views[b][k].values);
                ++pairs;
            }
        }
    }
    return pairs ? total / pairs : 0.0;
}

}  // namespace omnigraph
