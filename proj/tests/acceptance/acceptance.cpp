// Acceptance suite: one PASS/FAIL line per criterion, then a summary.
//
//   acceptance [--run-dir DIR] [--epochs N]
//
// Criterion 7 trains six networks at the default settings and dominates the
// runtime; criteria 6 and 8 reuse its checkpoints. --epochs shortens that
// training for quick iterations and is flagged in the output when used.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "omnigraph/checkpoint.hpp"
#include "omnigraph/config.hpp"
#include "omnigraph/dataset.hpp"
#include "omnigraph/error.hpp"
#include "omnigraph/idx.hpp"
#include "omnigraph/invariance.hpp"
#include "omnigraph/network.hpp"
#include "omnigraph/output.hpp"
#include "omnigraph/pattern.hpp"
#include "omnigraph/rng.hpp"
#include "omnigraph/spectral.hpp"
#include "omnigraph/sphere_geometry.hpp"

using namespace omnigraph;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
const int kSeeds[] = {1, 2, 3};
const GraphMode kModes[] = {GraphMode::geometry, GraphMode::grid};

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Line {
    int id;
    std::string title;
    double limit_s;
    Outcome outcome;
    double seconds = 0.0;
    bool error = false;  // threw before producing a measurement

    bool pass() const { return outcome.pass && seconds < limit_s; }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string sci(double v) { return fmt("%.2e", v); }

Line run_criterion(int id, std::string title, double limit_s, const std::function<Outcome()>& body) {
    Line line{id, std::move(title), limit_s, {}, 0.0};
    std::cerr << "# running criterion " << id << ": " << line.title << std::endl;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        line.outcome = body();
    } catch (const std::exception& e) {
        line.outcome = {false, std::string("exception: ") + e.what()};
        line.error = true;
    }
    line.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return line;
}

std::string format_line(const Line& l) {
    std::ostringstream s;
    s << (l.pass() ? "PASS" : "FAIL") << "  criterion " << l.id << "  " << l.title << "  [" << l.outcome.detail
      << "; runtime " << fmt("%.1f", l.seconds) << " s, limit " << fmt("%.0f", l.limit_s) << " s]";
    return s.str();
}

Cart3 cart(double phi, double theta) {
    return {std::cos(phi) * std::cos(theta), std::cos(phi) * std::sin(theta), std::sin(phi)};
}

double dot3(const Cart3& a, const Cart3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Central projection from the sphere centre onto the tangent plane at
// (phi0, theta0), written with the local east/north/normal basis.
PlanePoint central_projection(double phi0, double theta0, double phi, double theta) {
    const Cart3 n = cart(phi0, theta0);
    const Cart3 east = {-std::sin(theta0), std::cos(theta0), 0.0};
    const Cart3 north = {-std::sin(phi0) * std::cos(theta0), -std::sin(phi0) * std::sin(theta0), std::cos(phi0)};
    const Cart3 p = cart(phi, theta);
    const double t = dot3(p, n);
    return {dot3(p, east) / t, dot3(p, north) / t};
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Rng rng(101);
    double round_trip = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const TangentFrame f({rng.uniform(-1.4, 1.4), rng.uniform(-kPi, kPi)});
        // plane -> sphere -> plane
        const PlanePoint q{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const auto back = gnomonic_fwd(f, gnomonic_inv(f, q));
        round_trip = std::max(round_trip, std::hypot(back.x - q.x, back.y - q.y));
        // sphere -> plane -> sphere, within 1.2 rad of the tangency
        const auto p = gnomonic_inv(f, {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        const auto again = gnomonic_inv(f, gnomonic_fwd(f, p));
        round_trip = std::max(round_trip, chord_distance(p, again));
    }

    const EquirectGrid grid(128, 64);
    const double dt = grid.delta_theta();
    const double dp = grid.delta_phi();
    double closed = 0.0;
    for (int v = 0; v < grid.height(); ++v) {
        const double phi = grid.phi(v);
        const TangentFrame f({phi, 0.0});
        const auto pos = displaced_plane_positions(phi, dt, dp);
        for (int k : {1, 3}) {
            const SphericalPoint neighbour(phi, k == 1 ? dt : -dt);
            const auto direct = gnomonic_fwd(f, neighbour);
            const auto oracle = central_projection(phi, 0.0, neighbour.phi(), neighbour.theta());
            closed = std::max({closed, std::abs(pos[k].x - direct.x), std::abs(pos[k].y - direct.y),
                               std::abs(pos[k].x - oracle.x), std::abs(pos[k].y - oracle.y)});
        }
    }
    return {round_trip < 1e-9 && closed < 1e-12,
            "round trip max " + sci(round_trip) + " < 1e-9, closed form vs direct max " + sci(closed) + " < 1e-12"};
}

Outcome criterion2() {
    Rng rng(202);
    double chord = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double p0 = rng.uniform(-kPi / 2, kPi / 2), t0 = rng.uniform(-kPi, kPi);
        const double p1 = rng.uniform(-kPi / 2, kPi / 2), t1 = rng.uniform(-kPi, kPi);
        const auto a = cart(p0, t0), b = cart(p1, t1);
        const double d3 = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
        chord = std::max(chord, std::abs(chord_distance({p0, t0}, {p1, t1}) - d3));
    }
    const EquirectGrid grid(128, 64);
    const double dt = grid.delta_theta();
    const double equator = chord_distance({0.0, 0.0}, {0.0, dt});
    double ratio = 0.0;
    for (int v = 0; v < grid.height(); ++v) {
        const double phi = grid.phi(v);
        ratio = std::max(ratio, std::abs(chord_distance({phi, 0.0}, {phi, dt}) / equator - std::cos(phi)));
    }
    return {chord < 1e-12 && ratio < 1e-12,
            "chord vs 3D max " + sci(chord) + " < 1e-12, cos(phi) ratio law max " + sci(ratio) + " < 1e-12"};
}

SparseLaplacian random_graph(std::size_t n, Rng& rng) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    std::vector<Edge> edges;
    auto add = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        const auto i = static_cast<std::uint32_t>(std::min(a, b));
        const auto j = static_cast<std::uint32_t>(std::max(a, b));
        if (seen.insert({i, j}).second) edges.push_back({i, j, rng.uniform(0.1, 5.0)});
    };
    // Random tree for connectivity, then random extra edges.
    for (std::size_t i = 1; i < n; ++i) add(i, rng.index(i));
    const std::size_t extra = rng.index(2 * n + 1);
    for (std::size_t k = 0; k < extra; ++k) add(rng.index(n), rng.index(n));
    return SparseLaplacian::from_edges(n, edges);
}

Outcome criterion3() {
    Rng rng(303);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.index(49);
        const auto l = random_graph(n, rng);
        PolyFilter f;
        for (int m = 0; m <= 5; ++m) f.coeffs.push_back(rng.uniform(-1.0, 1.0));
        std::vector<double> y(n);
        for (auto& v : y) v = rng.uniform(-1.0, 1.0);
        const auto vertex = apply_poly_filter(l, f, y);
        const auto spectral = spectral_reference(decompose(l), f, y);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += (vertex[i] - spectral[i]) * (vertex[i] - spectral[i]);
            den += spectral[i] * spectral[i];
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    return {worst < 1e-8, "50 graphs, degree 5, max relative error " + sci(worst) + " < 1e-8"};
}

Outcome criterion4(RunDirectory& rd) {
    const std::vector<double> phis = {0.25};
    const std::vector<double> dts = {kTwoPi / 64, kTwoPi / 128, kTwoPi / 256};
    ResidualSweepOptions opts;
    opts.patterns = 100;
    const auto rows = residual_sweep(phis, dts, opts);
    write_residuals_csv(rd.file("residuals.csv"), rows);
    const auto& mid = rows[1];
    const double ratio = mid.residual_geometry / mid.residual_grid;
    const bool monotone = rows[1].residual_geometry < rows[0].residual_geometry &&
                          rows[2].residual_geometry < rows[1].residual_geometry;
    return {ratio < 0.2 && monotone,
            "geometry/grid at 2pi/128 = " + fmt("%.4f", ratio) + " < 0.2, geometry residual over halving dtheta " +
                sci(rows[0].residual_geometry) + " > " + sci(rows[1].residual_geometry) + " > " +
                sci(rows[2].residual_geometry) + (monotone ? "" : " (not monotone)")};
}

Outcome criterion5() {
    const EquirectGrid grid(16, 8);
    NetworkConfig cfg;
    cfg.j1 = 2;
    cfg.j2 = 3;
    cfg.degree = 3;
    cfg.p1 = 40;
    cfg.p2 = 10;
    cfg.fc = {16, 8};
    cfg.seed = 5;
    Rng rng(505);
    std::vector<Sample> samples;
    for (int i = 0; i < 6; ++i) {
        EquirectImage img(grid);
        for (auto& v : img.values) v = rng.uniform(0.0, 1.0);
        samples.push_back({img, i % 3, 0});
    }
    const auto batch_all = examples(samples);
    const std::span<const Example> batch(batch_all.data(), 3);

    double worst = 0.0;
    int groups_checked = 0;
    for (auto mode : kModes) {
        const auto ls = network_laplacian(grid, mode);
        auto params = NetworkParams::init(cfg);
        fit_feature_scaling(params, cfg, samples, ls);
        const auto grad = loss_and_grad(params, cfg, batch, ls).grad;
        const auto analytic = grad.groups();
        auto groups = params.groups();
        const double h = 1e-5;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            double num2 = 0.0, ana2 = 0.0, diff2 = 0.0;
            for (std::size_t k = 0; k < groups[g].size(); ++k) {
                const double keep = groups[g][k];
                groups[g][k] = keep + h;
                const double up = loss_and_grad(params, cfg, batch, ls).loss;
                groups[g][k] = keep - h;
                const double down = loss_and_grad(params, cfg, batch, ls).loss;
                groups[g][k] = keep;
                const double numeric = (up - down) / (2 * h);
                num2 += numeric * numeric;
                ana2 += analytic[g][k] * analytic[g][k];
                diff2 += (numeric - analytic[g][k]) * (numeric - analytic[g][k]);
            }
            const double scale = std::sqrt(std::max(num2, ana2));
            worst = std::max(worst, scale > 0.0 ? std::sqrt(diff2) / scale : 1.0);
            ++groups_checked;
        }
    }
    return {worst < 1e-4, std::to_string(groups_checked) + " parameter groups over both graphs, max relative error " +
                              sci(worst) + " < 1e-4"};
}

// ---------------------------------------------------------------------------
// Criteria 6-8 share the trained networks.

struct TrainedRun {
    int seed;
    GraphMode mode;
    double test_accuracy;
    fs::path checkpoint;
};

struct Shared {
    std::vector<LabeledImage> source;
    std::vector<TrainedRun> runs;
    int epochs = 30;
    bool strict = false;
};

DatasetSpec spec_for(int seed) {
    DatasetSpec spec;
    spec.seed = static_cast<std::uint64_t>(seed);
    return spec;
}

RunConfig config_for(int seed, GraphMode mode, int epochs) {
    RunConfig cfg;
    cfg.data = spec_for(seed);
    cfg.net.seed = static_cast<std::uint64_t>(seed);
    cfg.net.epochs = epochs;
    cfg.graph = mode;
    return cfg;
}

Outcome criterion7(Shared& sh, RunDirectory& rd) {
    double mean[2] = {0.0, 0.0};
    for (int seed : kSeeds) {
        const auto base = config_for(seed, GraphMode::geometry, sh.epochs);
        const auto ds = build_mnist012(base.data, base.grid(), sh.source);
        for (int m = 0; m < 2; ++m) {
            auto cfg = config_for(seed, kModes[m], sh.epochs);
            const std::string tag = std::string(to_string(kModes[m])) + "_seed" + std::to_string(seed);
            std::cerr << "#   training " << tag << std::endl;
            const auto ls = network_laplacian(ds.grid, cfg.graph);
            const auto result = train(cfg.net, ds.train, ds.val, ls);
            const double acc = evaluate(result.params, cfg.net, ds.test, ls).accuracy;
            const auto path = rd.file("checkpoint_" + tag + ".bin");
            save_checkpoint(path, {cfg, result.params, result.log});
            write_training_log_csv(rd.file("train_log_" + tag + ".csv"), result.log);
            rd.note("test_accuracy_" + tag, fmt("%.4f", acc));
            rd.note("best_epoch_" + tag, std::to_string(result.best_epoch));
            std::cerr << "#   " << tag << " test accuracy " << acc << std::endl;
            sh.runs.push_back({seed, kModes[m], acc, path});
            mean[m] += acc / std::size(kSeeds);
        }
    }
    rd.note("mean_test_accuracy_geometry", fmt("%.4f", mean[0]));
    rd.note("mean_test_accuracy_grid", fmt("%.4f", mean[1]));
    std::string detail = "mean test accuracy geometry " + fmt("%.4f", mean[0]) + " vs grid " + fmt("%.4f", mean[1]);
    detail += ", both > 0.40 required; per seed (geometry/grid):";
    for (std::size_t i = 0; i + 1 < sh.runs.size(); i += 2) {
        detail += " " + fmt("%.3f", sh.runs[i].test_accuracy) + "/" + fmt("%.3f", sh.runs[i + 1].test_accuracy);
    }
    if (sh.epochs != 30) detail += "; NOTE epochs overridden to " + std::to_string(sh.epochs);
    return {mean[0] > mean[1] && mean[0] > 0.4 && mean[1] > 0.4, detail};
}

Outcome criterion6(const Shared& sh) {
    if (sh.runs.empty()) return {false, "no trained networks (criterion 7 did not complete)"};
    const auto cp = load_checkpoint(sh.runs.front().checkpoint);
    if (cp.config.graph != GraphMode::geometry) return {false, "first checkpoint is not a geometry network"};
    const auto ds = build_mnist012(cp.config.data, cp.config.grid(), sh.source);
    const auto ls = network_laplacian(ds.grid, GraphMode::geometry);
    double worst = 0.0;
    int flips = 0, checked = 0;
    for (const auto& s : ds.test) {
        const auto base = forward(cp.params, cp.config.net, s.image, ls);
        double base_norm = 0.0;
        for (double v : base.features) base_norm += v * v;
        base_norm = std::sqrt(base_norm);
        for (int k : {1, 7, 64}) {
            const auto moved = forward(cp.params, cp.config.net, shift_columns(s.image, k), ls);
            double d = 0.0;
            for (std::size_t i = 0; i < base.features.size(); ++i) {
                d += (moved.features[i] - base.features[i]) * (moved.features[i] - base.features[i]);
            }
            worst = std::max(worst, base_norm > 0.0 ? std::sqrt(d) / base_norm : std::sqrt(d));
            if (argmax(moved.probabilities) != argmax(base.probabilities)) ++flips;
            ++checked;
        }
    }
    return {worst < 1e-6 && flips == 0, std::to_string(checked) + " shifted test images (k = 1, 7, 64), max relative "
                                         "feature change " + sci(worst) + " < 1e-6, class changes " +
                                         std::to_string(flips)};
}

Outcome criterion8(const Shared& sh, RunDirectory& rd) {
    if (sh.runs.empty()) return {false, "no trained networks (criterion 7 did not complete)"};
    double intra[2] = {0.0, 0.0}, inter[2] = {0.0, 0.0};
    for (const auto& run : sh.runs) {
        const auto cp = load_checkpoint(run.checkpoint);
        const int m = run.mode == GraphMode::geometry ? 0 : 1;
        const auto grid = cp.config.grid();
        const auto probes = make_probe_set(held_out_images(cp.config.data, sh.source), cp.config.data.positions, grid,
                                           cp.config.data.half_extent);
        const auto ls = network_laplacian(grid, run.mode);
        const auto dm = feature_distance_matrix(cp.params, cp.config.net, probes, ls, probes.size());
        const std::string tag = std::string(to_string(run.mode)) + "_seed" + std::to_string(run.seed);
        write_distance_matrix_csv(rd.file("distmatrix_" + tag + ".csv"), dm);
        const auto b = block_means(dm);
        rd.note("intra_mean_" + tag, fmt("%.6g", b.intra));
        rd.note("inter_mean_" + tag, fmt("%.6g", b.inter));
        intra[m] += b.intra / std::size(kSeeds);
        inter[m] += b.inter / std::size(kSeeds);
    }
    return {intra[0] < inter[0] && intra[0] < intra[1],
            "seed-averaged geometry intra " + fmt("%.4g", intra[0]) + " < inter " + fmt("%.4g", inter[0]) +
                ", geometry intra " + fmt("%.4g", intra[0]) + " < grid intra " + fmt("%.4g", intra[1]) +
                " (grid inter " + fmt("%.4g", inter[1]) + ")"};
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool rejects(const fs::path& images, const fs::path& labels) {
    try {
        load_idx(images, labels);
    } catch (const FormatError&) {
        return true;
    }
    return false;
}

Outcome criterion9(const Shared& sh, const fs::path& scratch) {
    fs::create_directories(scratch);
    std::vector<std::string> failed;

    // Checkpoint: every parameter bit-identical after save -> load, and a
    // second save reproduces the file byte for byte.
    Checkpoint cp;
    cp.config = config_for(1, GraphMode::geometry, 30);
    cp.params = NetworkParams::init(cp.config.net);
    Rng rng(909);
    for (auto g : cp.params.groups())
        for (auto& v : g) v = rng.uniform(-1.0, 1.0) / 3.0;
    for (auto& v : cp.params.feature_shift) v = rng.uniform(-1.0, 1.0) * 1e-7;
    for (auto& v : cp.params.feature_scale) v = rng.uniform(1.0, 1e6);
    cp.log = {{1, 0.7, 0.5, 0.45}};
    save_checkpoint(scratch / "a.bin", cp);
    const auto back = load_checkpoint(scratch / "a.bin");
    const auto ga = std::as_const(cp.params).groups();
    const auto gb = std::as_const(back.params).groups();
    bool bits = ga.size() == gb.size() && back.params.feature_shift == cp.params.feature_shift &&
                back.params.feature_scale == cp.params.feature_scale && back.config == cp.config;
    for (std::size_t i = 0; bits && i < ga.size(); ++i) {
        bits = ga[i].size() == gb[i].size() && std::memcmp(ga[i].data(), gb[i].data(), ga[i].size_bytes()) == 0;
    }
    save_checkpoint(scratch / "b.bin", back);
    bits = bits && read_bytes(scratch / "a.bin") == read_bytes(scratch / "b.bin");
    if (!bits) failed.push_back("checkpoint round trip");

    // Dataset: same seed -> identical; another seed -> different draw.
    const EquirectGrid grid(128, 64);
    const auto d1 = build_mnist012(spec_for(4), grid, sh.source);
    const auto d2 = build_mnist012(spec_for(4), grid, sh.source);
    const auto d3 = build_mnist012(spec_for(5), grid, sh.source);
    auto same = [](const Dataset& a, const Dataset& b) {
        auto eq = [](const std::vector<Sample>& x, const std::vector<Sample>& y) {
            if (x.size() != y.size()) return false;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i].label != y[i].label || x[i].position != y[i].position ||
                    x[i].image.values != y[i].image.values) {
                    return false;
                }
            }
            return true;
        };
        return eq(a.train, b.train) && eq(a.val, b.val) && eq(a.test, b.test);
    };
    if (!same(d1, d2)) failed.push_back("dataset determinism");
    if (same(d1, d3)) failed.push_back("dataset seed sensitivity");

    // IDX: corrupted headers on copies of the bundled files.
    const fs::path images = fs::path(OMNIGRAPH_DATA_DIR) / "mnist012-images-idx3-ubyte";
    const fs::path labels = fs::path(OMNIGRAPH_DATA_DIR) / "mnist012-labels-idx1-ubyte";
    const auto img = read_bytes(images), lab = read_bytes(labels);
    auto variant = [&](const std::string& name, std::string bytes) {
        const auto p = scratch / name;
        std::ofstream(p, std::ios::binary) << bytes;
        return p;
    };
    int rejected = 0, cases = 0;
    auto expect_reject = [&](const fs::path& i, const fs::path& l) {
        ++cases;
        if (rejects(i, l)) ++rejected;
    };
    {
        auto b = img;
        b[3] = 0x01;  // magic 0x00000801
        expect_reject(variant("bad_magic", b), labels);
    }
    {
        auto b = lab;
        b[2] = 0x09;  // unknown type code
        expect_reject(images, variant("bad_label_magic", b));
    }
    {
        auto b = img;
        b[7] = static_cast<char>(static_cast<unsigned char>(b[7]) + 1);  // count off by one
        expect_reject(variant("bad_count", b), labels);
    }
    {
        auto b = img;
        b[11] = 0;  // zero rows
        expect_reject(variant("zero_rows", b), labels);
    }
    expect_reject(variant("short_header", img.substr(0, 10)), labels);
    expect_reject(variant("short_body", img.substr(0, img.size() - 100)), labels);
    if (rejected != cases) failed.push_back("IDX rejection (" + std::to_string(rejected) + "/" + std::to_string(cases) + ")");

    std::string detail = "checkpoint bit-exact, dataset deterministic per seed, " + std::to_string(rejected) + "/" +
                         std::to_string(cases) + " corrupted IDX headers rejected";
    if (!failed.empty()) {
        detail = "failed:";
        for (const auto& f : failed) detail += " " + f + ";";
    }
    return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::string run_dir = "acceptance_run";
    int epochs = 30;
    bool strict = false;
    app.add_option("--run-dir", run_dir, "output directory (checkpoints, CSVs, manifest)");
    app.add_option("--epochs", epochs, "training epochs for criterion 7 (default 30)")->check(CLI::PositiveNumber);
    app.add_flag("--strict", strict, "exit nonzero when any criterion fails, not only when one cannot run");
    CLI11_PARSE(app, argc, argv);

    fs::create_directories(run_dir);
    RunDirectory rd(run_dir);
    Shared sh;
    sh.epochs = epochs;
    sh.source = load_idx(fs::path(OMNIGRAPH_DATA_DIR) / "mnist012-images-idx3-ubyte",
                         fs::path(OMNIGRAPH_DATA_DIR) / "mnist012-labels-idx1-ubyte");

    std::vector<Line> lines;
    lines.push_back(run_criterion(1, "geometry kernel", 5, criterion1));
    lines.push_back(run_criterion(2, "distance law", 5, criterion2));
    lines.push_back(run_criterion(3, "filtering equivalence", 30, criterion3));
    lines.push_back(run_criterion(4, "weight design residuals", 10, [&] { return criterion4(rd); }));
    lines.push_back(run_criterion(5, "gradient correctness", 120, criterion5));
    // 7 runs before 6 and 8, which use its checkpoints.
    auto c7 = run_criterion(7, "desk-scale classification", 45 * 60, [&] { return criterion7(sh, rd); });
    lines.push_back(run_criterion(6, "automorphism invariance", 60, [&] { return criterion6(sh); }));
    lines.push_back(std::move(c7));
    lines.push_back(run_criterion(8, "feature distance matrix", 60, [&] { return criterion8(sh, rd); }));
    lines.push_back(run_criterion(9, "plumbing", 60, [&] { return criterion9(sh, fs::path(run_dir) / "scratch"); }));

    int failures = 0;
    int errors = 0;
    std::ofstream report(rd.file("acceptance.txt"));
    for (const auto& l : lines) {
        const auto text = format_line(l);
        std::cout << text << "\n";
        report << text << "\n";
        rd.note("criterion_" + std::to_string(l.id), l.pass() ? "PASS" : "FAIL");
        if (!l.pass()) ++failures;
        if (l.error) ++errors;
    }
    const std::string summary = std::to_string(lines.size() - failures) + "/" + std::to_string(lines.size()) +
                                " criteria passed";
    std::cout << summary << std::endl;
    report << summary << "\n";
    report.close();
    rd.write_manifest();
    // A measured FAIL is a result. Without --strict only a criterion that
    // could not be evaluated makes the suite itself fail.
    if (strict) return failures == 0 ? 0 : 1;
    return errors == 0 ? 0 : 1;
}
