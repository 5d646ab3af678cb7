#include "omnigraph/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>

#include "omnigraph/checkpoint.hpp"
#include "omnigraph/config.hpp"
#include "omnigraph/error.hpp"
#include "omnigraph/idx.hpp"
#include "omnigraph/invariance.hpp"
#include "omnigraph/output.hpp"

namespace omnigraph::cli {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Tracks the current stage so failures can say where they happened.
struct Stage {
    std::string name = "config";
    void operator()(std::string n) { name = std::move(n); }
};

struct Invocation {
    std::string command;
    std::optional<std::string> config_file;
    std::map<std::string, std::string> overrides;
};

RunConfig resolve_config(const Invocation& inv) {
    RunConfig cfg;
    if (inv.config_file) cfg = load_config(*inv.config_file);
    for (const auto& [key, value] : inv.overrides) set_config_value(cfg, key, value);
    return cfg;
}

void require_file(const std::string& path, const std::string& what) {
    if (path.empty() || !fs::is_regular_file(path)) throw IoError(what + " not found: '" + path + "'");
}

bool uses_cache(const RunConfig& cfg) { return !cfg.dataset_cache.empty() && fs::is_regular_file(cfg.dataset_cache); }

void require_sources(const RunConfig& cfg) {
    require_file(cfg.images, "IDX image file");
    require_file(cfg.labels, "IDX label file");
}

Dataset obtain_dataset(const RunConfig& cfg, Stage& stage) {
    if (uses_cache(cfg)) {
        stage("dataset cache");
        auto ds = load_dataset(cfg.dataset_cache);
        if (!(ds.spec == cfg.data) || ds.grid.width() != cfg.grid_width || ds.grid.height() != cfg.grid_height) {
            throw FormatError("dataset cache " + cfg.dataset_cache + " was built with different dataset settings");
        }
        return ds;
    }
    stage("dataset build");
    auto ds = build_mnist012(cfg.data, cfg.grid(), load_idx(cfg.images, cfg.labels));
    if (!cfg.dataset_cache.empty()) {
        stage("dataset cache");
        save_dataset(cfg.dataset_cache, ds);
    }
    return ds;
}

// Model and dataset settings always come from the checkpoint.
Checkpoint adopt_checkpoint(RunConfig& cfg, const Invocation& inv, std::ostream& err) {
    auto cp = load_checkpoint(cfg.checkpoint_path());
    static const char* const kModelKeys[] = {"grid_width", "grid_height", "graph", "j1", "j2", "degree",
                                             "p1", "p2", "scales", "fc", "classes", "positions",
                                             "digits", "train", "val", "test", "data_seed", "half_extent"};
    for (const char* key : kModelKeys) {
        if (inv.overrides.count(key)) {
            err << "warning: --" << key << " ignored, the checkpoint fixes it\n";
        }
    }
    cfg.net = cp.config.net;
    cfg.data = cp.config.data;
    cfg.grid_width = cp.config.grid_width;
    cfg.grid_height = cp.config.grid_height;
    cfg.graph = cp.config.graph;
    return cp;
}

fs::path checkpoint_output(const RunConfig& cfg, RunDirectory& rd) {
    return cfg.checkpoint.empty() ? rd.file("checkpoint.bin") : fs::path(cfg.checkpoint);
}

void save_config(const RunConfig& cfg, RunDirectory& rd) {
    std::ofstream out(rd.file("config.txt"));
    out << serialize_config(cfg);
    if (!out) throw IoError("cannot write config.txt in " + rd.root().string());
}

int cmd_dataset(RunConfig& cfg, const Invocation&, Stage& stage, std::ostream& out, std::ostream&) {
    stage("validate");
    require_sources(cfg);
    RunDirectory rd(cfg.run_dir);
    save_config(cfg, rd);
    stage("dataset build");
    const auto ds = build_mnist012(cfg.data, cfg.grid(), load_idx(cfg.images, cfg.labels));
    stage("dataset write");
    save_dataset(rd.file("dataset.bin"), ds);
    if (!cfg.dataset_cache.empty()) save_dataset(cfg.dataset_cache, ds);
    rd.note("train", std::to_string(ds.train.size()));
    rd.note("val", std::to_string(ds.val.size()));
    rd.note("test", std::to_string(ds.test.size()));
    stage("manifest");
    rd.write_manifest();
    out << "dataset: " << ds.train.size() << "/" << ds.val.size() << "/" << ds.test.size() << " samples on "
        << cfg.grid_width << "x" << cfg.grid_height << " written to " << rd.root().string() << "\n";
    return 0;
}

int cmd_graph(RunConfig& cfg, const Invocation&, Stage& stage, std::ostream& out, std::ostream&) {
    stage("validate");
    RunDirectory rd(cfg.run_dir);
    save_config(cfg, rd);
    stage("graph build");
    const auto g = build_graph(cfg.grid(), cfg.graph);
    const auto l = laplacian(g);
    stage("graph write");
    write_edges_csv(rd.file("edges.csv"), g);
    rd.note("nodes", std::to_string(cfg.grid().size()));
    rd.note("edges", std::to_string(g.edges.size()));
    rd.note("w_max", fmt(g.w_max));
    rd.note("lambda_max", fmt(l.lambda_max()));
    stage("manifest");
    rd.write_manifest();
    out << "graph (" << to_string(cfg.graph) << "): " << g.edges.size() << " edges, lambda_max " << fmt(l.lambda_max())
        << "\n";
    return 0;
}

int cmd_train(RunConfig& cfg, const Invocation&, Stage& stage, std::ostream& out, std::ostream&) {
    stage("validate");
    cfg.net.validate(cfg.grid().size());
    if (!uses_cache(cfg)) require_sources(cfg);
    RunDirectory rd(cfg.run_dir);
    save_config(cfg, rd);
    const auto ds = obtain_dataset(cfg, stage);
    stage("graph build");
    const auto ls = network_laplacian(ds.grid, cfg.graph);
    stage("training");
    const auto result = train(cfg.net, ds.train, ds.val, ls);
    stage("evaluation");
    const auto test = evaluate(result.params, cfg.net, ds.test, ls);
    stage("checkpoint write");
    // Output locations are not part of the model; leaving them out keeps the
    // checkpoint independent of where it was written.
    RunConfig snapshot = cfg;
    snapshot.run_dir.clear();
    snapshot.checkpoint.clear();
    save_checkpoint(checkpoint_output(cfg, rd), {snapshot, result.params, result.log});
    write_training_log_csv(rd.file("train_log.csv"), result.log);
    rd.note("graph", std::string(to_string(cfg.graph)));
    rd.note("best_epoch", std::to_string(result.best_epoch));
    rd.note("test_accuracy", fmt(test.accuracy));
    stage("manifest");
    rd.write_manifest();
    out << "train (" << to_string(cfg.graph) << "): best epoch " << result.best_epoch << ", test accuracy "
        << fmt(test.accuracy) << "\n";
    return 0;
}

int cmd_eval(RunConfig& cfg, const Invocation& inv, Stage& stage, std::ostream& out, std::ostream& err) {
    stage("validate");
    require_file(cfg.checkpoint_path().string(), "checkpoint");
    stage("checkpoint read");
    const auto cp = adopt_checkpoint(cfg, inv, err);
    stage("validate");
    if (!uses_cache(cfg)) require_sources(cfg);
    RunDirectory rd(cfg.run_dir);
    const auto ds = obtain_dataset(cfg, stage);
    stage("evaluation");
    const auto ls = network_laplacian(ds.grid, cfg.graph);
    const auto r = evaluate(cp.params, cfg.net, ds.test, ls);
    stage("eval write");
    {
        std::ofstream csv(rd.file("eval.csv"));
        csv << "true,predicted,count\n";
        for (int t = 0; t < cfg.net.classes; ++t) {
            for (int p = 0; p < cfg.net.classes; ++p) csv << t << "," << p << "," << r.confusion[t][p] << "\n";
        }
        if (!csv) throw IoError("cannot write eval.csv");
    }
    rd.note("test_accuracy", fmt(r.accuracy));
    stage("manifest");
    rd.write_manifest();
    out << "eval: test accuracy " << fmt(r.accuracy) << "\n";
    return 0;
}

int cmd_distmatrix(RunConfig& cfg, const Invocation& inv, Stage& stage, std::ostream& out, std::ostream& err) {
    stage("validate");
    require_file(cfg.checkpoint_path().string(), "checkpoint");
    require_sources(cfg);
    stage("checkpoint read");
    const auto cp = adopt_checkpoint(cfg, inv, err);
    RunDirectory rd(cfg.run_dir);
    stage("probe images");
    const auto objects = held_out_images(cfg.data, load_idx(cfg.images, cfg.labels));
    const auto probes = make_probe_set(objects, cfg.data.positions, cfg.grid(), cfg.data.half_extent);
    stage("distance matrix");
    const auto ls = network_laplacian(cfg.grid(), cfg.graph);
    const auto m = feature_distance_matrix(cp.params, cfg.net, probes, ls, probes.size());
    const auto bm = block_means(m);
    write_distance_matrix_csv(rd.file("distmatrix.csv"), m);
    rd.note("intra_mean", fmt(bm.intra));
    rd.note("inter_mean", fmt(bm.inter));
    stage("manifest");
    rd.write_manifest();
    out << "distmatrix: " << m.n << " images, intra " << fmt(bm.intra) << ", inter " << fmt(bm.inter) << "\n";
    return 0;
}

int cmd_residuals(RunConfig& cfg, const Invocation&, Stage& stage, std::ostream& out, std::ostream&) {
    stage("validate");
    RunDirectory rd(cfg.run_dir);
    save_config(cfg, rd);
    stage("residual sweep");
    const auto rows = residual_sweep(cfg.phis, cfg.dthetas, {cfg.residual_patterns, cfg.residual_seed, 1.0});
    write_residuals_csv(rd.file("residuals.csv"), rows);
    stage("manifest");
    rd.write_manifest();
    out << "residuals: " << rows.size() << " rows\n";
    return 0;
}

int cmd_featuremaps(RunConfig& cfg, const Invocation& inv, Stage& stage, std::ostream& out, std::ostream& err) {
    stage("validate");
    require_file(cfg.checkpoint_path().string(), "checkpoint");
    stage("checkpoint read");
    const auto cp = adopt_checkpoint(cfg, inv, err);
    stage("validate");
    if (!uses_cache(cfg)) require_sources(cfg);
    RunDirectory rd(cfg.run_dir);
    const auto ds = obtain_dataset(cfg, stage);
    stage("feature maps");
    if (cfg.fm_sample < 0 || static_cast<std::size_t>(cfg.fm_sample) >= ds.test.size()) {
        throw IndexError("fm_sample " + std::to_string(cfg.fm_sample) + " outside the test split of " +
                         std::to_string(ds.test.size()));
    }
    const auto ls = network_laplacian(cfg.grid(), cfg.graph);
    const auto paths = export_feature_maps(cp.params, cfg.net, ds.test[cfg.fm_sample].image, ls, cfg.fm_layer,
                                           cfg.fm_filters, rd.root());
    for (const auto& p : paths) rd.file(p.filename().string());
    stage("manifest");
    rd.write_manifest();
    out << "featuremaps: " << paths.size() << " files written to " << rd.root().string() << "\n";
    return 0;
}

using Command = std::function<int(RunConfig&, const Invocation&, Stage&, std::ostream&, std::ostream&)>;

struct CommandInfo {
    const char* name;
    const char* help;
    Command fn;
};

const std::vector<CommandInfo>& commands() {
    static const std::vector<CommandInfo> c = {
        {"dataset", "render the MNIST-012 spherical dataset and write dataset.bin", cmd_dataset},
        {"graph", "build the sphere graph and write edges.csv", cmd_graph},
        {"train", "train a network and write checkpoint.bin and train_log.csv", cmd_train},
        {"eval", "evaluate a checkpoint on the test split and write eval.csv", cmd_eval},
        {"distmatrix", "feature distance matrix of the probe set, distmatrix.csv", cmd_distmatrix},
        {"residuals", "five-point residual sweep, residuals.csv", cmd_residuals},
        {"featuremaps", "export feature maps of one test image as PGM and CSV", cmd_featuremaps},
    };
    return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"graph-based classification of objects on spherical images", "omnigraph"};
    app.require_subcommand(1, 1);
    Invocation inv;
    for (const auto& c : commands()) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option_function<std::string>(
            "--config", [&inv](const std::string& v) { inv.config_file = v; }, "key = value settings file");
        for (const auto& key : config_keys()) {
            sub->add_option_function<std::string>(
                "--" + key, [&inv, key](const std::string& v) { inv.overrides[key] = v; }, "config key " + key);
        }
        sub->callback([&inv, name = std::string(c.name)] { inv.command = name; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    Stage stage;
    try {
        RunConfig cfg = resolve_config(inv);
        for (const auto& c : commands()) {
            if (inv.command == c.name) return c.fn(cfg, inv, stage, out, err);
        }
        throw UsageError("no command given");
    } catch (const UsageError& e) {
        err << "omnigraph " << inv.command << ": " << stage.name << " failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "omnigraph " << inv.command << ": " << stage.name << " failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace omnigraph::cli
