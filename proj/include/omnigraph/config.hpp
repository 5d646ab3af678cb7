#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "omnigraph/dataset.hpp"
#include "omnigraph/graph.hpp"
#include "omnigraph/network.hpp"

namespace omnigraph {

/// Every setting of a CLI run. Text form is one `key = value` per line with
/// `#` comments; list values are comma separated and positions are
/// `phi:theta` pairs.
struct RunConfig {
    NetworkConfig net;
    DatasetSpec data;
    int grid_width = 128;
    int grid_height = 64;
    GraphMode graph = GraphMode::geometry;

    std::string images = "data/mnist012-images-idx3-ubyte";
    std::string labels = "data/mnist012-labels-idx1-ubyte";
    std::string run_dir = "runs/default";
    std::string dataset_cache;  // empty: build the dataset in memory
    std::string checkpoint;     // empty: <run_dir>/checkpoint.bin

    std::vector<double> phis = {0.0, 0.125, 0.25};
    std::vector<double> dthetas = {2 * kPi / 64, 2 * kPi / 128, 2 * kPi / 256};
    int residual_patterns = 100;
    std::uint64_t residual_seed = 2018;

    int fm_layer = 2;
    std::vector<int> fm_filters = {0, 1};
    int fm_sample = 0;  // index into the test split

    EquirectGrid grid() const { return {grid_width, grid_height}; }
    std::filesystem::path checkpoint_path() const;

    bool operator==(const RunConfig& o) const;
};

/// Names of all accepted keys, in serialisation order.
const std::vector<std::string>& config_keys();

/// Applies one key/value; throws UsageError on an unknown key or bad value.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses text onto a copy of `base`; throws UsageError with a line number.
RunConfig parse_config(const std::string& text, const RunConfig& base = {});
RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = {});

std::string serialize_config(const RunConfig& cfg);

}  // namespace omnigraph
