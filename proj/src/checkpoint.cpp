#include "omnigraph/checkpoint.hpp"

#include <string>

#include "omnigraph/binary_io.hpp"
#include "omnigraph/error.hpp"

namespace omnigraph {

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
    ByteWriter w;
    w.bytes("OGRF");
    w.u32(kCheckpointVersion);
    w.string(serialize_config(cp.config));
    const auto groups = cp.params.groups();
    w.u64(groups.size());
    for (auto g : groups) w.f64_array(g);
    w.f64_array(cp.params.feature_shift);
    w.f64_array(cp.params.feature_scale);
    std::vector<double> loss;
    std::vector<double> train_acc;
    std::vector<double> val_acc;
    for (const auto& e : cp.log) {
        loss.push_back(e.loss);
        train_acc.push_back(e.train_accuracy);
        val_acc.push_back(e.val_accuracy);
    }
    w.f64_array(loss);
    w.f64_array(train_acc);
    w.f64_array(val_acc);
    w.save(path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    auto r = ByteReader::open(path);
    const std::string name = path.string();
    if (r.remaining() < 4 || r.bytes(4, "magic") != "OGRF") throw FormatError(name + ": not a checkpoint (bad magic)");
    if (auto v = r.u32("format version"); v != kCheckpointVersion) {
        throw FormatError(name + ": checkpoint version " + std::to_string(v) + " is not supported (supported: " +
                          std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint cp;
    try {
        cp.config = parse_config(r.string("config text"));
    } catch (const UsageError& e) {
        throw FormatError(name + ": stored config is invalid: " + e.what());
    }
    cp.params = NetworkParams::init(cp.config.net);
    auto groups = cp.params.groups();
    const auto count = r.u64("parameter array count");
    if (count != groups.size()) {
        throw FormatError(name + ": " + std::to_string(count) + " parameter arrays, config implies " +
                          std::to_string(groups.size()));
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto values = r.f64_array("parameter array " + std::to_string(i));
        if (values.size() != groups[i].size()) {
            throw FormatError(name + ": parameter array " + std::to_string(i) + " has " +
                              std::to_string(values.size()) + " values, expected " + std::to_string(groups[i].size()));
        }
        std::copy(values.begin(), values.end(), groups[i].begin());
    }
    for (auto [section, dst] : {std::pair{"feature shift", &cp.params.feature_shift},
                                std::pair{"feature scale", &cp.params.feature_scale}}) {
        auto values = r.f64_array(section);
        if (values.size() != dst->size()) {
            throw FormatError(name + ": " + section + " has " + std::to_string(values.size()) + " values, expected " +
                              std::to_string(dst->size()));
        }
        *dst = std::move(values);
    }
    const auto loss = r.f64_array("training log (loss)");
    const auto train_acc = r.f64_array("training log (train accuracy)");
    const auto val_acc = r.f64_array("training log (val accuracy)");
    if (train_acc.size() != loss.size() || val_acc.size() != loss.size()) {
        throw FormatError(name + ": training log columns differ in length");
    }
    for (std::size_t i = 0; i < loss.size(); ++i) {
        cp.log.push_back({static_cast<int>(i) + 1, loss[i], train_acc[i], val_acc[i]});
    }
    if (!r.at_end()) throw FormatError(name + ": trailing bytes after training log");
    return cp;
}

}  // namespace omnigraph
