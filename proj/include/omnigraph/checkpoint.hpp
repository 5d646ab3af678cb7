#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "omnigraph/config.hpp"
#include "omnigraph/network.hpp"

namespace omnigraph {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout, little-endian:
//   "OGRF"                       magic
//   u32                          format version
//   u64 + bytes                  config text (serialize_config)
//   u64                          number of parameter arrays
//   per array: u64 n + n x f64   in NetworkParams::groups() order
//   u64 + f64s                   feature shift
//   u64 + f64s                   feature scale
//   u64 + f64s                   log: loss per epoch
//   u64 + f64s                   log: training accuracy per epoch
//   u64 + f64s                   log: validation accuracy per epoch
struct Checkpoint {
    RunConfig config;
    NetworkParams params;
    std::vector<EpochLog> log;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);

/// Throws FormatError on bad magic, an unsupported version, truncation (naming
/// the missing section) or arrays that do not match the stored config.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace omnigraph
