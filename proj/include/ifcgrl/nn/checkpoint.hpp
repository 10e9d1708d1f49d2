#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ifcgrl/nn/layers.hpp"

namespace ifcgrl::nn {

inline constexpr const char* kCheckpointTag = "ifc-grl-ckpt/1";

// In-memory image of a parameter registry: tag, count, then per parameter
// name, shape and little-endian float64 payload. Byte-stable given values.
std::string serialize_parameters(const std::vector<ParamRef>& params);

// Restores values into an existing registry; names and shapes must match
// the stored order exactly.
void deserialize_parameters(const std::string& bytes, const std::vector<ParamRef>& params);

void save_checkpoint(const std::filesystem::path& path, const std::vector<ParamRef>& params);
void load_checkpoint(const std::filesystem::path& path, const std::vector<ParamRef>& params);

struct CheckpointEntry {
  std::string name;
  std::vector<std::size_t> shape;
};

// Reads just the index (names and shapes) of a checkpoint file.
std::vector<CheckpointEntry> read_checkpoint_index(const std::filesystem::path& path);

}  // namespace ifcgrl::nn
