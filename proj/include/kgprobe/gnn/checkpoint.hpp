#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgprobe/gnn/model.hpp"

namespace kgprobe::gnn {

inline constexpr int kCheckpointVersion = 1;

/// Model plus the entity order it was trained on (one-hot rows are tied to it).
struct Checkpoint {
  GnnModel model;
  std::vector<std::string> entities;
};

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
/// Throws InputError on unknown versions or malformed content.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace kgprobe::gnn
