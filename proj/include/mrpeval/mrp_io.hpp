#pragma once

#include <filesystem>

#include <json.hpp>

#include "mrpeval/mrp.hpp"

// JSON round trip for MRP instances:
//   {"discount": g, "reward_noise": s, "rewards": [...], "transitions": [[...], ...]}
// Transitions are row-major; files are UTF-8.

namespace mrpeval {

Mrp mrp_from_json(const nlohmann::json& j);
nlohmann::json mrp_to_json(const Mrp& mrp);

/// Parses and validates. Throws IoError if the file cannot be read,
/// ValidationError on malformed content.
Mrp load_mrp(const std::filesystem::path& path);
void save_mrp(const Mrp& mrp, const std::filesystem::path& path);

/// A plain JSON array of numbers.
Vector load_vector(const std::filesystem::path& path);

} // namespace mrpeval
