#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "cactuss/augment.hpp"
#include "cactuss/phantom.hpp"
#include "cactuss/probe_geometry.hpp"
#include "cactuss/raytracer.hpp"

namespace cactuss {

// JSON (de)serialisation of the configuration types. Missing fields keep their
// defaults; unknown fields are rejected so typos do not pass silently.

ProbeConfig probe_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProbeConfig& p);

SimConfig sim_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& s);

PhantomSpec phantom_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PhantomSpec& s);

AugmentConfig augment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AugmentConfig& a);

/// Parses a JSON file; FormatError on syntax errors, IoError if unreadable.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace cactuss
