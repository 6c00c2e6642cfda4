#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mcascade/weights.hpp"

namespace mcascade {

/// Parse the key-value model format (see README, "Model files"). Throws
/// ConfigError with the offending line number on malformed input.
WeightModel parse_model(std::string_view text);

WeightModel load_model(const std::filesystem::path& path);

/// Canonical text form: every parameter explicit, full precision, fixed key
/// order. parse_model(to_text(m)) reproduces m exactly.
std::string to_text(const WeightModel& model);

/// 16 hex digits of FNV-1a over the canonical text.
std::string model_digest(const WeightModel& model);

}  // namespace mcascade
