#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "salobj/pipeline.hpp"

namespace salobj {

/// Parses `key=value` lines; blank lines and `#` comments are ignored.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Applies one setting. Recognized keys:
///   K, train_fraction, n_folds, fixation_source (human|external), algorithm,
///   center_bias_sigma, mask_threshold, min_score, first_n, aggregation
///   (pooled|per_image), seed, n_trees, mtry, min_leaf, max_depth, bootstrap,
///   threads, min_fixation_ms, max_saccade_speed.
/// Throws InvalidArgument for unknown keys or unparsable values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

} // namespace salobj
