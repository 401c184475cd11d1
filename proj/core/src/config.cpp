#include "salobj/config.hpp"

#include <fstream>

#include "salobj/error.hpp"

namespace salobj {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("config: '" + key + "' expects a number, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long d = std::stoll(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("config: '" + key + "' expects an integer, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_integer(key, v)); }

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw InvalidArgument("config: '" + key + "' expects a boolean, got '" + v + "'");
}

} // namespace

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "K") {
    cfg.K = to_int(key, value);
    if (cfg.K < 1) throw InvalidArgument("config: K must be >= 1");
  } else if (key == "train_fraction") {
    cfg.train_fraction = to_double(key, value);
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
      throw InvalidArgument("config: train_fraction must be in (0, 1)");
    }
  } else if (key == "n_folds") {
    cfg.n_folds = to_int(key, value);
    if (cfg.n_folds < 1) throw InvalidArgument("config: n_folds must be >= 1");
  } else if (key == "fixation_source") {
    if (value == "human") {
      cfg.fixation_source = FixationSource::human;
    } else if (value == "external" || value == "external_map") {
      cfg.fixation_source = FixationSource::external_map;
    } else {
      throw InvalidArgument("config: fixation_source must be human or external");
    }
  } else if (key == "algorithm") {
    cfg.algorithm = value;
  } else if (key == "center_bias_sigma") {
    cfg.center_bias_sigma = to_double(key, value);
  } else if (key == "mask_threshold") {
    cfg.mask_threshold = to_double(key, value);
  } else if (key == "min_score") {
    cfg.min_score = to_double(key, value);
  } else if (key == "first_n") {
    cfg.first_n = to_int(key, value);
  } else if (key == "aggregation") {
    if (value == "pooled") {
      cfg.aggregation = PrAggregation::pooled;
    } else if (value == "per_image") {
      cfg.aggregation = PrAggregation::per_image;
    } else {
      throw InvalidArgument("config: aggregation must be pooled or per_image");
    }
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(to_integer(key, value));
  } else if (key == "n_trees") {
    cfg.forest.n_trees = to_int(key, value);
  } else if (key == "mtry") {
    cfg.forest.mtry = to_int(key, value);
  } else if (key == "min_leaf") {
    cfg.forest.min_leaf = to_int(key, value);
  } else if (key == "max_depth") {
    cfg.forest.max_depth = to_int(key, value);
  } else if (key == "bootstrap") {
    cfg.forest.bootstrap = to_bool(key, value);
  } else if (key == "threads") {
    cfg.forest.threads = to_int(key, value);
  } else if (key == "min_fixation_ms") {
    cfg.fixation.min_duration_ms = to_double(key, value);
  } else if (key == "max_saccade_speed") {
    cfg.fixation.max_speed_px_per_100ms = to_double(key, value);
  } else {
    throw InvalidArgument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  for (const auto& [key, value] : read_key_values(path)) apply_setting(base, key, value);
  return base;
}

} // namespace salobj
