#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace salobj {

/// Row-major training matrix with one regression target per row.
struct TrainingSet {
  std::size_t n_features = 0;
  std::vector<double> values; ///< rows * n_features
  std::vector<double> targets;

  TrainingSet() = default;
  explicit TrainingSet(std::size_t features) : n_features(features) {}

  std::size_t rows() const { return targets.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * n_features, n_features}; }
  void add(std::span<const double> x, double target);
};

struct ForestParams {
  int n_trees = 30;
  int mtry = 11;      ///< features sampled per node
  int min_leaf = 5;   ///< minimum training rows per leaf
  int max_depth = 0;  ///< 0 = unlimited
  bool bootstrap = true;
  int threads = 1;    ///< trees trained concurrently; does not affect results

  /// Compares the model-defining fields; threads is excluded.
  bool operator==(const ForestParams& o) const {
    return n_trees == o.n_trees && mtry == o.mtry && min_leaf == o.min_leaf && max_depth == o.max_depth &&
           bootstrap == o.bootstrap;
  }
};

/// Flat pre-order tree. A node is a leaf when feature < 0.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0; ///< x[feature] <= threshold goes left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;     ///< mean training target (leaves)
  std::uint32_t count = 0;

  bool operator==(const TreeNode&) const = default;
};

class RegressionTree {
public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  bool operator==(const RegressionTree&) const = default;

private:
  std::vector<TreeNode> nodes_;
};

/// Bagged ensemble of MSE regression trees. Prediction is the mean of the
/// leaf values reached in each tree.
class Forest {
public:
  Forest() = default;

  /// Trains a forest; identical (rows, params, seed) give identical trees.
  static Forest train(const TrainingSet& data, const ForestParams& params, std::uint64_t seed);

  double predict(std::span<const double> x) const;
  std::vector<double> predict_all(const TrainingSet& data) const;

  bool trained() const { return !trees_.empty(); }
  std::size_t n_features() const { return n_features_; }
  const ForestParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }

  /// Little-endian binary model; see README for the byte layout.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static Forest load(std::istream& in);
  static Forest load(const std::filesystem::path& path);

  bool operator==(const Forest&) const = default;

private:
  std::size_t n_features_ = 0;
  ForestParams params_{};
  std::uint64_t seed_ = 0;
  std::vector<RegressionTree> trees_;
};

} // namespace salobj
