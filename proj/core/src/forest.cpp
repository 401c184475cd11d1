#include "salobj/forest.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <thread>

#include "salobj/error.hpp"
#include "salobj/random.hpp"

namespace salobj {

void TrainingSet::add(std::span<const double> x, double target) {
  if (x.size() != n_features) throw InvalidArgument("TrainingSet::add: wrong feature count");
  if (!std::isfinite(target)) throw InvalidArgument("TrainingSet::add: non-finite target");
  values.insert(values.end(), x.begin(), x.end());
  targets.push_back(target);
}

double RegressionTree::predict(std::span<const double> x) const {
  if (nodes_.empty()) throw InvalidArgument("RegressionTree::predict: empty tree");
  std::uint32_t i = 0;
  while (nodes_[i].feature >= 0) {
    const TreeNode& n = nodes_[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].value;
}

namespace {

class TreeBuilder {
public:
  TreeBuilder(const TrainingSet& data, const ForestParams& params, Rng& rng)
      : data_(data), params_(params), rng_(rng), features_(data.n_features) {
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  std::vector<TreeNode> build(std::vector<std::uint32_t> samples) {
    grow(samples, 0);
    return std::move(nodes_);
  }

private:
  struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double sse = INFINITY;
  };

  std::uint32_t grow(std::vector<std::uint32_t>& samples, int depth) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0;
    for (auto s : samples) sum += data_.targets[s];
    const double n = static_cast<double>(samples.size());
    nodes_[index].value = sum / n;
    nodes_[index].count = static_cast<std::uint32_t>(samples.size());

    const bool depth_limited = params_.max_depth > 0 && depth >= params_.max_depth;
    const bool too_small = samples.size() < 2 * static_cast<std::size_t>(std::max(1, params_.min_leaf));
    if (depth_limited || too_small || pure(samples)) return index;

    const Split split = best_split(samples);
    if (split.feature < 0) return index;

    std::vector<std::uint32_t> left, right;
    for (auto s : samples) {
      (data_.values[s * data_.n_features + static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
          .push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    nodes_[index].feature = split.feature;
    nodes_[index].threshold = split.threshold;
    const std::uint32_t l = grow(left, depth + 1);
    const std::uint32_t r = grow(right, depth + 1);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  bool pure(const std::vector<std::uint32_t>& samples) const {
    const double first = data_.targets[samples.front()];
    return std::all_of(samples.begin(), samples.end(), [&](std::uint32_t s) { return data_.targets[s] == first; });
  }

  // Sampled features are scanned in ascending index order and thresholds in
  // ascending order; only strict improvements replace the incumbent.
  Split best_split(const std::vector<std::uint32_t>& samples) {
    const std::size_t p = features_.size();
    const std::size_t mtry = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, params_.mtry)), 1, p);
    rng_.partial_shuffle(std::span<std::size_t>(features_), mtry);
    std::vector<std::size_t> chosen(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(mtry));
    std::sort(chosen.begin(), chosen.end());

    const std::size_t n = samples.size();
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf));
    std::vector<std::pair<double, double>> column(n); // (x, y)
    Split best;
    for (std::size_t f : chosen) {
      for (std::size_t i = 0; i < n; ++i) {
        column[i] = {data_.values[samples[i] * data_.n_features + f], data_.targets[samples[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first || (a.first == b.first && a.second < b.second); });
      if (column.front().first == column.back().first) continue;
      double total = 0.0, total_sq = 0.0;
      for (const auto& [x, y] : column) {
        total += y;
        total_sq += y * y;
      }
      double left = 0.0, left_sq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left += column[i].second;
        left_sq += column[i].second * column[i].second;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (column[i].first == column[i + 1].first) continue;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right = total - left;
        const double right_sq = total_sq - left_sq;
        const double sse = (left_sq - left * left / static_cast<double>(nl)) +
                           (right_sq - right * right / static_cast<double>(nr));
        if (sse < best.sse) {
          const double a = column[i].first, b = column[i + 1].first;
          double mid = a + (b - a) / 2.0;
          if (!(mid < b)) mid = a;
          best = {static_cast<std::int32_t>(f), mid, sse};
        }
      }
    }
    return best;
  }

  const TrainingSet& data_;
  const ForestParams& params_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

RegressionTree train_tree(const TrainingSet& data, const ForestParams& params, std::uint64_t tree_seed) {
  Rng rng(tree_seed);
  const std::size_t n = data.rows();
  std::vector<std::uint32_t> samples(n);
  if (params.bootstrap) {
    for (auto& s : samples) s = static_cast<std::uint32_t>(rng.below(n));
  } else {
    std::iota(samples.begin(), samples.end(), std::uint32_t{0});
  }
  TreeBuilder builder(data, params, rng);
  return RegressionTree(builder.build(std::move(samples)));
}

// Little-endian primitive I/O.
template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw TruncatedFile("model file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

constexpr std::array<char, 8> kMagic = {'S', 'A', 'L', 'F', 'R', 'S', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

void write_node(std::ostream& out, const std::vector<TreeNode>& nodes, std::uint32_t i) {
  const TreeNode& n = nodes[i];
  put<std::uint8_t>(out, n.feature >= 0 ? 1 : 0);
  put<double>(out, n.value);
  put<std::uint32_t>(out, n.count);
  if (n.feature < 0) return;
  put<std::int32_t>(out, n.feature);
  put<double>(out, n.threshold);
  write_node(out, nodes, n.left);
  write_node(out, nodes, n.right);
}

std::uint32_t read_node(std::istream& in, std::vector<TreeNode>& nodes, std::uint32_t limit, std::size_t n_features) {
  if (nodes.size() >= limit) throw FormatError("model file: tree has more nodes than declared");
  const auto index = static_cast<std::uint32_t>(nodes.size());
  nodes.emplace_back();
  const auto kind = get<std::uint8_t>(in);
  if (kind > 1) throw FormatError("model file: bad node tag");
  nodes[index].value = get<double>(in);
  nodes[index].count = get<std::uint32_t>(in);
  if (kind == 0) return index;
  const auto feature = get<std::int32_t>(in);
  if (feature < 0 || static_cast<std::size_t>(feature) >= n_features) {
    throw FormatError("model file: split feature out of range");
  }
  nodes[index].feature = feature;
  nodes[index].threshold = get<double>(in);
  const std::uint32_t l = read_node(in, nodes, limit, n_features);
  const std::uint32_t r = read_node(in, nodes, limit, n_features);
  nodes[index].left = l;
  nodes[index].right = r;
  return index;
}

} // namespace

Forest Forest::train(const TrainingSet& data, const ForestParams& params, std::uint64_t seed) {
  if (data.rows() == 0) throw InvalidArgument("Forest::train: empty training set");
  if (data.n_features == 0) throw InvalidArgument("Forest::train: no features");
  if (params.n_trees < 1) throw InvalidArgument("Forest::train: n_trees must be >= 1");

  Forest forest;
  forest.n_features_ = data.n_features;
  forest.params_ = params;
  forest.seed_ = seed;
  forest.trees_.resize(static_cast<std::size_t>(params.n_trees));

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t t = next++; t < forest.trees_.size(); t = next++) {
      forest.trees_[t] = train_tree(data, params, derive_seed(seed, t));
    }
  };
  const int threads = std::clamp(params.threads, 1, params.n_trees);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return forest;
}

double Forest::predict(std::span<const double> x) const {
  if (!trained()) throw InvalidArgument("Forest::predict: untrained forest");
  if (x.size() != n_features_) throw InvalidArgument("Forest::predict: wrong feature count");
  double total = 0.0;
  for (const auto& tree : trees_) total += tree.predict(x);
  return total / static_cast<double>(trees_.size());
}

std::vector<double> Forest::predict_all(const TrainingSet& data) const {
  std::vector<double> out(data.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict(data.row(i));
  return out;
}

void Forest::save(std::ostream& out) const {
  if (!trained()) throw InvalidArgument("Forest::save: untrained forest");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n_features_));
  put<std::int32_t>(out, params_.n_trees);
  put<std::int32_t>(out, params_.mtry);
  put<std::int32_t>(out, params_.min_leaf);
  put<std::int32_t>(out, params_.max_depth);
  put<std::uint8_t>(out, params_.bootstrap ? 1 : 0);
  put<std::uint64_t>(out, seed_);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(trees_.size()));
  for (const auto& tree : trees_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tree.nodes().size()));
    write_node(out, tree.nodes(), 0);
  }
  if (!out) throw IoError("model write failed");
}

void Forest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  save(out);
}

Forest Forest::load(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() == 0) throw TruncatedFile("model file is empty");
  if (in.gcount() < static_cast<std::streamsize>(magic.size())) {
    throw TruncatedFile("model file truncated in header");
  }
  if (magic != kMagic) throw VersionMismatch("model file: bad magic bytes");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw VersionMismatch("model file: unsupported version " + std::to_string(version));

  Forest forest;
  forest.n_features_ = get<std::uint32_t>(in);
  forest.params_.n_trees = get<std::int32_t>(in);
  forest.params_.mtry = get<std::int32_t>(in);
  forest.params_.min_leaf = get<std::int32_t>(in);
  forest.params_.max_depth = get<std::int32_t>(in);
  forest.params_.bootstrap = get<std::uint8_t>(in) != 0;
  forest.seed_ = get<std::uint64_t>(in);
  const auto n_trees = get<std::uint32_t>(in);
  if (n_trees == 0 || forest.n_features_ == 0) throw FormatError("model file: empty forest");
  forest.trees_.reserve(n_trees);
  for (std::uint32_t t = 0; t < n_trees; ++t) {
    const auto n_nodes = get<std::uint32_t>(in);
    std::vector<TreeNode> nodes;
    read_node(in, nodes, n_nodes, forest.n_features_);
    if (nodes.size() != n_nodes) throw FormatError("model file: node count mismatch");
    forest.trees_.emplace_back(std::move(nodes));
  }
  return forest;
}

Forest Forest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load(in);
}

} // namespace salobj
