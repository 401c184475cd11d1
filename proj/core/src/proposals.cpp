#include "salobj/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <regex>

#include "csv.hpp"
#include "salobj/error.hpp"
#include "salobj/image_io.hpp"
#include "salobj/metrics.hpp"
#include "salobj/random.hpp"

namespace salobj {

SegmentPool load_pool(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("segment pool directory not found: " + dir.string());
  static const std::regex mask_name(R"((\d+)\.pgm)");
  std::map<long, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || !std::regex_match(name, m, mask_name)) continue;
    const long rank = std::stol(m[1].str());
    if (!files.emplace(rank, entry.path()).second) {
      throw FormatError(dir.string() + ": duplicate rank " + std::to_string(rank));
    }
  }
  SegmentPool pool;
  pool.image_id = dir.filename().string();
  long expected = 1;
  for (const auto& [rank, path] : files) {
    if (rank != expected) {
      throw FormatError(dir.string() + ": non-contiguous ranks, expected " + std::to_string(expected) + " got " +
                        std::to_string(rank));
    }
    SegmentCandidate c;
    c.mask = load_mask(path);
    if (c.mask.empty()) throw FormatError(path.string() + ": empty mask");
    if (!pool.candidates.empty() && !c.mask.same_shape(pool.candidates.front().mask)) {
      throw FormatError(path.string() + ": mask dimensions differ within pool");
    }
    c.rank = static_cast<int>(rank);
    c.source = CandidateSource::external;
    pool.candidates.push_back(std::move(c));
    ++expected;
  }
  const fs::path scores = dir / "scores.csv";
  if (fs::exists(scores)) {
    const auto table = detail::read_csv(scores, {"rank", "score"});
    for (const auto& row : table.rows) {
      const long rank = detail::parse_long(row[0], scores);
      if (rank < 1 || rank > static_cast<long>(pool.size())) {
        throw FormatError(scores.string() + ": rank out of range " + row[0]);
      }
      pool.candidates[static_cast<std::size_t>(rank - 1)].external_score = detail::parse_double(row[1], scores);
    }
  }
  return pool;
}

void save_pool(const SegmentPool& pool, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const int digits = std::max(3, static_cast<int>(std::to_string(pool.size()).size()));
  bool any_score = false;
  for (const auto& c : pool.candidates) {
    std::string num = std::to_string(c.rank);
    num.insert(0, static_cast<std::size_t>(std::max(0, digits - static_cast<int>(num.size()))), '0');
    save_mask(c.mask, dir / (num + ".pgm"));
    any_score = any_score || c.external_score.has_value();
  }
  if (any_score) {
    auto out = detail::open_output(dir / "scores.csv");
    out << "rank,score\n";
    for (const auto& c : pool.candidates) {
      if (c.external_score) out << c.rank << ',' << *c.external_score << '\n';
    }
  }
}

void renumber(SegmentPool& pool) {
  for (std::size_t i = 0; i < pool.candidates.size(); ++i) pool.candidates[i].rank = static_cast<int>(i + 1);
}

namespace {

struct Edge {
  std::uint32_t a;
  std::uint32_t b;
  double w;
};

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), internal_(n, 0.0) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Union by size; the merged root records w as its largest internal edge.
  void join(std::uint32_t a, std::uint32_t b, double w) {
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    internal_[a] = w;
  }

  std::size_t size(std::uint32_t root) const { return size_[root]; }
  double internal(std::uint32_t root) const { return internal_[root]; }

private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<double> internal_;
};

double color_distance(const RgbImage& img, std::size_t a, std::size_t b) {
  const double dr = static_cast<double>(img.data[a * 3]) - img.data[b * 3];
  const double dg = static_cast<double>(img.data[a * 3 + 1]) - img.data[b * 3 + 1];
  const double db = static_cast<double>(img.data[a * 3 + 2]) - img.data[b * 3 + 2];
  return std::sqrt(dr * dr + dg * dg + db * db);
}

std::vector<Edge> grid_edges(const RgbImage& img) {
  std::vector<Edge> edges;
  edges.reserve(img.pixel_count() * 4);
  const int w = img.width, h = img.height;
  const auto id = [w](int x, int y) { return static_cast<std::uint32_t>(y * w + x); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint32_t p = id(x, y);
      const auto link = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) return;
        const std::uint32_t q = id(nx, ny);
        edges.push_back({p, q, color_distance(img, p, q)});
      };
      link(x + 1, y);
      link(x, y + 1);
      link(x + 1, y + 1);
      link(x - 1, y + 1);
    }
  }
  return edges;
}

// Labels 0..n-1 of one segmentation at merge threshold k.
std::vector<std::uint32_t> segment_at_scale(std::size_t n_pixels, const std::vector<Edge>& sorted, double k) {
  DisjointSets sets(n_pixels);
  for (const Edge& e : sorted) {
    const std::uint32_t a = sets.find(e.a);
    const std::uint32_t b = sets.find(e.b);
    if (a == b) continue;
    const double ta = sets.internal(a) + k / static_cast<double>(sets.size(a));
    const double tb = sets.internal(b) + k / static_cast<double>(sets.size(b));
    if (e.w <= std::min(ta, tb)) sets.join(a, b, e.w);
  }
  std::vector<std::uint32_t> labels(n_pixels);
  for (std::size_t i = 0; i < n_pixels; ++i) labels[i] = sets.find(static_cast<std::uint32_t>(i));
  return labels;
}

// Mean color distance across 4-neighbour pairs straddling the mask boundary, scaled to [0,1].
double boundary_contrast(const RgbImage& img, const BinaryMask& mask) {
  double total = 0.0;
  std::size_t n = 0;
  const int w = img.width;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      static constexpr int dx[] = {1, -1, 0, 0};
      static constexpr int dy[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= img.height || mask.at(nx, ny)) continue;
        total += color_distance(img, p, static_cast<std::size_t>(ny) * w + nx);
        ++n;
      }
    }
  }
  static const double max_distance = std::sqrt(3.0) * 255.0;
  return n == 0 ? 0.0 : total / static_cast<double>(n) / max_distance;
}

} // namespace

SegmentPool builtin_proposals(const RgbImage& img, int max_count, std::uint64_t seed, const ProposalParams& params) {
  if (max_count < 1) throw InvalidArgument("builtin_proposals: max_count must be >= 1");
  const std::size_t n_pixels = img.pixel_count();
  std::vector<Edge> edges = grid_edges(img);
  // Equal-weight edges are visited in a seeded order.
  Rng rng(seed);
  rng.shuffle(std::span<Edge>(edges));
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.w < b.w; });

  const auto min_area =
      static_cast<std::size_t>(std::ceil(params.min_area_fraction * static_cast<double>(n_pixels)));
  struct Scored {
    BinaryMask mask;
    double score;
    std::size_t order;
  };
  std::vector<Scored> found;
  for (double k : params.scales) {
    const auto labels = segment_at_scale(n_pixels, edges, k);
    std::map<std::uint32_t, std::size_t> area;
    for (auto l : labels) ++area[l];
    for (const auto& [label, count] : area) {
      if (count < std::max<std::size_t>(min_area, 1)) continue;
      BinaryMask mask(img.width, img.height);
      for (std::size_t i = 0; i < n_pixels; ++i) mask.data[i] = labels[i] == label ? 1 : 0;
      const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Scored& s) {
        return iou(s.mask, mask) > params.dedup_iou;
      });
      if (duplicate) continue;
      const double frac = static_cast<double>(count) / static_cast<double>(n_pixels);
      const double score = frac * boundary_contrast(img, mask);
      found.push_back({std::move(mask), score, found.size()});
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
  if (found.size() > static_cast<std::size_t>(max_count)) found.resize(static_cast<std::size_t>(max_count));

  SegmentPool pool;
  for (auto& s : found) {
    SegmentCandidate c;
    c.mask = std::move(s.mask);
    c.source = CandidateSource::builtin;
    c.external_score = s.score;
    pool.candidates.push_back(std::move(c));
  }
  renumber(pool);
  return pool;
}

std::vector<OverlapMatch> best_overlap_selection(const SegmentPool& pool, std::span<const BinaryMask> gts,
                                                 int first_n) {
  if (pool.empty()) throw InvalidArgument("best_overlap_selection: empty pool");
  std::vector<OverlapMatch> out;
  out.reserve(gts.size());
  for (const auto& gt : gts) {
    OverlapMatch best{0, -1.0};
    for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
      const auto& c = pool.candidates[i];
      if (c.rank > first_n) continue;
      const double v = iou(c.mask, gt);
      if (v > best.iou || (v == best.iou && c.rank < pool.candidates[best.candidate].rank)) best = {i, v};
    }
    if (best.iou < 0.0) best = {0, iou(pool.candidates.front().mask, gt)};
    out.push_back(best);
  }
  return out;
}

} // namespace salobj
