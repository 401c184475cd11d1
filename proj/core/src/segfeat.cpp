#include "salobj/segfeat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csv.hpp"
#include "salobj/error.hpp"

namespace salobj {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "area",          "centroid_x",       "centroid_y",       "convex_area",      "euler_number",
    "perimeter",     "major_axis",       "minor_axis",       "eccentricity",     "orientation",
    "equiv_diameter", "solidity",        "extent",           "width",            "height",
    "min_energy",    "max_energy",       "mean_energy",      "weighted_cx",      "weighted_cy",
    "energy_ratio",  "hist_0",           "hist_1",           "hist_2",           "hist_3",
    "hist_4",        "hist_5",           "hist_6",           "hist_7",           "hist_8",
    "hist_9",        "hist_10",          "hist_11"};

void require_nonempty(const BinaryMask& mask, const char* what) {
  if (mask.empty()) throw InvalidArgument(std::string(what) + ": empty mask");
}

double diagonal(const BinaryMask& mask) { return std::hypot(mask.width, mask.height); }

struct Point {
  double x, y;
};

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

} // namespace

std::string_view feature_name(std::size_t index) {
  if (index >= kNames.size()) throw InvalidArgument("feature index out of range");
  return kNames[index];
}

double RegionMoments::orientation() const {
  if (mu11 == 0.0 && mu20 == mu02) return 0.0;
  double theta = 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);
  if (theta <= -std::numbers::pi / 2) theta += std::numbers::pi;
  return theta;
}

double RegionMoments::major_axis_length() const {
  const double common = std::sqrt((mu20 - mu02) * (mu20 - mu02) + 4.0 * mu11 * mu11);
  return 2.0 * std::sqrt(2.0) * std::sqrt(mu20 + mu02 + common);
}

double RegionMoments::minor_axis_length() const {
  const double common = std::sqrt((mu20 - mu02) * (mu20 - mu02) + 4.0 * mu11 * mu11);
  return 2.0 * std::sqrt(2.0) * std::sqrt(std::max(0.0, mu20 + mu02 - common));
}

double RegionMoments::eccentricity() const {
  const double a = major_axis_length() / 2.0;
  const double b = minor_axis_length() / 2.0;
  if (a <= 0.0) return 0.0;
  return std::sqrt(std::max(0.0, a * a - b * b)) / a;
}

RegionMoments region_moments(const BinaryMask& mask) {
  RegionMoments m;
  double sx = 0.0, sy = 0.0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      m.m00 += 1.0;
      sx += x;
      sy += y;
    }
  }
  if (m.m00 == 0.0) return m;
  m.cx = sx / m.m00;
  m.cy = sy / m.m00;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const double dx = x - m.cx, dy = y - m.cy;
      m.mu20 += dx * dx;
      m.mu02 += dy * dy;
      m.mu11 += dx * dy;
    }
  }
  m.mu20 = m.mu20 / m.m00 + 1.0 / 12.0;
  m.mu02 = m.mu02 / m.m00 + 1.0 / 12.0;
  m.mu11 /= m.m00;
  return m;
}

int euler_number(const BinaryMask& mask) {
  const int objects = connected_components(mask, 8).count;
  // Background padded by one pixel: the outer region becomes one component.
  BinaryMask background(mask.width + 2, mask.height + 2, true);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) background.set(x + 1, y + 1, false);
    }
  }
  const int holes = connected_components(background, 4).count - 1;
  return objects - holes;
}

double convex_hull_area(const BinaryMask& mask) {
  // Corners of the leftmost and rightmost pixel of each row span the hull.
  std::vector<Point> pts;
  for (int y = 0; y < mask.height; ++y) {
    int lo = -1, hi = -1;
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      if (lo < 0) lo = x;
      hi = x;
    }
    if (lo < 0) continue;
    pts.push_back({lo - 0.5, y - 0.5});
    pts.push_back({lo - 0.5, y + 0.5});
    pts.push_back({hi + 0.5, y - 0.5});
    pts.push_back({hi + 0.5, y + 0.5});
  }
  if (pts.size() < 3) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double twice_area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    twice_area += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice_area) / 2.0;
}

ShapeFeatures shape_features(const BinaryMask& mask) {
  require_nonempty(mask, "shape_features");
  const double image_area = static_cast<double>(mask.size());
  const double diag = diagonal(mask);
  const RegionMoments m = region_moments(mask);
  const BoundingBox box = bounding_box(mask);
  const double hull = convex_hull_area(mask);

  ShapeFeatures f{};
  f[kArea] = m.m00 / image_area;
  f[kCentroidX] = m.cx / mask.width;
  f[kCentroidY] = m.cy / mask.height;
  f[kConvexArea] = hull / image_area;
  f[kEulerNumber] = euler_number(mask);
  f[kPerimeter] = static_cast<double>(inner_boundary(mask).size()) / diag;
  f[kMajorAxisLength] = m.major_axis_length() / diag;
  f[kMinorAxisLength] = m.minor_axis_length() / diag;
  f[kEccentricity] = m.eccentricity();
  f[kOrientation] = m.orientation();
  f[kEquivalentDiameter] = std::sqrt(4.0 * m.m00 / std::numbers::pi) / diag;
  f[kSolidity] = std::min(1.0, m.m00 / hull);
  f[kExtent] = m.m00 / (static_cast<double>(box.width()) * box.height());
  f[kWidth] = static_cast<double>(box.width()) / mask.width;
  f[kHeight] = static_cast<double>(box.height()) / mask.height;
  return f;
}

FixationFeatures fixation_features(const BinaryMask& mask, const GrayMap& energy) {
  if (mask.width != energy.width || mask.height != energy.height) {
    throw InvalidArgument("fixation_features: mask and energy map dimensions differ");
  }
  require_nonempty(mask, "fixation_features");
  const RegionMoments m = region_moments(mask);

  double lo = INFINITY, hi = -INFINITY, inside = 0.0, wx = 0.0, wy = 0.0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const double e = energy.at(x, y);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      inside += e;
      wx += e * x;
      wy += e * y;
    }
  }
  const double whole = energy.sum();

  FixationFeatures f{};
  constexpr std::size_t base = kShapeFeatureCount;
  f[kMinEnergy - base] = lo;
  f[kMaxEnergy - base] = hi;
  f[kMeanEnergy - base] = inside / m.m00;
  const bool weighted = inside > 0.0;
  f[kWeightedCentroidX - base] = (weighted ? wx / inside : m.cx) / mask.width;
  f[kWeightedCentroidY - base] = (weighted ? wy / inside : m.cy) / mask.height;
  f[kEnergyRatio - base] = whole > 0.0 ? std::clamp(inside / whole, 0.0, 1.0) : 0.0;

  if (weighted) {
    // Grid aligned with the major axis, spanning the rotated pixel extents.
    const double theta = m.orientation();
    const double c = std::cos(theta), s = std::sin(theta);
    double umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
    for (int y = 0; y < mask.height; ++y) {
      for (int x = 0; x < mask.width; ++x) {
        if (!mask.at(x, y)) continue;
        const double dx = x - m.cx, dy = y - m.cy;
        const double u = dx * c + dy * s;
        const double v = -dx * s + dy * c;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
    }
    umin -= 0.5;
    umax += 0.5;
    vmin -= 0.5;
    vmax += 0.5;
    std::array<double, kHistBinsMajor * kHistBinsMinor> cells{};
    for (int y = 0; y < mask.height; ++y) {
      for (int x = 0; x < mask.width; ++x) {
        if (!mask.at(x, y)) continue;
        const double e = energy.at(x, y);
        if (e == 0.0) continue;
        const double dx = x - m.cx, dy = y - m.cy;
        const double u = dx * c + dy * s;
        const double v = -dx * s + dy * c;
        const int i = std::clamp(static_cast<int>((u - umin) / (umax - umin) * kHistBinsMajor), 0, kHistBinsMajor - 1);
        const int j = std::clamp(static_cast<int>((v - vmin) / (vmax - vmin) * kHistBinsMinor), 0, kHistBinsMinor - 1);
        cells[static_cast<std::size_t>(j * kHistBinsMajor + i)] += e;
      }
    }
    double total = 0.0;
    for (double v : cells) total += v;
    for (std::size_t k = 0; k < cells.size(); ++k) f[kHist0 - base + k] = cells[k] / total;
  }
  return f;
}

FeatureVector extract_features(const BinaryMask& mask, const GrayMap& energy) {
  const ShapeFeatures shape = shape_features(mask);
  const FixationFeatures fix = fixation_features(mask, energy);
  FeatureVector out{};
  std::copy(shape.begin(), shape.end(), out.begin());
  std::copy(fix.begin(), fix.end(), out.begin() + kShapeFeatureCount);
  return out;
}

void write_features_csv(std::span<const FeatureRow> rows, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "image_id,rank";
  for (std::size_t k = 0; k < kFeatureCount; ++k) out << ",f" << k;
  out << ",target_iou\n";
  for (const auto& r : rows) {
    out << r.image_id << ',' << r.rank;
    for (double v : r.features) out << ',' << v;
    out << ',' << r.target << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

} // namespace salobj
