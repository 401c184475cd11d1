#include "salobj/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "salobj/error.hpp"

namespace salobj {

namespace {

void check_dims(int w, int h) {
  if (w < 1 || h < 1) {
    throw InvalidArgument("raster dimensions must be positive, got " + std::to_string(w) + "x" +
                          std::to_string(h));
  }
}

void require_same_shape(const BinaryMask& a, const BinaryMask& b, const char* what) {
  if (!a.same_shape(b)) throw InvalidArgument(std::string(what) + ": mask dimensions differ");
}

} // namespace

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
  check_dims(w, h);
  data.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

std::array<std::uint8_t, 3> RgbImage::rgb(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {data[i], data[i + 1], data[i + 2]};
}

void RgbImage::set(int x, int y, std::array<std::uint8_t, 3> value) {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  data[i] = value[0];
  data[i + 1] = value[1];
  data[i + 2] = value[2];
}

GrayMap::GrayMap(int w, int h, double fill) : width(w), height(h) {
  check_dims(w, h);
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

double GrayMap::max_value() const { return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end()); }
double GrayMap::min_value() const { return data.empty() ? 0.0 : *std::min_element(data.begin(), data.end()); }
double GrayMap::sum() const { return std::accumulate(data.begin(), data.end(), 0.0); }

BinaryMask::BinaryMask(int w, int h, bool fill) : width(w), height(h) {
  check_dims(w, h);
  data.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
}

BinaryMask BinaryMask::inverted() const {
  BinaryMask out = *this;
  for (auto& v : out.data) v = v ? 0 : 1;
  return out;
}

BoundingBox bounding_box(const BinaryMask& mask) {
  BoundingBox box{mask.width, mask.height, -1, -1};
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      box.x0 = std::min(box.x0, x);
      box.y0 = std::min(box.y0, y);
      box.x1 = std::max(box.x1, x);
      box.y1 = std::max(box.y1, y);
    }
  }
  if (box.x1 < 0) return BoundingBox{};
  return box;
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b, "mask_union");
  BinaryMask out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = (a.data[i] || b.data[i]) ? 1 : 0;
  return out;
}

BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b, "mask_intersection");
  BinaryMask out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = (a.data[i] && b.data[i]) ? 1 : 0;
  return out;
}

GrayMap to_map(const BinaryMask& mask) {
  GrayMap out(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.data.size(); ++i) out.data[i] = mask.data[i] ? 1.0 : 0.0;
  return out;
}

GrayMap normalize_peak(GrayMap map) {
  const double peak = map.max_value();
  if (peak > 0.0) {
    for (auto& v : map.data) v /= peak;
  }
  return map;
}

GrayMap normalize_range(GrayMap map) {
  const double lo = map.min_value();
  const double hi = map.max_value();
  const double span = hi - lo;
  for (auto& v : map.data) v = span > 0.0 ? (v - lo) / span : 0.0;
  return map;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("gaussian_blur: sigma must be positive, got " + std::to_string(sigma));
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * (k * k) / (sigma * sigma));
    taps[static_cast<std::size_t>(k + radius)] = w;
    total += w;
  }
  for (auto& w : taps) w /= total;
  return taps;
}

namespace {

// One 1-D pass; stride selects rows (1) or columns (width).
void convolve_line(const double* in, double* out, int length, std::ptrdiff_t stride, const std::vector<double>& taps) {
  const int radius = static_cast<int>(taps.size() / 2);
  for (int i = 0; i < length; ++i) {
    const int lo = std::max(-radius, -i);
    const int hi = std::min(radius, length - 1 - i);
    double acc = 0.0;
    double weight = 0.0;
    for (int k = lo; k <= hi; ++k) {
      const double w = taps[static_cast<std::size_t>(k + radius)];
      acc += w * in[(i + k) * stride];
      weight += w;
    }
    out[i * stride] = acc / weight;
  }
}

} // namespace

GrayMap gaussian_blur(const GrayMap& map, double sigma) {
  const auto taps = gaussian_kernel(sigma);
  GrayMap tmp(map.width, map.height);
  GrayMap out(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * map.width;
    convolve_line(map.data.data() + row, tmp.data.data() + row, map.width, 1, taps);
  }
  for (int x = 0; x < map.width; ++x) {
    convolve_line(tmp.data.data() + x, out.data.data() + x, map.height, map.width, taps);
  }
  return out;
}

BinaryMask threshold(const GrayMap& map, double th) {
  BinaryMask out(map.width, map.height);
  for (std::size_t i = 0; i < map.data.size(); ++i) out.data[i] = map.data[i] >= th ? 1 : 0;
  return out;
}

std::vector<Pixel> inner_boundary(const BinaryMask& mask) {
  std::vector<Pixel> out;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      if (!mask.contains(x - 1, y) || !mask.contains(x + 1, y) || !mask.contains(x, y - 1) ||
          !mask.contains(x, y + 1)) {
        out.push_back({x, y});
      }
    }
  }
  return out;
}

RgbHistogram::RgbHistogram(int bins_per_channel) : bins(bins_per_channel) {
  if (bins < 2 || bins > 32) {
    throw InvalidArgument("rgb_histogram: bins per channel must be in [2, 32], got " + std::to_string(bins));
  }
  counts.assign(static_cast<std::size_t>(bins) * bins * bins, 0);
}

std::size_t RgbHistogram::bin_index(std::array<std::uint8_t, 3> rgb) const {
  const auto q = [this](std::uint8_t v) { return static_cast<std::size_t>(v) * bins / 256; };
  return (q(rgb[0]) * bins + q(rgb[1])) * bins + q(rgb[2]);
}

void RgbHistogram::add(std::array<std::uint8_t, 3> rgb) {
  ++counts[bin_index(rgb)];
  ++total;
}

RgbHistogram rgb_histogram(const RgbImage& img, const BinaryMask& mask, int bins) {
  if (img.width != mask.width || img.height != mask.height) {
    throw InvalidArgument("rgb_histogram: mask and image dimensions differ");
  }
  RgbHistogram hist(bins);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (mask.at(x, y)) hist.add(img.rgb(x, y));
    }
  }
  return hist;
}

double chi_square(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("chi_square: histogram lengths differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double s = p[i] + q[i];
    if (s == 0.0) continue;
    const double d = p[i] - q[i];
    acc += d * d / s;
  }
  return 0.5 * acc;
}

double chi_square(const RgbHistogram& h1, const RgbHistogram& h2) {
  if (h1.bins != h2.bins) throw InvalidArgument("chi_square: bin counts differ");
  if (h1.total == 0 || h2.total == 0) throw InvalidArgument("chi_square: empty histogram");
  // Accumulate in an order that does not depend on argument order so the
  // result is bitwise symmetric.
  const double n1 = static_cast<double>(h1.total);
  const double n2 = static_cast<double>(h2.total);
  double acc = 0.0;
  for (std::size_t i = 0; i < h1.counts.size(); ++i) {
    if (h1.counts[i] == 0 && h2.counts[i] == 0) continue;
    const double p = h1.counts[i] / n1;
    const double q = h2.counts[i] / n2;
    const double d = p - q;
    acc += d * d / (p + q);
  }
  return std::min(1.0, 0.5 * acc);
}

std::vector<std::size_t> ComponentLabels::areas() const {
  std::vector<std::size_t> out(static_cast<std::size_t>(count) + 1, 0);
  for (int l : labels) {
    if (l > 0) ++out[static_cast<std::size_t>(l)];
  }
  return out;
}

ComponentLabels connected_components(const BinaryMask& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw InvalidArgument("connected_components: connectivity must be 4 or 8");
  }
  ComponentLabels out{mask.width, mask.height, std::vector<int>(mask.size(), 0), 0};
  static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
  std::vector<Pixel> stack;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * mask.width + x;
      if (!mask.data[idx] || out.labels[idx] != 0) continue;
      const int label = ++out.count;
      out.labels[idx] = label;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int k = 0; k < connectivity; ++k) {
          const int nx = p.x + dx8[k];
          const int ny = p.y + dy8[k];
          if (!mask.contains(nx, ny)) continue;
          const std::size_t n = static_cast<std::size_t>(ny) * mask.width + nx;
          if (out.labels[n] != 0) continue;
          out.labels[n] = label;
          stack.push_back({nx, ny});
        }
      }
    }
  }
  return out;
}

} // namespace salobj
