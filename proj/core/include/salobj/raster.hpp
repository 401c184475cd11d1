#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace salobj {

/// Integer pixel coordinate.
struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// 8-bit RGB raster, row-major, interleaved channels.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h);

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  std::uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::array<std::uint8_t, 3> rgb(int x, int y) const;
  void set(int x, int y, std::array<std::uint8_t, 3> value);
  bool operator==(const RgbImage&) const = default;
};

/// Real-valued 2-D field (saliency maps, fixation energy, edge maps).
struct GrayMap {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  GrayMap() = default;
  GrayMap(int w, int h, double fill = 0.0);

  std::size_t size() const { return data.size(); }
  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  double max_value() const;
  double min_value() const;
  double sum() const;
  bool operator==(const GrayMap&) const = default;
};

/// Boolean 2-D field; one byte per pixel (0 or 1).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false);

  std::size_t size() const { return data.size(); }
  bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v = true) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  bool test(std::size_t i) const { return data[i] != 0; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height && at(x, y); }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool same_shape(const BinaryMask& o) const { return width == o.width && height == o.height; }
  BinaryMask inverted() const;
  bool operator==(const BinaryMask&) const = default;
};

struct BoundingBox {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1; // inclusive
  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  bool empty() const { return x1 < x0 || y1 < y0; }
};

BoundingBox bounding_box(const BinaryMask& mask);

/// Pixel-wise union and intersection of equally sized masks.
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b);

/// Converts a mask to a 0/1 map.
GrayMap to_map(const BinaryMask& mask);

/// Divides by the maximum so the peak is 1. All-zero maps are returned unchanged.
GrayMap normalize_peak(GrayMap map);

/// Affine rescale to [0,1]; constant maps become all zero.
GrayMap normalize_range(GrayMap map);

/// Separable Gaussian convolution with kernel radius ceil(3 sigma).
///
/// At the image border the kernel is renormalized over the in-bounds taps, so
/// constant maps are preserved exactly.
GrayMap gaussian_blur(const GrayMap& map, double sigma);

/// Normalized 1-D Gaussian taps for offsets -r..r, r = ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// mask[p] = map[p] >= th.
BinaryMask threshold(const GrayMap& map, double th);

/// Inner boundary: foreground pixels with a 4-neighbour that is background.
/// Pixels outside the raster count as background.
std::vector<Pixel> inner_boundary(const BinaryMask& mask);

struct RgbHistogram {
  int bins = 0; ///< per channel
  std::vector<std::uint32_t> counts; ///< bins^3 entries, index (r*bins + g)*bins + b
  std::uint64_t total = 0;

  explicit RgbHistogram(int bins_per_channel = 8);
  void add(std::array<std::uint8_t, 3> rgb);
  std::size_t bin_index(std::array<std::uint8_t, 3> rgb) const;
};

/// Histogram of the masked pixels of an image; bins per channel in [2, 32].
RgbHistogram rgb_histogram(const RgbImage& img, const BinaryMask& mask, int bins = 8);

/// Half the chi-square distance between frequency-normalized histograms; in [0,1].
double chi_square(const RgbHistogram& h1, const RgbHistogram& h2);

/// Same distance on two raw frequency vectors (used by tests and the 1-D case).
double chi_square(std::span<const double> p, std::span<const double> q);

struct ComponentLabels {
  int width = 0;
  int height = 0;
  std::vector<int> labels; ///< 0 = background, otherwise 1..count
  int count = 0;

  int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::vector<std::size_t> areas() const; ///< indexed by label, entry 0 unused
};

/// Labels foreground components in raster-scan first-encounter order.
/// connectivity must be 4 or 8.
ComponentLabels connected_components(const BinaryMask& mask, int connectivity);

} // namespace salobj
