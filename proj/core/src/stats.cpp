#include "salobj/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "csv.hpp"
#include "salobj/error.hpp"

namespace salobj {

namespace {

void require_boundary_mask(const BinaryMask& mask, const char* what) {
  const std::size_t n = mask.count();
  if (n == 0) throw InvalidArgument(std::string(what) + ": empty mask");
  if (n == mask.size()) throw InvalidArgument(std::string(what) + ": mask covers the whole image");
}

} // namespace

double local_color_contrast(const RgbImage& img, const BinaryMask& mask, int patch, int bins) {
  if (img.width != mask.width || img.height != mask.height) {
    throw InvalidArgument("local_color_contrast: mask and image dimensions differ");
  }
  if (patch < 1) throw InvalidArgument("local_color_contrast: patch must be positive");
  require_boundary_mask(mask, "local_color_contrast");
  const int lo = -(patch / 2);
  const int hi = lo + patch - 1;
  double total = 0.0;
  std::size_t windows = 0;
  for (const Pixel b : inner_boundary(mask)) {
    RgbHistogram fg(bins), bg(bins);
    for (int dy = lo; dy <= hi; ++dy) {
      for (int dx = lo; dx <= hi; ++dx) {
        const int x = b.x + dx, y = b.y + dy;
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
        (mask.at(x, y) ? fg : bg).add(img.rgb(x, y));
      }
    }
    if (fg.total == 0 || bg.total == 0) continue;
    total += chi_square(fg, bg);
    ++windows;
  }
  return windows == 0 ? 0.0 : total / static_cast<double>(windows);
}

double global_color_contrast(const RgbImage& img, const BinaryMask& mask, int bins) {
  require_boundary_mask(mask, "global_color_contrast");
  return chi_square(rgb_histogram(img, mask, bins), rgb_histogram(img, mask.inverted(), bins));
}

double boundary_strength(const GrayMap& edge_map, const BinaryMask& mask, int patch) {
  if (edge_map.width != mask.width || edge_map.height != mask.height) {
    throw InvalidArgument("boundary_strength: edge map and mask dimensions differ");
  }
  if (patch < 1) throw InvalidArgument("boundary_strength: patch must be positive");
  const auto boundary = inner_boundary(mask);
  if (boundary.empty()) throw InvalidArgument("boundary_strength: mask has no boundary");
  const int lo = -(patch / 2);
  const int hi = lo + patch - 1;
  double total = 0.0;
  for (const Pixel b : boundary) {
    double sum = 0.0;
    int n = 0;
    for (int dy = lo; dy <= hi; ++dy) {
      for (int dx = lo; dx <= hi; ++dx) {
        const int x = b.x + dx, y = b.y + dy;
        if (x < 0 || y < 0 || x >= mask.width || y >= mask.height) continue;
        sum += edge_map.at(x, y);
        ++n;
      }
    }
    total += sum / n;
  }
  return total / static_cast<double>(boundary.size());
}

GrayMap default_edge_map(const RgbImage& img) {
  GrayMap out(img.width, img.height);
  const auto px = [&](int x, int y, int c) {
    x = std::clamp(x, 0, img.width - 1);
    y = std::clamp(y, 0, img.height - 1);
    return static_cast<double>(img.at(x, y, c));
  };
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double best = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double gx = (px(x + 1, y - 1, c) + 2 * px(x + 1, y, c) + px(x + 1, y + 1, c)) -
                          (px(x - 1, y - 1, c) + 2 * px(x - 1, y, c) + px(x - 1, y + 1, c));
        const double gy = (px(x - 1, y + 1, c) + 2 * px(x, y + 1, c) + px(x + 1, y + 1, c)) -
                          (px(x - 1, y - 1, c) + 2 * px(x, y - 1, c) + px(x + 1, y - 1, c));
        best = std::max(best, std::hypot(gx, gy));
      }
      out.at(x, y) = best;
    }
  }
  return normalize_peak(std::move(out));
}

double object_size(const BinaryMask& mask) {
  return static_cast<double>(mask.count()) / static_cast<double>(mask.size());
}

ObjectStats object_stats(const RgbImage& img, const GrayMap& edge_map, const BinaryMask& mask, int bins) {
  ObjectStats s;
  s.local_contrast = local_color_contrast(img, mask, 5, bins);
  s.global_contrast = global_color_contrast(img, mask, bins);
  s.boundary_strength = boundary_strength(edge_map, mask, 3);
  s.size_fraction = object_size(mask);
  return s;
}

void write_stats_csv(std::span<const ObjectStats> rows, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "image_id,object_id,local_contrast,global_contrast,boundary_strength,size_fraction\n";
  for (const auto& r : rows) {
    out << r.image_id << ',' << r.object_id << ',' << r.local_contrast << ',' << r.global_contrast << ','
        << r.boundary_strength << ',' << r.size_fraction << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_stats_histogram_csv(std::span<const ObjectStats> rows, const std::filesystem::path& path, int n_bins) {
  if (n_bins < 1) throw InvalidArgument("stats histogram: n_bins must be positive");
  std::vector<std::array<double, 4>> hist(static_cast<std::size_t>(n_bins), {0, 0, 0, 0});
  const auto bin_of = [n_bins](double v) {
    return static_cast<std::size_t>(std::clamp(static_cast<int>(v * n_bins), 0, n_bins - 1));
  };
  for (const auto& r : rows) {
    hist[bin_of(r.local_contrast)][0] += 1;
    hist[bin_of(r.global_contrast)][1] += 1;
    hist[bin_of(r.boundary_strength)][2] += 1;
    hist[bin_of(r.size_fraction)][3] += 1;
  }
  const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  auto out = detail::open_output(path);
  out << "bin_lo,bin_hi,local_contrast,global_contrast,boundary_strength,size_fraction\n";
  for (int b = 0; b < n_bins; ++b) {
    const auto& h = hist[static_cast<std::size_t>(b)];
    out << static_cast<double>(b) / n_bins << ',' << static_cast<double>(b + 1) / n_bins << ',' << h[0] / n << ','
        << h[1] / n << ',' << h[2] / n << ',' << h[3] / n << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

} // namespace salobj
