#include "salobj/fixproc.hpp"

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "salobj/error.hpp"

namespace salobj {

std::vector<Fixation> detect_fixations(std::span<const GazeSample> samples, const FixationParams& params) {
  if (samples.empty()) throw InvalidArgument("detect_fixations: no samples");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t_ms > samples[i - 1].t_ms)) {
      throw InvalidArgument("detect_fixations: timestamps must be strictly increasing");
    }
  }

  std::vector<Fixation> out;
  std::size_t begin = 0;
  std::size_t end = 0; // half-open group [begin, end) of valid samples
  const auto flush = [&]() {
    if (end > begin) {
      const double span = samples[end - 1].t_ms - samples[begin].t_ms;
      if (span >= params.min_duration_ms) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          sx += samples[i].x;
          sy += samples[i].y;
        }
        const double n = static_cast<double>(end - begin);
        out.push_back({sx / n, sy / n, samples[begin].t_ms, span});
      }
    }
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GazeSample& s = samples[i];
    if (!s.valid) {
      flush();
      begin = end = i + 1;
      continue;
    }
    if (end > begin) {
      const GazeSample& prev = samples[end - 1];
      const double dist = std::hypot(s.x - prev.x, s.y - prev.y);
      const double speed = dist / (s.t_ms - prev.t_ms) * 100.0;
      if (speed >= params.max_speed_px_per_100ms) {
        flush();
        begin = i;
      }
    } else {
      begin = i;
    }
    end = i + 1;
  }
  flush();
  return out;
}

void clamp_fixations(FixationSet& set, int width, int height) {
  for (auto& f : set.fixations) {
    f.x = std::clamp(f.x, 0.0, static_cast<double>(width - 1));
    f.y = std::clamp(f.y, 0.0, static_cast<double>(height - 1));
  }
}

Pixel fixation_pixel(const Fixation& f, int width, int height) {
  const auto px = static_cast<int>(std::lround(std::clamp(f.x, 0.0, static_cast<double>(width - 1))));
  const auto py = static_cast<int>(std::lround(std::clamp(f.y, 0.0, static_cast<double>(height - 1))));
  return {px, py};
}

std::vector<Pixel> fixation_pixels(std::span<const FixationSet> sets, int width, int height) {
  std::vector<Pixel> out;
  for (const auto& set : sets) {
    for (const auto& f : set.fixations) out.push_back(fixation_pixel(f, width, height));
  }
  return out;
}

GrayMap fixation_count_map(std::span<const FixationSet> sets, int width, int height) {
  GrayMap map(width, height);
  for (const Pixel p : fixation_pixels(sets, width, height)) map.at(p.x, p.y) += 1.0;
  return map;
}

GrayMap render_fixation_map(std::span<const FixationSet> sets, int width, int height, double sigma_frac) {
  if (!(sigma_frac > 0.0)) throw InvalidArgument("render_fixation_map: sigma fraction must be positive");
  const GrayMap counts = fixation_count_map(sets, width, height);
  if (counts.max_value() == 0.0) return counts;
  return normalize_peak(gaussian_blur(counts, sigma_frac * width));
}

GrayMap center_gaussian(int width, int height, double sigma_frac) {
  if (!(sigma_frac > 0.0)) throw InvalidArgument("center_gaussian: sigma fraction must be positive");
  const double sigma = sigma_frac * width;
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  GrayMap g(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      g.at(x, y) = std::exp(-0.5 * d2 / (sigma * sigma));
    }
  }
  return normalize_peak(std::move(g));
}

GrayMap add_center_bias(const GrayMap& map, double sigma_frac) {
  const GrayMap g = center_gaussian(map.width, map.height, sigma_frac);
  GrayMap out(map.width, map.height);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = 0.5 * (map.data[i] + g.data[i]);
  return normalize_peak(std::move(out));
}

std::vector<GazeSample> read_gaze_csv(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path, {"t_ms", "x", "y", "valid"});
  std::vector<GazeSample> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.push_back({detail::parse_double(row[0], path), detail::parse_double(row[1], path),
                   detail::parse_double(row[2], path), detail::parse_long(row[3], path) != 0});
  }
  return out;
}

void write_gaze_csv(std::span<const GazeSample> samples, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out.precision(6);
  out << std::fixed;
  out << "t_ms,x,y,valid\n";
  for (const auto& s : samples) out << s.t_ms << ',' << s.x << ',' << s.y << ',' << (s.valid ? 1 : 0) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

void write_fixations_csv(std::span<const Fixation> fixations, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "x,y,onset_ms,duration_ms\n";
  for (const auto& f : fixations) out << f.x << ',' << f.y << ',' << f.onset_ms << ',' << f.duration_ms << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

} // namespace salobj
