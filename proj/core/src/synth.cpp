#include "salobj/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "salobj/error.hpp"
#include "salobj/random.hpp"

namespace salobj {

namespace {

struct Shape {
  bool ellipse = false;
  double cx = 0, cy = 0, rx = 0, ry = 0; // center and half extents
};

BinaryMask rasterize(const Shape& s, int w, int h) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = (x - s.cx) / s.rx;
      const double dy = (y - s.cy) / s.ry;
      const bool inside = s.ellipse ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
      if (inside) m.set(x, y);
    }
  }
  return m;
}

Shape random_shape(Rng& rng, int w, int h, double min_frac, double max_frac) {
  Shape s;
  s.ellipse = rng.bernoulli(0.5);
  s.rx = std::max(1.5, rng.uniform(min_frac, max_frac) * w / 2.0);
  s.ry = std::max(1.5, rng.uniform(min_frac, max_frac) * h / 2.0);
  s.cx = rng.uniform(s.rx, w - 1 - s.rx);
  s.cy = rng.uniform(s.ry, h - 1 - s.ry);
  return s;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

double quantize(double v) { return std::round(v * 100.0) / 100.0; }

std::string numbered(const char* prefix, int i, int width) {
  std::string num = std::to_string(i);
  if (static_cast<int>(num.size()) < width) num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
  return prefix + num;
}

// Point drawn around the object center, kept inside the object when possible.
std::array<double, 2> point_in(const BinaryMask& mask, const Shape& s, Rng& rng) {
  for (int tries = 0; tries < 20; ++tries) {
    const double x = rng.normal(s.cx, 0.3 * s.rx);
    const double y = rng.normal(s.cy, 0.3 * s.ry);
    if (mask.contains(static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y)))) return {x, y};
  }
  return {s.cx, s.cy};
}

std::vector<GazeSample> simulate_gaze(const std::vector<BinaryMask>& masks, const std::vector<Shape>& shapes,
                                      const std::vector<double>& weights, const SynthParams& p, Rng& rng) {
  const double dt = 1000.0 / p.sample_hz;
  const auto n_samples = static_cast<int>(p.viewing_ms / dt);
  double total_weight = 0.0;
  for (double w : weights) total_weight += w;

  std::vector<GazeSample> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  std::array<double, 2> target{rng.normal((p.width - 1) / 2.0, 0.05 * p.width),
                               rng.normal((p.height - 1) / 2.0, 0.05 * p.height)};
  std::array<double, 2> pos = target;
  int i = 0;
  while (i < n_samples) {
    // Saccade: two samples moving toward the target.
    if (i > 0) {
      for (int k = 1; k <= 2 && i < n_samples; ++k, ++i) {
        const double a = k / 3.0;
        out.push_back({i * dt, quantize(pos[0] + a * (target[0] - pos[0])), quantize(pos[1] + a * (target[1] - pos[1])),
                       true});
      }
    }
    pos = target;
    const auto dwell = static_cast<int>(rng.uniform(180.0, 420.0) / dt);
    const bool blink = rng.bernoulli(0.05);
    for (int k = 0; k < dwell && i < n_samples; ++k, ++i) {
      const bool valid = !(blink && k < 3);
      out.push_back({i * dt, quantize(std::clamp(rng.normal(pos[0], 0.3), 0.0, p.width - 1.0)),
                     quantize(std::clamp(rng.normal(pos[1], 0.3), 0.0, p.height - 1.0)), valid});
    }
    // Next target: an object chosen by weight, or a uniform distractor.
    if (rng.bernoulli(0.2) || total_weight <= 0.0) {
      target = {rng.uniform(0.0, p.width - 1.0), rng.uniform(0.0, p.height - 1.0)};
    } else {
      double pick = rng.uniform() * total_weight;
      std::size_t o = 0;
      while (o + 1 < weights.size() && pick >= weights[o]) pick -= weights[o++];
      target = point_in(masks[o], shapes[o], rng);
    }
  }
  return out;
}

ImageRecord synth_image(const SynthParams& p, std::uint64_t seed, const std::string& id) {
  Rng rng(seed);
  const int w = p.width, h = p.height;
  ImageRecord rec;
  rec.id = id;
  rec.image = RgbImage(w, h);

  // Background: mid-tone base, a gentle gradient, pixel noise.
  std::array<double, 3> base{};
  for (auto& c : base) c = rng.uniform(70.0, 180.0);
  std::array<double, 3> gx{}, gy{};
  for (int c = 0; c < 3; ++c) {
    gx[static_cast<std::size_t>(c)] = rng.uniform(-30.0, 30.0) / w;
    gy[static_cast<std::size_t>(c)] = rng.uniform(-30.0, 30.0) / h;
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const auto k = static_cast<std::size_t>(c);
        rec.image.at(x, y, c) = to_byte(base[k] + gx[k] * (x - w / 2.0) + gy[k] * (y - h / 2.0) + rng.normal(0.0, 10.0));
      }
    }
  }

  // Objects: disjoint shapes with flat colors of varying contrast.
  const int n_objects = static_cast<int>(rng.between(1, 3));
  std::vector<Shape> shapes;
  BinaryMask occupied(w, h);
  for (int tries = 0; static_cast<int>(shapes.size()) < n_objects && tries < 200; ++tries) {
    const Shape s = random_shape(rng, w, h, 0.12, 0.45);
    BinaryMask m = rasterize(s, w, h);
    // Keep a one-pixel gap so objects stay separate components.
    BinaryMask grown(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (m.contains(x, y) || m.contains(x - 1, y) || m.contains(x + 1, y) || m.contains(x, y - 1) ||
            m.contains(x, y + 1)) {
          grown.set(x, y);
        }
      }
    }
    if (mask_intersection(grown, occupied).count() > 0) continue;
    occupied = mask_union(occupied, m);
    shapes.push_back(s);
    rec.objects.push_back(std::move(m));
  }

  std::vector<double> weights;
  for (std::size_t o = 0; o < shapes.size(); ++o) {
    std::array<double, 3> color{};
    const bool low_contrast = rng.bernoulli(0.3);
    for (int c = 0; c < 3; ++c) {
      const auto k = static_cast<std::size_t>(c);
      color[k] = low_contrast ? base[k] + rng.uniform(-35.0, 35.0) : (rng.bernoulli(0.5) ? rng.uniform(0.0, 50.0) : rng.uniform(205.0, 255.0));
    }
    double dist = 0.0;
    for (std::size_t k = 0; k < 3; ++k) dist += (color[k] - base[k]) * (color[k] - base[k]);
    const double contrast = std::sqrt(dist) / (std::sqrt(3.0) * 255.0);
    const double area = static_cast<double>(rec.objects[o].count()) / (static_cast<double>(w) * h);
    weights.push_back(area * std::max(contrast, 0.02));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!rec.objects[o].at(x, y)) continue;
        for (int c = 0; c < 3; ++c) {
          rec.image.at(x, y, c) = to_byte(color[static_cast<std::size_t>(c)] + rng.normal(0.0, 2.0));
        }
      }
    }
  }
  const double top = *std::max_element(weights.begin(), weights.end());
  std::vector<double> click_prob;
  for (double wgt : weights) click_prob.push_back(0.95 * wgt / top);

  for (int s = 0; s < p.click_subjects; ++s) {
    std::vector<bool> flags;
    for (double pr : click_prob) flags.push_back(rng.bernoulli(pr));
    rec.clicks.emplace(numbered("c", s + 1, 2), std::move(flags));
  }
  for (int s = 0; s < p.gaze_subjects; ++s) {
    rec.gaze.emplace(numbered("s", s + 1, 2), simulate_gaze(rec.objects, shapes, click_prob, p, rng));
  }

  // Pool: objects, builtin proposals, random shapes; ranks shuffled.
  SegmentPool pool;
  pool.image_id = id;
  for (const auto& m : rec.objects) pool.candidates.push_back({m, 0, CandidateSource::ground_truth, std::nullopt});
  SegmentPool builtin = builtin_proposals(rec.image, p.builtin_count, rng.next());
  for (auto& c : builtin.candidates) {
    c.external_score.reset();
    pool.candidates.push_back(std::move(c));
  }
  for (int d = 0; d < p.distractors; ++d) {
    const Shape s = random_shape(rng, w, h, 0.1, 0.7);
    pool.candidates.push_back({rasterize(s, w, h), 0, CandidateSource::external, std::nullopt});
  }
  rng.shuffle(std::span<SegmentCandidate>(pool.candidates));
  renumber(pool);
  rec.pool = std::move(pool);
  return rec;
}

} // namespace

Dataset synth_dataset(const SynthParams& params, std::uint64_t seed) {
  if (params.n_images < 10) throw InvalidArgument("synth_dataset: need at least 10 images");
  if (params.width < 16 || params.height < 16) throw InvalidArgument("synth_dataset: image too small");
  if (params.gaze_subjects < 2 || params.click_subjects < 2) throw InvalidArgument("synth_dataset: need >= 2 subjects");
  Dataset ds;
  ds.name = "synth";
  const int digits = std::max(4, static_cast<int>(std::to_string(params.n_images).size()));
  for (int i = 0; i < params.n_images; ++i) {
    ds.images.push_back(synth_image(params, derive_seed(seed, static_cast<std::uint64_t>(i)), numbered("img", i + 1, digits)));
  }
  return ds;
}

} // namespace salobj
