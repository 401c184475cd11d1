#include "salobj/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csv.hpp"
#include "salobj/error.hpp"
#include "salobj/random.hpp"

namespace salobj {

namespace {

// Largest level whose threshold is <= v, or -1.
int level_of(double v) {
  if (!(v >= 0.0)) return -1;
  int k = static_cast<int>(std::min(255.0, std::floor(v * 255.0)));
  while (k < kPrLevels - 1 && pr_threshold(k + 1) <= v) ++k;
  while (k >= 0 && pr_threshold(k) > v) --k;
  return k;
}

void check_pairs(std::size_t n_maps, std::size_t n_gts) {
  if (n_maps == 0) throw InvalidArgument("no maps to score");
  if (n_maps != n_gts) throw InvalidArgument("maps and ground truths differ in count");
}

std::vector<std::size_t> split_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

} // namespace

double pr_threshold(int level) { return static_cast<double>(level) / 255.0; }

void PrCounts::add(const GrayMap& map, const BinaryMask& gt) {
  if (map.width != gt.width || map.height != gt.height) {
    throw InvalidArgument("pr_curve: map and ground-truth dimensions differ");
  }
  std::array<std::uint64_t, kPrLevels> pos_hist{};
  std::array<std::uint64_t, kPrLevels> neg_hist{};
  for (std::size_t i = 0; i < map.data.size(); ++i) {
    const bool is_pos = gt.data[i] != 0;
    positives += is_pos ? 1 : 0;
    const int k = level_of(map.data[i]);
    if (k < 0) continue;
    (is_pos ? pos_hist : neg_hist)[static_cast<std::size_t>(k)] += 1;
  }
  std::uint64_t tp_acc = 0;
  std::uint64_t fp_acc = 0;
  for (int k = kPrLevels - 1; k >= 0; --k) {
    tp_acc += pos_hist[static_cast<std::size_t>(k)];
    fp_acc += neg_hist[static_cast<std::size_t>(k)];
    tp[static_cast<std::size_t>(k)] += tp_acc;
    fp[static_cast<std::size_t>(k)] += fp_acc;
  }
}

PrCounts& PrCounts::operator+=(const PrCounts& other) {
  for (std::size_t k = 0; k < tp.size(); ++k) {
    tp[k] += other.tp[k];
    fp[k] += other.fp[k];
  }
  positives += other.positives;
  return *this;
}

double precision_of(std::uint64_t tp, std::uint64_t fp) {
  return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall_of(std::uint64_t tp, std::uint64_t positives) {
  return positives == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(positives);
}

PrCurve pr_curve(const PrCounts& counts) {
  PrCurve curve;
  for (int k = 0; k < kPrLevels; ++k) {
    const auto i = static_cast<std::size_t>(k);
    curve.thresholds[i] = pr_threshold(k);
    curve.precision[i] = precision_of(counts.tp[i], counts.fp[i]);
    curve.recall[i] = recall_of(counts.tp[i], counts.positives);
  }
  return curve;
}

PrCurve pr_curve(std::span<const GrayMap> maps, std::span<const BinaryMask> gts, PrAggregation mode) {
  check_pairs(maps.size(), gts.size());
  if (mode == PrAggregation::pooled) {
    PrCounts counts;
    for (std::size_t i = 0; i < maps.size(); ++i) counts.add(maps[i], gts[i]);
    return pr_curve(counts);
  }
  PrCurve mean;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    PrCounts counts;
    counts.add(maps[i], gts[i]);
    const PrCurve one = pr_curve(counts);
    for (std::size_t k = 0; k < mean.precision.size(); ++k) {
      mean.precision[k] += one.precision[k];
      mean.recall[k] += one.recall[k];
    }
  }
  const auto n = static_cast<double>(maps.size());
  for (int k = 0; k < kPrLevels; ++k) {
    const auto i = static_cast<std::size_t>(k);
    mean.thresholds[i] = pr_threshold(k);
    mean.precision[i] /= n;
    mean.recall[i] /= n;
  }
  return mean;
}

double f_measure(double p, double r, double beta_sq) {
  if (r == 0.0) return 0.0;
  const double denom = beta_sq * p + r;
  return denom == 0.0 ? 0.0 : (1.0 + beta_sq) * p * r / denom;
}

FScore best_f(const PrCurve& curve, double beta_sq) {
  FScore best{-1.0, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < curve.precision.size(); ++k) {
    const double f = f_measure(curve.precision[k], curve.recall[k], beta_sq);
    if (f > best.f) best = {f, curve.precision[k], curve.recall[k], curve.thresholds[k]};
  }
  return best;
}

double dataset_f(std::span<const GrayMap> maps, std::span<const BinaryMask> gts, PrAggregation mode) {
  return best_f(pr_curve(maps, gts, mode)).f;
}

FScore binary_f(std::span<const BinaryMask> predictions, std::span<const BinaryMask> gts, double beta_sq) {
  check_pairs(predictions.size(), gts.size());
  std::uint64_t tp = 0, fp = 0, positives = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!predictions[i].same_shape(gts[i])) throw InvalidArgument("binary_f: mask dimensions differ");
    for (std::size_t p = 0; p < gts[i].data.size(); ++p) {
      const bool g = gts[i].data[p] != 0;
      const bool s = predictions[i].data[p] != 0;
      tp += (g && s) ? 1 : 0;
      fp += (!g && s) ? 1 : 0;
      positives += g ? 1 : 0;
    }
  }
  const double p = precision_of(tp, fp);
  const double r = recall_of(tp, positives);
  return {f_measure(p, r, beta_sq), p, r, 0.5};
}

double roc_auc(const GrayMap& map, std::span<const Pixel> positives, std::span<const Pixel> negatives) {
  if (positives.empty() || negatives.empty()) throw InvalidArgument("roc_auc: empty sample list");
  std::vector<double> neg(negatives.size());
  for (std::size_t i = 0; i < negatives.size(); ++i) neg[i] = map.at(negatives[i].x, negatives[i].y);
  std::sort(neg.begin(), neg.end());
  // Twice the Mann-Whitney U statistic, kept integral so the result is exact.
  std::uint64_t twice_u = 0;
  for (const Pixel p : positives) {
    const double v = map.at(p.x, p.y);
    const auto lo = std::lower_bound(neg.begin(), neg.end(), v);
    const auto hi = std::upper_bound(lo, neg.end(), v);
    twice_u += 2 * static_cast<std::uint64_t>(lo - neg.begin()) + static_cast<std::uint64_t>(hi - lo);
  }
  const double pairs = static_cast<double>(positives.size()) * static_cast<double>(negatives.size());
  return static_cast<double>(twice_u) / (2.0 * pairs);
}

double shuffled_auc(const GrayMap& map, std::span<const Pixel> fixations_this_image,
                    std::span<const Pixel> fixations_other_images, int n_splits, std::uint64_t seed) {
  if (fixations_this_image.empty() || fixations_other_images.empty()) {
    throw InvalidArgument("shuffled_auc: empty fixation pool");
  }
  if (n_splits < 1) throw InvalidArgument("shuffled_auc: n_splits must be >= 1");
  std::vector<Pixel> pool(fixations_other_images.begin(), fixations_other_images.end());
  const std::size_t take = std::min(pool.size(), fixations_this_image.size());
  Rng rng(seed);
  double total = 0.0;
  for (int s = 0; s < n_splits; ++s) {
    rng.partial_shuffle(std::span<Pixel>(pool), take);
    total += roc_auc(map, fixations_this_image, std::span<const Pixel>(pool.data(), take));
  }
  return total / n_splits;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw InvalidArgument("iou: mask dimensions differ");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool x = a.data[i] != 0;
    const bool y = b.data[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double consistency_fixation(std::span<const ImageFixations> images, std::uint64_t seed,
                            const ConsistencyParams& params) {
  if (images.empty()) throw InvalidArgument("consistency_fixation: no images");
  double total = 0.0;
  std::size_t scored = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const ImageFixations& img = images[i];
    const std::size_t n = img.subjects.size();
    if (n < 2) throw InvalidArgument("consistency_fixation: fewer than 2 subjects on an image");
    Rng rng(derive_seed(seed, i));
    const auto order = split_order(n, rng);
    std::vector<FixationSet> test, truth;
    for (std::size_t k = 0; k < n; ++k) (k < n / 2 ? test : truth).push_back(img.subjects[order[k]]);

    const std::vector<Pixel> positives = fixation_pixels(truth, img.width, img.height);
    if (positives.empty()) continue;
    const GrayMap map = render_fixation_map(test, img.width, img.height, params.sigma_frac);

    if (params.shuffled) {
      std::vector<Pixel> others;
      for (std::size_t j = 0; j < images.size(); ++j) {
        if (j == i) continue;
        for (const auto& set : images[j].subjects) {
          for (const auto& f : set.fixations) others.push_back(fixation_pixel(f, img.width, img.height));
        }
      }
      if (others.empty()) continue;
      total += shuffled_auc(map, positives, others, params.n_splits, rng.next());
    } else {
      BinaryMask fixated(img.width, img.height);
      for (const Pixel p : positives) fixated.set(p.x, p.y);
      std::vector<Pixel> free_pixels;
      for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
          if (!fixated.at(x, y)) free_pixels.push_back({x, y});
        }
      }
      if (free_pixels.empty()) continue;
      std::vector<Pixel> negatives(positives.size() * static_cast<std::size_t>(params.negative_ratio));
      for (auto& p : negatives) p = free_pixels[rng.below(free_pixels.size())];
      total += roc_auc(map, positives, negatives);
    }
    ++scored;
  }
  if (scored == 0) throw InvalidArgument("consistency_fixation: no image had scorable fixations");
  return total / static_cast<double>(scored);
}

BinaryMask majority_mask(std::span<const BinaryMask> masks, double th) {
  if (masks.empty()) throw InvalidArgument("majority_mask: no masks");
  GrayMap mean(masks.front().width, masks.front().height);
  for (const auto& m : masks) {
    if (!m.same_shape(masks.front())) throw InvalidArgument("majority_mask: mask dimensions differ");
    for (std::size_t p = 0; p < m.data.size(); ++p) mean.data[p] += m.data[p] ? 1.0 : 0.0;
  }
  const auto n = static_cast<double>(masks.size());
  for (auto& v : mean.data) v /= n;
  return threshold(mean, th);
}

double consistency_segmentation(std::span<const std::vector<BinaryMask>> subject_masks, std::uint64_t seed) {
  if (subject_masks.empty()) throw InvalidArgument("consistency_segmentation: no images");
  std::vector<BinaryMask> tests, truths;
  for (std::size_t i = 0; i < subject_masks.size(); ++i) {
    const auto& masks = subject_masks[i];
    const std::size_t n = masks.size();
    if (n < 2) throw InvalidArgument("consistency_segmentation: fewer than 2 subjects on an image");
    Rng rng(derive_seed(seed, i));
    const auto order = split_order(n, rng);
    std::vector<BinaryMask> test, truth;
    for (std::size_t k = 0; k < n; ++k) (k < n / 2 ? test : truth).push_back(masks[order[k]]);
    tests.push_back(majority_mask(test));
    truths.push_back(majority_mask(truth));
  }
  return binary_f(tests, truths).f;
}

void write_scores_csv(std::span<const ScoreRow> rows, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "metric,dataset,algorithm,value,n_images\n";
  for (const auto& r : rows) {
    out << r.metric << ',' << r.dataset << ',' << r.algorithm << ',' << r.value << ',' << r.n_images << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_pr_csv(const PrCurve& curve, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "threshold,precision,recall\n";
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
    out << curve.thresholds[k] << ',' << curve.precision[k] << ',' << curve.recall[k] << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

} // namespace salobj
