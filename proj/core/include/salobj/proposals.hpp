#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salobj/raster.hpp"

namespace salobj {

enum class CandidateSource { external, builtin, ground_truth };

struct SegmentCandidate {
  BinaryMask mask;
  int rank = 1; ///< 1 = best according to the generator
  CandidateSource source = CandidateSource::external;
  std::optional<double> external_score;
};

/// Candidates of one image, ordered by rank 1..n.
struct SegmentPool {
  std::string image_id;
  std::vector<SegmentCandidate> candidates;

  std::size_t size() const { return candidates.size(); }
  bool empty() const { return candidates.empty(); }
};

/// Reads `NNN.pgm` masks (NNN = 1-based rank) and an optional `scores.csv`
/// with `rank,score`. Ranks must be contiguous from 1 and masks nonempty.
SegmentPool load_pool(const std::filesystem::path& dir);

/// Writes masks as zero-padded `NNN.pgm` plus `scores.csv` when any
/// candidate carries an external score.
void save_pool(const SegmentPool& pool, const std::filesystem::path& dir);

/// Reassigns ranks 1..n in current order.
void renumber(SegmentPool& pool);

struct ProposalParams {
  std::vector<double> scales{150.0, 500.0, 1500.0}; ///< merge thresholds k (tau = k / |C|)
  double min_area_fraction = 0.001;
  double dedup_iou = 0.95;
};

/// Graph-based greedy region merging on RGB distance at several scales.
///
/// Regions of at least min_area_fraction of the image become candidates,
/// near-duplicates are removed, and the rest are ranked by
/// area fraction x mean color contrast across the region boundary.
SegmentPool builtin_proposals(const RgbImage& img, int max_count, std::uint64_t seed,
                              const ProposalParams& params = {});

struct OverlapMatch {
  std::size_t candidate = 0; ///< index into pool.candidates
  double iou = 0.0;
};

/// For each ground-truth mask, the candidate among ranks <= first_n with the
/// highest IoU; ties go to the lower rank.
std::vector<OverlapMatch> best_overlap_selection(const SegmentPool& pool, std::span<const BinaryMask> gts,
                                                 int first_n = 200);

} // namespace salobj
