#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copyspace/complexity.hpp"
#include "copyspace/geometry.hpp"
#include "copyspace/image.hpp"

namespace copyspace {

/// The full knob set of the heuristic detector. Varying these over a grid
/// yields multiple design generations for one image.
struct DetectParams {
    double min_area_frac = 0.05;                       // fraction of image area, (0, 1]
    std::vector<double> aspect_ratios = {1.0, 2.0, 0.5, 3.0}; // w/h, all > 0
    int scale_steps = 4;                               // >= 1 geometric area steps
    double stride_frac = 0.05;                         // of min(W, H), (0, 1]
    double max_complexity = 0.25;                      // candidate mean-complexity cutoff, [0, 1]
    double area_exponent = 0.004;                      // gamma >= 0 in the score
    double nms_iou = 0.3;                              // suppression threshold, [0, 1]
    int top_k = 5;                                     // >= 1 boxes kept
    double margin_frac = 0.02;                         // border margin, [0, 0.4]
};

/// Throws ArgumentError when any field is outside its documented range.
void validate_params(const DetectParams& params);

struct ScoredBox {
    BoundingBox box;
    double score = 0.0;           // (1 - mean_complexity) * area_frac^gamma
    double mean_complexity = 0.0; // region mean of the complexity map
};

struct DetectionSet {
    std::string image_id;
    DetectParams params;
    std::vector<ScoredBox> boxes; // sorted by score descending, pairwise IoU < nms_iou
};

/// Sliding-window candidate grid: for each of scale_steps geometric areas
/// between min_area_frac and the largest area fitting the margin-inset frame,
/// and each aspect ratio, slide at stride stride_frac * min(W, H).
/// Deterministic order: scale-major, then aspect, then row-major position;
/// exact duplicates removed. No feasible candidate raises NoCandidatesError.
std::vector<BoundingBox> enumerate_candidates(int image_width, int image_height,
                                              const DetectParams& params);

/// Scores candidates against the integral image, drops those with mean
/// complexity above max_complexity, and sorts by score descending with the
/// documented total tie-break (larger area, then smaller y0, then smaller x0).
std::vector<ScoredBox> score_candidates(const IntegralImage& integral,
                                        const std::vector<BoundingBox>& candidates,
                                        const DetectParams& params);

/// Greedy non-maximum suppression over a score-descending list: a box is
/// accepted iff its IoU with every accepted box is strictly below nms_iou.
/// Unsorted input raises ArgumentError. `max_keep` stops early once that
/// many boxes are accepted.
std::vector<ScoredBox> nms(const std::vector<ScoredBox>& scored, double nms_iou,
                           size_t max_keep = SIZE_MAX);

/// Full pipeline: complexity map -> integral -> candidates -> scoring -> NMS
/// -> top_k. Pure: identical (image, params) give identical output.
DetectionSet detect(const GrayImage& image, const DetectParams& params,
                    const std::string& image_id = "");

/// One DetectionSet per grid entry, order preserved. The complexity map and
/// integral image are computed once and shared. Empty grid raises
/// ArgumentError.
std::vector<DetectionSet> parameter_sweep(const GrayImage& image,
                                          const std::vector<DetectParams>& grid,
                                          const std::string& image_id = "");

/// JSON (de)serialization mirroring the DetectParams field names exactly.
std::string params_to_json(const DetectParams& params);
DetectParams params_from_json(const std::string& text);
std::vector<DetectParams> params_grid_from_json(const std::string& text);

std::string detection_set_to_json(const DetectionSet& set);

} // namespace copyspace
