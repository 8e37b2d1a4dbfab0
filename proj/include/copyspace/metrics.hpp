#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copyspace/annotations.hpp"
#include "copyspace/geometry.hpp"

namespace copyspace {

/// Intersection over union of two boxes; 0 when disjoint.
double iou(const BoundingBox& a, const BoundingBox& b);

struct MatchedPair {
    size_t detection_index;
    size_t ground_truth_index;
    double iou;
};

struct MatchResult {
    std::vector<MatchedPair> pairs;
    std::vector<size_t> unmatched_detections; // false positives
    std::vector<size_t> unmatched_gts;        // false negatives
};

struct PrPoint {
    double recall;
    double precision;
};

struct PrCurve {
    std::vector<PrPoint> points; // in detection-confidence rank order; recall non-decreasing
};

/// Greedy single-image matching: detections in confidence order each take
/// the unmatched ground truth of highest IoU when that IoU reaches the
/// threshold. Mixed image ids or an unsorted detection list raise
/// ArgumentError.
MatchResult match_greedy(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                         double iou_threshold);

/// Precision/recall curve over the detections of a whole dataset, pooled and
/// sorted by confidence with per-image greedy matching at the threshold.
PrCurve pr_curve(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                 double iou_threshold);

/// 101-point interpolated average precision: the mean over recall levels
/// {0.00, 0.01, ..., 1.00} of the maximum precision at recall >= level
/// (0 where unreachable). Zero ground truths raise UndefinedMetricError.
double average_precision(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                         double iou_threshold);

/// Arithmetic mean of average_precision over the thresholds. Empty list
/// raises ArgumentError.
double map_range(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                 const std::vector<double>& thresholds);

/// The canonical {0.50, 0.55, ..., 0.95} range, generated as exact
/// hundredths so threshold comparisons behave predictably.
std::vector<double> canonical_thresholds();

/// Mean IoU over all greedy-matched pairs across the dataset, matched per
/// image at the threshold. Zero matches raise UndefinedMetricError.
double mean_matched_iou(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                        double iou_threshold);

struct EvalConfig {
    double iou_threshold = 0.5;        // matching threshold for meanIoU
    std::vector<double> thresholds = canonical_thresholds(); // mAP range
};

/// One metrics row. Metrics are nullopt when undefined on the row's data
/// (zero ground truths, or zero matches for mean_iou) rather than zero.
struct EvalRow {
    size_t n_images = 0;
    size_t n_gts = 0;
    std::optional<double> map_50;
    std::optional<double> map_range;
    std::optional<double> mean_iou;
};

struct EvalReport {
    std::string note;                 // evaluation caveats, printed as the report header
    double iou_threshold = 0.5;
    std::vector<double> thresholds;
    std::map<int, EvalRow> per_class; // keyed by complexity class level
    EvalRow overall;                  // pooled over all images (image-weighted)
    EvalRow macro;                    // unweighted mean of the per-class rows
};

/// Evaluates a detection document against a manifest: ground truths are
/// loaded from each entry's label file (paths resolved against base_dir) and
/// metrics are computed per complexity class, pooled overall, and as the
/// macro class mean. Detections whose image_id resolves to no manifest entry
/// raise ValidationError.
EvalReport evaluate_dataset(const DatasetManifest& manifest, const std::string& base_dir,
                            const std::vector<Detection>& dets, const EvalConfig& config);

/// Aligned plain-text table (Class, N, mAP@0.5, mAP@.5:.95, meanIoU), values
/// x100 with one decimal, undefined cells rendered as "-".
std::string report_table(const EvalReport& report);

std::string report_to_json(const EvalReport& report);

} // namespace copyspace
