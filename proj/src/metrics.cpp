#include "copyspace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "copyspace/errors.hpp"
#include "copyspace/image.hpp"
#include "json.hpp"

namespace copyspace {

namespace {

using nlohmann::json;

void require_sorted_by_confidence(const std::vector<Detection>& dets) {
    for (size_t i = 1; i < dets.size(); ++i)
        if (dets[i - 1].confidence < dets[i].confidence)
            throw ArgumentError("detections must be sorted by confidence descending");
}

} // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
    if (!a.valid() || !b.valid()) throw ArgumentError("iou requires valid boxes");
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

MatchResult match_greedy(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                         double iou_threshold) {
    if (!dets.empty()) {
        const std::string& id = dets.front().image_id;
        for (const auto& d : dets)
            if (d.image_id != id) throw ArgumentError("match_greedy requires a single image_id");
        for (const auto& g : gts)
            if (g.image_id != id) throw ArgumentError("match_greedy requires a single image_id");
    } else if (!gts.empty()) {
        const std::string& id = gts.front().image_id;
        for (const auto& g : gts)
            if (g.image_id != id) throw ArgumentError("match_greedy requires a single image_id");
    }
    require_sorted_by_confidence(dets);

    MatchResult result;
    std::vector<bool> gt_taken(gts.size(), false);
    for (size_t di = 0; di < dets.size(); ++di) {
        double best_iou = 0.0;
        size_t best_gt = gts.size();
        for (size_t gi = 0; gi < gts.size(); ++gi) {
            if (gt_taken[gi]) continue;
            const double v = iou(dets[di].box, gts[gi].box);
            if (v > best_iou) {
                best_iou = v;
                best_gt = gi;
            }
        }
        if (best_gt < gts.size() && best_iou >= iou_threshold) {
            gt_taken[best_gt] = true;
            result.pairs.push_back(MatchedPair{di, best_gt, best_iou});
        } else {
            result.unmatched_detections.push_back(di);
        }
    }
    for (size_t gi = 0; gi < gts.size(); ++gi)
        if (!gt_taken[gi]) result.unmatched_gts.push_back(gi);
    return result;
}

namespace {

struct RankedDetection {
    double confidence;
    std::string image_id;
    size_t rank_in_image;
    bool is_tp;
};

// Per-image greedy matching, then one pooled confidence-descending pass.
std::vector<RankedDetection> pooled_matches(const std::vector<Detection>& dets,
                                            const std::vector<GroundTruth>& gts,
                                            double iou_threshold, size_t* total_gts) {
    std::map<std::string, std::vector<Detection>> dets_by_image;
    std::map<std::string, std::vector<GroundTruth>> gts_by_image;
    for (const auto& d : dets) dets_by_image[d.image_id].push_back(d);
    for (const auto& g : gts) gts_by_image[g.image_id].push_back(g);
    *total_gts = gts.size();

    std::vector<RankedDetection> ranked;
    ranked.reserve(dets.size());
    for (auto& [image_id, image_dets] : dets_by_image) {
        std::stable_sort(image_dets.begin(), image_dets.end(),
                         [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
        const auto git = gts_by_image.find(image_id);
        static const std::vector<GroundTruth> kNoGts;
        const auto& image_gts = git == gts_by_image.end() ? kNoGts : git->second;

        const MatchResult match = match_greedy(image_dets, image_gts, iou_threshold);
        std::vector<bool> tp(image_dets.size(), false);
        for (const auto& pair : match.pairs) tp[pair.detection_index] = true;
        for (size_t i = 0; i < image_dets.size(); ++i)
            ranked.push_back(RankedDetection{image_dets[i].confidence, image_id, i, tp[i]});
    }

    std::sort(ranked.begin(), ranked.end(), [](const RankedDetection& a, const RankedDetection& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.image_id != b.image_id) return a.image_id < b.image_id;
        return a.rank_in_image < b.rank_in_image;
    });
    return ranked;
}

} // namespace

PrCurve pr_curve(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                 double iou_threshold) {
    if (gts.empty()) throw UndefinedMetricError("precision/recall undefined without ground truths");

    size_t total_gts = 0;
    const auto ranked = pooled_matches(dets, gts, iou_threshold, &total_gts);

    PrCurve curve;
    curve.points.reserve(ranked.size());
    size_t tp = 0, fp = 0;
    for (const auto& r : ranked) {
        if (r.is_tp) ++tp; else ++fp;
        curve.points.push_back(PrPoint{static_cast<double>(tp) / static_cast<double>(total_gts),
                                       static_cast<double>(tp) / static_cast<double>(tp + fp)});
    }
    return curve;
}

double average_precision(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                         double iou_threshold) {
    const PrCurve curve = pr_curve(dets, gts, iou_threshold);
    const auto& pts = curve.points;
    if (pts.empty()) return 0.0;

    // Running maximum of precision from the tail: envelope[i] is the best
    // precision at any recall >= recall[i].
    std::vector<double> envelope(pts.size());
    double best = 0.0;
    for (size_t i = pts.size(); i-- > 0;) {
        best = std::max(best, pts[i].precision);
        envelope[i] = best;
    }

    double sum = 0.0;
    size_t idx = 0;
    for (int k = 0; k <= 100; ++k) {
        const double level = static_cast<double>(k) / 100.0;
        while (idx < pts.size() && pts[idx].recall < level) ++idx;
        if (idx < pts.size()) sum += envelope[idx];
    }
    return sum / 101.0;
}

double map_range(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                 const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw ArgumentError("threshold list must be non-empty");
    double sum = 0.0;
    for (double t : thresholds) sum += average_precision(dets, gts, t);
    return sum / static_cast<double>(thresholds.size());
}

std::vector<double> canonical_thresholds() {
    // Exact hundredths: 50/100 .. 95/100 in steps of 5/100. Generating each
    // value by a single division keeps thresholds like 0.60 bit-identical to
    // independently computed IoU ratios.
    std::vector<double> out;
    for (int k = 50; k <= 95; k += 5) out.push_back(static_cast<double>(k) / 100.0);
    return out;
}

double mean_matched_iou(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                        double iou_threshold) {
    std::map<std::string, std::vector<Detection>> dets_by_image;
    std::map<std::string, std::vector<GroundTruth>> gts_by_image;
    for (const auto& d : dets) dets_by_image[d.image_id].push_back(d);
    for (const auto& g : gts) gts_by_image[g.image_id].push_back(g);

    double sum = 0.0;
    size_t matches = 0;
    for (auto& [image_id, image_dets] : dets_by_image) {
        std::stable_sort(image_dets.begin(), image_dets.end(),
                         [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
        const auto git = gts_by_image.find(image_id);
        if (git == gts_by_image.end()) continue;
        const MatchResult match = match_greedy(image_dets, git->second, iou_threshold);
        for (const auto& pair : match.pairs) {
            sum += pair.iou;
            ++matches;
        }
    }
    if (matches == 0) throw UndefinedMetricError("no matched pairs at this threshold");
    return sum / static_cast<double>(matches);
}

namespace {

std::string path_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

EvalRow compute_row(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                    size_t n_images, const EvalConfig& config) {
    EvalRow row;
    row.n_images = n_images;
    row.n_gts = gts.size();
    if (gts.empty()) return row; // metrics stay undefined, never silently zero
    row.map_50 = average_precision(dets, gts, 0.5);
    row.map_range = map_range(dets, gts, config.thresholds);
    try {
        row.mean_iou = mean_matched_iou(dets, gts, config.iou_threshold);
    } catch (const UndefinedMetricError&) {
        row.mean_iou = std::nullopt;
    }
    return row;
}

void accumulate_macro(EvalRow& macro, const EvalRow& row, size_t& n50, size_t& nrange, size_t& niou) {
    if (row.map_50) {
        macro.map_50 = macro.map_50.value_or(0.0) + *row.map_50;
        ++n50;
    }
    if (row.map_range) {
        macro.map_range = macro.map_range.value_or(0.0) + *row.map_range;
        ++nrange;
    }
    if (row.mean_iou) {
        macro.mean_iou = macro.mean_iou.value_or(0.0) + *row.mean_iou;
        ++niou;
    }
}

} // namespace

EvalReport evaluate_dataset(const DatasetManifest& manifest, const std::string& base_dir,
                            const std::vector<Detection>& dets, const EvalConfig& config) {
    if (config.thresholds.empty()) throw ArgumentError("threshold list must be non-empty");
    if (config.iou_threshold < 0.0 || config.iou_threshold > 1.0)
        throw ArgumentError("iou_threshold must be in [0, 1]");

    // Detection image ids resolve against manifest entries either by exact
    // image_path or by unique filename stem.
    std::map<std::string, size_t> by_path;
    std::map<std::string, std::vector<size_t>> by_stem;
    for (size_t i = 0; i < manifest.entries.size(); ++i) {
        by_path[manifest.entries[i].image_path] = i;
        by_stem[path_stem(manifest.entries[i].image_path)].push_back(i);
    }

    const std::filesystem::path base(base_dir);
    std::vector<std::vector<GroundTruth>> gts_per_entry(manifest.entries.size());
    for (size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& entry = manifest.entries[i];
        int width = 0, height = 0;
        peek_image_file_size((base / entry.image_path).string(), width, height);
        const std::string label_text = read_text_file((base / entry.label_path).string());
        gts_per_entry[i] = parse_label_file(label_text, width, height, entry.image_path);
    }

    std::vector<std::vector<Detection>> dets_per_entry(manifest.entries.size());
    for (const auto& det : dets) {
        size_t entry_index;
        if (auto it = by_path.find(det.image_id); it != by_path.end()) {
            entry_index = it->second;
        } else if (auto st = by_stem.find(det.image_id); st != by_stem.end() && st->second.size() == 1) {
            entry_index = st->second.front();
        } else {
            throw ValidationError("detection image_id '" + det.image_id +
                                  "' does not resolve to a manifest entry");
        }
        Detection remapped = det;
        remapped.image_id = manifest.entries[entry_index].image_path;
        dets_per_entry[entry_index].push_back(std::move(remapped));
    }

    EvalReport report;
    report.note =
        "copyspace annotations are not exhaustive: plausible detections outside the labeled set "
        "count as false positives. meanIoU is the mean IoU over greedy-matched pairs at the "
        "matching threshold.";
    report.iou_threshold = config.iou_threshold;
    report.thresholds = config.thresholds;

    std::map<int, std::vector<size_t>> entries_by_class;
    for (size_t i = 0; i < manifest.entries.size(); ++i)
        entries_by_class[manifest.entries[i].complexity_class.level].push_back(i);

    std::vector<Detection> all_dets;
    std::vector<GroundTruth> all_gts;
    for (auto& [level, indices] : entries_by_class) {
        std::vector<Detection> class_dets;
        std::vector<GroundTruth> class_gts;
        for (size_t i : indices) {
            class_dets.insert(class_dets.end(), dets_per_entry[i].begin(), dets_per_entry[i].end());
            class_gts.insert(class_gts.end(), gts_per_entry[i].begin(), gts_per_entry[i].end());
        }
        report.per_class[level] = compute_row(class_dets, class_gts, indices.size(), config);
        all_dets.insert(all_dets.end(), class_dets.begin(), class_dets.end());
        all_gts.insert(all_gts.end(), class_gts.begin(), class_gts.end());
    }

    if (all_gts.empty())
        throw UndefinedMetricError("dataset has zero ground truths; metrics are undefined");
    report.overall = compute_row(all_dets, all_gts, manifest.entries.size(), config);

    report.macro.n_images = manifest.entries.size();
    report.macro.n_gts = all_gts.size();
    size_t n50 = 0, nrange = 0, niou = 0;
    for (const auto& [level, row] : report.per_class)
        accumulate_macro(report.macro, row, n50, nrange, niou);
    if (n50) *report.macro.map_50 /= static_cast<double>(n50);
    if (nrange) *report.macro.map_range /= static_cast<double>(nrange);
    if (niou) *report.macro.mean_iou /= static_cast<double>(niou);

    return report;
}

namespace {

std::string format_metric(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", *v * 100.0);
    return buf;
}

void append_table_row(std::string& out, const std::string& label, const EvalRow& row) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %8zu %10s %12s %10s\n", label.c_str(), row.n_images,
                  format_metric(row.map_50).c_str(), format_metric(row.map_range).c_str(),
                  format_metric(row.mean_iou).c_str());
    out += buf;
}

json row_to_json(const EvalRow& row) {
    json rec{{"n_images", row.n_images}, {"n_gts", row.n_gts}};
    rec["map_50"] = row.map_50 ? json(*row.map_50) : json(nullptr);
    rec["map_50_95"] = row.map_range ? json(*row.map_range) : json(nullptr);
    rec["mean_iou"] = row.mean_iou ? json(*row.mean_iou) : json(nullptr);
    return rec;
}

} // namespace

std::string report_table(const EvalReport& report) {
    std::string out;
    out += "# " + report.note + "\n";
    char header[160];
    std::snprintf(header, sizeof(header), "%-10s %8s %10s %12s %10s\n", "Class", "N", "mAP@0.5",
                  "mAP@.5:.95", "meanIoU");
    out += header;
    for (const auto& [level, row] : report.per_class)
        append_table_row(out, std::to_string(level), row);
    append_table_row(out, "overall", report.overall);
    append_table_row(out, "macro", report.macro);
    return out;
}

std::string report_to_json(const EvalReport& report) {
    json per_class = json::object();
    for (const auto& [level, row] : report.per_class)
        per_class[std::to_string(level)] = row_to_json(row);

    json overall = row_to_json(report.overall);
    overall["weighting"] = "image-weighted";
    json macro = row_to_json(report.macro);
    macro["weighting"] = "macro";

    return json{{"note", report.note},
                {"iou_threshold", report.iou_threshold},
                {"thresholds", report.thresholds},
                {"per_class", per_class},
                {"overall", overall},
                {"macro", macro}}
               .dump(2) +
           "\n";
}

} // namespace copyspace
