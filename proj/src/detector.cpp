#include "copyspace/detector.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "copyspace/errors.hpp"
#include "copyspace/metrics.hpp"
#include "json.hpp"

namespace copyspace {

namespace {

using nlohmann::json;

constexpr double kEps = 1e-9;

// Quantized key for exact-duplicate removal of enumerated boxes.
std::tuple<int64_t, int64_t, int64_t, int64_t> box_key(const BoundingBox& b) {
    const auto q = [](double v) { return static_cast<int64_t>(std::llround(v * 1e6)); };
    return {q(b.x0), q(b.y0), q(b.x1), q(b.y1)};
}

} // namespace

void validate_params(const DetectParams& p) {
    if (!(p.min_area_frac > 0.0) || p.min_area_frac > 1.0)
        throw ArgumentError("min_area_frac must be in (0, 1]");
    if (p.aspect_ratios.empty())
        throw ArgumentError("aspect_ratios must be non-empty");
    for (double a : p.aspect_ratios)
        if (!(a > 0.0) || !std::isfinite(a))
            throw ArgumentError("aspect ratios must be positive");
    if (p.scale_steps < 1)
        throw ArgumentError("scale_steps must be >= 1");
    if (!(p.stride_frac > 0.0) || p.stride_frac > 1.0)
        throw ArgumentError("stride_frac must be in (0, 1]");
    if (p.max_complexity < 0.0 || p.max_complexity > 1.0)
        throw ArgumentError("max_complexity must be in [0, 1]");
    if (p.area_exponent < 0.0 || !std::isfinite(p.area_exponent))
        throw ArgumentError("area_exponent must be >= 0");
    if (p.nms_iou < 0.0 || p.nms_iou > 1.0)
        throw ArgumentError("nms_iou must be in [0, 1]");
    if (p.top_k < 1)
        throw ArgumentError("top_k must be >= 1");
    if (p.margin_frac < 0.0 || p.margin_frac > 0.4)
        throw ArgumentError("margin_frac must be in [0, 0.4]");
}

std::vector<BoundingBox> enumerate_candidates(int image_width, int image_height,
                                              const DetectParams& params) {
    validate_params(params);
    if (image_width < 1 || image_height < 1)
        throw ArgumentError("image dimensions must be positive");

    const double W = image_width;
    const double H = image_height;
    const double margin_x = params.margin_frac * W;
    const double margin_y = params.margin_frac * H;
    const double frame_w = W - 2.0 * margin_x;
    const double frame_h = H - 2.0 * margin_y;
    const double min_area = params.min_area_frac * W * H;
    const double stride = params.stride_frac * std::min(W, H);

    std::vector<BoundingBox> boxes;
    std::set<std::tuple<int64_t, int64_t, int64_t, int64_t>> seen;

    for (int step = 0; step < params.scale_steps; ++step) {
        for (double aspect : params.aspect_ratios) {
            // Largest area whose w = sqrt(A * aspect), h = sqrt(A / aspect)
            // still fits the margin-inset frame.
            const double max_area = std::min(frame_w * frame_w / aspect, frame_h * frame_h * aspect);
            if (max_area + kEps < min_area) continue;

            double area = min_area;
            if (params.scale_steps > 1) {
                const double t = static_cast<double>(step) / (params.scale_steps - 1);
                area = min_area * std::pow(max_area / min_area, t);
            }
            const double bw = std::sqrt(area * aspect);
            const double bh = std::sqrt(area / aspect);
            if (bw > frame_w + kEps || bh > frame_h + kEps) continue;

            for (double y0 = margin_y; y0 + bh <= margin_y + frame_h + kEps; y0 += stride) {
                for (double x0 = margin_x; x0 + bw <= margin_x + frame_w + kEps; x0 += stride) {
                    BoundingBox box{x0, y0, x0 + bw, y0 + bh};
                    if (seen.insert(box_key(box)).second) boxes.push_back(box);
                }
            }
        }
    }

    if (boxes.empty())
        throw NoCandidatesError("no candidate fits min_area_frac inside the margin frame");
    return boxes;
}

std::vector<ScoredBox> score_candidates(const IntegralImage& integral,
                                        const std::vector<BoundingBox>& candidates,
                                        const DetectParams& params) {
    const double image_area = static_cast<double>(integral.width) * integral.height;
    std::vector<ScoredBox> scored;
    scored.reserve(candidates.size());
    for (const auto& box : candidates) {
        const double mean = region_mean(integral, box);
        if (mean > params.max_complexity) continue;
        const double area_frac = std::min(1.0, box.area() / image_area);
        const double score = (1.0 - mean) * std::pow(area_frac, params.area_exponent);
        scored.push_back(ScoredBox{box, score, mean});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredBox& a, const ScoredBox& b) {
        if (a.score != b.score) return a.score > b.score;
        const double aa = a.box.area(), ba = b.box.area();
        if (aa != ba) return aa > ba;
        if (a.box.y0 != b.box.y0) return a.box.y0 < b.box.y0;
        return a.box.x0 < b.box.x0;
    });
    return scored;
}

std::vector<ScoredBox> nms(const std::vector<ScoredBox>& scored, double nms_iou, size_t max_keep) {
    for (size_t i = 1; i < scored.size(); ++i)
        if (scored[i - 1].score < scored[i].score)
            throw ArgumentError("nms input must be sorted by score descending");

    std::vector<ScoredBox> kept;
    for (const auto& candidate : scored) {
        if (kept.size() >= max_keep) break;
        bool suppressed = false;
        for (const auto& accepted : kept) {
            if (iou(candidate.box, accepted.box) >= nms_iou) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(candidate);
    }
    return kept;
}

namespace {

DetectionSet detect_with_integral(const IntegralImage& integral, const DetectParams& params,
                                  const std::string& image_id) {
    auto candidates = enumerate_candidates(integral.width, integral.height, params);
    auto scored = score_candidates(integral, candidates, params);
    auto kept = nms(scored, params.nms_iou, static_cast<size_t>(params.top_k));

    DetectionSet set;
    set.image_id = image_id;
    set.params = params;
    set.boxes = std::move(kept);
    return set;
}

} // namespace

DetectionSet detect(const GrayImage& image, const DetectParams& params, const std::string& image_id) {
    validate_params(params);
    const ComplexityMap map = complexity_map(image);
    const IntegralImage integral = build_integral(map);
    return detect_with_integral(integral, params, image_id);
}

std::vector<DetectionSet> parameter_sweep(const GrayImage& image,
                                          const std::vector<DetectParams>& grid,
                                          const std::string& image_id) {
    if (grid.empty()) throw ArgumentError("parameter grid must be non-empty");
    for (const auto& params : grid) validate_params(params);

    const ComplexityMap map = complexity_map(image);
    const IntegralImage integral = build_integral(map);

    std::vector<DetectionSet> sets;
    sets.reserve(grid.size());
    for (const auto& params : grid) sets.push_back(detect_with_integral(integral, params, image_id));
    return sets;
}

namespace {

json params_to_json_value(const DetectParams& p) {
    return json{{"min_area_frac", p.min_area_frac},
                {"aspect_ratios", p.aspect_ratios},
                {"scale_steps", p.scale_steps},
                {"stride_frac", p.stride_frac},
                {"max_complexity", p.max_complexity},
                {"area_exponent", p.area_exponent},
                {"nms_iou", p.nms_iou},
                {"top_k", p.top_k},
                {"margin_frac", p.margin_frac}};
}

DetectParams params_from_json_value(const json& doc) {
    if (!doc.is_object()) throw ParseError("params record must be a JSON object");
    DetectParams p; // absent fields keep their defaults
    try {
        if (doc.contains("min_area_frac")) p.min_area_frac = doc["min_area_frac"].get<double>();
        if (doc.contains("aspect_ratios")) p.aspect_ratios = doc["aspect_ratios"].get<std::vector<double>>();
        if (doc.contains("scale_steps")) p.scale_steps = doc["scale_steps"].get<int>();
        if (doc.contains("stride_frac")) p.stride_frac = doc["stride_frac"].get<double>();
        if (doc.contains("max_complexity")) p.max_complexity = doc["max_complexity"].get<double>();
        if (doc.contains("area_exponent")) p.area_exponent = doc["area_exponent"].get<double>();
        if (doc.contains("nms_iou")) p.nms_iou = doc["nms_iou"].get<double>();
        if (doc.contains("top_k")) p.top_k = doc["top_k"].get<int>();
        if (doc.contains("margin_frac")) p.margin_frac = doc["margin_frac"].get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad params field type: ") + e.what());
    }
    validate_params(p);
    return p;
}

} // namespace

std::string params_to_json(const DetectParams& params) {
    return params_to_json_value(params).dump(2) + "\n";
}

DetectParams params_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("params document is not valid JSON: ") + e.what());
    }
    return params_from_json_value(doc);
}

std::vector<DetectParams> params_grid_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("grid document is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("grid document must be a JSON array of params records");
    std::vector<DetectParams> grid;
    for (const auto& rec : doc) grid.push_back(params_from_json_value(rec));
    return grid;
}

std::string detection_set_to_json(const DetectionSet& set) {
    json boxes = json::array();
    for (const auto& sb : set.boxes) {
        boxes.push_back({{"x0", sb.box.x0},
                         {"y0", sb.box.y0},
                         {"x1", sb.box.x1},
                         {"y1", sb.box.y1},
                         {"score", sb.score},
                         {"mean_complexity", sb.mean_complexity}});
    }
    return json{{"image_id", set.image_id}, {"params", params_to_json_value(set.params)}, {"boxes", boxes}}
               .dump(2) +
           "\n";
}

} // namespace copyspace
