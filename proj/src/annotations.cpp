#include "copyspace/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "copyspace/errors.hpp"
#include "json.hpp"

namespace copyspace {

namespace {

using nlohmann::json;

// Slack for normalized fields that were quantized to 6 decimals on write.
constexpr double kUnitSlack = 2e-6;

bool parse_double(const std::string& token, double& out) {
    size_t consumed = 0;
    try {
        out = std::stod(token, &consumed);
    } catch (const std::exception&) {
        return false;
    }
    return consumed == token.size() && std::isfinite(out);
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) fields.push_back(tok);
    return fields;
}

json require_field(const json& record, const char* name, size_t index) {
    auto it = record.find(name);
    if (it == record.end())
        throw ParseError("record " + std::to_string(index) + ": missing field '" + name + "'");
    return *it;
}

} // namespace

std::map<int, size_t> DatasetManifest::class_histogram() const {
    std::map<int, size_t> hist;
    for (const auto& e : entries) hist[e.complexity_class.level]++;
    return hist;
}

std::vector<GroundTruth> parse_label_file(const std::string& text, double image_width,
                                          double image_height, const std::string& image_id) {
    if (!(image_width > 0.0) || !(image_height > 0.0))
        throw ArgumentError("image dimensions must be positive");

    std::vector<GroundTruth> gts;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != 5)
            throw ParseError("expected 5 fields, got " + std::to_string(fields.size()), line_no);

        double vals[5];
        for (int i = 0; i < 5; ++i)
            if (!parse_double(fields[i], vals[i]))
                throw ParseError("non-numeric field '" + fields[i] + "'", line_no);

        if (vals[0] != 0.0)
            throw ParseError("class index must be 0 for the copyspace category", line_no);

        NormalizedBox n{vals[1], vals[2], vals[3], vals[4]};
        if (n.w <= 0.0 || n.h <= 0.0 || n.w > 1.0 + kUnitSlack || n.h > 1.0 + kUnitSlack)
            throw ParseError("box extent outside (0, 1]", line_no);
        if (!n.valid(kUnitSlack))
            throw ParseError("box lies outside the unit square", line_no);

        BoundingBox box = denormalize(n, image_width, image_height);
        // Quantized writes can overshoot the frame by less than the slack.
        box.x0 = std::max(box.x0, 0.0);
        box.y0 = std::max(box.y0, 0.0);
        box.x1 = std::min(box.x1, image_width);
        box.y1 = std::min(box.y1, image_height);
        if (!box.valid())
            throw ParseError("degenerate box after conversion", line_no);

        gts.push_back(GroundTruth{image_id, box, copyspace_category()});
    }
    return gts;
}

std::string write_label_file(const std::vector<GroundTruth>& gts, double image_width,
                             double image_height) {
    if (!(image_width > 0.0) || !(image_height > 0.0))
        throw ArgumentError("image dimensions must be positive");

    std::string out;
    char buf[160];
    for (const auto& gt : gts) {
        const BoundingBox& b = gt.box;
        if (!b.valid())
            throw ArgumentError("invalid box in label output");
        if (b.x0 < -1e-9 || b.y0 < -1e-9 || b.x1 > image_width + 1e-9 || b.y1 > image_height + 1e-9)
            throw ArgumentError("box exceeds image bounds");
        const NormalizedBox n = normalize(b, image_width, image_height);
        std::snprintf(buf, sizeof(buf), "0 %.6f %.6f %.6f %.6f\n", n.cx, n.cy, n.w, n.h);
        out += buf;
    }
    return out;
}

DatasetManifest load_manifest(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
        throw ParseError("manifest must be an object with an 'entries' array");

    DatasetManifest manifest;
    std::set<std::string> seen_paths;
    size_t index = 0;
    for (const auto& rec : doc["entries"]) {
        ++index;
        if (!rec.is_object())
            throw ParseError("record " + std::to_string(index) + ": entry is not an object");
        const json image_path = require_field(rec, "image_path", index);
        const json label_path = require_field(rec, "label_path", index);
        const json cls = require_field(rec, "complexity_class", index);
        if (!image_path.is_string() || image_path.get<std::string>().empty())
            throw ParseError("record " + std::to_string(index) + ": image_path must be a non-empty string");
        if (!label_path.is_string() || label_path.get<std::string>().empty())
            throw ParseError("record " + std::to_string(index) + ": label_path must be a non-empty string");
        if (!cls.is_number_integer())
            throw ParseError("record " + std::to_string(index) + ": complexity_class must be an integer");
        const int level = cls.get<int>();
        if (level < kComplexityClassMin || level > kComplexityClassMax)
            throw ParseError("record " + std::to_string(index) + ": complexity_class " +
                             std::to_string(level) + " outside [1, 4]");

        const std::string path = image_path.get<std::string>();
        if (!seen_paths.insert(path).second)
            throw ValidationError("duplicate image_path '" + path + "'");

        manifest.entries.push_back(
            ManifestEntry{path, label_path.get<std::string>(), ComplexityClass{level}});
    }
    return manifest;
}

std::string write_manifest(const DatasetManifest& manifest) {
    json entries = json::array();
    for (const auto& e : manifest.entries) {
        entries.push_back({{"image_path", e.image_path},
                           {"label_path", e.label_path},
                           {"complexity_class", e.complexity_class.level}});
    }
    return json{{"entries", entries}}.dump(2) + "\n";
}

std::string write_detections(const std::vector<Detection>& dets) {
    std::vector<Detection> sorted = dets;
    for (const auto& d : sorted) {
        if (!d.box.valid())
            throw ArgumentError("detection box is invalid or non-finite");
        if (!std::isfinite(d.confidence) || d.confidence < 0.0 || d.confidence > 1.0)
            throw ArgumentError("detection confidence outside [0, 1]");
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const Detection& a, const Detection& b) {
        if (a.image_id != b.image_id) return a.image_id < b.image_id;
        return a.confidence > b.confidence;
    });

    json records = json::array();
    for (const auto& d : sorted) {
        records.push_back({{"image_id", d.image_id},
                           {"x0", d.box.x0},
                           {"y0", d.box.y0},
                           {"x1", d.box.x1},
                           {"y1", d.box.y1},
                           {"confidence", d.confidence}});
    }
    return json{{"detections", records}}.dump(2) + "\n";
}

std::vector<Detection> read_detections(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("detection document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("detections") || !doc["detections"].is_array())
        throw ParseError("detection document must be an object with a 'detections' array");

    std::vector<Detection> dets;
    size_t index = 0;
    for (const auto& rec : doc["detections"]) {
        ++index;
        if (!rec.is_object())
            throw ParseError("record " + std::to_string(index) + ": not an object");
        Detection d;
        const json id = require_field(rec, "image_id", index);
        if (!id.is_string())
            throw ParseError("record " + std::to_string(index) + ": image_id must be a string");
        d.image_id = id.get<std::string>();
        for (const char* name : {"x0", "y0", "x1", "y1", "confidence"}) {
            const json v = require_field(rec, name, index);
            if (!v.is_number())
                throw ParseError("record " + std::to_string(index) + ": field '" + name +
                                 "' must be numeric");
        }
        d.box = BoundingBox{rec["x0"].get<double>(), rec["y0"].get<double>(),
                            rec["x1"].get<double>(), rec["y1"].get<double>()};
        d.confidence = rec["confidence"].get<double>();
        if (!d.box.valid())
            throw ParseError("record " + std::to_string(index) + ": degenerate box");
        if (!std::isfinite(d.confidence) || d.confidence < 0.0 || d.confidence > 1.0)
            throw ParseError("record " + std::to_string(index) + ": confidence outside [0, 1]");
        dets.push_back(std::move(d));
    }
    return dets;
}

} // namespace copyspace
