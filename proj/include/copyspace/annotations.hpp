#pragma once

#include <map>
#include <string>
#include <vector>

#include "copyspace/geometry.hpp"

namespace copyspace {

/// Image-level difficulty label, 1 (easiest) through 4.
struct ComplexityClass {
    int level = 1;

    bool valid() const { return level >= 1 && level <= 4; }
    bool operator==(const ComplexityClass& o) const { return level == o.level; }
    auto operator<=>(const ComplexityClass& o) const { return level <=> o.level; }
};

constexpr int kComplexityClassMin = 1;
constexpr int kComplexityClassMax = 4;

/// The single detection category this toolkit knows about.
inline const std::string& copyspace_category() {
    static const std::string category = "copyspace";
    return category;
}

struct GroundTruth {
    std::string image_id;
    BoundingBox box;
    std::string category = "copyspace";
};

struct Detection {
    std::string image_id;
    BoundingBox box;
    double confidence = 0.0; // in [0, 1]
};

struct ManifestEntry {
    std::string image_path;
    std::string label_path;
    ComplexityClass complexity_class;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    /// Number of entries per complexity class level.
    std::map<int, size_t> class_histogram() const;
};

/// Parses a label file: one box per line, "0 cx cy w h" with normalized
/// center/extent fields. Non-empty lines only; order preserved. Malformed
/// lines raise ParseError carrying the 1-based line number; non-positive
/// image dimensions raise ArgumentError. `image_id` is stamped onto every
/// returned record.
std::vector<GroundTruth> parse_label_file(const std::string& text, double image_width,
                                          double image_height, const std::string& image_id = "");

/// Inverse of parse_label_file up to 6-decimal quantization of the
/// normalized fields. One line per box, trailing newline, empty string for
/// an empty list. Boxes exceeding the image bounds raise ArgumentError.
std::string write_label_file(const std::vector<GroundTruth>& gts, double image_width,
                             double image_height);

/// Parses a manifest document (JSON: {"entries": [{image_path, label_path,
/// complexity_class}, ...]}). Unknown class values raise ParseError,
/// duplicate image paths raise ValidationError.
DatasetManifest load_manifest(const std::string& text);

std::string write_manifest(const DatasetManifest& manifest);

/// Serializes detections as a JSON document sorted by (image_id, confidence
/// descending). Non-finite coordinates or confidences outside [0, 1] raise
/// ArgumentError. serialize -> parse -> serialize is byte-identical.
std::string write_detections(const std::vector<Detection>& dets);

/// Parses a detection document produced by write_detections. Invalid records
/// raise ParseError with the record index.
std::vector<Detection> read_detections(const std::string& text);

} // namespace copyspace
