#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "copyspace/annotations.hpp"
#include "copyspace/image.hpp"

namespace copyspace {

struct Rgb {
    float r = 0.0f;
    float g = 0.0f;
    float b = 0.0f;
};

struct CountRange {
    int min_count = 0;
    int max_count = 0;
};

/// Generator configuration. Samples are a deterministic function of
/// (seed, class, config); the class selects its polygon count range, which
/// is the difficulty knob: denser clutter for higher classes. The default
/// count ladder is calibrated so the default detector degrades monotonically
/// from class 1 to class 4 on the synthetic suite.
struct SynthConfig {
    int canvas_width = 512;
    int canvas_height = 512;
    std::array<double, 2> clear_rect_area_range = {0.27, 0.35};  // fraction of canvas area
    std::array<double, 2> clear_rect_aspect_range = {0.8, 1.25}; // w/h
    std::map<int, CountRange> polygons_per_class = {
        {1, {60, 66}}, {2, {110, 118}}, {3, {210, 222}}, {4, {340, 360}}};
    std::array<int, 2> vertex_range = {3, 9};
    std::vector<Rgb> palette = default_palette();
    double stroke_probability = 0.85;
    double gradient_probability = 0.45;
    bool allow_overlap_clear = false;

    static std::vector<Rgb> default_palette();
};

SynthConfig default_synth_config();

/// Throws ArgumentError on degenerate ranges or count ranges that do not
/// ascend with the class level.
void validate_synth_config(const SynthConfig& config);

struct SynthSample {
    ColorImage image;
    GroundTruth ground_truth; // the planted clear rectangle
    ComplexityClass complexity_class;
    uint64_t seed = 0;
};

/// Generates one sample: a background-filled canvas, a planted clear
/// rectangle (the ground truth), and randomly decorated polygons placed
/// around it. With allow_overlap_clear=false no polygon pixel enters the
/// rectangle; infeasible placement after bounded rejection sampling raises
/// GenerationError.
SynthSample synth_sample(uint64_t seed, ComplexityClass cls, const SynthConfig& config);

/// Writes a reproducible dataset under output_root: images/<class>_<index>.png,
/// labels/<class>_<index>.txt, and a manifest. Per-sample seeds come from
/// derive_sample_seed, so the corpus is bit-identical for identical
/// (seed, counts, config) regardless of generation order.
DatasetManifest synth_dataset(uint64_t seed, const std::map<int, size_t>& counts,
                              const SynthConfig& config, const std::string& output_root);

/// JSON (de)serialization mirroring the SynthConfig field names exactly.
std::string synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const std::string& text);

} // namespace copyspace
