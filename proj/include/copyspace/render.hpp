#pragma once

#include <optional>
#include <string>
#include <vector>

#include "copyspace/annotations.hpp"
#include "copyspace/detector.hpp"
#include "copyspace/image.hpp"
#include "copyspace/synth.hpp"

namespace copyspace {

/// Overlay colors follow the ground-truth-green / detection-magenta
/// convention.
struct OverlayStyle {
    Rgb gt_color = {0.0f, 1.0f, 0.0f};
    Rgb det_color = {1.0f, 0.0f, 1.0f};
    int line_width = 2;
    bool draw_scores = false;
};

struct DesignSpec {
    std::string copy_text;
    double panel_opacity = 0.55;
    Rgb panel_color = {1.0f, 1.0f, 1.0f};
    Rgb text_color = {0.1f, 0.1f, 0.1f};
    double padding_frac = 0.08; // inset of the text area inside the panel, [0, 0.4]
};

/// Draws rectangle outlines into a copy of the image: ground truths first,
/// detections on top. With draw_scores, a confidence bar is drawn inside the
/// top edge of each detection. Out-of-bounds boxes raise ArgumentError.
ColorImage draw_overlay(const ColorImage& image, const std::vector<GroundTruth>& gts,
                        const std::vector<Detection>& dets, const OverlayStyle& style);

/// Composites a semi-transparent panel over the box and renders the copy
/// text as left-aligned placeholder bars: the text wraps at a
/// width-proportional character budget and each line occupies
/// interior_height / line_count. Never writes outside the box.
ColorImage render_design(const ColorImage& image, const BoundingBox& box, const DesignSpec& spec);

struct Variation {
    size_t grid_index = 0;
    DetectionSet detections;
    std::optional<ColorImage> image; // nullopt when the grid entry found no box
};

/// Runs a parameter sweep and renders the top box of every non-empty
/// DetectionSet. Entries that produce no boxes are reported with an empty
/// image slot, never dropped; all-empty grids raise NoCandidatesError.
std::vector<Variation> generate_variations(const ColorImage& image, const DesignSpec& spec,
                                           const std::vector<DetectParams>& grid);

} // namespace copyspace
