#include "copyspace/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "copyspace/errors.hpp"

namespace copyspace {

namespace {

struct IntRect { // half-open pixel range
    int x0, y0, x1, y1;
};

IntRect round_box(const BoundingBox& box) {
    return IntRect{static_cast<int>(std::lround(box.x0)), static_cast<int>(std::lround(box.y0)),
                   static_cast<int>(std::lround(box.x1)), static_cast<int>(std::lround(box.y1))};
}

void require_inside(const BoundingBox& box, const ColorImage& image) {
    if (!box.valid()) throw ArgumentError("invalid box");
    if (box.x0 < -1e-9 || box.y0 < -1e-9 || box.x1 > image.width + 1e-9 ||
        box.y1 > image.height + 1e-9)
        throw ArgumentError("box lies outside the image");
}

void set_pixel(ColorImage& img, int x, int y, const Rgb& c) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    img.at(x, y, 0) = c.r;
    img.at(x, y, 1) = c.g;
    img.at(x, y, 2) = c.b;
}

// Border band of width lw just inside the rectangle.
void draw_outline(ColorImage& img, const IntRect& r, int lw, const Rgb& c) {
    for (int y = r.y0; y < r.y1; ++y) {
        const bool edge_row = y < r.y0 + lw || y >= r.y1 - lw;
        for (int x = r.x0; x < r.x1; ++x) {
            if (edge_row || x < r.x0 + lw || x >= r.x1 - lw) set_pixel(img, x, y, c);
        }
    }
}

void draw_score_bar(ColorImage& img, const IntRect& r, int lw, double confidence, const Rgb& c) {
    const int usable = r.x1 - r.x0 - 4 * lw;
    if (usable <= 0) return;
    const int bar = static_cast<int>(std::lround(confidence * usable));
    for (int y = r.y0 + lw; y < std::min(r.y0 + 2 * lw, r.y1 - lw); ++y)
        for (int x = r.x0 + 2 * lw; x < r.x0 + 2 * lw + bar; ++x) set_pixel(img, x, y, c);
}

std::vector<std::string> wrap_text(const std::string& text, size_t budget) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string word, line;
    while (in >> word) {
        // hard-split words longer than a whole line
        while (word.size() > budget) {
            if (!line.empty()) {
                lines.push_back(line);
                line.clear();
            }
            lines.push_back(word.substr(0, budget));
            word = word.substr(budget);
        }
        if (word.empty()) continue;
        if (line.empty()) {
            line = word;
        } else if (line.size() + 1 + word.size() <= budget) {
            line += " " + word;
        } else {
            lines.push_back(line);
            line = word;
        }
    }
    if (!line.empty()) lines.push_back(line);
    return lines;
}

} // namespace

ColorImage draw_overlay(const ColorImage& image, const std::vector<GroundTruth>& gts,
                        const std::vector<Detection>& dets, const OverlayStyle& style) {
    if (style.line_width < 1) throw ArgumentError("line_width must be >= 1");
    for (const auto& gt : gts) require_inside(gt.box, image);
    for (const auto& det : dets) require_inside(det.box, image);

    ColorImage out = image;
    for (const auto& gt : gts) draw_outline(out, round_box(gt.box), style.line_width, style.gt_color);
    // detections on top
    for (const auto& det : dets) {
        const IntRect r = round_box(det.box);
        draw_outline(out, r, style.line_width, style.det_color);
        if (style.draw_scores) draw_score_bar(out, r, style.line_width, det.confidence, style.det_color);
    }
    return out;
}

ColorImage render_design(const ColorImage& image, const BoundingBox& box, const DesignSpec& spec) {
    require_inside(box, image);
    if (spec.panel_opacity < 0.0 || spec.panel_opacity > 1.0)
        throw ArgumentError("panel_opacity must be in [0, 1]");
    if (spec.padding_frac < 0.0 || spec.padding_frac > 0.4)
        throw ArgumentError("padding_frac must be in [0, 0.4]");

    // Pixels fully inside the continuous box; the render never leaves it.
    const int x_begin = static_cast<int>(std::ceil(box.x0 - 1e-9));
    const int y_begin = static_cast<int>(std::ceil(box.y0 - 1e-9));
    const int x_end = static_cast<int>(std::floor(box.x1 + 1e-9));
    const int y_end = static_cast<int>(std::floor(box.y1 + 1e-9));
    if (x_end - x_begin < 1 || y_end - y_begin < 1)
        throw ArgumentError("box interior is degenerate after pixel clipping");

    ColorImage out = image;
    const double alpha = spec.panel_opacity;
    for (int y = y_begin; y < y_end; ++y) {
        for (int x = x_begin; x < x_end; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double base = out.at(x, y, c);
                const double panel = c == 0 ? spec.panel_color.r
                                       : c == 1 ? spec.panel_color.g
                                                : spec.panel_color.b;
                out.at(x, y, c) = static_cast<float>((1.0 - alpha) * base + alpha * panel);
            }
        }
    }

    // Placeholder typography: the text wraps at a width-proportional
    // character budget (one character per 12 px) and each wrapped line gets
    // interior_height / line_count of vertical space, drawn as a filled bar.
    const int panel_w = x_end - x_begin;
    const int panel_h = y_end - y_begin;
    const int pad_x = static_cast<int>(std::floor(spec.padding_frac * panel_w));
    const int pad_y = static_cast<int>(std::floor(spec.padding_frac * panel_h));
    const int interior_w = panel_w - 2 * pad_x;
    const int interior_h = panel_h - 2 * pad_y;
    if (interior_w < 1 || interior_h < 1)
        throw ArgumentError("padding leaves no text interior");

    const size_t budget = static_cast<size_t>(std::max(1, interior_w / 12));
    const auto lines = wrap_text(spec.copy_text, budget);
    if (lines.empty()) return out;

    const double line_height = static_cast<double>(interior_h) / static_cast<double>(lines.size());
    const int ix0 = x_begin + pad_x;
    const int iy0 = y_begin + pad_y;
    for (size_t li = 0; li < lines.size(); ++li) {
        const int slot_top = iy0 + static_cast<int>(std::floor(li * line_height));
        const int bar_top = slot_top + static_cast<int>(std::floor(0.19 * line_height));
        const int bar_bottom = slot_top + static_cast<int>(std::floor(0.81 * line_height));
        const double frac = std::min(1.0, static_cast<double>(lines[li].size()) / budget);
        const int bar_right = ix0 + static_cast<int>(std::lround(frac * interior_w));
        for (int y = bar_top; y < bar_bottom; ++y) {
            if (y < y_begin || y >= y_end) continue;
            for (int x = ix0; x < bar_right; ++x) {
                if (x < x_begin || x >= x_end) continue;
                out.at(x, y, 0) = spec.text_color.r;
                out.at(x, y, 1) = spec.text_color.g;
                out.at(x, y, 2) = spec.text_color.b;
            }
        }
    }
    return out;
}

std::vector<Variation> generate_variations(const ColorImage& image, const DesignSpec& spec,
                                           const std::vector<DetectParams>& grid) {
    if (grid.empty()) throw ArgumentError("parameter grid must be non-empty");
    const GrayImage gray = to_luma(image);
    const auto sets = parameter_sweep(gray, grid);

    std::vector<Variation> variations;
    variations.reserve(sets.size());
    bool any = false;
    for (size_t i = 0; i < sets.size(); ++i) {
        Variation v;
        v.grid_index = i;
        v.detections = sets[i];
        if (!sets[i].boxes.empty()) {
            v.image = render_design(image, sets[i].boxes.front().box, spec);
            any = true;
        }
        variations.push_back(std::move(v));
    }
    if (!any) throw NoCandidatesError("no grid entry produced a detection");
    return variations;
}

} // namespace copyspace
