#include "copyspace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "copyspace/errors.hpp"
#include "copyspace/rng.hpp"
#include "json.hpp"

namespace copyspace {

namespace {

using nlohmann::json;

// Polygon radius range as fractions of min(canvas).
constexpr double kPolyRadiusMinFrac = 0.03;
constexpr double kPolyRadiusMaxFrac = 0.12;
constexpr double kVertexRadiusJitter = 0.55; // per-vertex radius in [jitter, 1] * r
constexpr int kMaxPlacementAttempts = 1000;

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kHalfPi = 1.5707963267948966192313216916398;

// Fixed-order polynomial sine so vertex placement does not depend on the
// platform libm. Accuracy ~2e-4 over a quadrant, which is far below a pixel.
double det_sin(double x) {
    // reduce to [0, 2pi)
    x -= kTwoPi * std::floor(x / kTwoPi);
    double sign = 1.0;
    if (x >= kTwoPi / 2.0) {
        x -= kTwoPi / 2.0;
        sign = -1.0;
    }
    if (x > kHalfPi) x = kTwoPi / 2.0 - x;
    const double x2 = x * x;
    const double p = x * (1.0 + x2 * (-1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (-1.0 / 5040.0))));
    return sign * p;
}

double det_cos(double x) { return det_sin(x + kHalfPi); }

struct PixelRect { // half-open [x0, x1) x [y0, y1)
    int x0, y0, x1, y1;
};

struct Polygon {
    std::vector<int> xs; // integer vertex coordinates
    std::vector<int> ys;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;

    void compute_bounds() {
        min_x = *std::min_element(xs.begin(), xs.end());
        max_x = *std::max_element(xs.begin(), xs.end());
        min_y = *std::min_element(ys.begin(), ys.end());
        max_y = *std::max_element(ys.begin(), ys.end());
    }
};

// Exact even-odd inside test for the pixel center (px + 0.5, py + 0.5).
// Everything is scaled by 2: centers get odd coordinates, vertices even, so
// a scanline never passes through a vertex and the test is pure int64.
bool pixel_in_polygon(const Polygon& poly, int px, int py) {
    const int64_t cx = 2 * static_cast<int64_t>(px) + 1;
    const int64_t cy = 2 * static_cast<int64_t>(py) + 1;
    const size_t n = poly.xs.size();
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const int64_t xi = 2 * static_cast<int64_t>(poly.xs[i]);
        const int64_t yi = 2 * static_cast<int64_t>(poly.ys[i]);
        const int64_t xj = 2 * static_cast<int64_t>(poly.xs[j]);
        const int64_t yj = 2 * static_cast<int64_t>(poly.ys[j]);
        if ((yi > cy) == (yj > cy)) continue;
        // crossing iff cx < x-intersection of the edge with the scanline
        const int64_t dy = yj - yi;
        const int64_t lhs = (cx - xi) * dy;
        const int64_t rhs = (cy - yi) * (xj - xi);
        if (dy > 0 ? lhs < rhs : lhs > rhs) inside = !inside;
    }
    return inside;
}

struct Decoration {
    bool gradient = false;
    bool gradient_horizontal = true;
    Rgb fill0; // solid color, or gradient start
    Rgb fill1; // gradient end
    int stroke_width = 0;
    Rgb stroke_color;
};

void put_pixel(ColorImage& img, int x, int y, const Rgb& c) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    img.at(x, y, 0) = c.r;
    img.at(x, y, 1) = c.g;
    img.at(x, y, 2) = c.b;
}

// Walks every stroke pixel of the polygon outline: Bresenham edges drawn
// with a square brush. The same walk backs both rendering and the exact
// clear-rectangle exclusion test.
template <typename Visit>
void visit_stroke(const Polygon& poly, int width, Visit&& visit) {
    const size_t n = poly.xs.size();
    const int lo = -(width - 1) / 2;
    const int hi = width / 2;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        int x0 = poly.xs[j], y0 = poly.ys[j];
        const int x1 = poly.xs[i], y1 = poly.ys[i];
        int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
        int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true) {
            for (int by = lo; by <= hi; ++by)
                for (int bx = lo; bx <= hi; ++bx) visit(x0 + bx, y0 + by);
            if (x0 == x1 && y0 == y1) break;
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
        }
    }
}

void render_polygon(ColorImage& img, const Polygon& poly, const Decoration& deco) {
    const int x_begin = std::max(0, poly.min_x);
    const int x_end = std::min(img.width - 1, poly.max_x);
    const int y_begin = std::max(0, poly.min_y);
    const int y_end = std::min(img.height - 1, poly.max_y);
    const double span_x = std::max(1, poly.max_x - poly.min_x);
    const double span_y = std::max(1, poly.max_y - poly.min_y);

    for (int y = y_begin; y <= y_end; ++y) {
        for (int x = x_begin; x <= x_end; ++x) {
            if (!pixel_in_polygon(poly, x, y)) continue;
            Rgb c = deco.fill0;
            if (deco.gradient) {
                const double t = deco.gradient_horizontal ? (x - poly.min_x) / span_x
                                                          : (y - poly.min_y) / span_y;
                c.r = static_cast<float>(deco.fill0.r + t * (deco.fill1.r - deco.fill0.r));
                c.g = static_cast<float>(deco.fill0.g + t * (deco.fill1.g - deco.fill0.g));
                c.b = static_cast<float>(deco.fill0.b + t * (deco.fill1.b - deco.fill0.b));
            }
            put_pixel(img, x, y, c);
        }
    }

    if (deco.stroke_width > 0) {
        visit_stroke(poly, deco.stroke_width,
                     [&](int x, int y) { put_pixel(img, x, y, deco.stroke_color); });
    }
}

// Exact exclusion test: would any rendered pixel of this polygon (fill or
// stroke) land inside the clear rectangle?
bool polygon_touches_rect(const Polygon& poly, const Decoration& deco, const PixelRect& rect) {
    const int x_begin = std::max(poly.min_x - deco.stroke_width, rect.x0);
    const int x_end = std::min(poly.max_x + deco.stroke_width, rect.x1 - 1);
    const int y_begin = std::max(poly.min_y - deco.stroke_width, rect.y0);
    const int y_end = std::min(poly.max_y + deco.stroke_width, rect.y1 - 1);
    if (x_begin > x_end || y_begin > y_end) return false;

    for (int y = std::max(poly.min_y, rect.y0); y <= std::min(poly.max_y, rect.y1 - 1); ++y)
        for (int x = std::max(poly.min_x, rect.x0); x <= std::min(poly.max_x, rect.x1 - 1); ++x)
            if (pixel_in_polygon(poly, x, y)) return true;

    bool touched = false;
    if (deco.stroke_width > 0) {
        visit_stroke(poly, deco.stroke_width, [&](int x, int y) {
            if (x >= rect.x0 && x < rect.x1 && y >= rect.y0 && y < rect.y1) touched = true;
        });
    }
    return touched;
}

Polygon sample_polygon(SplitMix64& rng, const SynthConfig& config) {
    const double min_dim = std::min(config.canvas_width, config.canvas_height);
    const int cx = static_cast<int>(rng.uniform_int(0, config.canvas_width - 1));
    const int cy = static_cast<int>(rng.uniform_int(0, config.canvas_height - 1));
    const double radius = rng.uniform_real(kPolyRadiusMinFrac, kPolyRadiusMaxFrac) * min_dim;
    const int k = static_cast<int>(rng.uniform_int(config.vertex_range[0], config.vertex_range[1]));

    std::vector<double> angles(k);
    for (int i = 0; i < k; ++i) angles[i] = rng.uniform_real(0.0, kTwoPi);
    std::sort(angles.begin(), angles.end());

    Polygon poly;
    poly.xs.resize(k);
    poly.ys.resize(k);
    for (int i = 0; i < k; ++i) {
        const double r = radius * rng.uniform_real(kVertexRadiusJitter, 1.0);
        poly.xs[i] = cx + static_cast<int>(std::llround(r * det_cos(angles[i])));
        poly.ys[i] = cy + static_cast<int>(std::llround(r * det_sin(angles[i])));
    }
    poly.compute_bounds();
    return poly;
}

Decoration sample_decoration(SplitMix64& rng, const SynthConfig& config) {
    Decoration deco;
    deco.gradient = rng.bernoulli(config.gradient_probability);
    deco.fill0 = config.palette[rng.index(config.palette.size())];
    if (deco.gradient) {
        deco.fill1 = config.palette[rng.index(config.palette.size())];
        deco.gradient_horizontal = rng.bernoulli(0.5);
    }
    if (rng.bernoulli(config.stroke_probability)) {
        deco.stroke_width = static_cast<int>(rng.uniform_int(1, 3));
        deco.stroke_color = config.palette[rng.index(config.palette.size())];
    }
    return deco;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw StorageError("write failed for '" + path + "'");
}

} // namespace

std::vector<Rgb> SynthConfig::default_palette() {
    // Lumas are spread roughly evenly across [0.08, 0.97] so every polygon
    // edge lands in the luma-gradient field regardless of which pair of
    // colors meets.
    return {
        {0.97f, 0.97f, 0.97f}, // white
        {0.95f, 0.88f, 0.72f}, // cream
        {0.60f, 0.83f, 0.95f}, // sky
        {0.85f, 0.66f, 0.45f}, // sand
        {0.49f, 0.62f, 0.44f}, // sage
        {0.82f, 0.40f, 0.28f}, // coral
        {0.15f, 0.44f, 0.44f}, // teal
        {0.22f, 0.26f, 0.58f}, // indigo
        {0.50f, 0.09f, 0.15f}, // crimson
        {0.09f, 0.08f, 0.10f}, // charcoal
    };
}

SynthConfig default_synth_config() { return SynthConfig{}; }

void validate_synth_config(const SynthConfig& config) {
    if (config.canvas_width < 32 || config.canvas_height < 32)
        throw ArgumentError("canvas must be at least 32x32");
    const auto& area = config.clear_rect_area_range;
    if (!(area[0] > 0.0) || area[0] > area[1] || area[1] > 0.9)
        throw ArgumentError("clear_rect_area_range must satisfy 0 < min <= max <= 0.9");
    const auto& aspect = config.clear_rect_aspect_range;
    if (!(aspect[0] > 0.0) || aspect[0] > aspect[1])
        throw ArgumentError("clear_rect_aspect_range must satisfy 0 < min <= max");
    if (config.vertex_range[0] < 3 || config.vertex_range[0] > config.vertex_range[1] ||
        config.vertex_range[1] > 32)
        throw ArgumentError("vertex_range must satisfy 3 <= min <= max <= 32");
    if (config.palette.empty()) throw ArgumentError("palette must be non-empty");
    for (const auto& c : config.palette)
        if (c.r < 0.0f || c.r > 1.0f || c.g < 0.0f || c.g > 1.0f || c.b < 0.0f || c.b > 1.0f)
            throw ArgumentError("palette values must be in [0, 1]");
    if (config.stroke_probability < 0.0 || config.stroke_probability > 1.0 ||
        config.gradient_probability < 0.0 || config.gradient_probability > 1.0)
        throw ArgumentError("probabilities must be in [0, 1]");

    for (int level = kComplexityClassMin; level <= kComplexityClassMax; ++level) {
        const auto it = config.polygons_per_class.find(level);
        if (it == config.polygons_per_class.end())
            throw ArgumentError("polygons_per_class must cover classes 1 through 4");
        const CountRange& r = it->second;
        if (r.min_count < 0 || r.min_count > r.max_count)
            throw ArgumentError("polygon count range must satisfy 0 <= min <= max");
        if (level > kComplexityClassMin) {
            const CountRange& prev = config.polygons_per_class.at(level - 1);
            const bool ascending = r.min_count >= prev.min_count && r.max_count >= prev.max_count &&
                                   r.min_count + r.max_count > prev.min_count + prev.max_count;
            if (!ascending)
                throw ArgumentError("polygon counts must strictly ascend with the class level");
        }
    }
}

SynthSample synth_sample(uint64_t seed, ComplexityClass cls, const SynthConfig& config) {
    validate_synth_config(config);
    if (!cls.valid()) throw ArgumentError("complexity class must be in [1, 4]");

    SplitMix64 rng(seed);
    const int W = config.canvas_width;
    const int H = config.canvas_height;
    const double canvas_area = static_cast<double>(W) * H;

    const Rgb background = config.palette[rng.index(config.palette.size())];

    // Plant the clear rectangle first; everything else avoids it.
    PixelRect rect{};
    bool placed_rect = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed_rect; ++attempt) {
        const double area =
            rng.uniform_real(config.clear_rect_area_range[0], config.clear_rect_area_range[1]) *
            canvas_area;
        const double aspect =
            rng.uniform_real(config.clear_rect_aspect_range[0], config.clear_rect_aspect_range[1]);
        const int bw = static_cast<int>(std::llround(std::sqrt(area * aspect)));
        const int bh = static_cast<int>(std::llround(std::sqrt(area / aspect)));
        if (bw < 8 || bh < 8 || bw > W || bh > H) continue;
        const int x0 = static_cast<int>(rng.uniform_int(0, W - bw));
        const int y0 = static_cast<int>(rng.uniform_int(0, H - bh));
        rect = PixelRect{x0, y0, x0 + bw, y0 + bh};
        placed_rect = true;
    }
    if (!placed_rect)
        throw GenerationError("could not place a clear rectangle; area/aspect ranges infeasible");

    ColorImage image = ColorImage::filled(W, H, background.r, background.g, background.b);

    const CountRange& counts = config.polygons_per_class.at(cls.level);
    const int polygon_count = static_cast<int>(rng.uniform_int(counts.min_count, counts.max_count));

    for (int p = 0; p < polygon_count; ++p) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
            const Polygon poly = sample_polygon(rng, config);
            const Decoration deco = sample_decoration(rng, config);
            if (!config.allow_overlap_clear && polygon_touches_rect(poly, deco, rect)) continue;
            render_polygon(image, poly, deco);
            placed = true;
            break;
        }
        if (!placed)
            throw GenerationError("polygon placement infeasible: clutter too dense for the canvas");
    }

    SynthSample sample;
    sample.image = std::move(image);
    sample.ground_truth =
        GroundTruth{"", BoundingBox{static_cast<double>(rect.x0), static_cast<double>(rect.y0),
                                    static_cast<double>(rect.x1), static_cast<double>(rect.y1)},
                    copyspace_category()};
    sample.complexity_class = cls;
    sample.seed = seed;
    return sample;
}

DatasetManifest synth_dataset(uint64_t seed, const std::map<int, size_t>& counts,
                              const SynthConfig& config, const std::string& output_root) {
    validate_synth_config(config);
    for (const auto& [level, n] : counts) {
        (void)n;
        if (level < kComplexityClassMin || level > kComplexityClassMax)
            throw ArgumentError("counts keyed by unknown complexity class " + std::to_string(level));
    }

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(output_root) / "images", ec);
    if (ec) throw StorageError("cannot create '" + output_root + "/images': " + ec.message());
    fs::create_directories(fs::path(output_root) / "labels", ec);
    if (ec) throw StorageError("cannot create '" + output_root + "/labels': " + ec.message());

    DatasetManifest manifest;
    for (int level = kComplexityClassMin; level <= kComplexityClassMax; ++level) {
        const auto it = counts.find(level);
        if (it == counts.end()) continue;
        for (size_t index = 0; index < it->second; ++index) {
            const uint64_t sample_seed = derive_sample_seed(seed, level, index);
            SynthSample sample = synth_sample(sample_seed, ComplexityClass{level}, config);

            const std::string stem = std::to_string(level) + "_" + std::to_string(index);
            const std::string image_rel = "images/" + stem + ".png";
            const std::string label_rel = "labels/" + stem + ".txt";
            sample.ground_truth.image_id = stem;

            write_png_file((fs::path(output_root) / image_rel).string(), sample.image);
            write_text_file((fs::path(output_root) / label_rel).string(),
                            write_label_file({sample.ground_truth}, config.canvas_width,
                                             config.canvas_height));
            manifest.entries.push_back(ManifestEntry{image_rel, label_rel, ComplexityClass{level}});
        }
    }

    write_text_file((fs::path(output_root) / "manifest").string(), write_manifest(manifest));
    return manifest;
}

namespace {

json rgb_to_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

Rgb rgb_from_json(const json& v) {
    if (!v.is_array() || v.size() != 3) throw ParseError("color must be an [r, g, b] array");
    return Rgb{v[0].get<float>(), v[1].get<float>(), v[2].get<float>()};
}

} // namespace

std::string synth_config_to_json(const SynthConfig& config) {
    json counts = json::object();
    for (const auto& [level, range] : config.polygons_per_class)
        counts[std::to_string(level)] = json::array({range.min_count, range.max_count});
    json palette = json::array();
    for (const auto& c : config.palette) palette.push_back(rgb_to_json(c));

    return json{{"canvas_width", config.canvas_width},
                {"canvas_height", config.canvas_height},
                {"clear_rect_area_range", config.clear_rect_area_range},
                {"clear_rect_aspect_range", config.clear_rect_aspect_range},
                {"polygons_per_class", counts},
                {"vertex_range", config.vertex_range},
                {"palette", palette},
                {"stroke_probability", config.stroke_probability},
                {"gradient_probability", config.gradient_probability},
                {"allow_overlap_clear", config.allow_overlap_clear}}
               .dump(2) +
           "\n";
}

SynthConfig synth_config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config document must be a JSON object");

    SynthConfig config; // absent fields keep their defaults
    try {
        if (doc.contains("canvas_width")) config.canvas_width = doc["canvas_width"].get<int>();
        if (doc.contains("canvas_height")) config.canvas_height = doc["canvas_height"].get<int>();
        if (doc.contains("clear_rect_area_range"))
            config.clear_rect_area_range = doc["clear_rect_area_range"].get<std::array<double, 2>>();
        if (doc.contains("clear_rect_aspect_range"))
            config.clear_rect_aspect_range =
                doc["clear_rect_aspect_range"].get<std::array<double, 2>>();
        if (doc.contains("polygons_per_class")) {
            config.polygons_per_class.clear();
            for (const auto& [key, value] : doc["polygons_per_class"].items()) {
                if (!value.is_array() || value.size() != 2)
                    throw ParseError("polygons_per_class values must be [min, max] arrays");
                config.polygons_per_class[std::stoi(key)] =
                    CountRange{value[0].get<int>(), value[1].get<int>()};
            }
        }
        if (doc.contains("vertex_range")) config.vertex_range = doc["vertex_range"].get<std::array<int, 2>>();
        if (doc.contains("palette")) {
            config.palette.clear();
            for (const auto& c : doc["palette"]) config.palette.push_back(rgb_from_json(c));
        }
        if (doc.contains("stroke_probability"))
            config.stroke_probability = doc["stroke_probability"].get<double>();
        if (doc.contains("gradient_probability"))
            config.gradient_probability = doc["gradient_probability"].get<double>();
        if (doc.contains("allow_overlap_clear"))
            config.allow_overlap_clear = doc["allow_overlap_clear"].get<bool>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad config field type: ") + e.what());
    }
    validate_synth_config(config);
    return config;
}

} // namespace copyspace
