#include "copyspace/complexity.hpp"

#include <algorithm>
#include <cmath>

#include "copyspace/errors.hpp"

namespace copyspace {

namespace {

// Maximum Sobel magnitude for inputs in [0, 1]: |gx|, |gy| <= 4.
const double kSobelMax = 4.0 * std::sqrt(2.0);

inline int clamp_index(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

} // namespace

ComplexityMap complexity_map(const GrayImage& image) {
    if (image.width < 3 || image.height < 3)
        throw ArgumentError("complexity_map needs at least a 3x3 image");
    if (image.data.size() != static_cast<size_t>(image.width) * image.height)
        throw ArgumentError("malformed image buffer");

    const int w = image.width;
    const int h = image.height;
    ComplexityMap map;
    map.width = w;
    map.height = h;
    map.data.resize(static_cast<size_t>(w) * h);

    for (int y = 0; y < h; ++y) {
        const int ym = clamp_index(y - 1, h - 1);
        const int yp = clamp_index(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xm = clamp_index(x - 1, w - 1);
            const int xp = clamp_index(x + 1, w - 1);

            const double tl = image.at(xm, ym), tc = image.at(x, ym), tr = image.at(xp, ym);
            const double ml = image.at(xm, y), mr = image.at(xp, y);
            const double bl = image.at(xm, yp), bc = image.at(x, yp), br = image.at(xp, yp);

            const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
            const double g = std::sqrt(gx * gx + gy * gy) / kSobelMax;
            map.at(x, y) = std::min(1.0, g);
        }
    }
    return map;
}

IntegralImage build_integral(const ComplexityMap& map) {
    IntegralImage integral;
    integral.width = map.width;
    integral.height = map.height;
    const int sw = map.width + 1;
    integral.sums.assign(static_cast<size_t>(sw) * (map.height + 1), 0.0);

    for (int y = 0; y < map.height; ++y) {
        double row_sum = 0.0;
        for (int x = 0; x < map.width; ++x) {
            row_sum += map.at(x, y);
            integral.sums[static_cast<size_t>(y + 1) * sw + (x + 1)] =
                integral.sums[static_cast<size_t>(y) * sw + (x + 1)] + row_sum;
        }
    }
    return integral;
}

namespace {

struct ClippedRect {
    int x0, y0, x1, y1;
};

ClippedRect clip_outward(const IntegralImage& integral, const BoundingBox& rect) {
    if (!rect.valid()) throw ArgumentError("invalid rectangle");
    ClippedRect c;
    c.x0 = std::max(0, static_cast<int>(std::floor(rect.x0)));
    c.y0 = std::max(0, static_cast<int>(std::floor(rect.y0)));
    c.x1 = std::min(integral.width, static_cast<int>(std::ceil(rect.x1)));
    c.y1 = std::min(integral.height, static_cast<int>(std::ceil(rect.y1)));
    if (c.x0 >= c.x1 || c.y0 >= c.y1)
        throw ArgumentError("rectangle is empty after clipping to the image");
    return c;
}

} // namespace

double region_sum(const IntegralImage& integral, const BoundingBox& rect) {
    const ClippedRect c = clip_outward(integral, rect);
    return integral.at(c.x1, c.y1) - integral.at(c.x1, c.y0) - integral.at(c.x0, c.y1) +
           integral.at(c.x0, c.y0);
}

double region_mean(const IntegralImage& integral, const BoundingBox& rect) {
    const ClippedRect c = clip_outward(integral, rect);
    const double sum = integral.at(c.x1, c.y1) - integral.at(c.x1, c.y0) -
                       integral.at(c.x0, c.y1) + integral.at(c.x0, c.y0);
    const double area = static_cast<double>(c.x1 - c.x0) * (c.y1 - c.y0);
    return sum / area;
}

ColorImage heatmap_image(const ComplexityMap& map) {
    ColorImage img;
    img.width = map.width;
    img.height = map.height;
    img.data.resize(static_cast<size_t>(map.width) * map.height * 3);
    for (size_t i = 0; i < map.data.size(); ++i) {
        const float v = static_cast<float>(std::min(1.0, std::max(0.0, map.data[i])));
        img.data[i * 3] = v;
        img.data[i * 3 + 1] = v;
        img.data[i * 3 + 2] = v;
    }
    return img;
}

} // namespace copyspace
