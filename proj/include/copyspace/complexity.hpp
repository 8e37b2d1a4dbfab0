#pragma once

#include <cstdint>
#include <vector>

#include "copyspace/geometry.hpp"
#include "copyspace/image.hpp"

namespace copyspace {

/// Per-pixel visual complexity in [0, 1]: normalized Sobel gradient
/// magnitude of the luma image. Low values mark text-friendly regions.
struct ComplexityMap {
    int width = 0;
    int height = 0;
    std::vector<double> data; // size = width * height

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

/// Prefix sums S with one extra row/column: S[y][x] is the sum of map values
/// over [0, x) x [0, y). Rectangle sums come from the 4-corner formula.
struct IntegralImage {
    int width = 0;  // source map width; the grid is (width+1) x (height+1)
    int height = 0;
    std::vector<double> sums;

    double at(int x, int y) const { return sums[static_cast<size_t>(y) * (width + 1) + x]; }
};

/// 3x3 Sobel gradient magnitude with edge-replicate padding, divided by the
/// theoretical maximum 4*sqrt(2) for inputs in [0, 1]. Images smaller than
/// the kernel raise ArgumentError. A constant image maps to identically zero.
ComplexityMap complexity_map(const GrayImage& image);

IntegralImage build_integral(const ComplexityMap& map);

/// Sum over the rectangle, after clipping it outward to the integer pixel
/// grid (floor on x0/y0, ceil on x1/y1) and clamping to the image. An empty
/// rectangle after clipping raises ArgumentError.
double region_sum(const IntegralImage& integral, const BoundingBox& rect);

/// Mean map value over the outward-clipped rectangle.
double region_mean(const IntegralImage& integral, const BoundingBox& rect);

/// Linear gray rendering of the map, for debugging heatmap export.
ColorImage heatmap_image(const ComplexityMap& map);

} // namespace copyspace
