#pragma once

#include <algorithm>
#include <cmath>

namespace copyspace {

/// Axis-aligned rectangle in pixel coordinates, origin at the top-left,
/// y increasing downward. Coordinates are continuous; a valid box has
/// strictly positive area (x0 < x1, y0 < y1).
struct BoundingBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }

    bool valid() const {
        return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1) &&
               x0 < x1 && y0 < y1;
    }

    bool operator==(const BoundingBox& o) const {
        return x0 == o.x0 && y0 == o.y0 && x1 == o.x1 && y1 == o.y1;
    }
};

/// Box in unitless fractions of image width/height, center + extent form.
/// A valid normalized box lies inside the unit square and has 0 < w,h <= 1.
struct NormalizedBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool valid(double eps = 1e-9) const {
        return w > 0.0 && h > 0.0 && w <= 1.0 + eps && h <= 1.0 + eps &&
               cx - w / 2.0 >= -eps && cx + w / 2.0 <= 1.0 + eps &&
               cy - h / 2.0 >= -eps && cy + h / 2.0 <= 1.0 + eps;
    }
};

inline BoundingBox denormalize(const NormalizedBox& n, double image_width, double image_height) {
    return BoundingBox{(n.cx - n.w / 2.0) * image_width, (n.cy - n.h / 2.0) * image_height,
                       (n.cx + n.w / 2.0) * image_width, (n.cy + n.h / 2.0) * image_height};
}

inline NormalizedBox normalize(const BoundingBox& b, double image_width, double image_height) {
    return NormalizedBox{(b.x0 + b.x1) / 2.0 / image_width, (b.y0 + b.y1) / 2.0 / image_height,
                         (b.x1 - b.x0) / image_width, (b.y1 - b.y0) / image_height};
}

inline double intersection_area(const BoundingBox& a, const BoundingBox& b) {
    const double iw = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const double ih = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    return iw * ih;
}

} // namespace copyspace
