#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace segfin {

/// Axis-aligned box in pixel coordinates, half-open in spirit: x1 > x0, y1 > y0.
struct Box {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    double cx() const { return 0.5 * (x0 + x1); }
    double cy() const { return 0.5 * (y0 + y1); }

    bool valid() const {
        return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1) &&
               x1 > x0 && y1 > y0;
    }

    Box clipped(double w, double h) const {
        return Box{std::clamp(x0, 0.0, w), std::clamp(y0, 0.0, h),
                   std::clamp(x1, 0.0, w), std::clamp(y1, 0.0, h)};
    }
};

inline double intersection_area(const Box& a, const Box& b) {
    double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

inline double box_iou(const Box& a, const Box& b) {
    double inter = intersection_area(a, b);
    double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

/// Area of box ∩ union(regions), exact for axis-aligned rectangles.
/// Computed by coordinate compression over the clipped regions.
double union_coverage_area(const Box& box, const std::vector<Box>& regions);

} // namespace segfin
