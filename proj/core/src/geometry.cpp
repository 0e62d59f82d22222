#include "segfin/geometry.hpp"

namespace segfin {

double union_coverage_area(const Box& box, const std::vector<Box>& regions) {
    // Clip every region to the box, then sweep a compressed grid. A grid cell
    // is either fully covered by a clipped region or fully outside it, so the
    // sum is exact.
    std::vector<Box> clipped;
    clipped.reserve(regions.size());
    std::vector<double> xs{box.x0, box.x1};
    std::vector<double> ys{box.y0, box.y1};
    for (const Box& r : regions) {
        Box c{std::max(r.x0, box.x0), std::max(r.y0, box.y0),
              std::min(r.x1, box.x1), std::min(r.y1, box.y1)};
        if (c.x1 <= c.x0 || c.y1 <= c.y0) continue;
        clipped.push_back(c);
        xs.push_back(c.x0);
        xs.push_back(c.x1);
        ys.push_back(c.y0);
        ys.push_back(c.y1);
    }
    if (clipped.empty()) return 0.0;

    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    double covered = 0.0;
    for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
        double ymid = 0.5 * (ys[i] + ys[i + 1]);
        for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
            double xmid = 0.5 * (xs[j] + xs[j + 1]);
            for (const Box& c : clipped) {
                if (xmid >= c.x0 && xmid < c.x1 && ymid >= c.y0 && ymid < c.y1) {
                    covered += (xs[j + 1] - xs[j]) * (ys[i + 1] - ys[i]);
                    break;
                }
            }
        }
    }
    return covered;
}

} // namespace segfin
