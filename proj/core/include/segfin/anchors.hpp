#pragma once

#include <array>
#include <string>
#include <vector>

#include "segfin/geometry.hpp"

namespace segfin {

struct AnchorConfig {
    std::vector<double> scales{8.0, 16.0, 32.0, 64.0, 128.0};
    std::vector<double> ratios{0.5, 1.0, 2.0}; // width / height
    int stride = 8;

    int per_cell() const { return static_cast<int>(scales.size() * ratios.size()); }
    std::string signature() const;
};

/// One anchor per (cell, scale, ratio), centered on cell centers in image
/// coordinates. Order: cell row-major, then scale, then ratio.
std::vector<Box> generate_anchors(int fmap_h, int fmap_w, const AnchorConfig& config);

/// Standard (center, log-size) box delta parameterization.
std::array<double, 4> encode_box_delta(const Box& anchor, const Box& target);
Box decode_box_delta(const Box& anchor, const std::array<double, 4>& delta);

} // namespace segfin
