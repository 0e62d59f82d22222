#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segfin/geometry.hpp"

namespace segfin {

/// Per-pixel fingermark probability in [0,1].
struct ScoreMap {
    int h = 0;
    int w = 0;
    std::vector<double> v; // row-major

    static ScoreMap zeros(int h, int w) { return ScoreMap{h, w, std::vector<double>(static_cast<std::size_t>(h) * w, 0.0)}; }
    double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
    double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
};

/// Per-pixel boolean foreground map.
struct BinaryMask {
    int h = 0;
    int w = 0;
    std::vector<std::uint8_t> v; // 0 or 1

    static BinaryMask zeros(int h, int w) { return BinaryMask{h, w, std::vector<std::uint8_t>(static_cast<std::size_t>(h) * w, 0)}; }
    bool at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x] != 0; }
    void set(int y, int x, bool b) { v[static_cast<std::size_t>(y) * w + x] = b ? 1 : 0; }
    std::size_t count() const;
    bool empty_mask() const { return count() == 0; }
};

BinaryMask threshold_map(const ScoreMap& map, double threshold);

/// Tight bounding boxes of 4-connected foreground components. Components
/// smaller than min_area pixels are dropped.
std::vector<Box> component_boxes(const BinaryMask& mask, int min_area = 16);

/// PNG I/O. Masks are written with values exactly {0, 255}; any value >= 128
/// reads back as foreground. Heatmaps are scaled [0,1] -> [0,255].
void save_mask(const BinaryMask& mask, const std::string& path);
BinaryMask load_mask(const std::string& path);
void save_heatmap(const ScoreMap& map, const std::string& path);

} // namespace segfin
