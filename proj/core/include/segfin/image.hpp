#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace segfin {

/// Single-channel 8-bit image, the pipeline input.
struct LatentImage {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels; // row-major, size height*width
    std::string id;

    std::uint8_t at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    static LatentImage filled(int h, int w, std::uint8_t value, std::string id = {});
};

enum class VariantKind { original, centered, equalized, inverted };

const char* variant_name(VariantKind kind);

struct GrayscaleVariant {
    VariantKind kind = VariantKind::original;
    LatentImage image;
};

/// Reads an 8-bit image file; multi-channel inputs are reduced by luminance
/// average. Pipeline inputs must be at least 32x32.
LatentImage load_grayscale(const std::string& path);

/// Writes a single-channel 8-bit PNG.
void save_grayscale(const LatentImage& img, const std::string& path);

/// Every pixel v -> 255 - v.
LatentImage invert(const LatentImage& img);

/// Linear shift so the output mean is 128, clipped to [0,255] and rounded.
LatentImage center_normalize(const LatentImage& img);

/// Cumulative-distribution equalization with minimum-CDF correction. Constant
/// images pass through unchanged (degenerate histogram).
LatentImage histogram_equalize(const LatentImage& img);

/// Fixed order: [original, centered, equalized, inverted].
std::vector<GrayscaleVariant> generate_variants(const LatentImage& img);

} // namespace segfin
