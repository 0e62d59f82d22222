#include "segfin/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace segfin {

LatentImage LatentImage::filled(int h, int w, std::uint8_t value, std::string id) {
    LatentImage img;
    img.height = h;
    img.width = w;
    img.pixels.assign(static_cast<std::size_t>(h) * w, value);
    img.id = std::move(id);
    return img;
}

const char* variant_name(VariantKind kind) {
    switch (kind) {
        case VariantKind::original: return "original";
        case VariantKind::centered: return "centered";
        case VariantKind::equalized: return "equalized";
        case VariantKind::inverted: return "inverted";
    }
    return "unknown";
}

LatentImage load_grayscale(const std::string& path) {
    cv::Mat raw = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (raw.empty()) throw std::runtime_error("cannot read image file: " + path);
    if (raw.rows <= 0 || raw.cols <= 0) throw std::invalid_argument("zero-area image: " + path);
    if (raw.depth() != CV_8U) {
        cv::Mat tmp;
        raw.convertTo(tmp, CV_8U);
        raw = tmp;
    }
    LatentImage img;
    img.height = raw.rows;
    img.width = raw.cols;
    img.pixels.resize(static_cast<std::size_t>(raw.rows) * raw.cols);
    img.id = path;
    const int ch = raw.channels();
    for (int y = 0; y < raw.rows; ++y) {
        const std::uint8_t* row = raw.ptr<std::uint8_t>(y);
        for (int x = 0; x < raw.cols; ++x) {
            if (ch == 1) {
                img.at(y, x) = row[x];
            } else {
                int sum = 0;
                for (int c = 0; c < ch && c < 3; ++c) sum += row[x * ch + c];
                img.at(y, x) = static_cast<std::uint8_t>((sum + std::min(ch, 3) / 2) / std::min(ch, 3));
            }
        }
    }
    if (img.height < 32 || img.width < 32)
        throw std::invalid_argument("image smaller than 32x32: " + path);
    return img;
}

void save_grayscale(const LatentImage& img, const std::string& path) {
    if (img.height <= 0 || img.width <= 0) throw std::invalid_argument("zero-area image");
    cv::Mat m(img.height, img.width, CV_8UC1);
    for (int y = 0; y < img.height; ++y)
        std::copy_n(img.pixels.data() + static_cast<std::size_t>(y) * img.width, img.width,
                    m.ptr<std::uint8_t>(y));
    if (!cv::imwrite(path, m)) throw std::runtime_error("cannot write image file: " + path);
}

LatentImage invert(const LatentImage& img) {
    LatentImage out = img;
    for (auto& p : out.pixels) p = static_cast<std::uint8_t>(255 - p);
    return out;
}

LatentImage center_normalize(const LatentImage& img) {
    if (img.pixels.empty()) throw std::invalid_argument("empty image");
    double mean = std::accumulate(img.pixels.begin(), img.pixels.end(), 0.0) /
                  static_cast<double>(img.pixels.size());
    double shift = 128.0 - mean;
    LatentImage out = img;
    for (auto& p : out.pixels) {
        double v = std::round(p + shift);
        p = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    return out;
}

LatentImage histogram_equalize(const LatentImage& img) {
    if (img.pixels.empty()) throw std::invalid_argument("empty image");
    std::array<std::size_t, 256> hist{};
    for (auto p : img.pixels) ++hist[p];

    std::array<std::size_t, 256> cdf{};
    std::size_t acc = 0;
    std::size_t cdf_min = 0;
    for (int v = 0; v < 256; ++v) {
        acc += hist[v];
        cdf[v] = acc;
        if (cdf_min == 0 && hist[v] > 0) cdf_min = hist[v];
    }
    const std::size_t total = img.pixels.size();
    if (cdf_min == total) return img; // constant image, degenerate histogram

    std::array<std::uint8_t, 256> lut{};
    const double denom = static_cast<double>(total - cdf_min);
    for (int v = 0; v < 256; ++v) {
        double mapped = 255.0 * (static_cast<double>(cdf[v]) - cdf_min) / denom;
        lut[v] = static_cast<std::uint8_t>(std::clamp(std::round(mapped), 0.0, 255.0));
    }
    LatentImage out = img;
    for (auto& p : out.pixels) p = lut[p];
    return out;
}

std::vector<GrayscaleVariant> generate_variants(const LatentImage& img) {
    std::vector<GrayscaleVariant> out;
    out.reserve(4);
    out.push_back({VariantKind::original, img});
    out.push_back({VariantKind::centered, center_normalize(img)});
    out.push_back({VariantKind::equalized, histogram_equalize(img)});
    out.push_back({VariantKind::inverted, invert(img)});
    return out;
}

} // namespace segfin
