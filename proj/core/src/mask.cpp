#include "segfin/mask.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace segfin {

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (auto b : v) n += b != 0;
    return n;
}

BinaryMask threshold_map(const ScoreMap& map, double threshold) {
    BinaryMask out = BinaryMask::zeros(map.h, map.w);
    for (std::size_t i = 0; i < map.v.size(); ++i) out.v[i] = map.v[i] >= threshold ? 1 : 0;
    return out;
}

std::vector<Box> component_boxes(const BinaryMask& mask, int min_area) {
    std::vector<Box> boxes;
    std::vector<std::uint8_t> seen(mask.v.size(), 0);
    std::vector<int> stack;
    for (int sy = 0; sy < mask.h; ++sy) {
        for (int sx = 0; sx < mask.w; ++sx) {
            std::size_t si = static_cast<std::size_t>(sy) * mask.w + sx;
            if (!mask.v[si] || seen[si]) continue;
            int minx = sx, maxx = sx, miny = sy, maxy = sy, area = 0;
            stack.assign(1, static_cast<int>(si));
            seen[si] = 1;
            while (!stack.empty()) {
                int idx = stack.back();
                stack.pop_back();
                int y = idx / mask.w;
                int x = idx % mask.w;
                ++area;
                minx = std::min(minx, x);
                maxx = std::max(maxx, x);
                miny = std::min(miny, y);
                maxy = std::max(maxy, y);
                const int dy[4] = {-1, 1, 0, 0};
                const int dx[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    int ny = y + dy[k], nx = x + dx[k];
                    if (ny < 0 || ny >= mask.h || nx < 0 || nx >= mask.w) continue;
                    std::size_t ni = static_cast<std::size_t>(ny) * mask.w + nx;
                    if (mask.v[ni] && !seen[ni]) {
                        seen[ni] = 1;
                        stack.push_back(static_cast<int>(ni));
                    }
                }
            }
            if (area >= min_area)
                boxes.push_back(Box{static_cast<double>(minx), static_cast<double>(miny),
                                    static_cast<double>(maxx + 1), static_cast<double>(maxy + 1)});
        }
    }
    return boxes;
}

void save_mask(const BinaryMask& mask, const std::string& path) {
    cv::Mat m(mask.h, mask.w, CV_8UC1);
    for (int y = 0; y < mask.h; ++y)
        for (int x = 0; x < mask.w; ++x) m.at<std::uint8_t>(y, x) = mask.at(y, x) ? 255 : 0;
    if (!cv::imwrite(path, m)) throw std::runtime_error("cannot write mask file: " + path);
}

BinaryMask load_mask(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw std::runtime_error("cannot read mask file: " + path);
    BinaryMask out = BinaryMask::zeros(m.rows, m.cols);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) out.set(y, x, m.at<std::uint8_t>(y, x) >= 128);
    return out;
}

void save_heatmap(const ScoreMap& map, const std::string& path) {
    cv::Mat m(map.h, map.w, CV_8UC1);
    for (int y = 0; y < map.h; ++y)
        for (int x = 0; x < map.w; ++x)
            m.at<std::uint8_t>(y, x) =
                static_cast<std::uint8_t>(std::clamp(std::round(map.at(y, x) * 255.0), 0.0, 255.0));
    if (!cv::imwrite(path, m)) throw std::runtime_error("cannot write heatmap file: " + path);
}

} // namespace segfin
