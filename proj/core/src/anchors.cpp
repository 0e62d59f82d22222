#include "segfin/anchors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace segfin {

std::string AnchorConfig::signature() const {
    std::ostringstream os;
    os << "scales=";
    for (double s : scales) os << s << ",";
    os << "|ratios=";
    for (double r : ratios) os << r << ",";
    os << "|stride=" << stride;
    return os.str();
}

std::vector<Box> generate_anchors(int fmap_h, int fmap_w, const AnchorConfig& config) {
    if (fmap_h <= 0 || fmap_w <= 0) throw std::invalid_argument("anchor grid dimensions must be positive");
    if (config.scales.empty() || config.ratios.empty())
        throw std::invalid_argument("anchor scales and ratios must be non-empty");
    std::vector<Box> anchors;
    anchors.reserve(static_cast<std::size_t>(fmap_h) * fmap_w * config.per_cell());
    for (int y = 0; y < fmap_h; ++y) {
        double cy = (y + 0.5) * config.stride;
        for (int x = 0; x < fmap_w; ++x) {
            double cx = (x + 0.5) * config.stride;
            for (double s : config.scales) {
                for (double r : config.ratios) {
                    double w = s * std::sqrt(r);
                    double h = s / std::sqrt(r);
                    anchors.push_back(Box{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2});
                }
            }
        }
    }
    return anchors;
}

std::array<double, 4> encode_box_delta(const Box& anchor, const Box& target) {
    double aw = anchor.width(), ah = anchor.height();
    return {(target.cx() - anchor.cx()) / aw, (target.cy() - anchor.cy()) / ah,
            std::log(target.width() / aw), std::log(target.height() / ah)};
}

Box decode_box_delta(const Box& anchor, const std::array<double, 4>& delta) {
    double aw = anchor.width(), ah = anchor.height();
    double cx = anchor.cx() + delta[0] * aw;
    double cy = anchor.cy() + delta[1] * ah;
    double w = aw * std::exp(delta[2]);
    double h = ah * std::exp(delta[3]);
    return Box{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
}

} // namespace segfin
