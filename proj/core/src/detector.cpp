#include "segfin/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace segfin {

namespace {

std::array<double, 3> softmax3(double a, double b, double c) {
    double m = std::max({a, b, c});
    double ea = std::exp(a - m), eb = std::exp(b - m), ec = std::exp(c - m);
    double s = ea + eb + ec;
    return {ea / s, eb / s, ec / s};
}

} // namespace

std::vector<Detection> propose_and_classify(const FeatureMaps& features,
                                            const std::vector<Box>& anchors, const SegModel& model) {
    const FeatureMaps::Level& level = features.levels.back();
    Tensor logits = det_head_forward(model, level.t);
    const int per_cell = model.anchor_config.per_cell();
    const int fields = model.det_fields_per_anchor();
    const std::size_t expected = static_cast<std::size_t>(logits.h) * logits.w * per_cell;
    if (anchors.size() != expected)
        throw std::invalid_argument("anchor count does not match feature grid");
    if (level.stride != model.anchor_config.stride)
        throw std::invalid_argument("anchor stride does not match feature level stride");

    const double img_w = static_cast<double>(logits.w) * level.stride;
    const double img_h = static_cast<double>(logits.h) * level.stride;

    std::vector<Detection> out;
    std::size_t a = 0;
    for (int y = 0; y < logits.h; ++y) {
        for (int x = 0; x < logits.w; ++x) {
            const double* cell = logits.cell(y, x);
            for (int k = 0; k < per_cell; ++k, ++a) {
                const double* f = cell + k * fields;
                auto probs = softmax3(f[0], f[1], f[2]);
                int cls = 0;
                if (probs[1] >= probs[0] && probs[1] >= probs[2]) cls = 1;
                if (probs[2] > probs[1] && probs[2] >= probs[0]) cls = 2;
                if (cls == 0) continue; // background anchor
                Box box = decode_box_delta(anchors[a], {f[3], f[4], f[5], f[6]});
                box = box.clipped(img_w, img_h);
                if (!box.valid()) continue;
                out.push_back({box, cls == 1 ? DetLabel::fingermark : DetLabel::attention, probs[cls]});
            }
        }
    }
    return out;
}

std::vector<Detection> nms(std::vector<Detection> detections, double iou_threshold) {
    if (iou_threshold <= 0.0 || iou_threshold >= 1.0)
        throw std::invalid_argument("nms iou_threshold must be in (0,1)");
    std::sort(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
        if (a.score != b.score) return a.score > b.score;
        double aa = a.box.area(), ba = b.box.area();
        if (aa != ba) return aa > ba;
        return std::tie(a.box.x0, a.box.y0, a.box.x1, a.box.y1) <
               std::tie(b.box.x0, b.box.y0, b.box.x1, b.box.y1);
    });
    std::vector<Detection> kept;
    for (const Detection& d : detections) {
        bool suppressed = false;
        for (const Detection& k : kept) {
            if (k.label != d.label) continue;
            if (box_iou(k.box, d.box) >= iou_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(d);
    }
    return kept;
}

std::vector<Detection> detect(const FeatureMaps& features, const SegModel& model,
                              double detection_threshold, double nms_iou) {
    const FeatureMaps::Level& level = features.levels.back();
    std::vector<Box> anchors = generate_anchors(level.t.h, level.t.w, model.anchor_config);
    std::vector<Detection> dets = propose_and_classify(features, anchors, model);
    std::vector<Detection> strong;
    for (Detection& d : dets) {
        if (d.score < detection_threshold) continue;
        if (features.image_w > 0 && features.image_h > 0)
            d.box = d.box.clipped(features.image_w, features.image_h);
        if (d.box.valid()) strong.push_back(d);
    }
    return nms(std::move(strong), nms_iou);
}

std::vector<Detection> detect(const LatentImage& img, const SegModel& model,
                              double detection_threshold, double nms_iou) {
    FeatureMaps features = backbone_forward(img, model);
    return detect(features, model, detection_threshold, nms_iou);
}

} // namespace segfin
