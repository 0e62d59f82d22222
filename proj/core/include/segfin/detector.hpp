#pragma once

#include <vector>

#include "segfin/model.hpp"

namespace segfin {

enum class DetLabel { fingermark, attention };

struct Detection {
    Box box;
    DetLabel label = DetLabel::fingermark;
    double score = 0.0;
};

/// Per-anchor classification and box decoding on the top pyramid level.
/// Background anchors are dropped; boxes are clipped to the (padded) image
/// extent covered by the feature map.
std::vector<Detection> propose_and_classify(const FeatureMaps& features,
                                            const std::vector<Box>& anchors, const SegModel& model);

/// Greedy score-descending per-class suppression. Ties broken by larger box
/// area, then lexicographic coordinates, so the result is order-invariant.
std::vector<Detection> nms(std::vector<Detection> detections, double iou_threshold);

/// Full chain: backbone -> propose_and_classify -> score filter -> nms.
/// Returns both fingermark and attention detections, clipped to image bounds.
std::vector<Detection> detect(const LatentImage& img, const SegModel& model,
                              double detection_threshold = 0.7, double nms_iou = 0.5);
std::vector<Detection> detect(const FeatureMaps& features, const SegModel& model,
                              double detection_threshold = 0.7, double nms_iou = 0.5);

} // namespace segfin
