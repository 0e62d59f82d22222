#pragma once

#include <vector>

#include "segfin/detector.hpp"

namespace segfin {

struct AttentionDecision {
    Detection detection;
    double ratio = 0.0;
    bool kept = false;
};

/// area(box ∩ union(regions)) / area(box), exact for axis-aligned rectangles.
double overlap_ratio(const Box& box, const std::vector<Box>& regions);

/// Attention-labelled detections define the region set. Fingermark detections
/// covered by at least `threshold` of their area are kept; when no attention
/// region was detected, every fingermark detection passes.
std::vector<Detection> filter_by_attention(const std::vector<Detection>& detections,
                                           double threshold = 0.7);

/// Same rule, with the coverage ratio of every fingermark detection exposed.
std::vector<AttentionDecision> attention_decisions(const std::vector<Detection>& detections,
                                                   double threshold = 0.7);

} // namespace segfin
