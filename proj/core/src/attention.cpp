#include "segfin/attention.hpp"

#include <stdexcept>

namespace segfin {

double overlap_ratio(const Box& box, const std::vector<Box>& regions) {
    if (box.area() <= 0.0) throw std::invalid_argument("overlap_ratio: zero-area box");
    return union_coverage_area(box, regions) / box.area();
}

std::vector<AttentionDecision> attention_decisions(const std::vector<Detection>& detections,
                                                   double threshold) {
    std::vector<Box> regions;
    for (const Detection& d : detections)
        if (d.label == DetLabel::attention) regions.push_back(d.box);

    std::vector<AttentionDecision> out;
    for (const Detection& d : detections) {
        if (d.label != DetLabel::fingermark) continue;
        AttentionDecision dec;
        dec.detection = d;
        if (regions.empty()) {
            dec.ratio = 0.0;
            dec.kept = true; // no markup present: keep everything
        } else {
            dec.ratio = overlap_ratio(d.box, regions);
            dec.kept = dec.ratio >= threshold;
        }
        out.push_back(dec);
    }
    return out;
}

std::vector<Detection> filter_by_attention(const std::vector<Detection>& detections,
                                           double threshold) {
    std::vector<Detection> kept;
    for (const AttentionDecision& dec : attention_decisions(detections, threshold))
        if (dec.kept) kept.push_back(dec.detection);
    return kept;
}

} // namespace segfin
