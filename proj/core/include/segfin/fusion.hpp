#pragma once

#include <utility>
#include <vector>

#include "segfin/attention.hpp"
#include "segfin/image.hpp"
#include "segfin/seghead.hpp"

namespace segfin {

/// Inference-time knobs. Defaults are the standard operating point.
struct PipelineConfig {
    double detection_threshold = 0.7;
    double nms_iou = 0.5;
    double attention_threshold = 0.7;
    double mask_threshold = 0.5; // pixel-wise threshold on per-variant score maps
    int votes_required = 3;      // K of the voting fusion
    bool use_attention = true;   // AM toggle
    bool use_voting = true;      // VF toggle
};

struct SegmentationResult {
    BinaryMask mask;
    ScoreMap heatmap; // mean of per-variant score maps
    std::vector<std::pair<Detection, ScoreMap>> instances; // per kept fingermark, original variant
};

/// Per-pixel maximum of pasted RoI masks on an all-zero canvas.
ScoreMap paste_max(int image_h, int image_w, const std::vector<RoIMask>& masks);

/// detect -> attention filter -> per-box mask prediction -> paste (max rule).
ScoreMap variant_scoremap(const GrayscaleVariant& variant, const SegModel& model,
                          const PipelineConfig& config,
                          std::vector<std::pair<Detection, ScoreMap>>* instances = nullptr);

/// Output pixel is foreground iff at least k variant masks are foreground.
BinaryMask vote_masks(const std::vector<BinaryMask>& variant_masks, int k = 3);

/// Per-pixel arithmetic mean.
ScoreMap accumulate_heatmap(const std::vector<ScoreMap>& scoremaps);

/// Full pipeline: grayscale variants -> per-variant score maps -> per-variant
/// thresholded masks -> K-vote fusion. With voting disabled only the original
/// variant is used and the mask is its thresholded score map.
SegmentationResult segment(const LatentImage& img, const SegModel& model,
                           const PipelineConfig& config = {});

} // namespace segfin
