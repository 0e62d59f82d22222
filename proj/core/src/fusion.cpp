#include "segfin/fusion.hpp"

#include <algorithm>
#include <stdexcept>

namespace segfin {

ScoreMap paste_max(int image_h, int image_w, const std::vector<RoIMask>& masks) {
    ScoreMap out = ScoreMap::zeros(image_h, image_w);
    for (const RoIMask& m : masks) {
        ScoreMap pasted = paste_mask(m, image_h, image_w);
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = std::max(out.v[i], pasted.v[i]);
    }
    return out;
}

ScoreMap variant_scoremap(const GrayscaleVariant& variant, const SegModel& model,
                          const PipelineConfig& config,
                          std::vector<std::pair<Detection, ScoreMap>>* instances) {
    const LatentImage& img = variant.image;
    FeatureMaps features = backbone_forward(img, model);
    std::vector<Detection> detections =
        detect(features, model, config.detection_threshold, config.nms_iou);

    std::vector<Detection> kept;
    if (config.use_attention) {
        kept = filter_by_attention(detections, config.attention_threshold);
    } else {
        for (const Detection& d : detections)
            if (d.label == DetLabel::fingermark) kept.push_back(d);
    }

    std::vector<RoIMask> roi_masks;
    for (const Detection& d : kept) {
        Box box = d.box.clipped(img.width, img.height);
        if (!box.valid()) continue;
        if (box.width() * box.height() <
            static_cast<double>(features.levels.back().stride) * features.levels.back().stride)
            continue; // below one feature cell, nothing to sample
        RoIFeature low = nonwarp_roialign(features.levels.front(), box, model.arch.roi_canvas);
        RoIFeature high = nonwarp_roialign(features.levels.back(), box, model.arch.roi_canvas);
        RoIFeature fused = fuse_multiscale(high, low, model);
        std::vector<RoIMask> per_class = atrous_upsample(fused, model);
        const RoIMask& fingermark = per_class.front();
        if (instances)
            instances->emplace_back(d, paste_mask(fingermark, img.height, img.width));
        roi_masks.push_back(fingermark);
    }
    return paste_max(img.height, img.width, roi_masks);
}

BinaryMask vote_masks(const std::vector<BinaryMask>& variant_masks, int k) {
    if (variant_masks.empty()) throw std::invalid_argument("vote_masks: no masks");
    if (k < 1 || k > static_cast<int>(variant_masks.size()))
        throw std::invalid_argument("vote_masks: vote count out of range");
    const BinaryMask& first = variant_masks.front();
    for (const BinaryMask& m : variant_masks)
        if (m.h != first.h || m.w != first.w)
            throw std::invalid_argument("vote_masks: mask dimension mismatch");
    BinaryMask out = BinaryMask::zeros(first.h, first.w);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        int votes = 0;
        for (const BinaryMask& m : variant_masks) votes += m.v[i] != 0;
        out.v[i] = votes >= k ? 1 : 0;
    }
    return out;
}

ScoreMap accumulate_heatmap(const std::vector<ScoreMap>& scoremaps) {
    if (scoremaps.empty()) throw std::invalid_argument("accumulate_heatmap: no score maps");
    const ScoreMap& first = scoremaps.front();
    for (const ScoreMap& m : scoremaps)
        if (m.h != first.h || m.w != first.w)
            throw std::invalid_argument("accumulate_heatmap: dimension mismatch");
    ScoreMap out = ScoreMap::zeros(first.h, first.w);
    for (const ScoreMap& m : scoremaps)
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += m.v[i];
    const double inv = 1.0 / static_cast<double>(scoremaps.size());
    for (double& v : out.v) v *= inv;
    return out;
}

SegmentationResult segment(const LatentImage& img, const SegModel& model,
                           const PipelineConfig& config) {
    std::vector<GrayscaleVariant> variants;
    if (config.use_voting) {
        variants = generate_variants(img);
    } else {
        variants.push_back({VariantKind::original, img});
    }

    SegmentationResult result;
    std::vector<ScoreMap> scoremaps;
    std::vector<BinaryMask> masks;
    scoremaps.reserve(variants.size());
    masks.reserve(variants.size());
    for (std::size_t i = 0; i < variants.size(); ++i) {
        ScoreMap sm = variant_scoremap(variants[i], model, config,
                                       i == 0 ? &result.instances : nullptr);
        masks.push_back(threshold_map(sm, config.mask_threshold));
        scoremaps.push_back(std::move(sm));
    }
    int k = config.use_voting ? config.votes_required : 1;
    result.mask = vote_masks(masks, k);
    result.heatmap = accumulate_heatmap(scoremaps);
    return result;
}

} // namespace segfin
