#pragma once

#include <vector>

#include "segfin/mask.hpp"
#include "segfin/model.hpp"

namespace segfin {

/// RoI features placed top-left on a zero canvas; no aspect-ratio warping.
struct RoIFeature {
    Tensor grid; // S x S x channels; exactly zero outside the valid region
    int valid_h = 0;
    int valid_w = 0;
    Box source_box; // image-pixel coordinates
    int stride = 1;
};

/// Per-class RoI mask probabilities at 4x the canvas resolution. Only the
/// top-left valid_h x valid_w block carries box content; the rest is padding.
struct RoIMask {
    ScoreMap probabilities; // 4S x 4S
    int valid_h = 0;
    int valid_w = 0;
    Box source_box;
};

/// Maps the box to feature coordinates by the level stride, samples it
/// bilinearly at aspect-preserving resolution (longer side scaled to the
/// canvas), and places the block top-left on a zero canvas.
RoIFeature nonwarp_roialign(const FeatureMaps::Level& level, const Box& box, int canvas);

/// Scatters a gradient on the RoI grid back into the feature level gradient.
void nonwarp_roialign_backward(const RoIFeature& roi, const FeatureMaps::Level& level,
                               const Tensor& grad_grid, Tensor& grad_level);

/// Element-wise sum of the high-level block with a 1x1 projection of the
/// low-level block. Both must share the canvas size.
RoIFeature fuse_multiscale(const RoIFeature& high_level, const RoIFeature& low_level,
                           const SegModel& model);

struct MaskHeadTrace {
    Tensor fused; // input to up1
    Tensor u1, u1r, u2, u2r;
    Tensor probs; // sigmoid(up3(u2r)), 4S x 4S x C
};

/// Atrous transposed-convolution upsampling to 4x the canvas resolution,
/// squashed to [0,1]. Returns one RoIMask per mask class, fixed order
/// [fingermark, attention].
std::vector<RoIMask> atrous_upsample(const RoIFeature& fused, const SegModel& model);

Tensor mask_head_forward_traced(const RoIFeature& fused, SegModel& model, MaskHeadTrace& trace);
/// Takes the gradient w.r.t. the pre-sigmoid logits and returns the gradient
/// w.r.t. the fused RoI grid.
Tensor mask_head_backward(const MaskHeadTrace& trace, SegModel& model, const Tensor& grad_logits);

/// Bilinearly resizes the valid block to the box pixel extent inside an
/// all-zero image-sized map.
ScoreMap paste_mask(const RoIMask& mask, int image_h, int image_w);

} // namespace segfin
