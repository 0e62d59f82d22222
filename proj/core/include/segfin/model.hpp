#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segfin/anchors.hpp"
#include "segfin/image.hpp"
#include "segfin/net.hpp"

namespace segfin {

/// Channel widths and canvas size of the network. The defaults are the
/// desk-scale configuration; tests shrink them for finite-difference checks.
struct ArchConfig {
    int stem_ch = 12;
    int low_ch = 16;  // stride-4 pyramid level
    int high_ch = 24; // stride-8 pyramid level
    int det_ch = 32;
    int mask_ch1 = 16;
    int mask_ch2 = 8;
    int roi_canvas = 64; // S: RoI features are zero-padded onto an SxS canvas
    int mask_classes = 2; // fingermark, attention

    std::string signature() const;
};

struct FeatureMaps {
    struct Level {
        int stride = 1;
        Tensor t;
    };
    std::vector<Level> levels; // strictly increasing strides
    int image_h = 0, image_w = 0; // unpadded input dimensions
};

/// Activations kept alive for the backward pass.
struct BackboneTrace {
    Tensor in;   // normalized input
    Tensor s0;   // relu(stem)
    Tensor d1;   // relu(down1)
    Tensor r1;   // relu(a1(d1))
    Tensor low;  // relu(a2(r1) + d1)        stride-4 level
    Tensor d2;   // relu(down2(low))
    Tensor r2;   // relu(b1(d2))
    Tensor res2; // relu(b2(r2) + d2)
    Tensor high; // relu(top(res2))          stride-8 level
};

/// Detection backbone + detection head + mask head, all double precision.
class SegModel {
public:
    SegModel(ArchConfig arch, AnchorConfig anchor_config, std::uint64_t init_seed);

    ArchConfig arch;
    AnchorConfig anchor_config;

    // backbone (8 convolutions, two residual pairs)
    Conv2d stem, down1, a1, a2, down2, b1, b2, top;
    // detection head: per-anchor class logits + box deltas
    Conv2d det_conv, det_out;
    // mask head: low-level projection + atrous transposed-conv upsampling
    Conv2d mask_proj;
    TConv2d up1, up2, up3;

    int det_fields_per_anchor() const { return 3 + 4; }
    std::uint64_t arch_hash() const;
    std::vector<ParamRef> params(); // stable order
    std::size_t param_count() const;
    void zero_grad();
};

void ensure_finite(const Tensor& t, const std::string& layer);

/// Converts to a single-channel tensor in [0,1], zero-padded on the
/// bottom/right so both dimensions are divisible by pad_multiple.
Tensor image_to_tensor(const LatentImage& img, int pad_multiple);

FeatureMaps backbone_forward(const LatentImage& img, const SegModel& model);
FeatureMaps backbone_forward_traced(const Tensor& in, const SegModel& model, BackboneTrace& trace);

/// Accumulates parameter gradients from gradients on the two pyramid levels.
void backbone_backward(const BackboneTrace& trace, SegModel& model, const Tensor& grad_low,
                       const Tensor& grad_high);

struct DetHeadTrace {
    Tensor hidden; // relu(det_conv(high))
    Tensor logits; // det_out(hidden), (h, w, A * 7)
};

Tensor det_head_forward(const SegModel& model, const Tensor& high);
Tensor det_head_forward_traced(SegModel& model, const Tensor& high, DetHeadTrace& trace);
/// Returns the gradient w.r.t. the high-level feature map.
Tensor det_head_backward(const DetHeadTrace& trace, SegModel& model, const Tensor& high,
                         const Tensor& grad_logits);

} // namespace segfin
