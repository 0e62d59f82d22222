#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "segfin/net.hpp"

namespace segfin {

struct LossConfig {
    double alpha = 2.0;  // class loss weight
    double beta = 1.0;   // box loss weight
    double gamma = 2.0;  // mask loss weight
    double lambda = 0.8; // background cross-entropy regularizer inside the mask loss
};

struct LossBreakdown {
    double l_class = 0.0;
    double l_box = 0.0;
    double l_mask = 0.0;
    double l_total = 0.0;
    std::vector<double> class_weights;
};

/// softmax over (1 - n_j / N); rarer classes receive strictly larger weight.
/// Requires at least one positive count.
std::vector<double> class_weights(const std::vector<double>& pixel_counts);

/// One RoI's mask prediction: per-class probabilities over the valid region
/// plus a label grid (0 = background, 1..C = class).
struct MaskSample {
    Tensor probs;                     // h x w x C
    std::vector<std::uint8_t> labels; // h*w entries
};

/// Weighted semi-supervised partial mask loss. For each class j the binary
/// cross-entropy runs only over pixels labelled j or background; pixels of
/// other foreground classes are discarded. The lambda term is cross-entropy
/// of the same prediction against the background/non-background partition
/// over all pixels. Probabilities are clamped to [1e-7, 1 - 1e-7].
double mask_loss(const std::vector<MaskSample>& samples, const std::vector<double>& weights,
                 double lambda);

/// Gradient of mask_loss w.r.t. the predicted probabilities.
std::vector<Tensor> mask_loss_grad(const std::vector<MaskSample>& samples,
                                   const std::vector<double>& weights, double lambda);

/// Gradient of mask_loss w.r.t. pre-sigmoid logits (fused analytic form).
std::vector<Tensor> mask_loss_logit_grad(const std::vector<MaskSample>& samples,
                                         const std::vector<double>& weights, double lambda);

/// One matched proposal for the detection losses.
struct RoiLossSample {
    std::array<double, 3> class_probs{}; // softmax probabilities (bg, fingermark, attention)
    int target_class = 0;
    bool positive = false;
    std::array<double, 4> delta_pred{};
    std::array<double, 4> delta_target{};
};

/// (L_C, L_B): cross-entropy over the three classes, smooth-L1 on box deltas
/// of positives only (0 when there are no positives).
std::pair<double, double> detection_losses(const std::vector<RoiLossSample>& samples);

double smooth_l1(double x);
double smooth_l1_grad(double x);

/// Exact weighted sum with the config coefficients.
LossBreakdown total_loss(double l_class, double l_box, double l_mask, const LossConfig& config,
                         std::vector<double> weights = {});

} // namespace segfin
