#pragma once

// Internal JSON converters shared by checkpointing and the run config.

#include <nlohmann/json.hpp>

#include "segfin/anchors.hpp"
#include "segfin/fusion.hpp"
#include "segfin/losses.hpp"
#include "segfin/model.hpp"
#include "segfin/synth.hpp"
#include "segfin/trainer.hpp"

namespace segfin {

inline void to_json(nlohmann::json& j, const AnchorConfig& c) {
    j = {{"scales", c.scales}, {"ratios", c.ratios}, {"stride", c.stride}};
}
inline void from_json(const nlohmann::json& j, AnchorConfig& c) {
    c.scales = j.value("scales", c.scales);
    c.ratios = j.value("ratios", c.ratios);
    c.stride = j.value("stride", c.stride);
}

inline void to_json(nlohmann::json& j, const ArchConfig& c) {
    j = {{"stem_ch", c.stem_ch},     {"low_ch", c.low_ch},   {"high_ch", c.high_ch},
         {"det_ch", c.det_ch},       {"mask_ch1", c.mask_ch1}, {"mask_ch2", c.mask_ch2},
         {"roi_canvas", c.roi_canvas}, {"mask_classes", c.mask_classes}};
}
inline void from_json(const nlohmann::json& j, ArchConfig& c) {
    c.stem_ch = j.value("stem_ch", c.stem_ch);
    c.low_ch = j.value("low_ch", c.low_ch);
    c.high_ch = j.value("high_ch", c.high_ch);
    c.det_ch = j.value("det_ch", c.det_ch);
    c.mask_ch1 = j.value("mask_ch1", c.mask_ch1);
    c.mask_ch2 = j.value("mask_ch2", c.mask_ch2);
    c.roi_canvas = j.value("roi_canvas", c.roi_canvas);
    c.mask_classes = j.value("mask_classes", c.mask_classes);
}

inline void to_json(nlohmann::json& j, const LossConfig& c) {
    j = {{"alpha", c.alpha}, {"beta", c.beta}, {"gamma", c.gamma}, {"lambda", c.lambda}};
}
inline void from_json(const nlohmann::json& j, LossConfig& c) {
    c.alpha = j.value("alpha", c.alpha);
    c.beta = j.value("beta", c.beta);
    c.gamma = j.value("gamma", c.gamma);
    c.lambda = j.value("lambda", c.lambda);
}

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = {{"lr_phase1", c.lr_phase1},
         {"lr_phase2", c.lr_phase2},
         {"phase1_iters", c.phase1_iters},
         {"total_iters", c.total_iters},
         {"weight_decay", c.weight_decay},
         {"images_per_step", c.images_per_step},
         {"roi_samples_per_image", c.roi_samples_per_image},
         {"variant_sampling", c.variant_sampling},
         {"eval_interval", c.eval_interval},
         {"seed", c.seed},
         {"loss", c.loss}};
}
inline void from_json(const nlohmann::json& j, TrainConfig& c) {
    c.lr_phase1 = j.value("lr_phase1", c.lr_phase1);
    c.lr_phase2 = j.value("lr_phase2", c.lr_phase2);
    c.phase1_iters = j.value("phase1_iters", c.phase1_iters);
    c.total_iters = j.value("total_iters", c.total_iters);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.images_per_step = j.value("images_per_step", c.images_per_step);
    c.roi_samples_per_image = j.value("roi_samples_per_image", c.roi_samples_per_image);
    c.variant_sampling = j.value("variant_sampling", c.variant_sampling);
    c.eval_interval = j.value("eval_interval", c.eval_interval);
    c.seed = j.value("seed", c.seed);
    if (j.contains("loss")) j.at("loss").get_to(c.loss);
}

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
    j = {{"detection_threshold", c.detection_threshold},
         {"nms_iou", c.nms_iou},
         {"attention_threshold", c.attention_threshold},
         {"mask_threshold", c.mask_threshold},
         {"votes_required", c.votes_required},
         {"use_attention", c.use_attention},
         {"use_voting", c.use_voting}};
}
inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
    c.detection_threshold = j.value("detection_threshold", c.detection_threshold);
    c.nms_iou = j.value("nms_iou", c.nms_iou);
    c.attention_threshold = j.value("attention_threshold", c.attention_threshold);
    c.mask_threshold = j.value("mask_threshold", c.mask_threshold);
    c.votes_required = j.value("votes_required", c.votes_required);
    c.use_attention = j.value("use_attention", c.use_attention);
    c.use_voting = j.value("use_voting", c.use_voting);
}

inline void to_json(nlohmann::json& j, const SynthParams& c) {
    j = {{"image_size", c.image_size},
         {"ridge_period", c.ridge_period},
         {"n_fingermarks", c.n_fingermarks},
         {"clutter_level", c.clutter_level},
         {"marker_probability", c.marker_probability}};
}
inline void from_json(const nlohmann::json& j, SynthParams& c) {
    c.image_size = j.value("image_size", c.image_size);
    c.ridge_period = j.value("ridge_period", c.ridge_period);
    c.n_fingermarks = j.value("n_fingermarks", c.n_fingermarks);
    c.clutter_level = j.value("clutter_level", c.clutter_level);
    c.marker_probability = j.value("marker_probability", c.marker_probability);
}

} // namespace segfin
