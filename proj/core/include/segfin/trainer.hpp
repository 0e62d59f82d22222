#pragma once

#include <memory>
#include <string>
#include <vector>

#include "segfin/fusion.hpp"
#include "segfin/losses.hpp"
#include "segfin/model.hpp"
#include "segfin/synth.hpp"

namespace segfin {

struct TrainConfig {
    double lr_phase1 = 0.001;
    double lr_phase2 = 0.0001;
    int phase1_iters = 600;  // desk-scale schedule, same 30:70 phase split
    int total_iters = 2000;
    double weight_decay = 0.0001;
    int images_per_step = 1;
    int roi_samples_per_image = 32;
    bool variant_sampling = true; // cycle grayscale variants during training
    int eval_interval = 250;      // validation cadence for the best checkpoint
    std::uint64_t seed = 1;
    LossConfig loss;
};

struct TrainLogEntry {
    int iteration = 0;
    double lr = 0.0;
    double l_class = 0.0;
    double l_box = 0.0;
    double l_mask = 0.0;
    double l_total = 0.0;
};

struct TrainLog {
    std::vector<TrainLogEntry> entries;
    std::string to_jsonl() const;
};

struct TrainOptions {
    ArchConfig arch;
    AnchorConfig anchors;
    PipelineConfig pipeline;                          // used for validation IoU
    const std::vector<GroundTruthSample>* validation = nullptr;
    std::string checkpoint_dir;                       // when set, writes final/best checkpoints
    bool track_best = true;
};

struct TrainResult {
    std::unique_ptr<SegModel> model;
    TrainLog log;
    double best_iou = 0.0;
    int best_iteration = -1;
    std::string final_checkpoint;
    std::string best_checkpoint;
};

/// Pure function of the iteration index: lr_phase1 while
/// iteration < phase1_iters, lr_phase2 afterwards.
double learning_rate_at(const TrainConfig& config, int iteration);

/// One SGD step with decoupled weight decay on weight (not bias) vectors:
/// w <- w - lr * (g + decay * w).
void apply_sgd_step(std::vector<ParamRef>& params, double lr, double weight_decay);

/// Two-phase SGD on the composite detection + mask objective. Deterministic
/// given the config seed. Aborts with the last good checkpoint on divergence.
TrainResult train(const std::vector<GroundTruthSample>& dataset, const TrainConfig& config,
                  const TrainOptions& options = {});

/// Binary weight blob plus a JSON sidecar (<path>.json) describing the
/// architecture, anchor configuration, and training config.
void save_checkpoint(SegModel& model, const std::string& path,
                     const TrainConfig* train_config = nullptr);
std::unique_ptr<SegModel> load_checkpoint(const std::string& path);

} // namespace segfin
