#pragma once

#include <functional>
#include <string>
#include <vector>

#include "segfin/fusion.hpp"
#include "segfin/synth.hpp"

namespace segfin {

/// Missed detection rate: (|B| - |A∩B|) / |B|. Undefined for empty ground truth.
double mdr(const BinaryMask& pred, const BinaryMask& gt);

/// False detection rate: (|A| - |A∩B|) / |A|; 0 for an empty prediction.
double fdr(const BinaryMask& pred, const BinaryMask& gt);

/// |A∩B| / |A∪B|. Undefined when both masks are empty.
double iou(const BinaryMask& pred, const BinaryMask& gt);

struct PerImageMetrics {
    std::string id;
    double mdr = 0.0;
    double fdr = 0.0;
    double iou = 0.0;
    double ms = 0.0;
};

struct MetricsReport {
    std::string config_label;
    double mdr = 0.0; // means over per_image
    double fdr = 0.0;
    double iou = 0.0;
    double timing_ms = 0.0;
    std::vector<PerImageMetrics> per_image;
    std::vector<std::string> skipped; // ids without ground truth
};

using Segmenter = std::function<BinaryMask(const LatentImage&)>;

/// Runs the segmenter over the dataset and aggregates per-image metrics.
/// Samples without ground truth are skipped and recorded. workers > 1
/// parallelizes across images; metric values stay deterministic.
MetricsReport evaluate(const std::vector<GroundTruthSample>& dataset, const Segmenter& segmenter,
                       const std::string& label, int workers = 1);

MetricsReport evaluate(const std::vector<GroundTruthSample>& dataset, const SegModel& model,
                       const PipelineConfig& config, const std::string& label, int workers = 1);

/// The four standard configurations, in report order.
struct AblationSpec {
    std::string label;
    bool use_attention;
    bool use_voting;
};
const std::vector<AblationSpec>& ablation_specs();
PipelineConfig ablation_config(const PipelineConfig& base, const AblationSpec& spec);

std::string report_table(const std::vector<MetricsReport>& reports);
std::string report_json(const std::vector<MetricsReport>& reports);

} // namespace segfin
