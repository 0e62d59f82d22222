#pragma once

#include <string>

#include "segfin/anchors.hpp"
#include "segfin/fusion.hpp"
#include "segfin/model.hpp"
#include "segfin/synth.hpp"
#include "segfin/trainer.hpp"

namespace segfin {

/// Aggregate of every tunable in the pipeline with its default operating
/// point. Serialization is stable (sorted keys, two-space indent) so the
/// defaults can be pinned by a golden file.
struct RunConfig {
    SynthParams synth;
    ArchConfig arch;
    AnchorConfig anchors;
    TrainConfig train; // carries the loss coefficients
    PipelineConfig pipeline;

    static RunConfig defaults() { return RunConfig{}; }

    std::string to_json_string() const;
    static RunConfig from_json_string(const std::string& text);

    void save(const std::string& path) const;
    static RunConfig load(const std::string& path);
};

} // namespace segfin
