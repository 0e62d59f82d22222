#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segfin/common.hpp"
#include "segfin/geometry.hpp"
#include "segfin/image.hpp"
#include "segfin/mask.hpp"

namespace segfin {

struct SynthParams {
    int image_size = 256;
    double ridge_period = 9.0; // pixels
    int n_fingermarks = 1;     // 1..3
    double clutter_level = 0.3;      // [0,1]
    double marker_probability = 0.5; // [0,1]

    void validate() const;
};

struct GroundTruthSample {
    LatentImage image;
    BinaryMask mask; // true = friction ridge foreground
    std::vector<Box> attention_regions;
    std::uint64_t seed = 0;

    bool has_mask() const { return mask.h > 0 && mask.w > 0; }
};

/// Deterministic in (params, seed). Composites oriented-sinusoid ridge
/// patterns over a noisy, cluttered background; the mask is exactly the union
/// of the ridge-pattern supports. Each fingermark is surrounded by a dark
/// elliptical marker stroke with probability marker_probability, and the
/// enclosing box is recorded as an attention region.
GroundTruthSample synth_latent(const SynthParams& params, std::uint64_t seed);

struct AugmentParams {
    double angle_deg = 0.0;
    double scale = 1.0;
    double shift_x = 0.0; // pixels
    double shift_y = 0.0;
    double crop_frac = 1.0;  // linear crop size fraction; area = crop_frac^2
    double crop_off_x = 0.0; // window origin as fraction of the slack
    double crop_off_y = 0.0;
};

AugmentParams sample_augment_params(Rng& rng, int image_size);

/// Applies the same geometric transform to image, mask, and attention
/// regions; output size equals input size. Throws when the transform leaves
/// less than 2% foreground.
GroundTruthSample apply_augment(const GroundTruthSample& sample, const AugmentParams& params);

/// Seeded wrapper over apply_augment; resamples up to 10 times.
GroundTruthSample augment(const GroundTruthSample& sample, std::uint64_t seed);

/// Dataset layout: images/<id>.png, masks/<id>.png (values {0,255}),
/// attention/<id>.json ([x0,y0,x1,y1] integer boxes), manifest.json.
void write_dataset(const std::vector<GroundTruthSample>& samples, const std::string& directory,
                   const SynthParams& params);
std::vector<GroundTruthSample> load_dataset(const std::string& directory);

} // namespace segfin
