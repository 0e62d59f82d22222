#include "segfin/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json_util.hpp"
#include "segfin/detector.hpp"
#include "segfin/metrics.hpp"
#include "segfin/seghead.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace segfin {

std::string TrainLog::to_jsonl() const {
    std::ostringstream os;
    for (const TrainLogEntry& e : entries) {
        json j = {{"iteration", e.iteration}, {"lr", e.lr},         {"l_class", e.l_class},
                  {"l_box", e.l_box},         {"l_mask", e.l_mask}, {"l_total", e.l_total}};
        os << j.dump() << "\n";
    }
    return os.str();
}

double learning_rate_at(const TrainConfig& config, int iteration) {
    return iteration < config.phase1_iters ? config.lr_phase1 : config.lr_phase2;
}

void apply_sgd_step(std::vector<ParamRef>& params, double lr, double weight_decay) {
    for (ParamRef& p : params) {
        const bool decay = p.name.size() >= 2 && p.name.compare(p.name.size() - 2, 2, ".w") == 0;
        std::vector<double>& w = *p.value;
        const std::vector<double>& g = *p.grad;
        for (std::size_t i = 0; i < w.size(); ++i) {
            double grad = g[i];
            if (decay) grad += weight_decay * w[i];
            w[i] -= lr * grad;
        }
    }
}

namespace {

struct GtBoxes {
    std::vector<Box> boxes;
    std::vector<int> classes; // 1 fingermark, 2 attention
};

struct PreparedSample {
    GtBoxes gt;
    std::vector<std::uint8_t> labels; // per-pixel 0 bg, 1 fingermark, 2 attention
};

PreparedSample prepare_sample(const GroundTruthSample& s) {
    PreparedSample out;
    for (const Box& b : component_boxes(s.mask)) {
        out.gt.boxes.push_back(b);
        out.gt.classes.push_back(1);
    }
    for (const Box& b : s.attention_regions) {
        if (!b.valid()) continue;
        out.gt.boxes.push_back(b);
        out.gt.classes.push_back(2);
    }
    const int h = s.image.height, w = s.image.width;
    out.labels.assign(static_cast<std::size_t>(h) * w, 0);
    for (const Box& b : s.attention_regions) {
        int x0 = std::clamp(static_cast<int>(b.x0), 0, w);
        int x1 = std::clamp(static_cast<int>(std::ceil(b.x1)), 0, w);
        int y0 = std::clamp(static_cast<int>(b.y0), 0, h);
        int y1 = std::clamp(static_cast<int>(std::ceil(b.y1)), 0, h);
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) out.labels[static_cast<std::size_t>(y) * w + x] = 2;
    }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (s.mask.at(y, x)) out.labels[static_cast<std::size_t>(y) * w + x] = 1;
    return out;
}

struct AnchorMatch {
    int label = -1;  // -1 ignore, 0 negative, 1/2 positive class
    int gt_index = -1;
};

std::vector<AnchorMatch> match_anchors(const std::vector<Box>& anchors, const GtBoxes& gt) {
    std::vector<AnchorMatch> match(anchors.size());
    std::vector<double> best_iou(anchors.size(), 0.0);
    std::vector<int> gt_best_anchor(gt.boxes.size(), -1);
    std::vector<double> gt_best_iou(gt.boxes.size(), -1.0);
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        double best = 0.0;
        int best_g = -1;
        for (std::size_t g = 0; g < gt.boxes.size(); ++g) {
            double v = box_iou(anchors[a], gt.boxes[g]);
            if (v > best) {
                best = v;
                best_g = static_cast<int>(g);
            }
            if (v > gt_best_iou[g]) {
                gt_best_iou[g] = v;
                gt_best_anchor[g] = static_cast<int>(a);
            }
        }
        best_iou[a] = best;
        if (best >= 0.5) {
            match[a].label = gt.classes[best_g];
            match[a].gt_index = best_g;
        } else if (best < 0.3) {
            match[a].label = 0;
        }
    }
    // Every ground-truth box trains at least its best anchor.
    for (std::size_t g = 0; g < gt.boxes.size(); ++g) {
        int a = gt_best_anchor[g];
        if (a < 0 || gt_best_iou[g] <= 0.0) continue;
        match[a].label = gt.classes[g];
        match[a].gt_index = static_cast<int>(g);
    }
    return match;
}

void sample_indices(std::vector<int>& pool, std::size_t want, Rng& rng, std::vector<int>& out) {
    if (pool.size() <= want) {
        out.insert(out.end(), pool.begin(), pool.end());
        return;
    }
    // Partial Fisher-Yates, deterministic in the rng stream.
    for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size() - i)));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
}

LatentImage make_variant(const LatentImage& img, int kind) {
    switch (kind) {
        case 1: return center_normalize(img);
        case 2: return histogram_equalize(img);
        case 3: return invert(img);
        default: return img;
    }
}

Box jitter_box(const Box& b, Rng& rng, double img_w, double img_h) {
    double jw = b.width() * rng.uniform(-0.05, 0.05);
    double jh = b.height() * rng.uniform(-0.05, 0.05);
    double sx = b.width() * rng.uniform(-0.05, 0.05);
    double sy = b.height() * rng.uniform(-0.05, 0.05);
    Box j{b.x0 + sx - jw, b.y0 + sy - jh, b.x1 + sx + jw, b.y1 + sy + jh};
    j = j.clipped(img_w, img_h);
    return j.valid() ? j : b.clipped(img_w, img_h);
}

struct ParamSnapshot {
    std::vector<std::vector<double>> values;
};

ParamSnapshot snapshot(SegModel& m) {
    ParamSnapshot s;
    for (ParamRef& p : m.params()) s.values.push_back(*p.value);
    return s;
}

void restore(SegModel& m, const ParamSnapshot& s) {
    auto params = m.params();
    for (std::size_t i = 0; i < params.size(); ++i) *params[i].value = s.values[i];
}

double validation_iou(SegModel& model, const std::vector<GroundTruthSample>& val,
                      const PipelineConfig& pipeline) {
    if (val.empty()) return 0.0;
    double acc = 0.0;
    std::size_t n = 0;
    for (const GroundTruthSample& s : val) {
        if (!s.has_mask() || s.mask.empty_mask()) continue;
        BinaryMask pred = segment(s.image, model, pipeline).mask;
        acc += iou(pred, s.mask);
        ++n;
    }
    return n > 0 ? acc / static_cast<double>(n) : 0.0;
}

} // namespace

TrainResult train(const std::vector<GroundTruthSample>& dataset, const TrainConfig& config,
                  const TrainOptions& options) {
    if (dataset.size() < 10)
        throw std::invalid_argument("train: dataset must contain at least 10 samples");
    for (const GroundTruthSample& s : dataset)
        if (!s.has_mask()) throw std::invalid_argument("train: every training sample needs a mask");
    if (config.total_iters < 0 || config.phase1_iters > config.total_iters)
        throw std::invalid_argument("train: phase1_iters must not exceed total_iters");
    if (config.lr_phase1 <= 0.0 || config.lr_phase2 <= 0.0)
        throw std::invalid_argument("train: learning rates must be positive");

    TrainResult result;
    result.model = std::make_unique<SegModel>(options.arch, options.anchors, config.seed);
    SegModel& model = *result.model;
    const int classes = model.arch.mask_classes;
    const int canvas = model.arch.roi_canvas;
    const int fields = model.det_fields_per_anchor();
    const int per_cell = model.anchor_config.per_cell();

    std::vector<PreparedSample> prepared;
    prepared.reserve(dataset.size());
    for (const GroundTruthSample& s : dataset) prepared.push_back(prepare_sample(s));

    // Validation pool for the best-IoU checkpoint: an explicit set when given,
    // otherwise a small prefix of the training data.
    std::vector<GroundTruthSample> val_fallback;
    const std::vector<GroundTruthSample>* val = options.validation;
    if (!val && options.track_best) {
        for (std::size_t i = 0; i < std::min<std::size_t>(8, dataset.size()); ++i)
            val_fallback.push_back(dataset[i]);
        val = &val_fallback;
    }

    Rng order_rng(config.seed * 0x9e3779b97f4a7c15ull + 1);
    Rng roi_rng(config.seed * 0x9e3779b97f4a7c15ull + 2);
    Rng variant_rng(config.seed * 0x9e3779b97f4a7c15ull + 3);

    std::vector<int> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t order_pos = order.size(); // trigger shuffle on first use

    ParamSnapshot last_good = snapshot(model);
    ParamSnapshot best;
    bool have_best = false;

    std::vector<Box> anchor_cache;
    int anchor_cache_h = -1, anchor_cache_w = -1;

    const int pos_cap = std::max(1, config.roi_samples_per_image / 4);

    for (int iter = 0; iter < config.total_iters; ++iter) {
        const double lr = learning_rate_at(config, iter);
        if (order_pos >= order.size()) {
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[static_cast<std::size_t>(order_rng.uniform_int(static_cast<int>(i)))]);
            order_pos = 0;
        }
        const int idx = order[order_pos++];
        const GroundTruthSample& sample = dataset[idx];
        const PreparedSample& prep = prepared[idx];

        const int variant_kind = config.variant_sampling ? variant_rng.uniform_int(4) : 0;
        LatentImage view = make_variant(sample.image, variant_kind);

        Tensor input = image_to_tensor(view, 8);
        BackboneTrace trace;
        FeatureMaps features = backbone_forward_traced(input, model, trace);
        features.image_h = view.height;
        features.image_w = view.width;
        DetHeadTrace det_trace;
        det_head_forward_traced(model, trace.high, det_trace);

        if (trace.high.h != anchor_cache_h || trace.high.w != anchor_cache_w) {
            anchor_cache = generate_anchors(trace.high.h, trace.high.w, model.anchor_config);
            anchor_cache_h = trace.high.h;
            anchor_cache_w = trace.high.w;
        }
        std::vector<AnchorMatch> matches = match_anchors(anchor_cache, prep.gt);

        std::vector<int> positives, negatives;
        for (std::size_t a = 0; a < matches.size(); ++a) {
            if (matches[a].label > 0) positives.push_back(static_cast<int>(a));
            else if (matches[a].label == 0) negatives.push_back(static_cast<int>(a));
        }
        std::vector<int> sampled_pos, sampled_neg;
        sample_indices(positives, static_cast<std::size_t>(pos_cap), roi_rng, sampled_pos);
        const std::size_t neg_want =
            static_cast<std::size_t>(config.roi_samples_per_image) - sampled_pos.size();
        sample_indices(negatives, neg_want, roi_rng, sampled_neg);

        // --- detection losses and their logit gradients ---
        Tensor grad_logits = Tensor::zeros(det_trace.logits.h, det_trace.logits.w, det_trace.logits.c);
        std::vector<RoiLossSample> roi_samples;
        const std::size_t n_sampled = sampled_pos.size() + sampled_neg.size();
        auto anchor_cell = [&](int a, int& y, int& x, int& k) {
            k = a % per_cell;
            int cell = a / per_cell;
            x = cell % det_trace.logits.w;
            y = cell / det_trace.logits.w;
        };
        auto process_anchor = [&](int a, bool positive) {
            int y, x, k;
            anchor_cell(a, y, x, k);
            const double* f = det_trace.logits.cell(y, x) + k * fields;
            double m = std::max({f[0], f[1], f[2]});
            double e0 = std::exp(f[0] - m), e1 = std::exp(f[1] - m), e2 = std::exp(f[2] - m);
            double sum = e0 + e1 + e2;
            std::array<double, 3> probs{e0 / sum, e1 / sum, e2 / sum};
            RoiLossSample rs;
            rs.class_probs = probs;
            rs.target_class = positive ? matches[a].label : 0;
            rs.positive = positive;
            double* g = grad_logits.cell(y, x) + k * fields;
            for (int c = 0; c < 3; ++c) {
                double onehot = c == rs.target_class ? 1.0 : 0.0;
                g[c] += config.loss.alpha * (probs[static_cast<std::size_t>(c)] - onehot) /
                        static_cast<double>(n_sampled);
            }
            if (positive) {
                const Box& gt_box = prep.gt.boxes[static_cast<std::size_t>(matches[a].gt_index)];
                std::array<double, 4> target = encode_box_delta(anchor_cache[a], gt_box);
                for (int d = 0; d < 4; ++d) {
                    rs.delta_pred[d] = f[3 + d];
                    rs.delta_target[d] = target[static_cast<std::size_t>(d)];
                }
            }
            roi_samples.push_back(rs);
        };
        for (int a : sampled_pos) process_anchor(a, true);
        for (int a : sampled_neg) process_anchor(a, false);
        auto [l_class, l_box] = detection_losses(roi_samples);
        if (!sampled_pos.empty()) {
            const double scale = config.loss.beta / static_cast<double>(sampled_pos.size());
            for (std::size_t i = 0; i < sampled_pos.size(); ++i) {
                int a = sampled_pos[i];
                int y, x, k;
                anchor_cell(a, y, x, k);
                double* g = grad_logits.cell(y, x) + k * fields;
                for (int d = 0; d < 4; ++d)
                    g[3 + d] += scale * smooth_l1_grad(roi_samples[i].delta_pred[d] -
                                                       roi_samples[i].delta_target[d]);
            }
        }

        // --- mask branch over the sampled positives ---
        struct RoiWork {
            RoIFeature low, high, fused;
            MaskHeadTrace trace;
            MaskSample sample;
            int valid_out_h = 0, valid_out_w = 0;
        };
        std::vector<RoiWork> roi_work;
        for (int a : sampled_pos) {
            const Box& gt_box = prep.gt.boxes[static_cast<std::size_t>(matches[a].gt_index)];
            Box box = jitter_box(gt_box, roi_rng, view.width, view.height);
            if (box.width() * box.height() <
                static_cast<double>(model.anchor_config.stride) * model.anchor_config.stride)
                continue;
            RoiWork work;
            work.low = nonwarp_roialign(features.levels.front(), box, canvas);
            work.high = nonwarp_roialign(features.levels.back(), box, canvas);
            work.fused = fuse_multiscale(work.high, work.low, model);
            mask_head_forward_traced(work.fused, model, work.trace);

            work.valid_out_h = std::min(4 * work.fused.valid_h, work.trace.probs.h);
            work.valid_out_w = std::min(4 * work.fused.valid_w, work.trace.probs.w);
            MaskSample ms;
            ms.probs = Tensor::zeros(work.valid_out_h, work.valid_out_w, classes);
            ms.labels.assign(static_cast<std::size_t>(work.valid_out_h) * work.valid_out_w, 0);
            for (int i = 0; i < work.valid_out_h; ++i) {
                double py = box.y0 + (i + 0.5) * box.height() / work.valid_out_h;
                int iy = std::clamp(static_cast<int>(py), 0, view.height - 1);
                for (int j = 0; j < work.valid_out_w; ++j) {
                    double px = box.x0 + (j + 0.5) * box.width() / work.valid_out_w;
                    int ix = std::clamp(static_cast<int>(px), 0, view.width - 1);
                    ms.labels[static_cast<std::size_t>(i) * work.valid_out_w + j] =
                        prep.labels[static_cast<std::size_t>(iy) * view.width + ix];
                    for (int c = 0; c < classes; ++c)
                        ms.probs.at(i, j, c) = work.trace.probs.at(i, j, c);
                }
            }
            work.sample = std::move(ms);
            roi_work.push_back(std::move(work));
        }

        std::vector<double> weights(static_cast<std::size_t>(classes), 1.0 / classes);
        std::vector<double> counts(static_cast<std::size_t>(classes), 0.0);
        for (const RoiWork& w : roi_work)
            for (std::uint8_t l : w.sample.labels)
                if (l > 0) counts[static_cast<std::size_t>(l - 1)] += 1.0;
        double count_total = std::accumulate(counts.begin(), counts.end(), 0.0);
        if (count_total > 0.0) weights = class_weights(counts);

        double l_mask = 0.0;
        Tensor grad_low_map = Tensor::zeros(trace.low.h, trace.low.w, trace.low.c);
        Tensor grad_high_map = Tensor::zeros(trace.high.h, trace.high.w, trace.high.c);
        if (!roi_work.empty()) {
            std::vector<MaskSample> batch;
            batch.reserve(roi_work.size());
            for (RoiWork& w : roi_work) batch.push_back(w.sample);
            l_mask = mask_loss(batch, weights, config.loss.lambda);
            std::vector<Tensor> logit_grads = mask_loss_logit_grad(batch, weights, config.loss.lambda);
            for (std::size_t r = 0; r < roi_work.size(); ++r) {
                RoiWork& w = roi_work[r];
                Tensor full_grad = Tensor::zeros(w.trace.probs.h, w.trace.probs.w, classes);
                for (int i = 0; i < w.valid_out_h; ++i)
                    for (int j = 0; j < w.valid_out_w; ++j)
                        for (int c = 0; c < classes; ++c)
                            full_grad.at(i, j, c) =
                                config.loss.gamma * logit_grads[r].at(i, j, c);
                Tensor grad_fused = mask_head_backward(w.trace, model, full_grad);
                Tensor grad_low_grid = model.mask_proj.backward(w.low.grid, grad_fused);
                nonwarp_roialign_backward(w.high, features.levels.back(), grad_fused, grad_high_map);
                nonwarp_roialign_backward(w.low, features.levels.front(), grad_low_grid, grad_low_map);
            }
        }

        Tensor det_grad_high = det_head_backward(det_trace, model, trace.high, grad_logits);
        for (std::size_t i = 0; i < grad_high_map.v.size(); ++i)
            grad_high_map.v[i] += det_grad_high.v[i];
        backbone_backward(trace, model, grad_low_map, grad_high_map);

        LossBreakdown breakdown = total_loss(l_class, l_box, l_mask, config.loss, weights);
        if (!std::isfinite(breakdown.l_total)) {
            restore(model, last_good);
            if (!options.checkpoint_dir.empty()) {
                fs::create_directories(options.checkpoint_dir);
                save_checkpoint(model, (fs::path(options.checkpoint_dir) / "last_good.ckpt").string(),
                                &config);
            }
            throw NumericError("training diverged at iteration " + std::to_string(iter) +
                               "; last good checkpoint restored");
        }

        auto params = model.params();
        apply_sgd_step(params, lr, config.weight_decay);
        model.zero_grad();
        last_good = snapshot(model);

        result.log.entries.push_back({iter, lr, breakdown.l_class, breakdown.l_box,
                                      breakdown.l_mask, breakdown.l_total});

        const bool eval_now = options.track_best && val && !val->empty() &&
                              config.eval_interval > 0 &&
                              ((iter + 1) % config.eval_interval == 0 || iter + 1 == config.total_iters);
        if (eval_now) {
            double v = validation_iou(model, *val, options.pipeline);
            if (v > result.best_iou || !have_best) {
                result.best_iou = v;
                result.best_iteration = iter;
                best = snapshot(model);
                have_best = true;
            }
        }
    }

    if (!options.checkpoint_dir.empty()) {
        fs::create_directories(options.checkpoint_dir);
        result.final_checkpoint = (fs::path(options.checkpoint_dir) / "final.ckpt").string();
        save_checkpoint(model, result.final_checkpoint, &config);
        ParamSnapshot current = snapshot(model);
        if (have_best) restore(model, best);
        result.best_checkpoint = (fs::path(options.checkpoint_dir) / "best.ckpt").string();
        save_checkpoint(model, result.best_checkpoint, &config);
        restore(model, current);
    }
    return result;
}

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x5346434bu; // "SFCK"
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void put(std::string& out, const T& v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw std::runtime_error("corrupted checkpoint: truncated");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

json checkpoint_meta(SegModel& model, const TrainConfig* train_config) {
    json meta;
    meta["arch"] = model.arch;
    meta["anchors"] = model.anchor_config;
    meta["arch_hash"] = model.arch_hash();
    if (train_config) meta["train"] = *train_config;
    return meta;
}

} // namespace

void save_checkpoint(SegModel& model, const std::string& path, const TrainConfig* train_config) {
    json meta = checkpoint_meta(model, train_config);
    std::string meta_str = meta.dump();

    std::string blob;
    put(blob, kCheckpointMagic);
    put(blob, kCheckpointVersion);
    put(blob, model.arch_hash());
    put(blob, static_cast<std::uint32_t>(meta_str.size()));
    blob += meta_str;
    auto params = model.params();
    put(blob, static_cast<std::uint32_t>(params.size()));
    for (ParamRef& p : params) {
        put(blob, static_cast<std::uint32_t>(p.name.size()));
        blob += p.name;
        put(blob, static_cast<std::uint64_t>(p.value->size()));
        blob.append(reinterpret_cast<const char*>(p.value->data()),
                    p.value->size() * sizeof(double));
    }
    put(blob, fnv1a(blob.data(), blob.size()));

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
    f.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    f.close();

    std::ofstream side(path + ".json");
    if (!side) throw std::runtime_error("cannot write checkpoint sidecar: " + path + ".json");
    side << meta.dump(2) << "\n";
}

std::unique_ptr<SegModel> load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read checkpoint: " + path);
    std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (blob.size() < sizeof(std::uint64_t) + 8) throw std::runtime_error("corrupted checkpoint: too short");

    const std::size_t payload = blob.size() - sizeof(std::uint64_t);
    std::uint64_t stored_sum;
    std::memcpy(&stored_sum, blob.data() + payload, sizeof(std::uint64_t));
    if (fnv1a(blob.data(), payload) != stored_sum)
        throw std::runtime_error("corrupted checkpoint: checksum mismatch in " + path);

    std::size_t pos = 0;
    if (take<std::uint32_t>(blob, pos) != kCheckpointMagic)
        throw std::runtime_error("corrupted checkpoint: bad magic in " + path);
    if (take<std::uint32_t>(blob, pos) != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version in " + path);
    std::uint64_t stored_hash = take<std::uint64_t>(blob, pos);
    std::uint32_t meta_len = take<std::uint32_t>(blob, pos);
    if (pos + meta_len > payload) throw std::runtime_error("corrupted checkpoint: truncated");
    json meta = json::parse(blob.substr(pos, meta_len));
    pos += meta_len;

    // Cross-check the sidecar when present: a tampered or stale sidecar must
    // not silently disagree with the weights.
    if (fs::exists(path + ".json")) {
        std::ifstream side(path + ".json");
        json side_meta = json::parse(side, nullptr, true);
        for (const char* section : {"arch", "anchors"}) {
            if (!side_meta.contains(section)) continue;
            for (auto& [key, value] : meta[section].items()) {
                if (side_meta[section].contains(key) && side_meta[section][key] != value)
                    throw std::runtime_error(std::string("checkpoint sidecar mismatch: ") + section +
                                             "." + key);
            }
        }
    }

    ArchConfig arch = meta.at("arch").get<ArchConfig>();
    AnchorConfig anchors = meta.at("anchors").get<AnchorConfig>();
    auto model = std::make_unique<SegModel>(arch, anchors, 0);
    if (model->arch_hash() != stored_hash)
        throw std::runtime_error("checkpoint architecture hash mismatch in " + path);

    std::uint32_t nparams = take<std::uint32_t>(blob, pos);
    auto params = model->params();
    if (nparams != params.size())
        throw std::runtime_error("corrupted checkpoint: parameter table size mismatch");
    for (ParamRef& p : params) {
        std::uint32_t name_len = take<std::uint32_t>(blob, pos);
        if (pos + name_len > payload) throw std::runtime_error("corrupted checkpoint: truncated");
        std::string name = blob.substr(pos, name_len);
        pos += name_len;
        if (name != p.name)
            throw std::runtime_error("checkpoint parameter order mismatch: expected " + p.name +
                                     ", found " + name);
        std::uint64_t count = take<std::uint64_t>(blob, pos);
        if (count != p.value->size())
            throw std::runtime_error("checkpoint parameter size mismatch for " + name);
        if (pos + count * sizeof(double) > payload)
            throw std::runtime_error("corrupted checkpoint: truncated");
        std::memcpy(p.value->data(), blob.data() + pos, count * sizeof(double));
        pos += count * sizeof(double);
    }
    return model;
}

} // namespace segfin
