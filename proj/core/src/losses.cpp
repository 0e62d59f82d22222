#include "segfin/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segfin {

namespace {

constexpr double kProbEps = 1e-7;

double clamp_prob(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

double bce(double p, double t) {
    double q = clamp_prob(p);
    return -(t * std::log(q) + (1.0 - t) * std::log(1.0 - q));
}

double bce_grad(double p, double t) {
    if (p <= kProbEps || p >= 1.0 - kProbEps) return 0.0; // clamp plateau
    return (p - t) / (p * (1.0 - p));
}

} // namespace

std::vector<double> class_weights(const std::vector<double>& pixel_counts) {
    if (pixel_counts.empty()) throw std::invalid_argument("class_weights: no classes");
    double total = 0.0;
    for (double n : pixel_counts) {
        if (n < 0.0) throw std::invalid_argument("class_weights: negative count");
        total += n;
    }
    if (total <= 0.0) throw std::invalid_argument("class_weights: all counts zero");
    std::vector<double> score(pixel_counts.size());
    double mx = -1e300;
    for (std::size_t j = 0; j < pixel_counts.size(); ++j) {
        score[j] = 1.0 - pixel_counts[j] / total;
        mx = std::max(mx, score[j]);
    }
    double sum = 0.0;
    for (double& s : score) {
        s = std::exp(s - mx);
        sum += s;
    }
    for (double& s : score) s /= sum;
    return score;
}

double mask_loss(const std::vector<MaskSample>& samples, const std::vector<double>& weights,
                 double lambda) {
    const int classes = static_cast<int>(weights.size());
    double total = 0.0;
    for (const MaskSample& s : samples) {
        if (s.probs.c != classes) throw std::invalid_argument("mask_loss: class count mismatch");
        const std::size_t n = static_cast<std::size_t>(s.probs.h) * s.probs.w;
        if (s.labels.size() != n) throw std::invalid_argument("mask_loss: label grid size mismatch");
        for (int j = 1; j <= classes; ++j) {
            double partial = 0.0;
            std::size_t included = 0;
            double bg_term = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double p = s.probs.v[i * classes + (j - 1)];
                int label = s.labels[i];
                if (label == j || label == 0) {
                    partial += bce(p, label == j ? 1.0 : 0.0);
                    ++included;
                }
                bg_term += bce(p, label != 0 ? 1.0 : 0.0);
            }
            if (included > 0) total += weights[j - 1] * partial / static_cast<double>(included);
            total += lambda * bg_term / static_cast<double>(n);
        }
    }
    return total;
}

std::vector<Tensor> mask_loss_grad(const std::vector<MaskSample>& samples,
                                   const std::vector<double>& weights, double lambda) {
    const int classes = static_cast<int>(weights.size());
    std::vector<Tensor> grads;
    grads.reserve(samples.size());
    for (const MaskSample& s : samples) {
        Tensor g = Tensor::zeros(s.probs.h, s.probs.w, s.probs.c);
        const std::size_t n = static_cast<std::size_t>(s.probs.h) * s.probs.w;
        for (int j = 1; j <= classes; ++j) {
            std::size_t included = 0;
            for (std::size_t i = 0; i < n; ++i) {
                int label = s.labels[i];
                if (label == j || label == 0) ++included;
            }
            for (std::size_t i = 0; i < n; ++i) {
                double p = s.probs.v[i * classes + (j - 1)];
                int label = s.labels[i];
                double& gv = g.v[i * classes + (j - 1)];
                if ((label == j || label == 0) && included > 0)
                    gv += weights[j - 1] * bce_grad(p, label == j ? 1.0 : 0.0) /
                          static_cast<double>(included);
                gv += lambda * bce_grad(p, label != 0 ? 1.0 : 0.0) / static_cast<double>(n);
            }
        }
        grads.push_back(std::move(g));
    }
    return grads;
}

std::vector<Tensor> mask_loss_logit_grad(const std::vector<MaskSample>& samples,
                                         const std::vector<double>& weights, double lambda) {
    const int classes = static_cast<int>(weights.size());
    std::vector<Tensor> grads;
    grads.reserve(samples.size());
    for (const MaskSample& s : samples) {
        Tensor g = Tensor::zeros(s.probs.h, s.probs.w, s.probs.c);
        const std::size_t n = static_cast<std::size_t>(s.probs.h) * s.probs.w;
        for (int j = 1; j <= classes; ++j) {
            std::size_t included = 0;
            for (std::size_t i = 0; i < n; ++i) {
                int label = s.labels[i];
                if (label == j || label == 0) ++included;
            }
            for (std::size_t i = 0; i < n; ++i) {
                double p = s.probs.v[i * classes + (j - 1)];
                int label = s.labels[i];
                double& gv = g.v[i * classes + (j - 1)];
                if ((label == j || label == 0) && included > 0)
                    gv += weights[j - 1] * (p - (label == j ? 1.0 : 0.0)) /
                          static_cast<double>(included);
                gv += lambda * (p - (label != 0 ? 1.0 : 0.0)) / static_cast<double>(n);
            }
        }
        grads.push_back(std::move(g));
    }
    return grads;
}

double smooth_l1(double x) {
    double a = std::fabs(x);
    return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1_grad(double x) {
    if (x > 1.0) return 1.0;
    if (x < -1.0) return -1.0;
    return x;
}

std::pair<double, double> detection_losses(const std::vector<RoiLossSample>& samples) {
    if (samples.empty()) return {0.0, 0.0};
    double l_class = 0.0;
    double l_box = 0.0;
    std::size_t positives = 0;
    for (const RoiLossSample& s : samples) {
        l_class += -std::log(clamp_prob(s.class_probs[static_cast<std::size_t>(s.target_class)]));
        if (s.positive) {
            ++positives;
            for (int d = 0; d < 4; ++d) l_box += smooth_l1(s.delta_pred[d] - s.delta_target[d]);
        }
    }
    l_class /= static_cast<double>(samples.size());
    if (positives > 0) l_box /= static_cast<double>(positives);
    return {l_class, l_box};
}

LossBreakdown total_loss(double l_class, double l_box, double l_mask, const LossConfig& config,
                         std::vector<double> weights) {
    if (!std::isfinite(l_class) || !std::isfinite(l_box) || !std::isfinite(l_mask))
        throw NumericError("total_loss: non-finite component");
    LossBreakdown out;
    out.l_class = l_class;
    out.l_box = l_box;
    out.l_mask = l_mask;
    out.l_total = config.alpha * l_class + config.beta * l_box + config.gamma * l_mask;
    out.class_weights = std::move(weights);
    return out;
}

} // namespace segfin
