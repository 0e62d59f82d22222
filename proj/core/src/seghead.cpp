#include "segfin/seghead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segfin {

namespace {

struct RoiGeometry {
    double fx0, fy0, fw, fh; // box in feature coordinates
    int valid_h, valid_w;
};

RoiGeometry roi_geometry(const Box& box, int stride, int canvas) {
    RoiGeometry g;
    g.fx0 = box.x0 / stride - 0.5;
    g.fy0 = box.y0 / stride - 0.5;
    g.fw = box.width() / stride;
    g.fh = box.height() / stride;
    if (g.fw * g.fh < 1.0) throw std::invalid_argument("roi box smaller than one feature cell");
    if (g.fw >= g.fh) {
        g.valid_w = canvas;
        g.valid_h = std::clamp(static_cast<int>(std::lround(canvas * g.fh / g.fw)), 1, canvas);
    } else {
        g.valid_h = canvas;
        g.valid_w = std::clamp(static_cast<int>(std::lround(canvas * g.fw / g.fh)), 1, canvas);
    }
    return g;
}

} // namespace

RoIFeature nonwarp_roialign(const FeatureMaps::Level& level, const Box& box, int canvas) {
    if (canvas < 4) throw std::invalid_argument("roi canvas must be at least 4");
    RoiGeometry g = roi_geometry(box, level.stride, canvas);
    RoIFeature roi;
    roi.grid = Tensor::zeros(canvas, canvas, level.t.c);
    roi.valid_h = g.valid_h;
    roi.valid_w = g.valid_w;
    roi.source_box = box;
    roi.stride = level.stride;
    for (int i = 0; i < g.valid_h; ++i) {
        double sy = g.fy0 + (i + 0.5) * g.fh / g.valid_h;
        for (int j = 0; j < g.valid_w; ++j) {
            double sx = g.fx0 + (j + 0.5) * g.fw / g.valid_w;
            double* dst = roi.grid.cell(i, j);
            for (int c = 0; c < level.t.c; ++c) dst[c] = bilinear_sample(level.t, sx, sy, c);
        }
    }
    return roi;
}

void nonwarp_roialign_backward(const RoIFeature& roi, const FeatureMaps::Level& level,
                               const Tensor& grad_grid, Tensor& grad_level) {
    RoiGeometry g = roi_geometry(roi.source_box, level.stride, roi.grid.h);
    for (int i = 0; i < g.valid_h; ++i) {
        double sy = std::clamp(g.fy0 + (i + 0.5) * g.fh / g.valid_h, 0.0, static_cast<double>(level.t.h - 1));
        int y0 = static_cast<int>(std::floor(sy));
        int y1 = std::min(y0 + 1, level.t.h - 1);
        double fy = sy - y0;
        for (int j = 0; j < g.valid_w; ++j) {
            double sx = std::clamp(g.fx0 + (j + 0.5) * g.fw / g.valid_w, 0.0, static_cast<double>(level.t.w - 1));
            int x0 = static_cast<int>(std::floor(sx));
            int x1 = std::min(x0 + 1, level.t.w - 1);
            double fx = sx - x0;
            const double* gsrc = grad_grid.cell(i, j);
            double* g00 = grad_level.cell(y0, x0);
            double* g01 = grad_level.cell(y0, x1);
            double* g10 = grad_level.cell(y1, x0);
            double* g11 = grad_level.cell(y1, x1);
            for (int c = 0; c < grad_grid.c; ++c) {
                double gv = gsrc[c];
                g00[c] += (1 - fy) * (1 - fx) * gv;
                g01[c] += (1 - fy) * fx * gv;
                g10[c] += fy * (1 - fx) * gv;
                g11[c] += fy * fx * gv;
            }
        }
    }
}

RoIFeature fuse_multiscale(const RoIFeature& high_level, const RoIFeature& low_level,
                           const SegModel& model) {
    if (high_level.grid.h != low_level.grid.h || high_level.grid.w != low_level.grid.w)
        throw std::invalid_argument("fuse_multiscale: canvas size mismatch");
    Tensor projected = model.mask_proj.forward(low_level.grid);
    RoIFeature fused = high_level;
    fused.grid = add(high_level.grid, projected);
    return fused;
}

Tensor mask_head_forward_traced(const RoIFeature& fused, SegModel& model, MaskHeadTrace& trace) {
    trace.fused = fused.grid;
    trace.u1 = model.up1.forward(trace.fused);
    trace.u1r = relu(trace.u1);
    trace.u2 = model.up2.forward(trace.u1r);
    trace.u2r = relu(trace.u2);
    Tensor logits = model.up3.forward(trace.u2r);
    ensure_finite(logits, "up3");
    trace.probs = sigmoid(logits);
    return logits;
}

Tensor mask_head_backward(const MaskHeadTrace& trace, SegModel& model, const Tensor& grad_logits) {
    Tensor g = model.up3.backward(trace.u2r, grad_logits);
    g = relu_backward(trace.u2r, g);
    g = model.up2.backward(trace.u1r, g);
    g = relu_backward(trace.u1r, g);
    return model.up1.backward(trace.fused, g);
}

std::vector<RoIMask> atrous_upsample(const RoIFeature& fused, const SegModel& model) {
    MaskHeadTrace trace;
    mask_head_forward_traced(fused, const_cast<SegModel&>(model), trace);
    const Tensor& probs = trace.probs;
    std::vector<RoIMask> out(static_cast<std::size_t>(probs.c));
    for (int c = 0; c < probs.c; ++c) {
        RoIMask& m = out[c];
        m.probabilities = ScoreMap::zeros(probs.h, probs.w);
        for (int y = 0; y < probs.h; ++y)
            for (int x = 0; x < probs.w; ++x) m.probabilities.at(y, x) = probs.at(y, x, c);
        m.valid_h = std::min(4 * fused.valid_h, probs.h);
        m.valid_w = std::min(4 * fused.valid_w, probs.w);
        m.source_box = fused.source_box;
    }
    return out;
}

ScoreMap paste_mask(const RoIMask& mask, int image_h, int image_w) {
    ScoreMap out = ScoreMap::zeros(image_h, image_w);
    const Box& b = mask.source_box;
    int rx0 = std::clamp(static_cast<int>(std::lround(b.x0)), 0, image_w);
    int rx1 = std::clamp(static_cast<int>(std::lround(b.x1)), 0, image_w);
    int ry0 = std::clamp(static_cast<int>(std::lround(b.y0)), 0, image_h);
    int ry1 = std::clamp(static_cast<int>(std::lround(b.y1)), 0, image_h);
    if (rx1 <= rx0 || ry1 <= ry0) return out;
    const int vh = mask.valid_h, vw = mask.valid_w;
    for (int py = ry0; py < ry1; ++py) {
        double u = (py + 0.5 - b.y0) / b.height() * vh - 0.5;
        double cu = std::clamp(u, 0.0, static_cast<double>(vh - 1));
        int y0 = static_cast<int>(std::floor(cu));
        int y1 = std::min(y0 + 1, vh - 1);
        double fy = cu - y0;
        for (int px = rx0; px < rx1; ++px) {
            double v = (px + 0.5 - b.x0) / b.width() * vw - 0.5;
            double cv = std::clamp(v, 0.0, static_cast<double>(vw - 1));
            int x0 = static_cast<int>(std::floor(cv));
            int x1 = std::min(x0 + 1, vw - 1);
            double fx = cv - x0;
            double val = (1 - fy) * ((1 - fx) * mask.probabilities.at(y0, x0) +
                                     fx * mask.probabilities.at(y0, x1)) +
                         fy * ((1 - fx) * mask.probabilities.at(y1, x0) +
                               fx * mask.probabilities.at(y1, x1));
            out.at(py, px) = val;
        }
    }
    return out;
}

} // namespace segfin
