#include "segfin/model.hpp"

#include <sstream>

namespace segfin {

std::string ArchConfig::signature() const {
    std::ostringstream os;
    os << "segfin-arch-v1|stem=" << stem_ch << "|low=" << low_ch << "|high=" << high_ch
       << "|det=" << det_ch << "|m1=" << mask_ch1 << "|m2=" << mask_ch2 << "|S=" << roi_canvas
       << "|C=" << mask_classes;
    return os.str();
}

SegModel::SegModel(ArchConfig arch_, AnchorConfig anchor_config_, std::uint64_t init_seed)
    : arch(arch_), anchor_config(anchor_config_),
      stem("stem", 1, arch.stem_ch, 3, 2, 1),
      down1("down1", arch.stem_ch, arch.low_ch, 3, 2, 1),
      a1("a1", arch.low_ch, arch.low_ch, 3, 1, 1),
      a2("a2", arch.low_ch, arch.low_ch, 3, 1, 1),
      down2("down2", arch.low_ch, arch.high_ch, 3, 2, 1),
      b1("b1", arch.high_ch, arch.high_ch, 3, 1, 1),
      b2("b2", arch.high_ch, arch.high_ch, 3, 1, 1),
      top("top", arch.high_ch, arch.high_ch, 3, 1, 1),
      det_conv("det_conv", arch.high_ch, arch.det_ch, 3, 1, 1),
      det_out("det_out", arch.det_ch, anchor_config_.per_cell() * (3 + 4), 1, 1, 0),
      mask_proj("mask_proj", arch.low_ch, arch.high_ch, 1, 1, 0),
      up1("up1", arch.high_ch, arch.mask_ch1, 3, 2, 1, 1, 1),
      up2("up2", arch.mask_ch1, arch.mask_ch2, 3, 2, 2, 2, 1),
      up3("up3", arch.mask_ch2, arch.mask_classes, 3, 1, 4, 4, 0) {
    Rng rng(init_seed);
    stem.init_he(rng);
    down1.init_he(rng);
    a1.init_he(rng);
    a2.init_he(rng);
    down2.init_he(rng);
    b1.init_he(rng);
    b2.init_he(rng);
    top.init_he(rng);
    det_conv.init_he(rng);
    det_out.init_he(rng);
    mask_proj.init_he(rng);
    up1.init_he(rng);
    up2.init_he(rng);
    up3.init_he(rng);
    // Bias the detector toward background so an untrained model emits no
    // confident detections.
    for (int a = 0; a < anchor_config.per_cell(); ++a) det_out.b[a * det_fields_per_anchor()] = 2.0;
}

std::uint64_t SegModel::arch_hash() const {
    return fnv1a(arch.signature() + "|" + anchor_config.signature());
}

std::vector<ParamRef> SegModel::params() {
    std::vector<ParamRef> out;
    stem.collect(out);
    down1.collect(out);
    a1.collect(out);
    a2.collect(out);
    down2.collect(out);
    b1.collect(out);
    b2.collect(out);
    top.collect(out);
    det_conv.collect(out);
    det_out.collect(out);
    mask_proj.collect(out);
    up1.collect(out);
    up2.collect(out);
    up3.collect(out);
    return out;
}

std::size_t SegModel::param_count() const {
    std::size_t n = 0;
    for (const ParamRef& p : const_cast<SegModel*>(this)->params()) n += p.value->size();
    return n;
}

void SegModel::zero_grad() {
    for (ParamRef& p : params()) std::fill(p.grad->begin(), p.grad->end(), 0.0);
}

void ensure_finite(const Tensor& t, const std::string& layer) {
    if (!t.finite()) throw NumericError("non-finite activations in layer: " + layer);
}

Tensor image_to_tensor(const LatentImage& img, int pad_multiple) {
    int ph = (img.height + pad_multiple - 1) / pad_multiple * pad_multiple;
    int pw = (img.width + pad_multiple - 1) / pad_multiple * pad_multiple;
    Tensor t = Tensor::zeros(ph, pw, 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) t.at(y, x, 0) = img.at(y, x) / 255.0;
    return t;
}

FeatureMaps backbone_forward_traced(const Tensor& in, const SegModel& model, BackboneTrace& trace) {
    trace.in = in;
    trace.s0 = relu(model.stem.forward(in));
    ensure_finite(trace.s0, "stem");
    trace.d1 = relu(model.down1.forward(trace.s0));
    ensure_finite(trace.d1, "down1");
    trace.r1 = relu(model.a1.forward(trace.d1));
    trace.low = relu(add(model.a2.forward(trace.r1), trace.d1));
    ensure_finite(trace.low, "block_a");
    trace.d2 = relu(model.down2.forward(trace.low));
    ensure_finite(trace.d2, "down2");
    trace.r2 = relu(model.b1.forward(trace.d2));
    trace.res2 = relu(add(model.b2.forward(trace.r2), trace.d2));
    ensure_finite(trace.res2, "block_b");
    trace.high = relu(model.top.forward(trace.res2));
    ensure_finite(trace.high, "top");

    FeatureMaps maps;
    maps.levels.push_back({4, trace.low});
    maps.levels.push_back({8, trace.high});
    return maps;
}

FeatureMaps backbone_forward(const LatentImage& img, const SegModel& model) {
    Tensor in = image_to_tensor(img, 8);
    BackboneTrace trace;
    FeatureMaps maps = backbone_forward_traced(in, model, trace);
    maps.image_h = img.height;
    maps.image_w = img.width;
    return maps;
}

void backbone_backward(const BackboneTrace& trace, SegModel& model, const Tensor& grad_low,
                       const Tensor& grad_high) {
    // high = relu(top(res2))
    Tensor g = relu_backward(trace.high, grad_high);
    Tensor g_res2 = model.top.backward(trace.res2, g);
    // res2 = relu(b2(r2) + d2)
    g = relu_backward(trace.res2, g_res2);
    Tensor g_r2 = model.b2.backward(trace.r2, g);
    Tensor g_d2 = g; // skip connection
    // r2 = relu(b1(d2))
    g_r2 = relu_backward(trace.r2, g_r2);
    {
        Tensor t = model.b1.backward(trace.d2, g_r2);
        for (std::size_t i = 0; i < g_d2.v.size(); ++i) g_d2.v[i] += t.v[i];
    }
    // d2 = relu(down2(low))
    g_d2 = relu_backward(trace.d2, g_d2);
    Tensor g_low = model.down2.backward(trace.low, g_d2);
    for (std::size_t i = 0; i < g_low.v.size(); ++i) g_low.v[i] += grad_low.v[i];
    // low = relu(a2(r1) + d1)
    g = relu_backward(trace.low, g_low);
    Tensor g_r1 = model.a2.backward(trace.r1, g);
    Tensor g_d1 = g;
    // r1 = relu(a1(d1))
    g_r1 = relu_backward(trace.r1, g_r1);
    {
        Tensor t = model.a1.backward(trace.d1, g_r1);
        for (std::size_t i = 0; i < g_d1.v.size(); ++i) g_d1.v[i] += t.v[i];
    }
    // d1 = relu(down1(s0))
    g_d1 = relu_backward(trace.d1, g_d1);
    Tensor g_s0 = model.down1.backward(trace.s0, g_d1);
    // s0 = relu(stem(in))
    g_s0 = relu_backward(trace.s0, g_s0);
    model.stem.backward(trace.in, g_s0);
}

Tensor det_head_forward(const SegModel& model, const Tensor& high) {
    Tensor hidden = relu(model.det_conv.forward(high));
    Tensor logits = model.det_out.forward(hidden);
    ensure_finite(logits, "det_out");
    return logits;
}

Tensor det_head_forward_traced(SegModel& model, const Tensor& high, DetHeadTrace& trace) {
    trace.hidden = relu(model.det_conv.forward(high));
    trace.logits = model.det_out.forward(trace.hidden);
    ensure_finite(trace.logits, "det_out");
    return trace.logits;
}

Tensor det_head_backward(const DetHeadTrace& trace, SegModel& model, const Tensor& high,
                         const Tensor& grad_logits) {
    Tensor g_hidden = model.det_out.backward(trace.hidden, grad_logits);
    g_hidden = relu_backward(trace.hidden, g_hidden);
    return model.det_conv.backward(high, g_hidden);
}

} // namespace segfin
