#include "segfin/net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segfin {

bool Tensor::finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double bilinear_sample(const Tensor& t, double x, double y, int ch) {
    double cxf = std::clamp(x, 0.0, static_cast<double>(t.w - 1));
    double cyf = std::clamp(y, 0.0, static_cast<double>(t.h - 1));
    int x0 = static_cast<int>(std::floor(cxf));
    int y0 = static_cast<int>(std::floor(cyf));
    int x1 = std::min(x0 + 1, t.w - 1);
    int y1 = std::min(y0 + 1, t.h - 1);
    double fx = cxf - x0;
    double fy = cyf - y0;
    double v00 = t.at(y0, x0, ch), v01 = t.at(y0, x1, ch);
    double v10 = t.at(y1, x0, ch), v11 = t.at(y1, x1, ch);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * ((1.0 - fx) * v10 + fx * v11);
}

Conv2d::Conv2d(std::string name_, int in_ch_, int out_ch_, int kernel_, int stride_, int pad_)
    : name(std::move(name_)), in_ch(in_ch_), out_ch(out_ch_), kernel(kernel_), stride(stride_), pad(pad_) {
    w.assign(static_cast<std::size_t>(kernel) * kernel * in_ch * out_ch, 0.0);
    b.assign(out_ch, 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
}

void Conv2d::init_he(Rng& rng) {
    double scale = std::sqrt(2.0 / (static_cast<double>(kernel) * kernel * in_ch));
    for (auto& x : w) x = rng.normal() * scale;
    std::fill(b.begin(), b.end(), 0.0);
}

void Conv2d::zero_grad() {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
}

void Conv2d::collect(std::vector<ParamRef>& out) {
    out.push_back({name + ".w", &w, &gw});
    out.push_back({name + ".b", &b, &gb});
}

Tensor Conv2d::forward(const Tensor& in) const {
    if (in.c != in_ch) throw std::invalid_argument(name + ": channel mismatch");
    Tensor out = Tensor::zeros(out_h(in.h), out_w(in.w), out_ch);
    std::vector<double> acc(out_ch);
    for (int oy = 0; oy < out.h; ++oy) {
        for (int ox = 0; ox < out.w; ++ox) {
            std::copy(b.begin(), b.end(), acc.begin());
            for (int ky = 0; ky < kernel; ++ky) {
                int iy = oy * stride - pad + ky;
                if (iy < 0 || iy >= in.h) continue;
                for (int kx = 0; kx < kernel; ++kx) {
                    int ix = ox * stride - pad + kx;
                    if (ix < 0 || ix >= in.w) continue;
                    const double* src = in.cell(iy, ix);
                    const double* wk = w.data() + (static_cast<std::size_t>(ky) * kernel + kx) * in_ch * out_ch;
                    for (int ci = 0; ci < in_ch; ++ci) {
                        double s = src[ci];
                        const double* wrow = wk + static_cast<std::size_t>(ci) * out_ch;
                        for (int co = 0; co < out_ch; ++co) acc[co] += s * wrow[co];
                    }
                }
            }
            std::copy(acc.begin(), acc.end(), out.cell(oy, ox));
        }
    }
    return out;
}

Tensor Conv2d::backward(const Tensor& in, const Tensor& grad_out) {
    Tensor gin = Tensor::zeros(in.h, in.w, in.c);
    for (int oy = 0; oy < grad_out.h; ++oy) {
        for (int ox = 0; ox < grad_out.w; ++ox) {
            const double* go = grad_out.cell(oy, ox);
            for (int co = 0; co < out_ch; ++co) gb[co] += go[co];
            for (int ky = 0; ky < kernel; ++ky) {
                int iy = oy * stride - pad + ky;
                if (iy < 0 || iy >= in.h) continue;
                for (int kx = 0; kx < kernel; ++kx) {
                    int ix = ox * stride - pad + kx;
                    if (ix < 0 || ix >= in.w) continue;
                    const double* src = in.cell(iy, ix);
                    double* gi = gin.cell(iy, ix);
                    std::size_t base = (static_cast<std::size_t>(ky) * kernel + kx) * in_ch * out_ch;
                    for (int ci = 0; ci < in_ch; ++ci) {
                        const double* wrow = w.data() + base + static_cast<std::size_t>(ci) * out_ch;
                        double* gwrow = gw.data() + base + static_cast<std::size_t>(ci) * out_ch;
                        double s = src[ci];
                        double acc = 0.0;
                        for (int co = 0; co < out_ch; ++co) {
                            acc += wrow[co] * go[co];
                            gwrow[co] += s * go[co];
                        }
                        gi[ci] += acc;
                    }
                }
            }
        }
    }
    return gin;
}

TConv2d::TConv2d(std::string name_, int in_ch_, int out_ch_, int kernel_, int stride_, int pad_,
                 int dilation_, int out_pad_)
    : name(std::move(name_)), in_ch(in_ch_), out_ch(out_ch_), kernel(kernel_), stride(stride_),
      pad(pad_), dilation(dilation_), out_pad(out_pad_) {
    w.assign(static_cast<std::size_t>(kernel) * kernel * in_ch * out_ch, 0.0);
    b.assign(out_ch, 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
}

void TConv2d::init_he(Rng& rng) {
    double scale = std::sqrt(2.0 / (static_cast<double>(kernel) * kernel * in_ch));
    for (auto& x : w) x = rng.normal() * scale;
    std::fill(b.begin(), b.end(), 0.0);
}

void TConv2d::zero_grad() {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
}

void TConv2d::collect(std::vector<ParamRef>& out) {
    out.push_back({name + ".w", &w, &gw});
    out.push_back({name + ".b", &b, &gb});
}

Tensor TConv2d::forward(const Tensor& in) const {
    if (in.c != in_ch) throw std::invalid_argument(name + ": channel mismatch");
    Tensor out = Tensor::zeros(out_h(in.h), out_w(in.w), out_ch);
    for (std::size_t i = 0; i < out.v.size(); i += out_ch)
        for (int co = 0; co < out_ch; ++co) out.v[i + co] = b[co];
    for (int iy = 0; iy < in.h; ++iy) {
        for (int ix = 0; ix < in.w; ++ix) {
            const double* src = in.cell(iy, ix);
            for (int ky = 0; ky < kernel; ++ky) {
                int oy = iy * stride - pad + ky * dilation;
                if (oy < 0 || oy >= out.h) continue;
                for (int kx = 0; kx < kernel; ++kx) {
                    int ox = ix * stride - pad + kx * dilation;
                    if (ox < 0 || ox >= out.w) continue;
                    double* dst = out.cell(oy, ox);
                    const double* wk = w.data() + (static_cast<std::size_t>(ky) * kernel + kx) * in_ch * out_ch;
                    for (int ci = 0; ci < in_ch; ++ci) {
                        double s = src[ci];
                        const double* wrow = wk + static_cast<std::size_t>(ci) * out_ch;
                        for (int co = 0; co < out_ch; ++co) dst[co] += s * wrow[co];
                    }
                }
            }
        }
    }
    return out;
}

Tensor TConv2d::backward(const Tensor& in, const Tensor& grad_out) {
    Tensor gin = Tensor::zeros(in.h, in.w, in.c);
    for (std::size_t i = 0; i < grad_out.v.size(); i += out_ch)
        for (int co = 0; co < out_ch; ++co) gb[co] += grad_out.v[i + co];
    for (int iy = 0; iy < in.h; ++iy) {
        for (int ix = 0; ix < in.w; ++ix) {
            const double* src = in.cell(iy, ix);
            double* gi = gin.cell(iy, ix);
            for (int ky = 0; ky < kernel; ++ky) {
                int oy = iy * stride - pad + ky * dilation;
                if (oy < 0 || oy >= grad_out.h) continue;
                for (int kx = 0; kx < kernel; ++kx) {
                    int ox = ix * stride - pad + kx * dilation;
                    if (ox < 0 || ox >= grad_out.w) continue;
                    const double* go = grad_out.cell(oy, ox);
                    std::size_t base = (static_cast<std::size_t>(ky) * kernel + kx) * in_ch * out_ch;
                    for (int ci = 0; ci < in_ch; ++ci) {
                        const double* wrow = w.data() + base + static_cast<std::size_t>(ci) * out_ch;
                        double* gwrow = gw.data() + base + static_cast<std::size_t>(ci) * out_ch;
                        double s = src[ci];
                        double acc = 0.0;
                        for (int co = 0; co < out_ch; ++co) {
                            acc += wrow[co] * go[co];
                            gwrow[co] += s * go[co];
                        }
                        gi[ci] += acc;
                    }
                }
            }
        }
    }
    return gin;
}

Tensor relu(const Tensor& in) {
    Tensor out = in;
    for (auto& x : out.v) x = x > 0.0 ? x : 0.0;
    return out;
}

Tensor relu_backward(const Tensor& out, const Tensor& grad_out) {
    Tensor g = grad_out;
    for (std::size_t i = 0; i < g.v.size(); ++i)
        if (out.v[i] <= 0.0) g.v[i] = 0.0;
    return g;
}

Tensor sigmoid(const Tensor& in) {
    Tensor out = in;
    for (auto& x : out.v) x = 1.0 / (1.0 + std::exp(-x));
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (a.h != b.h || a.w != b.w || a.c != b.c) throw std::invalid_argument("tensor shape mismatch in add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
    return out;
}

} // namespace segfin
