#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segfin/common.hpp"

namespace segfin {

/// Dense 3-D activation grid, HWC layout with channels innermost.
struct Tensor {
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<double> v;

    static Tensor zeros(int h, int w, int c) {
        return Tensor{h, w, c, std::vector<double>(static_cast<std::size_t>(h) * w * c, 0.0)};
    }
    std::size_t size() const { return v.size(); }
    double at(int y, int x, int ch) const { return v[(static_cast<std::size_t>(y) * w + x) * c + ch]; }
    double& at(int y, int x, int ch) { return v[(static_cast<std::size_t>(y) * w + x) * c + ch]; }
    const double* cell(int y, int x) const { return v.data() + (static_cast<std::size_t>(y) * w + x) * c; }
    double* cell(int y, int x) { return v.data() + (static_cast<std::size_t>(y) * w + x) * c; }
    bool finite() const;
};

/// Edge-clamped bilinear sample of channel ch at continuous (x, y); cell
/// values live at integer coordinates.
double bilinear_sample(const Tensor& t, double x, double y, int ch);

/// Named view of a parameter vector and its gradient accumulator.
struct ParamRef {
    std::string name;
    std::vector<double>* value;
    std::vector<double>* grad;
};

/// Plain 2-D convolution. Weights laid out [ky][kx][cin][cout].
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride, int pad);

    Tensor forward(const Tensor& in) const;
    /// Accumulates weight/bias gradients and returns the input gradient.
    Tensor backward(const Tensor& in, const Tensor& grad_out);

    void init_he(Rng& rng);
    void zero_grad();
    void collect(std::vector<ParamRef>& out);

    int out_h(int in_h) const { return (in_h + 2 * pad - kernel) / stride + 1; }
    int out_w(int in_w) const { return (in_w + 2 * pad - kernel) / stride + 1; }

    std::string name;
    int in_ch = 0, out_ch = 0, kernel = 1, stride = 1, pad = 0;
    std::vector<double> w, b, gw, gb;
};

/// Transposed convolution with dilation, used by the atrous upsampling head.
/// Weights laid out [ky][kx][cin][cout].
class TConv2d {
public:
    TConv2d() = default;
    TConv2d(std::string name, int in_ch, int out_ch, int kernel, int stride, int pad,
            int dilation, int out_pad);

    Tensor forward(const Tensor& in) const;
    Tensor backward(const Tensor& in, const Tensor& grad_out);

    void init_he(Rng& rng);
    void zero_grad();
    void collect(std::vector<ParamRef>& out);

    int out_h(int in_h) const { return (in_h - 1) * stride - 2 * pad + dilation * (kernel - 1) + 1 + out_pad; }
    int out_w(int in_w) const { return (in_w - 1) * stride - 2 * pad + dilation * (kernel - 1) + 1 + out_pad; }

    std::string name;
    int in_ch = 0, out_ch = 0, kernel = 1, stride = 1, pad = 0, dilation = 1, out_pad = 0;
    std::vector<double> w, b, gw, gb;
};

Tensor relu(const Tensor& in);
/// grad_out masked by out > 0.
Tensor relu_backward(const Tensor& out, const Tensor& grad_out);
Tensor sigmoid(const Tensor& in);

Tensor add(const Tensor& a, const Tensor& b);

} // namespace segfin
