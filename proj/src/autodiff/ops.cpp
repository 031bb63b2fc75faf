// SPDX-License-Identifier: Apache-2.0

#include "voxforge/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>

#include "voxforge/error.hpp"
#include "voxforge/kernels/conv3d.hpp"
#include "voxforge/kernels/dense.hpp"

namespace voxforge::ad {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
}

void require_rank(const Tensor& a, std::size_t rank, const char* op) {
    if (a.rank() != rank) {
        throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " + shape_str(a.shape()));
    }
}

bool wants(const std::shared_ptr<Node>& p) { return p && p->requires_grad; }

// y = f(x) elementwise; dfdx(x, y) is the local derivative.
template <typename F, typename D>
Tensor unary(const Tensor& a, F f, D dfdx) {
    std::vector<double> out(a.numel());
    const auto x = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
    return make_result(a.shape(), std::move(out), {a}, [dfdx](Node& self) {
        Node& in = *self.parents[0];
        for (std::size_t i = 0; i < self.grad.size(); ++i) in.grad[i] += self.grad[i] * dfdx(in.data[i], self.data[i]);
    });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
        for (int k = 0; k < 2; ++k) {
            if (!wants(self.parents[k])) continue;
            auto& g = self.parents[k]->grad;
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
        if (wants(self.parents[0])) {
            auto& g = self.parents[0]->grad;
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
        if (wants(self.parents[1])) {
            auto& g = self.parents[1]->grad;
            for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
        Node& x = *self.parents[0];
        Node& y = *self.parents[1];
        if (wants(self.parents[0])) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) x.grad[i] += self.grad[i] * y.data[i];
        }
        if (wants(self.parents[1])) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) y.grad[i] += self.grad[i] * x.data[i];
        }
    });
}

Tensor minimum(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "minimum");
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(a.data()[i], b.data()[i]);
    return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
        Node& x = *self.parents[0];
        Node& y = *self.parents[1];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            const bool take_a = x.data[i] <= y.data[i];
            if (take_a && wants(self.parents[0])) x.grad[i] += self.grad[i];
            if (!take_a && wants(self.parents[1])) y.grad[i] += self.grad[i];
        }
    });
}

Tensor scale(const Tensor& a, double s) {
    return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& a, double s) {
    return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor relu(const Tensor& a) {
    return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
    return unary(
        a,
        [](double x) {
            if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
            const double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
    return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor exp(const Tensor& a) {
    return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
    return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor square(const Tensor& a) {
    return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor abs(const Tensor& a) {
    return unary(
        a, [](double x) { return std::abs(x); },
        [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
    return unary(
        a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
        [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& a) {
    double total = 0.0;
    for (double v : a.data()) total += v;
    return make_result({}, {total}, {a}, [](Node& self) {
        auto& g = self.parents[0]->grad;
        for (auto& v : g) v += self.grad[0];
    });
}

Tensor mean(const Tensor& a) {
    const double n = static_cast<double>(a.numel());
    return scale(sum(a), 1.0 / n);
}

Tensor row_sum(const Tensor& a) {
    require_rank(a, 2, "row_sum");
    const std::size_t n = a.dim(0);
    const std::size_t m = a.dim(1);
    std::vector<double> out(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) out[r] += a.data()[r * m + c];
    return make_result({n}, std::move(out), {a}, [m](Node& self) {
        auto& g = self.parents[0]->grad;
        for (std::size_t r = 0; r < self.grad.size(); ++r)
            for (std::size_t c = 0; c < m; ++c) g[r * m + c] += self.grad[r];
    });
}

Tensor expand_rows(const Tensor& a, std::size_t n) {
    require_rank(a, 1, "expand_rows");
    const std::size_t m = a.dim(0);
    std::vector<double> out(n * m);
    for (std::size_t r = 0; r < n; ++r) std::copy(a.data().begin(), a.data().end(), out.begin() + r * m);
    return make_result({n, m}, std::move(out), {a}, [n, m](Node& self) {
        auto& g = self.parents[0]->grad;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m; ++c) g[c] += self.grad[r * m + c];
    });
}

Tensor reshape(const Tensor& a, Shape shape) {
    if (shape_numel(shape) != a.numel()) {
        throw ShapeError("reshape: " + shape_str(a.shape()) + " cannot become " + shape_str(shape));
    }
    std::vector<double> out(a.data().begin(), a.data().end());
    return make_result(std::move(shape), std::move(out), {a}, [](Node& self) {
        auto& g = self.parents[0]->grad;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols: nothing to concatenate");
    const std::size_t n = parts[0].dim(0);
    std::vector<std::size_t> widths;
    std::size_t total = 0;
    for (const auto& p : parts) {
        require_rank(p, 2, "concat_cols");
        if (p.dim(0) != n) throw ShapeError("concat_cols: row count mismatch");
        widths.push_back(p.dim(1));
        total += p.dim(1);
    }
    std::vector<double> out(n * total);
    std::size_t off = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < widths[k]; ++c) out[r * total + off + c] = parts[k].data()[r * widths[k] + c];
        off += widths[k];
    }
    return make_result({n, total}, std::move(out), parts, [n, total, widths](Node& self) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < widths.size(); ++k) {
            if (wants(self.parents[k])) {
                auto& g = self.parents[k]->grad;
                for (std::size_t r = 0; r < n; ++r)
                    for (std::size_t c = 0; c < widths[k]; ++c) g[r * widths[k] + c] += self.grad[r * total + off + c];
            }
            off += widths[k];
        }
    });
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
    require_rank(a, 2, "slice_cols");
    const std::size_t n = a.dim(0);
    const std::size_t m = a.dim(1);
    if (begin > end || end > m) throw ShapeError("slice_cols: range out of bounds");
    const std::size_t w = end - begin;
    std::vector<double> out(n * w);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < w; ++c) out[r * w + c] = a.data()[r * m + begin + c];
    return make_result({n, w}, std::move(out), {a}, [n, m, w, begin](Node& self) {
        auto& g = self.parents[0]->grad;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < w; ++c) g[r * m + begin + c] += self.grad[r * w + c];
    });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    require_rank(x, 2, "linear");
    require_rank(weight, 2, "linear");
    const std::size_t n = x.dim(0);
    const std::size_t in = x.dim(1);
    const std::size_t out = weight.dim(0);
    if (weight.dim(1) != in) {
        throw ShapeError("linear: input " + shape_str(x.shape()) + " incompatible with weight " +
                         shape_str(weight.shape()));
    }
    if (bias.defined() && bias.shape() != Shape{out}) throw ShapeError("linear: bias must be [out]");
    std::vector<double> y(n * out);
    kernels::parallel::linear_forward(n, in, out, x.data(), weight.data(),
                                      bias.defined() ? bias.data() : std::span<const double>{}, y);
    return make_result({n, out}, std::move(y), {x, weight, bias}, [n, in, out](Node& self) {
        const auto& px = self.parents[0];
        const auto& pw = self.parents[1];
        const auto& pb = self.parents[2];
        kernels::parallel::linear_backward(n, in, out, px->data, pw->data, self.grad,
                                           wants(px) ? std::span<double>(px->grad) : std::span<double>{},
                                           wants(pw) ? std::span<double>(pw->grad) : std::span<double>{},
                                           wants(pb) ? std::span<double>(pb->grad) : std::span<double>{});
    });
}

namespace {

kernels::ConvGeometry conv_geometry(const Shape& in, const Shape& kernel, int stride, int padding) {
    if (kernel[2] != kernel[3] || kernel[3] != kernel[4]) throw ShapeError("conv3d: kernel must be cubic");
    kernels::ConvGeometry g;
    g.batch = in[0];
    g.c_in = in[1];
    g.d = static_cast<int>(in[2]);
    g.h = static_cast<int>(in[3]);
    g.w = static_cast<int>(in[4]);
    g.c_out = kernel[0];
    g.k = static_cast<int>(kernel[2]);
    g.stride = stride;
    g.pad = padding;
    g.validate();
    return g;
}

}  // namespace

Tensor conv3d(const Tensor& input, const Tensor& kernel, const Tensor& bias, int stride, int padding) {
    require_rank(input, 5, "conv3d");
    require_rank(kernel, 5, "conv3d");
    if (kernel.dim(1) != input.dim(1)) {
        throw ShapeError("conv3d: input channels " + std::to_string(input.dim(1)) + " vs kernel " +
                         shape_str(kernel.shape()));
    }
    if (bias.defined() && bias.shape() != Shape{kernel.dim(0)}) throw ShapeError("conv3d: bias must be [f]");
    const auto g = conv_geometry(input.shape(), kernel.shape(), stride, padding);
    std::vector<double> y(g.output_size());
    kernels::parallel::conv3d_forward(g, input.data(), kernel.data(),
                                      bias.defined() ? bias.data() : std::span<const double>{}, y);
    Shape out{g.batch, g.c_out, static_cast<std::size_t>(g.od()), static_cast<std::size_t>(g.oh()),
              static_cast<std::size_t>(g.ow())};
    return make_result(std::move(out), std::move(y), {input, kernel, bias}, [g](Node& self) {
        const auto& px = self.parents[0];
        const auto& pw = self.parents[1];
        const auto& pb = self.parents[2];
        if (wants(px)) {
            std::vector<double> gx(g.input_size());
            kernels::parallel::conv3d_backward_input(g, self.grad, pw->data, gx);
            for (std::size_t i = 0; i < gx.size(); ++i) px->grad[i] += gx[i];
        }
        if (wants(pw) || wants(pb)) {
            std::vector<double> scratch_w;
            std::span<double> gw;
            if (wants(pw)) {
                gw = pw->grad;
            } else {
                scratch_w.assign(g.weight_size(), 0.0);
                gw = scratch_w;
            }
            kernels::parallel::conv3d_backward_weight(g, px->data, self.grad, gw,
                                                      wants(pb) ? std::span<double>(pb->grad) : std::span<double>{});
        }
    });
}

Tensor conv3d_transpose(const Tensor& input, const Tensor& kernel, const Tensor& bias, int stride, int padding) {
    require_rank(input, 5, "conv3d_transpose");
    require_rank(kernel, 5, "conv3d_transpose");
    if (kernel.dim(0) != input.dim(1)) {
        throw ShapeError("conv3d_transpose: input channels " + std::to_string(input.dim(1)) + " vs kernel " +
                         shape_str(kernel.shape()));
    }
    const auto k = static_cast<int>(kernel.dim(2));
    const std::size_t c_out = kernel.dim(1);
    if (bias.defined() && bias.shape() != Shape{c_out}) throw ShapeError("conv3d_transpose: bias must be [c_out]");
    Shape out{input.dim(0), c_out};
    for (std::size_t a = 2; a < 5; ++a) {
        const int e = kernels::transposed_extent(static_cast<int>(input.dim(a)), k, stride, padding);
        if (e < 1) throw ShapeError("conv3d_transpose: non-positive output extent");
        out.push_back(static_cast<std::size_t>(e));
    }
    // The equivalent forward convolution maps `out` back to `input`.
    kernels::ConvGeometry g;
    g.batch = out[0];
    g.c_in = c_out;
    g.c_out = kernel.dim(0);
    g.d = static_cast<int>(out[2]);
    g.h = static_cast<int>(out[3]);
    g.w = static_cast<int>(out[4]);
    g.k = k;
    g.stride = stride;
    g.pad = padding;
    g.validate();
    if (static_cast<std::size_t>(g.od()) != input.dim(2) || static_cast<std::size_t>(g.oh()) != input.dim(3) ||
        static_cast<std::size_t>(g.ow()) != input.dim(4)) {
        throw ShapeError("conv3d_transpose: geometry is not invertible for this stride/padding");
    }
    std::vector<double> y(g.input_size());
    kernels::parallel::conv3d_backward_input(g, input.data(), kernel.data(), y);
    if (bias.defined()) {
        const std::size_t vol = y.size() / (g.batch * c_out);
        for (std::size_t n = 0; n < g.batch; ++n)
            for (std::size_t c = 0; c < c_out; ++c)
                for (std::size_t i = 0; i < vol; ++i) y[(n * c_out + c) * vol + i] += bias.data()[c];
    }
    return make_result(std::move(out), std::move(y), {input, kernel, bias}, [g, c_out](Node& self) {
        const auto& px = self.parents[0];
        const auto& pw = self.parents[1];
        const auto& pb = self.parents[2];
        if (wants(px)) {
            std::vector<double> gx(g.output_size());
            kernels::parallel::conv3d_forward(g, self.grad, pw->data, {}, gx);
            for (std::size_t i = 0; i < gx.size(); ++i) px->grad[i] += gx[i];
        }
        if (wants(pw)) kernels::parallel::conv3d_backward_weight(g, self.grad, px->data, pw->grad, {});
        if (wants(pb)) {
            const std::size_t vol = self.grad.size() / (g.batch * c_out);
            for (std::size_t c = 0; c < c_out; ++c) {
                double acc = 0.0;
                for (std::size_t n = 0; n < g.batch; ++n)
                    for (std::size_t i = 0; i < vol; ++i) acc += self.grad[(n * c_out + c) * vol + i];
                pb->grad[c] += acc;
            }
        }
    });
}

Tensor bce_loss(const Tensor& pred, const Tensor& target, double pos_weight) {
    require_same_shape(pred, target, "bce_loss");
    const std::size_t n = pred.numel();
    if (n == 0) throw ShapeError("bce_loss: empty tensors");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::clamp(pred.data()[i], kBceEps, 1.0 - kBceEps);
        const double t = target.data()[i];
        total -= pos_weight * t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
    return make_result({}, {total / static_cast<double>(n)}, {pred, target}, [pos_weight, n](Node& self) {
        const auto& pp = self.parents[0];
        const auto& pt = self.parents[1];
        const double g = self.grad[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double raw = pp->data[i];
            const double p = std::clamp(raw, kBceEps, 1.0 - kBceEps);
            const double t = pt->data[i];
            if (wants(pp) && raw >= kBceEps && raw <= 1.0 - kBceEps) {
                pp->grad[i] += g * (-pos_weight * t / p + (1.0 - t) / (1.0 - p));
            }
            if (wants(pt)) pt->grad[i] += g * (-pos_weight * std::log(p) + std::log(1.0 - p));
        }
    });
}

Tensor mse_loss(const Tensor& a, const Tensor& b) { return mean(square(sub(a, b))); }

LstmState lstm_cell(const Tensor& x, const LstmState& prev, const LstmParams& p) {
    require_rank(x, 2, "lstm_cell");
    if (x.dim(1) != p.input()) {
        throw ShapeError("lstm_cell: input width " + std::to_string(x.dim(1)) + " vs expected " +
                         std::to_string(p.input()));
    }
    if (prev.h.shape() != Shape{x.dim(0), p.hidden()} || prev.s.shape() != prev.h.shape()) {
        throw ShapeError("lstm_cell: state shape mismatch");
    }
    const Tensor z = concat_cols({x, prev.h});
    const Tensor i = sigmoid(linear(z, p.w_i, p.b_i));
    const Tensor f = sigmoid(linear(z, p.w_f, p.b_f));
    const Tensor o = sigmoid(linear(z, p.w_o, p.b_o));
    const Tensor candidate = tanh(linear(z, p.w_s, p.b_s));
    const Tensor s = add(mul(f, prev.s), mul(i, candidate));
    const Tensor h = mul(o, tanh(s));
    return {h, s};
}

}  // namespace voxforge::ad
