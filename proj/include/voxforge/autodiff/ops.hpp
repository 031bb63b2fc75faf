// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "voxforge/autodiff/tensor.hpp"

namespace voxforge::ad {

// Elementwise binary ops; shapes must match exactly.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
// Elementwise minimum; on ties the gradient goes to `a`.
Tensor minimum(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor neg(const Tensor& a);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);
Tensor abs(const Tensor& a);
// Values outside [lo, hi] are clamped and pass no gradient.
Tensor clamp(const Tensor& a, double lo, double hi);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
// [n, m] -> [n]
Tensor row_sum(const Tensor& a);
// [m] broadcast to [n, m]
Tensor expand_rows(const Tensor& a, std::size_t n);

Tensor reshape(const Tensor& a, Shape shape);
// Concatenates 2D tensors [n, m_i] along the second axis.
Tensor concat_cols(const std::vector<Tensor>& parts);
// Columns [begin, end) of a 2D tensor.
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end);

// x [n, in], weight [out, in], bias [out] -> [n, out]
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Cross-correlation. input [n, c, d, h, w], kernel [f, c, k, k, k], bias [f].
Tensor conv3d(const Tensor& input, const Tensor& kernel, const Tensor& bias, int stride, int padding);
// Adjoint of conv3d with the same kernel layout read as [f_in, c_out, k, k, k]:
// input [n, f, d, h, w] -> [n, c, (d-1)*stride - 2*padding + k, ...]. bias [c]
// may be undefined.
Tensor conv3d_transpose(const Tensor& input, const Tensor& kernel, const Tensor& bias, int stride, int padding);

// Mean binary cross-entropy with probabilities clamped to [eps, 1 - eps].
// Positive targets are weighted by pos_weight.
inline constexpr double kBceEps = 1e-7;
Tensor bce_loss(const Tensor& pred, const Tensor& target, double pos_weight = 1.0);

Tensor mse_loss(const Tensor& a, const Tensor& b);

struct LstmState {
    Tensor h;
    Tensor s;
};

struct LstmParams {
    // Each weight is [hidden, input + hidden], each bias [hidden].
    Tensor w_i, w_f, w_o, w_s;
    Tensor b_i, b_f, b_o, b_s;

    std::size_t hidden() const { return w_i.dim(0); }
    std::size_t input() const { return w_i.dim(1) - w_i.dim(0); }
};

// One LSTM step on rows x [n, input] with state [n, hidden]:
//   i = sigmoid(W_i [x, h] + b_i), f = sigmoid(W_f [x, h] + b_f),
//   o = sigmoid(W_o [x, h] + b_o), s' = f * s + i * tanh(W_s [x, h] + b_s),
//   h' = o * tanh(s').
LstmState lstm_cell(const Tensor& x, const LstmState& prev, const LstmParams& p);

}  // namespace voxforge::ad
