// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

// Dense 3D convolution kernels on NCDHW buffers.
//
// Two implementations are kept side by side:
//   parallel::  OpenMP kernels written as gathers, so every output element
//               is reduced by one thread in a fixed order. Results are
//               bit-identical for any thread count.
//   reference:: straightforward single-threaded scatter loops, used by the
//               tests and the benchmark as the ground truth.
namespace voxforge::kernels {

// Geometry of a forward convolution: input [n, c_in, d, h, w], weight
// [c_out, c_in, k, k, k], output [n, c_out, od, oh, ow].
struct ConvGeometry {
    std::size_t batch{1};
    std::size_t c_in{1};
    std::size_t c_out{1};
    int d{1};
    int h{1};
    int w{1};
    int k{1};
    int stride{1};
    int pad{0};

    int od() const { return (d + 2 * pad - k) / stride + 1; }
    int oh() const { return (h + 2 * pad - k) / stride + 1; }
    int ow() const { return (w + 2 * pad - k) / stride + 1; }
    std::size_t input_size() const { return batch * c_in * static_cast<std::size_t>(d) * h * w; }
    std::size_t output_size() const {
        return batch * c_out * static_cast<std::size_t>(od()) * oh() * ow();
    }
    std::size_t weight_size() const { return c_out * c_in * static_cast<std::size_t>(k) * k * k; }
    // Throws ShapeError when the padded input is smaller than the kernel.
    void validate() const;
};

// Geometry whose forward output has the requested spatial size, for a
// transposed convolution from `in` to (in - 1) * stride - 2 * pad + k.
int transposed_extent(int in, int k, int stride, int pad);

namespace parallel {

// y = conv(x, w) + b. `bias` may be empty.
void conv3d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y);
// gx = d<y, gy>/dx, i.e. the adjoint map applied to gy. Overwrites gx.
void conv3d_backward_input(const ConvGeometry& g, std::span<const double> gy, std::span<const double> w,
                           std::span<double> gx);
// Accumulates into gw (and gb when non-empty).
void conv3d_backward_weight(const ConvGeometry& g, std::span<const double> x, std::span<const double> gy,
                            std::span<double> gw, std::span<double> gb);

}  // namespace parallel

namespace reference {

void conv3d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y);
void conv3d_backward_input(const ConvGeometry& g, std::span<const double> gy, std::span<const double> w,
                           std::span<double> gx);
void conv3d_backward_weight(const ConvGeometry& g, std::span<const double> x, std::span<const double> gy,
                            std::span<double> gw, std::span<double> gb);

}  // namespace reference

}  // namespace voxforge::kernels
