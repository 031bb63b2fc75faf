// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

// Affine layer kernels: x [n, in], w [out, in], y [n, out].
namespace voxforge::kernels {

namespace parallel {

void linear_forward(std::size_t n, std::size_t in, std::size_t out, std::span<const double> x,
                    std::span<const double> w, std::span<const double> bias, std::span<double> y);
// Accumulates gx += gy * w, gw += gy^T x, gb += sum_rows(gy). Empty spans skip.
void linear_backward(std::size_t n, std::size_t in, std::size_t out, std::span<const double> x,
                     std::span<const double> w, std::span<const double> gy, std::span<double> gx,
                     std::span<double> gw, std::span<double> gb);

}  // namespace parallel

namespace reference {

void linear_forward(std::size_t n, std::size_t in, std::size_t out, std::span<const double> x,
                    std::span<const double> w, std::span<const double> bias, std::span<double> y);
void linear_backward(std::size_t n, std::size_t in, std::size_t out, std::span<const double> x,
                     std::span<const double> w, std::span<const double> gy, std::span<double> gx,
                     std::span<double> gw, std::span<double> gb);

}  // namespace reference

}  // namespace voxforge::kernels
