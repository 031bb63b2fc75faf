// SPDX-License-Identifier: Apache-2.0

#include "voxforge/kernels/dense.hpp"

namespace voxforge::kernels {

namespace parallel {

void linear_forward(std::size_t n, std::size_t in, std::size_t out, std::span<const double> x,
                    std::span<const double> w, std::span<const double> bias, std::span<double> y) {
    const auto total = static_cast<long>(n * out);
#pragma omp parallel for schedule(static)
    for (long t = 0; t < total; ++t) {
        const std::size_t r = static_cast<std::size_t>(t) / out;
        const std::size_t o = static_cast<std::size_t>(t) % out;
        const double* xr = x.data() + r * in;
        const double* wo = w.data() + o * in;
        double acc = bias.empty() ? 0.0 : bias[o];
        for (std::size_t i = 0; i < in; ++i) acc += xr[i] * wo[i];
        y[t] = acc;
    }
}

void linear_backward(std::size_t n, std::size_t in, std::size_t out, std::span<const double> x,
                     std::span<const double> w, std::span<const double> gy, std::span<double> gx,
                     std::span<double> gw, std::span<double> gb) {
    if (!gx.empty()) {
        const auto total = static_cast<long>(n * in);
#pragma omp parallel for schedule(static)
        for (long t = 0; t < total; ++t) {
            const std::size_t r = static_cast<std::size_t>(t) / in;
            const std::size_t i = static_cast<std::size_t>(t) % in;
            double acc = 0.0;
            for (std::size_t o = 0; o < out; ++o) acc += gy[r * out + o] * w[o * in + i];
            gx[t] += acc;
        }
    }
    if (!gw.empty()) {
        const auto total = static_cast<long>(out * in);
#pragma omp parallel for schedule(static)
        for (long t = 0; t < total; ++t) {
            const std::size_t o = static_cast<std::size_t>(t) / in;
            const std::size_t i = static_cast<std::size_t>(t) % in;
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += gy[r * out + o] * x[r * in + i];
            gw[t] += acc;
        }
    }
    if (!gb.empty()) {
        for (std::size_t o = 0; o < out; ++o) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += gy[r * out + o];
            gb[o] += acc;
        }
    }
}

}  // namespace parallel

namespace reference {

void linear_forward(std::size_t n, std::size_t in, std::size_t out, std::span<const double> x,
                    std::span<const double> w, std::span<const double> bias, std::span<double> y) {
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t o = 0; o < out; ++o) {
            y[r * out + o] = bias.empty() ? 0.0 : bias[o];
            for (std::size_t i = 0; i < in; ++i) y[r * out + o] += x[r * in + i] * w[o * in + i];
        }
}

void linear_backward(std::size_t n, std::size_t in, std::size_t out, std::span<const double> x,
                     std::span<const double> w, std::span<const double> gy, std::span<double> gx,
                     std::span<double> gw, std::span<double> gb) {
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t o = 0; o < out; ++o) {
            const double g = gy[r * out + o];
            if (!gb.empty()) gb[o] += g;
            for (std::size_t i = 0; i < in; ++i) {
                if (!gx.empty()) gx[r * in + i] += g * w[o * in + i];
                if (!gw.empty()) gw[o * in + i] += g * x[r * in + i];
            }
        }
}

}  // namespace reference

}  // namespace voxforge::kernels
