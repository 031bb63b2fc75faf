// SPDX-License-Identifier: Apache-2.0

#include "voxforge/scan/camera.hpp"

#include <cmath>
#include <numbers>

#include "voxforge/error.hpp"

namespace voxforge::scan {

void Camera::validate() const {
    if (!is_finite(position) || !is_finite(look_at) || !is_finite(up)) throw DomainError("camera vectors must be finite");
    if (squared_norm(look_at - position) == 0.0) throw DomainError("camera position equals look_at");
    const Vec3 f = normalized(look_at - position);
    if (squared_norm(up) == 0.0 || norm(cross(f, normalized(up))) < 1e-9) {
        throw DomainError("camera up vector is parallel to the view direction");
    }
    if (!(vertical_fov > 0.0 && vertical_fov < std::numbers::pi)) throw DomainError("camera fov must lie in (0, pi)");
    if (width < 1 || height < 1) throw DomainError("camera image size must be positive");
}

Vec3 Camera::forward() const { return normalized(look_at - position); }

Vec3 Camera::right() const { return normalized(cross(forward(), up)); }

Vec3 Camera::true_up() const { return cross(right(), forward()); }

Vec3 Camera::ray_direction(int u, int v) const {
    const double half = std::tan(vertical_fov / 2.0);
    const double aspect = static_cast<double>(width) / height;
    const double x = (2.0 * (u + 0.5) / width - 1.0) * half * aspect;
    const double y = (1.0 - 2.0 * (v + 0.5) / height) * half;
    return normalized(forward() + x * right() + y * true_up());
}

double Camera::pixel_angle() const { return 2.0 * std::tan(vertical_fov / 2.0) / height; }

std::vector<Camera> hemisphere_views(int n, double radius, const Vec3& target, double vertical_fov, int image_size) {
    if (n < 1) throw DomainError("hemisphere_views: n must be >= 1");
    if (!(radius > 0.0)) throw DomainError("hemisphere_views: radius must be positive");
    constexpr double kGoldenFrac = 0.6180339887498949;
    std::vector<Camera> cams;
    cams.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double elevation = std::asin(static_cast<double>(k) / n);
        double frac = 0.5 + k * kGoldenFrac;
        frac -= std::floor(frac);
        const double azimuth = std::numbers::pi * frac;
        Camera c;
        c.position = target + radius * Vec3{std::cos(elevation) * std::cos(azimuth),
                                            std::cos(elevation) * std::sin(azimuth), std::sin(elevation)};
        c.look_at = target;
        c.up = {0.0, 0.0, 1.0};
        c.vertical_fov = vertical_fov;
        c.width = image_size;
        c.height = image_size;
        cams.push_back(c);
    }
    return cams;
}

}  // namespace voxforge::scan
