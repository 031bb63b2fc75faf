// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "voxforge/geometry.hpp"

namespace voxforge::scan {

// Pinhole camera. Pixel (u, v) has its ray through the pixel center;
// v grows downwards in the image, u to the right.
struct Camera {
    Vec3 position;
    Vec3 look_at;
    Vec3 up{0.0, 0.0, 1.0};
    double vertical_fov{0.25};  // radians
    int width{64};
    int height{64};

    // Throws DomainError when the invariants do not hold.
    void validate() const;

    Vec3 forward() const;
    Vec3 right() const;
    Vec3 true_up() const;

    // Unit direction of the ray through the center of pixel (u, v).
    Vec3 ray_direction(int u, int v) const;
    // Edge length, at range 1, of one pixel's footprint.
    double pixel_angle() const;
};

// Default rig distance and image size of the synthetic scanner.
inline constexpr double kDefaultRadius = 1.6;
inline constexpr int kDefaultImageSize = 64;
inline constexpr int kPaperImageSize = 512;
inline constexpr int kDefaultViewCount = 125;

// n cameras on the upper half of the +y hemisphere around target, stratified
// deterministically: elevation_k = asin(k / n), azimuth_k walks the golden
// ratio through [0, pi] starting at pi/2. View 0 is always on the +y axis.
std::vector<Camera> hemisphere_views(int n, double radius, const Vec3& target, double vertical_fov = 0.25,
                                     int image_size = kDefaultImageSize);

}  // namespace voxforge::scan
