#pragma once

#include "splatsim/scene_model.hpp"
#include "splatsim/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace splatsim {

// Pinhole camera, OpenCV axes: +z forward, +x right, +y down.
struct Camera {
    Mat3 world_to_camera = Mat3::Identity();  // rotation part of W
    Vec3 position = Vec3::Zero();             // camera centre in world
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    int width = 1, height = 1;
    double near_clip = 0.01;
    // Splats whose centre lies further than this outside the frame are culled.
    double cull_margin_px = 64.0;

    static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fx, double fy,
                          int width, int height, double near_clip = 0.01);

    Vec3 to_camera(const Vec3& world) const { return world_to_camera * (world - position); }
    void validate() const;
};

struct ProjectedSplat {
    Vec2 center_px = Vec2::Zero();
    Mat2 cov2d = Mat2::Identity();
    double depth = 0.0;
    Vec3 color = Vec3::Zero();
    double opacity = 0.0;
    // Position in the input primitive list; secondary depth-sort key.
    std::size_t index = 0;
};

struct Framebuffer {
    int width = 0, height = 0;
    std::vector<Vec3> rgb;
    std::vector<double> transmittance;

    Framebuffer() = default;
    Framebuffer(int w, int h);

    Vec3& at(int x, int y) { return rgb[static_cast<std::size_t>(y) * width + x]; }
    const Vec3& at(int x, int y) const { return rgb[static_cast<std::size_t>(y) * width + x]; }
};

inline constexpr double kCov2dEigenFloor = 0.3;
inline constexpr double kAlphaMax = 0.999;
inline constexpr double kTransmittanceCutoff = 1e-4;
inline constexpr double kSupportSigmas = 3.0;

/// Clamps the eigenvalues of a symmetric 2x2 matrix from below. Matrices
/// already above the floor are returned unchanged.
Mat2 floor_cov2d(const Mat2& cov, double floor = kCov2dEigenFloor);

/// Perspective EWA projection of a world-frame primitive; std::nullopt when
/// culled by the near plane or the frame margin.
std::optional<ProjectedSplat> project_gaussian(const GaussianPrimitive& p, const Camera& cam,
                                               std::size_t index = 0);

/// Opacity-weighted 2D Gaussian falloff at `pixel`, zero beyond 3 sigma,
/// clamped to [0, 0.999].
double eval_kernel(const ProjectedSplat& splat, const Vec2& pixel);

/// Pixel sample position for integer pixel (x, y).
inline Vec2 pixel_center(int x, int y) { return {x + 0.5, y + 0.5}; }

/// Canonical compositing order: ascending depth, ties by index.
std::vector<std::size_t> depth_order(std::span<const ProjectedSplat> splats);

/// Front-to-back compositing over a black background. threads <= 1 is the
/// serial reference path; any thread count gives the same bits.
Framebuffer rasterize(std::span<const ProjectedSplat> splats, const Camera& cam, int threads = 0);

std::vector<ProjectedSplat> project_all(std::span<const GaussianPrimitive> prims, const Camera& cam);

Framebuffer render(std::span<const GaussianPrimitive> prims, const Camera& cam, int threads = 0);

struct ColoredPoint {
    Vec3 position = Vec3::Zero();
    std::array<std::uint8_t, 3> rgb{0, 0, 0};
};

/// One point per primitive at its mean, coloured by the SH DC term.
std::vector<ColoredPoint> export_point_cloud(std::span<const GaussianPrimitive> prims);

std::uint8_t to_byte(double channel);

} // namespace splatsim
