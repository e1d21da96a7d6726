#pragma once

#include "splatsim/mpm_solver.hpp"
#include "splatsim/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace splatsim {

struct AxisAlignedBox {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();
};

/// Plane n.x = offset with the points that support it.
struct PlaneModel {
    Vec3 normal = Vec3::UnitZ();
    double offset = 0.0;
    std::vector<std::size_t> inliers;

    std::size_t inlier_count() const { return inliers.size(); }
    double distance(const Vec3& x) const { return std::abs(normal.dot(x) - offset); }
};

/// Indices of points whose (x, y) falls inside any box footprint grown by
/// `margin` on every side.
std::vector<std::size_t> filter_near_projection_indices(std::span<const Vec3> points,
                                                        std::span<const AxisAlignedBox> boxes, double margin);
std::vector<Vec3> filter_near_projection(std::span<const Vec3> points, std::span<const AxisAlignedBox> boxes,
                                         double margin);

struct RansacOptions {
    double threshold = 0.05;
    int iterations = 500;
    std::uint64_t seed = 0;
    int threads = 0;
};

struct RansacTrace {
    // Best 3-point hypothesis and its inliers, before the least-squares refit.
    PlaneModel hypothesis;
    int best_iteration = -1;
    bool refit_accepted = false;
};

/// Exact plane through three points; nullopt when they are collinear.
std::optional<PlaneModel> plane_through(const Vec3& a, const Vec3& b, const Vec3& c);

/// Total least squares: centroid plus smallest eigenvector of the scatter.
PlaneModel fit_plane_least_squares(std::span<const Vec3> points, std::span<const std::size_t> indices);

std::vector<std::size_t> plane_inliers(std::span<const Vec3> points, const Vec3& normal, double offset,
                                       double threshold);

/// 3-point RANSAC followed by a least-squares refit of the winning inlier
/// set. The refit is kept only if it supports at least as many points.
PlaneModel ransac_plane(std::span<const Vec3> points, const RansacOptions& options,
                        RansacTrace* trace = nullptr);

/// Sticky collider with its normal flipped to agree with `up_hint`.
HalfSpaceCollider make_halfspace_collider(const PlaneModel& plane, const Vec3& up_hint);

} // namespace splatsim
