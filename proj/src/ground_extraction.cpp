#include "splatsim/ground_extraction.hpp"

#include "splatsim/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace splatsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

std::vector<std::size_t> filter_near_projection_indices(std::span<const Vec3> points,
                                                        std::span<const AxisAlignedBox> boxes, double margin) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        for (const auto& b : boxes) {
            if (p.x() >= b.min.x() - margin && p.x() <= b.max.x() + margin && p.y() >= b.min.y() - margin &&
                p.y() <= b.max.y() + margin) {
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

std::vector<Vec3> filter_near_projection(std::span<const Vec3> points, std::span<const AxisAlignedBox> boxes,
                                         double margin) {
    std::vector<Vec3> out;
    for (std::size_t i : filter_near_projection_indices(points, boxes, margin)) out.push_back(points[i]);
    return out;
}

std::optional<PlaneModel> plane_through(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = (b - a).cross(c - a);
    const double len = n.norm();
    const double scale = std::max({(b - a).squaredNorm(), (c - a).squaredNorm(), 1e-300});
    if (!(len > 1e-12 * scale)) return std::nullopt;
    PlaneModel m;
    m.normal = n / len;
    m.offset = m.normal.dot(a);
    return m;
}

std::vector<std::size_t> plane_inliers(std::span<const Vec3> points, const Vec3& normal, double offset,
                                       double threshold) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (std::abs(normal.dot(points[i]) - offset) <= threshold) out.push_back(i);
    return out;
}

PlaneModel fit_plane_least_squares(std::span<const Vec3> points, std::span<const std::size_t> indices) {
    if (indices.size() < 3) throw std::invalid_argument("least-squares plane needs at least 3 points");
    Vec3 c = Vec3::Zero();
    for (auto i : indices) c += points[i];
    c /= static_cast<double>(indices.size());
    Mat3 scatter = Mat3::Zero();
    for (auto i : indices) {
        const Vec3 d = points[i] - c;
        scatter += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
    PlaneModel m;
    m.normal = eig.eigenvectors().col(0).normalized();
    m.offset = m.normal.dot(c);
    return m;
}

PlaneModel ransac_plane(std::span<const Vec3> points, const RansacOptions& options, RansacTrace* trace) {
    const std::size_t n = points.size();
    if (n < 3) throw std::invalid_argument("ransac_plane needs at least 3 points");
    if (options.iterations < 1) throw std::invalid_argument("ransac_plane needs at least one iteration");

    struct Hypothesis {
        bool valid = false;
        Vec3 normal = Vec3::Zero();
        double offset = 0.0;
        std::size_t count = 0;
    };
    std::vector<Hypothesis> hyps(static_cast<std::size_t>(options.iterations));
    parallel_for(hyps.size(), options.threads, [&](std::size_t it) {
        std::uint64_t state = options.seed ^ (0xD1B54A32D192ED03ull * (it + 1));
        std::size_t idx[3];
        // Three distinct indices; a 3-point set is always the full set.
        for (int k = 0; k < 3; ++k) {
            for (;;) {
                idx[k] = static_cast<std::size_t>(splitmix64(state) % n);
                bool fresh = true;
                for (int j = 0; j < k; ++j) fresh = fresh && idx[j] != idx[k];
                if (fresh) break;
            }
        }
        auto plane = plane_through(points[idx[0]], points[idx[1]], points[idx[2]]);
        if (!plane) return;
        auto& h = hyps[it];
        h.valid = true;
        h.normal = plane->normal;
        h.offset = plane->offset;
        for (const auto& p : points)
            if (std::abs(h.normal.dot(p) - h.offset) <= options.threshold) ++h.count;
    });

    int best = -1;
    for (std::size_t it = 0; it < hyps.size(); ++it) {
        if (!hyps[it].valid) continue;
        if (best < 0 || hyps[it].count > hyps[static_cast<std::size_t>(best)].count) best = static_cast<int>(it);
    }
    if (best < 0) throw std::runtime_error("ransac_plane: every sample was collinear");

    const auto& h = hyps[static_cast<std::size_t>(best)];
    PlaneModel hypothesis;
    hypothesis.normal = h.normal;
    hypothesis.offset = h.offset;
    hypothesis.inliers = plane_inliers(points, h.normal, h.offset, options.threshold);

    PlaneModel result = hypothesis;
    bool accepted = false;
    if (hypothesis.inlier_count() >= 3) {
        PlaneModel refit = fit_plane_least_squares(points, hypothesis.inliers);
        refit.inliers = plane_inliers(points, refit.normal, refit.offset, options.threshold);
        if (refit.inlier_count() >= hypothesis.inlier_count()) {
            result = std::move(refit);
            accepted = true;
        }
    }
    if (trace) {
        trace->hypothesis = std::move(hypothesis);
        trace->best_iteration = best;
        trace->refit_accepted = accepted;
    }
    return result;
}

HalfSpaceCollider make_halfspace_collider(const PlaneModel& plane, const Vec3& up_hint) {
    const double along = plane.normal.dot(up_hint);
    if (std::abs(along) <= 1e-12 * up_hint.norm()) throw std::invalid_argument("ambiguous orientation");
    HalfSpaceCollider c;
    c.normal = along > 0.0 ? plane.normal : Vec3(-plane.normal);
    c.offset = along > 0.0 ? plane.offset : -plane.offset;
    c.mode = ContactMode::sticky;
    return c;
}

} // namespace splatsim
