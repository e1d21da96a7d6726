#include "splatsim/splat_renderer.hpp"

#include "splatsim/parallel.hpp"
#include "splatsim/spherical_harmonics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace splatsim {

namespace {

struct PreparedSplat {
    Vec2 center;
    Mat2 conic;  // inverse of cov2d
    Vec3 color;
    double opacity;
    int x0, x1, y0, y1;  // inclusive pixel bounds of the 3-sigma box
};

Mat2 inverse_2x2(const Mat2& m) {
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Mat2 inv;
    inv << m(1, 1) / det, -m(0, 1) / det, -m(1, 0) / det, m(0, 0) / det;
    return inv;
}

double kernel_alpha(const Vec2& center, const Mat2& conic, double opacity, const Vec2& pixel) {
    const Vec2 d = pixel - center;
    const double maha = d.dot(conic * d);
    if (!(maha <= kSupportSigmas * kSupportSigmas)) return 0.0;
    const double a = opacity * std::exp(-0.5 * maha);
    return std::clamp(a, 0.0, kAlphaMax);
}

} // namespace

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fx, double fy,
                       int width, int height, double near_clip) {
    const Vec3 forward = (target - eye).normalized();
    const Vec3 right = forward.cross(up).normalized();
    const Vec3 down = forward.cross(right);
    Camera cam;
    cam.world_to_camera.row(0) = right.transpose();
    cam.world_to_camera.row(1) = down.transpose();
    cam.world_to_camera.row(2) = forward.transpose();
    cam.position = eye;
    cam.fx = fx;
    cam.fy = fy;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    cam.width = width;
    cam.height = height;
    cam.near_clip = near_clip;
    return cam;
}

void Camera::validate() const {
    if (!(fx > 0.0 && fy > 0.0)) throw std::invalid_argument("camera focal lengths must be positive");
    if (width <= 0 || height <= 0) throw std::invalid_argument("camera resolution must be positive");
    if (!(near_clip > 0.0)) throw std::invalid_argument("camera near_clip must be positive");
}

Framebuffer::Framebuffer(int w, int h)
    : width(w), height(h), rgb(static_cast<std::size_t>(w) * h, Vec3::Zero()),
      transmittance(static_cast<std::size_t>(w) * h, 1.0) {}

Mat2 floor_cov2d(const Mat2& cov, double floor) {
    Eigen::SelfAdjointEigenSolver<Mat2> eig(cov);
    const Vec2 ev = eig.eigenvalues();
    if (ev.minCoeff() >= floor) return cov;
    const Vec2 clamped = ev.cwiseMax(floor);
    Mat2 out = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

std::optional<ProjectedSplat> project_gaussian(const GaussianPrimitive& p, const Camera& cam,
                                               std::size_t index) {
    const Vec3 t = cam.to_camera(p.mean);
    if (!(t.z() > cam.near_clip)) return std::nullopt;

    const double inv_z = 1.0 / t.z();
    const Vec2 center(cam.fx * t.x() * inv_z + cam.cx, cam.fy * t.y() * inv_z + cam.cy);
    const double m = cam.cull_margin_px;
    if (center.x() < -m || center.x() > cam.width + m || center.y() < -m || center.y() > cam.height + m)
        return std::nullopt;

    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.fx * inv_z, 0.0, -cam.fx * t.x() * inv_z * inv_z,
           0.0, cam.fy * inv_z, -cam.fy * t.y() * inv_z * inv_z;
    const Mat3& w = cam.world_to_camera;
    const Eigen::Matrix<double, 2, 3> jw = jac * w;
    Mat2 cov = jw * covariance_of(p) * jw.transpose();
    cov = 0.5 * (cov + cov.transpose());

    ProjectedSplat s;
    s.center_px = center;
    s.cov2d = floor_cov2d(cov);
    s.depth = t.z();
    s.color = sh_to_color(p.sh, (p.mean - cam.position).normalized());
    s.opacity = p.opacity;
    s.index = index;
    return s;
}

double eval_kernel(const ProjectedSplat& splat, const Vec2& pixel) {
    return kernel_alpha(splat.center_px, inverse_2x2(splat.cov2d), splat.opacity, pixel);
}

std::vector<std::size_t> depth_order(std::span<const ProjectedSplat> splats) {
    std::vector<std::size_t> order(splats.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (splats[a].depth != splats[b].depth) return splats[a].depth < splats[b].depth;
        return splats[a].index < splats[b].index;
    });
    return order;
}

Framebuffer rasterize(std::span<const ProjectedSplat> splats, const Camera& cam, int threads) {
    Framebuffer fb(cam.width, cam.height);
    const auto order = depth_order(splats);

    std::vector<PreparedSplat> prepared;
    prepared.reserve(order.size());
    for (std::size_t idx : order) {
        const auto& s = splats[idx];
        if (s.opacity <= 0.0) continue;
        PreparedSplat p;
        p.center = s.center_px;
        p.conic = inverse_2x2(s.cov2d);
        p.color = s.color;
        p.opacity = s.opacity;
        const double rx = kSupportSigmas * std::sqrt(s.cov2d(0, 0));
        const double ry = kSupportSigmas * std::sqrt(s.cov2d(1, 1));
        // Pixel x samples at x + 0.5.
        p.x0 = std::max(0, static_cast<int>(std::floor(s.center_px.x() - rx - 0.5)));
        p.x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(s.center_px.x() + rx - 0.5)));
        p.y0 = std::max(0, static_cast<int>(std::floor(s.center_px.y() - ry - 0.5)));
        p.y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(s.center_px.y() + ry - 0.5)));
        if (p.x0 > p.x1 || p.y0 > p.y1) continue;
        prepared.push_back(p);
    }

    parallel_for(static_cast<std::size_t>(cam.height), threads, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < cam.width; ++x) {
            const Vec2 px = pixel_center(x, y);
            Vec3 c = Vec3::Zero();
            double trans = 1.0;
            for (const auto& s : prepared) {
                if (x < s.x0 || x > s.x1 || y < s.y0 || y > s.y1) continue;
                const double a = kernel_alpha(s.center, s.conic, s.opacity, px);
                if (a <= 0.0) continue;
                c += (a * trans) * s.color;
                trans *= (1.0 - a);
                if (trans < kTransmittanceCutoff) break;
            }
            const std::size_t i = row * static_cast<std::size_t>(cam.width) + static_cast<std::size_t>(x);
            fb.rgb[i] = c;
            fb.transmittance[i] = trans;
        }
    });
    return fb;
}

std::vector<ProjectedSplat> project_all(std::span<const GaussianPrimitive> prims, const Camera& cam) {
    std::vector<ProjectedSplat> out;
    out.reserve(prims.size());
    for (std::size_t i = 0; i < prims.size(); ++i)
        if (auto s = project_gaussian(prims[i], cam, i)) out.push_back(*s);
    return out;
}

Framebuffer render(std::span<const GaussianPrimitive> prims, const Camera& cam, int threads) {
    cam.validate();
    const auto splats = project_all(prims, cam);
    return rasterize(splats, cam, threads);
}

std::uint8_t to_byte(double channel) {
    const double c = std::clamp(channel, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

std::vector<ColoredPoint> export_point_cloud(std::span<const GaussianPrimitive> prims) {
    std::vector<ColoredPoint> pts;
    pts.reserve(prims.size());
    for (const auto& p : prims) {
        const Vec3 c = sh_dc_color(p.sh);
        pts.push_back({p.mean, {to_byte(c.x()), to_byte(c.y()), to_byte(c.z())}});
    }
    return pts;
}

} // namespace splatsim
