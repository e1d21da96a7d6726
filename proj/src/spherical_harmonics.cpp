#include "splatsim/spherical_harmonics.hpp"

#include <algorithm>
#include <stdexcept>

namespace splatsim {

namespace {

constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                          -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                          0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                          -0.5900435899266435};

} // namespace

std::vector<double> sh_basis(int degree, const Vec3& dir) {
    if (degree < 0 || degree > 3) throw std::invalid_argument("sh degree must be in [0,3]");
    std::vector<double> y(static_cast<std::size_t>((degree + 1) * (degree + 1)));
    y[0] = kShC0;
    if (degree == 0) return y;
    const double x = dir.x(), yy = dir.y(), z = dir.z();
    y[1] = -kC1 * yy;
    y[2] = kC1 * z;
    y[3] = -kC1 * x;
    if (degree == 1) return y;
    const double xx = x * x, y2 = yy * yy, zz = z * z;
    const double xy = x * yy, yz = yy * z, xz = x * z;
    y[4] = kC2[0] * xy;
    y[5] = kC2[1] * yz;
    y[6] = kC2[2] * (2.0 * zz - xx - y2);
    y[7] = kC2[3] * xz;
    y[8] = kC2[4] * (xx - y2);
    if (degree == 2) return y;
    y[9] = kC3[0] * yy * (3.0 * xx - y2);
    y[10] = kC3[1] * xy * z;
    y[11] = kC3[2] * yy * (4.0 * zz - xx - y2);
    y[12] = kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * y2);
    y[13] = kC3[4] * x * (4.0 * zz - xx - y2);
    y[14] = kC3[5] * z * (xx - y2);
    y[15] = kC3[6] * x * (xx - 3.0 * y2);
    return y;
}

Vec3 sh_to_color(std::span<const Vec3> coeffs, const Vec3& dir) {
    if (coeffs.empty()) return Vec3::Zero();
    if (coeffs.size() == 1) return sh_dc_color(coeffs);
    int degree = 0;
    while (static_cast<std::size_t>((degree + 2) * (degree + 2)) <= coeffs.size()) ++degree;
    const auto y = sh_basis(degree, dir);
    Vec3 c = coeffs[0];
    for (std::size_t j = 1; j < y.size(); ++j) c += coeffs[j] * (y[j] / kShC0);
    return c.cwiseMax(0.0).cwiseMin(1.0);
}

Vec3 sh_dc_color(std::span<const Vec3> coeffs) {
    if (coeffs.empty()) return Vec3::Zero();
    return coeffs[0].cwiseMax(0.0).cwiseMin(1.0);
}

} // namespace splatsim
