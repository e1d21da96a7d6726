#pragma once

#include "splatsim/types.hpp"

#include <span>
#include <vector>

namespace splatsim {

/// Real SH normalization of Y_0^0.
inline constexpr double kShC0 = 0.28209479177387814;

/// Real spherical harmonics up to `degree` (<= 3) at unit direction `dir`,
/// flat index l*l + l + m.
std::vector<double> sh_basis(int degree, const Vec3& dir);

/// RGB colour of a coefficient set viewed along `dir`.
///
/// Coefficients are stored DC-normalized: colour = sum_j z_j Y_j(dir) / Y_0^0,
/// clamped to [0,1]. A degree-0 primitive therefore has colour equal to its
/// single coefficient, independent of view direction.
Vec3 sh_to_color(std::span<const Vec3> coeffs, const Vec3& dir);

/// View-independent colour from the DC term alone.
Vec3 sh_dc_color(std::span<const Vec3> coeffs);

} // namespace splatsim
