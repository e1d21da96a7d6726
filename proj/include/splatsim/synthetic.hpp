#pragma once

#include "splatsim/ground_extraction.hpp"
#include "splatsim/scene_io.hpp"

#include <string>
#include <vector>

namespace splatsim {

/// Box-shaped vehicle: a lattice of Gaussians filling [size] with its
/// bottom-face centre at `bottom_center`.
struct VehicleSpec {
    Vec3 bottom_center = Vec3::Zero();
    Vec3 size{4.5, 1.8, 1.5};
    std::array<int, 3> counts{16, 7, 6};
    Vec3 color{0.8, 0.8, 0.8};
    double opacity = 0.9;
};

ObjectCluster make_vehicle(const std::string& id, const VehicleSpec& spec);

/// Flat Gaussians on the plane z = `z` over [lo, hi] in x and y.
std::vector<GaussianPrimitive> make_ground(const Vec2& lo, const Vec2& hi, double spacing, double z,
                                           const Vec3& color);

/// Road plane with three parked vehicles (2016 vehicle Gaussians).
/// car_2 drives along +x and carries a Fourier appearance.
Scene synth_demo_scene();

Camera demo_camera(int width = 96, int height = 64);

/// Background Gaussian centres plus `outlier_fraction` (of the total)
/// points scattered 0.2 to 2 m above the road.
std::vector<Vec3> synth_ground_points(const Scene& s, double outlier_fraction, std::uint64_t seed);

/// Footprints of every object at time t.
std::vector<AxisAlignedBox> object_boxes(const Scene& s, double t);

/// All demo vehicles bound with distinct velocities, g = 0, no colliders.
Scenario conservation_scenario(int steps = 1000);

/// car_0 driven at `v0` into a sticky wall on a frictionless road
/// (single-vehicle column: g = 9.8, nu = 0.4, E = 2e6, rho = 200, grid 50).
Scenario wall_collision_scenario(const Scene& demo, double v0, int steps = 3000);

/// Two moving and two parked single-layer vehicles in the plane z = 0.75.
Scene planar_fleet_scene();
/// g = 0, v0 = 3.5 m/s for the moving pair, grid 200.
Scenario planar_fleet_scenario(int steps = 500);

inline constexpr double kFallHeight = 1.225;

/// car_0 lifted so its lowest Gaussian sits kFallHeight above the road,
/// g = 9.8, grid 100. The road collider is included when `with_ground`.
Scenario fall_scenario(const Scene& demo, bool with_ground, int steps = 3000);

} // namespace splatsim
