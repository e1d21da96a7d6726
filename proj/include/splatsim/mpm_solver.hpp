#pragma once

#include "splatsim/material.hpp"
#include "splatsim/types.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace splatsim {

struct LameParams {
    double mu = 0.0;
    double lambda = 0.0;
};

LameParams lame_from_young_poisson(const MaterialParams& m);

struct MpmParticle {
    double mass = 0.0;
    double rest_volume = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Mat3 deformation_gradient = Mat3::Identity();
    // Index into the material table of the owning MpmState.
    std::uint32_t material = 0;
};

enum class ContactMode { sticky, slip };

/// Solid occupies n.x < offset; `normal` points into free space.
struct HalfSpaceCollider {
    Vec3 normal = Vec3::UnitZ();
    double offset = 0.0;
    ContactMode mode = ContactMode::sticky;
    double friction = 0.0;

    void validate() const;
    double signed_distance(const Vec3& x) const { return normal.dot(x) - offset; }
    /// Contact response for a grid node at `node_position` moving with `v`.
    Vec3 project_velocity(const Vec3& node_position, const Vec3& v) const;
};

/// Node lattice: node (i,j,k) sits at origin + dx*(i,j,k).
struct GridSpec {
    Vec3 origin = Vec3::Zero();
    double dx = 1.0;
    std::array<int, 3> dims{0, 0, 0};

    /// Box around `points` grown on every side by `margin_fraction` of its
    /// longest extent, plus `pad_cells` cells of padding.
    static GridSpec fit(std::span<const Vec3> points, int resolution, double margin_fraction = 0.2,
                        int pad_cells = 3);
    /// Explicit domain [lo, hi] with `pad_cells` of padding outside it.
    /// Every axis gets `resolution` nodes; dx is set by the longest axis.
    static GridSpec from_box(const Vec3& lo, const Vec3& hi, int resolution, int pad_cells = 3);

    Vec3 node_position(int i, int j, int k) const { return origin + dx * Vec3(i, j, k); }
    std::int64_t linear_index(int i, int j, int k) const {
        return (static_cast<std::int64_t>(i) * dims[1] + j) * dims[2] + k;
    }
    std::array<int, 3> cell_of(const Vec3& x) const;
};

/// Raised when a particle's 3x3x3 stencil leaves the grid.
class ParticleEscapedError : public std::runtime_error {
public:
    explicit ParticleEscapedError(std::size_t particle)
        : std::runtime_error("particle escaped grid (particle " + std::to_string(particle) + ")"),
          particle_index(particle) {}
    std::size_t particle_index;
};

/// Raised when det(F) <= 0 after a step.
class SimulationInstability : public std::runtime_error {
public:
    SimulationInstability(std::size_t particle, double det)
        : std::runtime_error("simulation instability: det(F) = " + std::to_string(det) +
                             " at particle " + std::to_string(particle)),
          particle_index(particle), det_f(det) {}
    std::size_t particle_index;
    double det_f;
};

/// Quadratic B-spline weights over the 3x3x3 node neighbourhood of a point.
struct KernelStencil {
    std::array<int, 3> base{0, 0, 0};
    std::array<std::array<double, 3>, 3> w{};   // [axis][offset]
    std::array<std::array<double, 3>, 3> dw{};  // d/dx in world units

    double weight(int a, int b, int c) const { return w[0][a] * w[1][b] * w[2][c]; }
    Vec3 gradient(int a, int b, int c) const {
        return {dw[0][a] * w[1][b] * w[2][c], w[0][a] * dw[1][b] * w[2][c], w[0][a] * w[1][b] * dw[2][c]};
    }
};

/// Throws ParticleEscapedError (with index `particle`) outside the interior.
KernelStencil bspline_stencil(const Vec3& x, const GridSpec& grid, std::size_t particle = 0);

struct KernelSample {
    std::array<int, 3> node{0, 0, 0};
    double weight = 0.0;
    Vec3 gradient = Vec3::Zero();
};

std::array<KernelSample, 27> bspline_weights(const Vec3& x, const GridSpec& grid);

struct GridNode {
    double mass = 0.0;
    Vec3 momentum = Vec3::Zero();
    Vec3 force = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    std::array<int, 3> index{0, 0, 0};
};

/// Sparse background grid. Only nodes touched by particle stencils are
/// stored, in first-touch order, so serial transfers are reproducible.
class MpmGrid {
public:
    MpmGrid() = default;
    explicit MpmGrid(const GridSpec& spec) : spec_(spec) {}

    const GridSpec& spec() const { return spec_; }
    void clear();

    std::span<GridNode> nodes() { return nodes_; }
    std::span<const GridNode> nodes() const { return nodes_; }
    const GridNode* find(int i, int j, int k) const;

    std::uint32_t touch(int i, int j, int k);

    // Node slots per particle, valid between p2g and the next clear().
    std::span<const std::array<std::uint32_t, 27>> particle_slots() const { return slots_; }

    double total_mass() const;
    Vec3 total_momentum() const;
    Vec3 total_force() const;

private:
    friend void p2g(std::span<const MpmParticle>, MpmGrid&);
    GridSpec spec_;
    std::vector<GridNode> nodes_;
    std::unordered_map<std::int64_t, std::uint32_t> lookup_;
    std::vector<std::array<std::uint32_t, 27>> slots_;
};

struct SimConfig {
    double dt = 2e-4;
    double gravity = 9.8;  // magnitude, acts along -z
    int steps = 0;
    int frame_stride = 50;
    std::vector<HalfSpaceCollider> colliders;
    int boundary_cells = 3;
    double mass_epsilon = 1e-12;
    bool allow_cfl_violation = false;
    int threads = 0;

    void validate(double dx, std::span<const MaterialParams> materials) const;
};

/// 0.3 dx / sqrt(E / rho).
double max_stable_dt(const MaterialParams& m, double dx);

/// Rotation factor of the polar decomposition F = R S, det R = +1.
Mat3 polar_rotation(const Mat3& f);

/// Fixed-corotated first Piola-Kirchhoff stress.
Mat3 first_piola_kirchhoff(const Mat3& f, const LameParams& lame);
Mat3 first_piola_kirchhoff(const Mat3& f, const MaterialParams& m);

void p2g(std::span<const MpmParticle> particles, MpmGrid& grid);
void grid_forces(std::span<const MpmParticle> particles, MpmGrid& grid,
                 std::span<const MaterialParams> materials, int threads = 0);
void grid_update(MpmGrid& grid, const SimConfig& config);
void g2p(std::span<MpmParticle> particles, const MpmGrid& grid, double dt, int threads = 0);

struct MpmState {
    std::vector<MpmParticle> particles;
    std::vector<MaterialParams> materials;
    MpmGrid grid;
};

/// One explicit step: p2g, grid forces, grid update, g2p.
void step(MpmState& state, const SimConfig& config);

/// Rest volume dx^3 / (particles sharing the cell), mass = density * volume.
void assign_rest_volumes(std::span<MpmParticle> particles, const GridSpec& grid,
                         std::span<const MaterialParams> materials);

double total_mass(std::span<const MpmParticle> particles);
Vec3 total_momentum(std::span<const MpmParticle> particles);
double min_det_f(std::span<const MpmParticle> particles);

} // namespace splatsim
