#pragma once

#include "splatsim/mpm_solver.hpp"
#include "splatsim/scene_model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace splatsim {

/// Correspondence between one object's primitives and its MPM particles:
/// primitive i is particle first_particle + i.
struct SimulationBinding {
    std::string object_id;
    std::size_t first_particle = 0;
    // Bind-time world-frame primitives; X_p is reference[i].mean.
    std::vector<GaussianPrimitive> reference;
    std::vector<Mat3> material_covariances;
    Vec3 initial_velocity = Vec3::Zero();

    std::size_t size() const { return reference.size(); }
};

/// One particle per primitive at its world-frame mean at time t0, F = I,
/// velocity v0. Mass and volume stay zero until assign_rest_volumes.
std::pair<std::vector<MpmParticle>, SimulationBinding>
bind_cluster(const Scene& scene, const ObjectCluster& cluster, double t0, std::uint32_t material_index,
             const Vec3& v0);

/// As above, then assigns rest volume and mass on `grid` with `material`.
std::pair<std::vector<MpmParticle>, SimulationBinding>
bind_cluster(const Scene& scene, const ObjectCluster& cluster, double t0, const MaterialParams& material,
             const Vec3& v0, const GridSpec& grid);

inline constexpr double kCovarianceEigenFloor = 1e-8;

/// F Sigma F^T, symmetrized, eigenvalues floored.
Mat3 deformed_covariance(const Mat3& material_cov, const Mat3& f);

/// Gaussian after deformation: mean x, covariance F Sigma F^T refactored
/// into rotation and scale. Opacity and SH are copied from `reference`.
GaussianPrimitive deform_gaussian(const GaussianPrimitive& reference, const Mat3& material_cov,
                                  const Mat3& f, const Vec3& x);

struct BindingRequest {
    std::string object_id;
    Vec3 v0 = Vec3::Zero();
    std::optional<MaterialParams> material;
};

struct SimulationSetup {
    double start_time = 0.0;
    int grid_resolution = 50;
    // Explicit grid domain; fitted to the bound particles when absent.
    std::optional<std::pair<Vec3, Vec3>> domain;
    MaterialParams default_material;
    std::vector<BindingRequest> bindings;
    SimConfig config;
};

struct ObjectDiagnostics {
    std::string object_id;
    Vec3 centroid = Vec3::Zero();  // mass weighted
    Vec3 velocity = Vec3::Zero();  // momentum / mass
};

struct FrameDiagnostics {
    int frame = 0;
    int step = 0;
    double time = 0.0;
    double total_mass = 0.0;
    Vec3 momentum = Vec3::Zero();
    double min_det_f = 1.0;
    double max_speed = 0.0;
    std::vector<ObjectDiagnostics> objects;
};

struct Snapshot {
    FrameDiagnostics diagnostics;
    Scene scene;
};

/// Raised when a simulation stage fails; carries the frame being produced.
class SimulationFailure : public std::runtime_error {
public:
    SimulationFailure(int frame, const std::string& what)
        : std::runtime_error("simulation failed at frame " + std::to_string(frame) + ": " + what),
          frame_index(frame) {}
    int frame_index;
};

/// Stepping driver that owns the MPM state for the bound clusters of a scene.
class PhysicsSimulation {
public:
    PhysicsSimulation(Scene scene, SimulationSetup setup);

    void advance(int steps);

    const MpmState& state() const { return state_; }
    const std::vector<SimulationBinding>& bindings() const { return bindings_; }
    const GridSpec& grid() const { return state_.grid.spec(); }
    const SimulationSetup& setup() const { return setup_; }
    int steps_taken() const { return steps_taken_; }
    double time() const { return setup_.start_time + steps_taken_ * setup_.config.dt; }

    /// Input scene with every bound cluster replaced by its deformed primitives.
    Scene snapshot_scene() const;
    FrameDiagnostics diagnostics(int frame) const;

private:
    Scene scene_;
    SimulationSetup setup_;
    MpmState state_;
    std::vector<SimulationBinding> bindings_;
    int steps_taken_ = 0;
};

using SnapshotCallback = std::function<void(const Snapshot&, const PhysicsSimulation&)>;

/// Steps the scene and emits a snapshot every frame_stride steps, starting
/// with the undeformed frame 0. Returns the emitted snapshots unless a
/// callback consumes them (then the returned list is empty).
std::vector<Snapshot> simulate_and_snapshot(const Scene& scene, const SimulationSetup& setup,
                                            const SnapshotCallback& on_frame = {});

} // namespace splatsim
