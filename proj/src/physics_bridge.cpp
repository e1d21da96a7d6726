#include "splatsim/physics_bridge.hpp"

#include "splatsim/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace splatsim {

std::pair<std::vector<MpmParticle>, SimulationBinding>
bind_cluster(const Scene& scene, const ObjectCluster& cluster, double t0, std::uint32_t material_index,
             const Vec3& v0) {
    if (cluster.primitives.empty())
        throw std::invalid_argument("cannot bind empty cluster '" + cluster.id + "'");
    SimulationBinding binding;
    binding.object_id = cluster.id;
    binding.initial_velocity = v0;
    binding.reference = compose_object_at_time(scene, cluster, t0);
    binding.material_covariances.reserve(binding.reference.size());

    std::vector<MpmParticle> particles;
    particles.reserve(binding.reference.size());
    for (const auto& prim : binding.reference) {
        binding.material_covariances.push_back(covariance_of(prim));
        MpmParticle p;
        p.position = prim.mean;
        p.velocity = v0;
        p.material = material_index;
        particles.push_back(p);
    }
    return {std::move(particles), std::move(binding)};
}

std::pair<std::vector<MpmParticle>, SimulationBinding>
bind_cluster(const Scene& scene, const ObjectCluster& cluster, double t0, const MaterialParams& material,
             const Vec3& v0, const GridSpec& grid) {
    auto bound = bind_cluster(scene, cluster, t0, 0u, v0);
    const MaterialParams table[] = {material};
    assign_rest_volumes(bound.first, grid, table);
    return bound;
}

Mat3 deformed_covariance(const Mat3& material_cov, const Mat3& f) {
    Mat3 a = f * material_cov * f.transpose();
    a = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> eig(a);
    const Vec3 ev = eig.eigenvalues();
    if (ev.minCoeff() >= kCovarianceEigenFloor) return a;
    const Mat3& q = eig.eigenvectors();
    Mat3 out = q * ev.cwiseMax(kCovarianceEigenFloor).asDiagonal() * q.transpose();
    return 0.5 * (out + out.transpose());
}

GaussianPrimitive deform_gaussian(const GaussianPrimitive& reference, const Mat3& material_cov,
                                  const Mat3& f, const Vec3& x) {
    if (!(f.determinant() > 0.0)) throw std::invalid_argument("deform_gaussian: det(F) must be positive");
    if (f == Mat3::Identity()) {
        GaussianPrimitive same = reference;
        same.mean = x;
        return same;
    }
    const Mat3 a = deformed_covariance(material_cov, f);
    Eigen::SelfAdjointEigenSolver<Mat3> eig(a);
    Mat3 rot = eig.eigenvectors();
    if (rot.determinant() < 0.0) rot.col(0) *= -1.0;
    const Vec3 ev = eig.eigenvalues().cwiseMax(kCovarianceEigenFloor);

    GaussianPrimitive out = reference;
    out.mean = x;
    out.rotation = Quat(rot).normalized();
    out.scale = ev.cwiseSqrt();
    return out;
}

PhysicsSimulation::PhysicsSimulation(Scene scene, SimulationSetup setup)
    : scene_(std::move(scene)), setup_(std::move(setup)) {
    if (setup_.bindings.empty()) throw std::invalid_argument("simulation has no bound objects");
    state_.materials.push_back(setup_.default_material);
    for (const auto& req : setup_.bindings) {
        const auto* obj = scene_.find_object(req.object_id);
        if (!obj) throw std::invalid_argument("binding references unknown object '" + req.object_id + "'");
        for (const auto& b : bindings_)
            if (b.object_id == req.object_id)
                throw std::invalid_argument("object '" + req.object_id + "' is bound twice");
        std::uint32_t mat = 0;
        const auto& override_material = req.material ? req.material : obj->material;
        if (override_material) {
            mat = static_cast<std::uint32_t>(state_.materials.size());
            state_.materials.push_back(*override_material);
        }
        auto [parts, binding] = bind_cluster(scene_, *obj, setup_.start_time, mat, req.v0);
        binding.first_particle = state_.particles.size();
        state_.particles.insert(state_.particles.end(), parts.begin(), parts.end());
        bindings_.push_back(std::move(binding));
    }
    for (const auto& m : state_.materials) m.validate();

    GridSpec spec;
    if (setup_.domain) {
        spec = GridSpec::from_box(setup_.domain->first, setup_.domain->second, setup_.grid_resolution);
    } else {
        std::vector<Vec3> pts;
        pts.reserve(state_.particles.size());
        for (const auto& p : state_.particles) pts.push_back(p.position);
        spec = GridSpec::fit(pts, setup_.grid_resolution);
    }
    state_.grid = MpmGrid(spec);
    setup_.config.validate(spec.dx, state_.materials);
    assign_rest_volumes(state_.particles, spec, state_.materials);
}

void PhysicsSimulation::advance(int steps) {
    for (int s = 0; s < steps; ++s) {
        step(state_, setup_.config);
        ++steps_taken_;
    }
}

Scene PhysicsSimulation::snapshot_scene() const {
    Scene out = scene_;
    const auto& parts = state_.particles;
    for (const auto& b : bindings_) {
        auto* obj = out.find_object(b.object_id);
        std::vector<GaussianPrimitive> deformed(b.size());
        parallel_for(b.size(), setup_.config.threads, [&](std::size_t i) {
            const auto& p = parts[b.first_particle + i];
            deformed[i] = deform_gaussian(b.reference[i], b.material_covariances[i], p.deformation_gradient,
                                          p.position);
        });
        obj->primitives = std::move(deformed);
        obj->pose = PoseTrack::constant(Quat::Identity(), Vec3::Zero());
        obj->appearance.reset();
    }
    return out;
}

FrameDiagnostics PhysicsSimulation::diagnostics(int frame) const {
    const auto& parts = state_.particles;
    FrameDiagnostics d;
    d.frame = frame;
    d.step = steps_taken_;
    d.time = time();
    d.total_mass = total_mass(parts);
    d.momentum = total_momentum(parts);
    d.min_det_f = min_det_f(parts);
    for (const auto& p : parts) d.max_speed = std::max(d.max_speed, p.velocity.norm());
    for (const auto& b : bindings_) {
        ObjectDiagnostics od;
        od.object_id = b.object_id;
        double m = 0.0;
        Vec3 mx = Vec3::Zero(), mv = Vec3::Zero();
        for (std::size_t i = 0; i < b.size(); ++i) {
            const auto& p = parts[b.first_particle + i];
            m += p.mass;
            mx += p.mass * p.position;
            mv += p.mass * p.velocity;
        }
        od.centroid = mx / m;
        od.velocity = mv / m;
        d.objects.push_back(std::move(od));
    }
    return d;
}

std::vector<Snapshot> simulate_and_snapshot(const Scene& scene, const SimulationSetup& setup,
                                            const SnapshotCallback& on_frame) {
    PhysicsSimulation sim(scene, setup);
    std::vector<Snapshot> out;
    const auto& cfg = sim.setup().config;
    int frame = 0;
    auto emit = [&] {
        Snapshot snap{sim.diagnostics(frame), sim.snapshot_scene()};
        if (on_frame) {
            on_frame(snap, sim);
        } else {
            out.push_back(std::move(snap));
        }
        ++frame;
    };
    try {
        emit();
        while (sim.steps_taken() < cfg.steps) {
            const int n = std::min(cfg.frame_stride, cfg.steps - sim.steps_taken());
            sim.advance(n);
            if (sim.steps_taken() % cfg.frame_stride == 0 || sim.steps_taken() == cfg.steps) emit();
        }
    } catch (const SimulationFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw SimulationFailure(frame, e.what());
    }
    return out;
}

} // namespace splatsim
