#include "doctest.h"
#include "oracles.hpp"

#include "splatsim/physics_bridge.hpp"

#include <cmath>

using namespace splatsim;

namespace {

GaussianPrimitive sample_primitive() {
    GaussianPrimitive g;
    g.mean = Vec3(0.3, -0.2, 1.0);
    g.rotation = Quat(Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()));
    g.scale = Vec3(0.05, 0.1, 0.2);
    g.opacity = 0.6;
    g.sh = {Vec3(0.2, 0.4, 0.6), Vec3(0.1, 0, 0), Vec3(0, 0.1, 0), Vec3(0, 0, 0.1)};
    return g;
}

// Two small lattices side by side plus one background splat.
Scene block_scene() {
    Scene s;
    GaussianPrimitive bg;
    bg.mean = Vec3(0, 0, -1);
    s.background = {bg};
    for (int o = 0; o < 2; ++o) {
        std::vector<GaussianPrimitive> prims;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) {
                    GaussianPrimitive g;
                    g.mean = Vec3(2.0 * o + 0.1 * i, 0.1 * j, 0.5 + 0.1 * k);
                    g.scale = Vec3::Constant(0.04);
                    g.opacity = 0.8;
                    prims.push_back(g);
                }
        s.objects.push_back(make_centered_cluster(o == 0 ? "a" : "b", prims));
    }
    s.time_range = {0.0, 1.0};
    return s;
}

SimulationSetup still_setup(int steps, int stride) {
    SimulationSetup setup;
    setup.grid_resolution = 40;
    setup.bindings = {BindingRequest{"a", Vec3::Zero(), std::nullopt}};
    setup.config.gravity = 0.0;
    setup.config.dt = 2e-5;
    setup.config.steps = steps;
    setup.config.frame_stride = stride;
    return setup;
}

} // namespace

TEST_CASE("deform_gaussian") {
    const GaussianPrimitive ref = sample_primitive();
    const Mat3 sigma = covariance_of(ref);

    SUBCASE("identity keeps every field") {
        const auto out = deform_gaussian(ref, sigma, Mat3::Identity(), Vec3(1, 2, 3));
        CHECK(out.mean == Vec3(1, 2, 3));
        CHECK(out.rotation.coeffs() == ref.rotation.coeffs());
        CHECK(out.scale == ref.scale);
        CHECK(out.opacity == ref.opacity);
        CHECK(out.sh == ref.sh);
    }
    SUBCASE("rotation conjugates the covariance") {
        std::mt19937_64 rng(4);
        for (int i = 0; i < 20; ++i) {
            const Mat3 r = oracle::random_rotation(rng).toRotationMatrix();
            const auto out = deform_gaussian(ref, sigma, r, ref.mean);
            CHECK((covariance_of(out) - r * sigma * r.transpose()).norm() < 1e-12);
            CHECK(out.opacity == ref.opacity);
            CHECK(out.sh == ref.sh);
        }
    }
    SUBCASE("stretch doubles one axis") {
        GaussianPrimitive unit;
        unit.scale = Vec3::Ones();
        const auto out = deform_gaussian(unit, Mat3::Identity(), Vec3(2, 1, 1).asDiagonal(), Vec3::Zero());
        Vec3 s = out.scale;
        std::sort(s.data(), s.data() + 3);
        CHECK((s - Vec3(1, 1, 2)).norm() < 1e-12);
        CHECK((covariance_of(out) - Mat3(Vec3(4, 1, 1).asDiagonal())).norm() < 1e-12);
    }
    SUBCASE("covariance floor") {
        const Mat3 flat = Vec3(1.0, 1.0, 1e-6).asDiagonal();
        const Mat3 c = deformed_covariance(Mat3::Identity() * 1e-4, flat);
        Eigen::SelfAdjointEigenSolver<Mat3> eig(c);
        CHECK(eig.eigenvalues().minCoeff() >= kCovarianceEigenFloor * (1 - 1e-12));
        CHECK((c - c.transpose()).norm() == 0.0);
        const auto out = deform_gaussian(ref, sigma, flat, Vec3::Zero());
        CHECK(out.scale.minCoeff() >= std::sqrt(kCovarianceEigenFloor) * (1 - 1e-12));
    }
    SUBCASE("inverted F is rejected") {
        CHECK_THROWS(deform_gaussian(ref, sigma, Vec3(1, 1, -1).asDiagonal(), Vec3::Zero()));
    }
}

TEST_CASE("binding") {
    const Scene s = block_scene();
    const auto* a = s.find_object("a");
    const auto world = compose_object_at_time(s, *a, 0.0);

    const auto [parts, binding] = bind_cluster(s, *a, 0.0, 0u, Vec3(1, 0, 0));
    REQUIRE(parts.size() == world.size());
    CHECK(binding.size() == world.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        CHECK(parts[i].position == world[i].mean);
        CHECK(parts[i].velocity == Vec3(1, 0, 0));
        CHECK(parts[i].deformation_gradient == Mat3::Identity());
        CHECK(parts[i].mass == 0.0);
        CHECK((binding.material_covariances[i] - covariance_of(world[i])).norm() == 0.0);
    }

    const GridSpec grid = GridSpec::fit(std::vector<Vec3>{Vec3::Zero(), Vec3::Ones()}, 20);
    const auto [massive, b2] = bind_cluster(s, *a, 0.0, MaterialParams{}, Vec3::Zero(), grid);
    for (const auto& p : massive) {
        CHECK(p.rest_volume > 0.0);
        CHECK(p.mass == doctest::Approx(200.0 * p.rest_volume));
    }

    ObjectCluster empty;
    empty.id = "empty";
    empty.pose = PoseTrack::constant(Quat::Identity(), Vec3::Zero());
    CHECK_THROWS_WITH(bind_cluster(s, empty, 0.0, 0u, Vec3::Zero()), doctest::Contains("empty"));
}

TEST_CASE("simulation setup errors") {
    const Scene s = block_scene();
    SimulationSetup none = still_setup(1, 1);
    none.bindings.clear();
    CHECK_THROWS_WITH(PhysicsSimulation(s, none), doctest::Contains("no bound objects"));

    SimulationSetup unknown = still_setup(1, 1);
    unknown.bindings[0].object_id = "zzz";
    CHECK_THROWS_WITH(PhysicsSimulation(s, unknown), doctest::Contains("zzz"));

    SimulationSetup twice = still_setup(1, 1);
    twice.bindings.push_back(twice.bindings[0]);
    CHECK_THROWS_WITH(PhysicsSimulation(s, twice), doctest::Contains("bound twice"));
}

TEST_CASE("snapshots") {
    const Scene s = block_scene();

    SUBCASE("frame schedule") {
        const auto snaps = simulate_and_snapshot(s, still_setup(10, 4));
        REQUIRE(snaps.size() == 4);
        CHECK(snaps[0].diagnostics.step == 0);
        CHECK(snaps[1].diagnostics.step == 4);
        CHECK(snaps[2].diagnostics.step == 8);
        CHECK(snaps[3].diagnostics.step == 10);
        CHECK(snaps[3].diagnostics.time == doctest::Approx(2e-4));
        for (std::size_t i = 0; i < snaps.size(); ++i) CHECK(snaps[i].diagnostics.frame == static_cast<int>(i));
    }
    SUBCASE("frame zero is the undeformed scene") {
        const auto snaps = simulate_and_snapshot(s, still_setup(0, 1));
        REQUIRE(snaps.size() == 1);
        const auto x = compose_scene_at_time(snaps[0].scene, 0.0), y = compose_scene_at_time(s, 0.0);
        REQUIRE(x.size() == y.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(x[i].mean == y[i].mean);
            CHECK((covariance_of(x[i]) - covariance_of(y[i])).norm() < 1e-18);
            CHECK(x[i].opacity == y[i].opacity);
        }
    }
    SUBCASE("a cluster at rest stays put and unbound objects are untouched") {
        const auto snaps = simulate_and_snapshot(s, still_setup(20, 10));
        const auto& last = snaps.back();
        const auto moved = compose_object_at_time(last.scene, *last.scene.find_object("a"), 0.0);
        const auto orig = compose_object_at_time(s, *s.find_object("a"), 0.0);
        for (std::size_t i = 0; i < moved.size(); ++i) CHECK(moved[i].mean == orig[i].mean);
        const auto* b = last.scene.find_object("b");
        CHECK(b->pose.samples[0].translation == s.find_object("b")->pose.samples[0].translation);
        CHECK(last.scene.background[0].mean == s.background[0].mean);
        CHECK(last.diagnostics.min_det_f == 1.0);
    }
    SUBCASE("callback receives every frame") {
        int seen = 0;
        const auto out = simulate_and_snapshot(s, still_setup(6, 2), [&](const Snapshot& snap, const PhysicsSimulation& sim) {
            CHECK(snap.diagnostics.frame == seen);
            CHECK(sim.steps_taken() == 2 * seen);
            ++seen;
        });
        CHECK(out.empty());
        CHECK(seen == 4);
    }
    SUBCASE("escape is reported with its frame") {
        SimulationSetup fast = still_setup(2000, 10);
        fast.bindings[0].v0 = Vec3(40, 0, 0);
        // Without the sticky band the cluster runs off the grid.
        fast.config.boundary_cells = 0;
        fast.domain = std::make_pair(Vec3(-0.5, -0.5, 0.0), Vec3(1.0, 1.0, 1.5));
        int frame = -1;
        try {
            simulate_and_snapshot(s, fast);
        } catch (const SimulationFailure& e) {
            frame = e.frame_index;
            CHECK(std::string(e.what()).find("escaped") != std::string::npos);
        }
        CHECK(frame > 0);
    }
}

TEST_CASE("diagnostics track moving clusters") {
    const Scene s = block_scene();
    SimulationSetup setup = still_setup(10, 10);
    setup.bindings[0].v0 = Vec3(0.5, 0, 0);
    PhysicsSimulation sim(s, setup);
    const auto d0 = sim.diagnostics(0);
    sim.advance(10);
    const auto d1 = sim.diagnostics(1);
    REQUIRE(d1.objects.size() == 1);
    CHECK(d1.objects[0].object_id == "a");
    CHECK((d1.objects[0].velocity - Vec3(0.5, 0, 0)).norm() < 1e-12);
    CHECK((d1.objects[0].centroid - d0.objects[0].centroid - Vec3(1e-4, 0, 0)).norm() < 1e-12);
    CHECK(d1.total_mass == d0.total_mass);
    CHECK(d1.max_speed == doctest::Approx(0.5));
}
