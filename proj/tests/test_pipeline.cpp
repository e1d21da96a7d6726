#include "doctest.h"

#include "splatsim/formats.hpp"
#include "splatsim/pipeline.hpp"
#include "splatsim/synthetic.hpp"

#include <filesystem>

using namespace splatsim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "splatsim_pipeline_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("zero steps is a plain render") {
    const Scene demo = synth_demo_scene();
    Scenario sc;
    sc.cameras = {demo_camera(48, 32)};
    sc.setup.start_time = 2.0;
    const fs::path dir = fresh_dir("static");
    const auto result = run_pipeline(demo, sc, dir, {});
    REQUIRE(result.artifacts.size() == 2);
    CHECK(result.artifacts[0].filename() == "cam0_frame0.ppm");
    CHECK(result.artifacts[1].filename() == "manifest.json");
    const std::string expected = encode_ppm(render(compose_scene_at_time(demo, 2.0), sc.cameras[0]));
    CHECK(read_file(result.artifacts[0]) == expected);
    CHECK(result.manifest["artifacts"][0]["fnv1a64"] == hex64(fnv1a64(expected)));
    CHECK(result.manifest["grid"].is_null());
    CHECK(result.frames.size() == 1);
}

TEST_CASE("simulated run writes frames and a manifest") {
    const Scene fleet = planar_fleet_scene();
    Scenario sc = planar_fleet_scenario(100);
    sc.cameras = {demo_camera(32, 24)};
    sc.write_point_clouds = true;
    const fs::path dir = fresh_dir("fleet");
    const auto result = run_pipeline(fleet, sc, dir, {});

    REQUIRE(result.frames.size() == 5);
    const double m0 = result.frames[0].total_mass;
    for (const auto& f : result.frames) {
        CHECK(f.total_mass == m0);
        // Planar start, no gravity: nothing leaves the plane.
        CHECK(std::abs(f.momentum.z()) <= 1e-9);
        for (const auto& o : f.objects) CHECK(std::abs(o.velocity.z()) <= 1e-9);
    }
    CHECK(result.artifacts.size() == 11);
    CHECK(fs::exists(dir / "cam0_frame4.ppm"));
    CHECK(fs::exists(dir / "pc_frame4.ply"));
    CHECK(decode_ply(read_file(dir / "pc_frame0.ply")).size() == fleet.primitive_count());

    const Json m = Json::parse(read_file(dir / "manifest.json"));
    CHECK(m["format"] == "splatsim-manifest");
    CHECK(m["frame_interval_seconds"].get<double>() == doctest::Approx(25 * 2e-4));
    CHECK(m["grid"]["dims"] == Json::array({200, 200, 200}));
    CHECK(m["frames"].size() == 5);
    for (const auto& a : m["artifacts"])
        CHECK(a["fnv1a64"] == hex64(fnv1a64(read_file(dir / a["path"].get<std::string>()))));
    CHECK(comparable_manifest(m).contains("runtime") == false);
    CHECK(comparable_manifest(m)["frames"] == m["frames"]);
}

TEST_CASE("stage errors") {
    const Scene demo = synth_demo_scene();
    const fs::path dir = fresh_dir("errors");

    Scenario bad_edit;
    bad_edit.edits = {TranslateEdit{"nobody", Vec3::Zero()}};
    try {
        run_pipeline(demo, bad_edit, dir, {});
        FAIL("expected a pipeline error");
    } catch (const PipelineError& e) {
        CHECK(e.stage == "edit");
        CHECK(e.frame == -1);
        CHECK(std::string(e.what()).find("nobody") != std::string::npos);
    }

    Scenario bad_cam;
    bad_cam.cameras = {demo_camera()};
    bad_cam.cameras[0].width = 0;
    CHECK_THROWS_WITH_AS(run_pipeline(demo, bad_cam, dir, {}), doctest::Contains("cameras[0]"), PipelineError);

    Scenario bad_cfl = wall_collision_scenario(demo, 0.5, 10);
    bad_cfl.setup.config.dt = 1e-2;
    try {
        run_pipeline(demo, bad_cfl, dir, {});
        FAIL("expected a pipeline error");
    } catch (const PipelineError& e) {
        CHECK(e.stage == "simulate");
        CHECK(std::string(e.what()).find("CFL") != std::string::npos);
    }
}

TEST_CASE("checked-in examples run from disk") {
    const fs::path data = SPLATSIM_DATA_DIR;
    const fs::path dir = fresh_dir("examples");
    const auto result = run_pipeline(data / "minimal_scene.json", data / "wall_scenario.json", dir, {});
    const Json& m = result.manifest;
    CHECK(m["inputs"]["scene"]["fnv1a64"] == hex64(fnv1a64(read_file(data / "minimal_scene.json"))));
    REQUIRE(result.frames.size() == 21);
    // The block slows down once it reaches the wall.
    CHECK(result.frames.front().objects[0].velocity.x() == doctest::Approx(2.0));
    CHECK(result.frames.back().objects[0].velocity.x() < 1.0);
    for (const auto& f : result.frames) CHECK(f.min_det_f > 0.99);
}
