#include "splatsim/pipeline.hpp"

#include "splatsim/formats.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>

namespace splatsim {

namespace {

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

std::string frame_name(const char* prefix, int cam, int frame, const char* ext) {
    char buf[96];
    if (cam >= 0)
        std::snprintf(buf, sizeof buf, "%s%d_frame%d.%s", prefix, cam, frame, ext);
    else
        std::snprintf(buf, sizeof buf, "%s%d.%s", prefix, frame, ext);
    return buf;
}

Json grid_json(const GridSpec& g) {
    return {{"origin", vec_json(g.origin)}, {"dx", g.dx}, {"dims", {g.dims[0], g.dims[1], g.dims[2]}}};
}

} // namespace

Json diagnostics_to_json(const FrameDiagnostics& d) {
    Json objs = Json::array();
    for (const auto& o : d.objects)
        objs.push_back({{"id", o.object_id}, {"centroid", vec_json(o.centroid)}, {"velocity", vec_json(o.velocity)}});
    return {{"frame", d.frame},         {"step", d.step},           {"time", d.time},
            {"total_mass", d.total_mass}, {"momentum", vec_json(d.momentum)}, {"min_det_f", d.min_det_f},
            {"max_speed", d.max_speed},   {"objects", objs}};
}

PipelineResult run_pipeline(const Scene& input, const Scenario& scenario, const std::filesystem::path& out_dir,
                            const PipelineOptions& options, const Json& inputs) {
    const auto started = std::chrono::steady_clock::now();
    PipelineResult result;
    auto log = [&](const std::string& msg) {
        if (options.verbose) std::cerr << "[splatsim] " << msg << '\n';
    };

    Scene scene;
    try {
        scene = apply_edits(input, scenario.edits);
        scene.validate();
    } catch (const std::exception& e) {
        throw PipelineError("edit", -1, e.what());
    }
    log("applied " + std::to_string(scenario.edits.size()) + " edits");

    std::vector<Camera> cameras = scenario.cameras;
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        try {
            cameras[i].validate();
        } catch (const std::exception& e) {
            throw PipelineError("camera", -1, "cameras[" + std::to_string(i) + "]: " + e.what());
        }
    }

    Json frames = Json::array();
    Json artifacts = Json::array();
    auto write = [&](const std::string& stage, int frame, const std::string& name, const std::string& bytes) {
        try {
            write_file_atomic(out_dir / name, bytes);
        } catch (const std::exception& e) {
            throw PipelineError(stage, frame, e.what());
        }
        result.artifacts.push_back(out_dir / name);
        artifacts.push_back({{"path", name}, {"fnv1a64", hex64(fnv1a64(bytes))}});
    };
    auto emit = [&](const Scene& snap_scene, double t, int frame) {
        if (!scenario.write_images && !scenario.write_point_clouds) return;
        std::vector<GaussianPrimitive> prims;
        try {
            prims = compose_scene_at_time(snap_scene, t);
        } catch (const std::exception& e) {
            throw PipelineError("compose", frame, e.what());
        }
        if (scenario.write_images) {
            for (std::size_t c = 0; c < cameras.size(); ++c) {
                std::string bytes;
                try {
                    bytes = encode_ppm(render(prims, cameras[c], options.threads));
                } catch (const std::exception& e) {
                    throw PipelineError("render", frame, e.what());
                }
                write("render", frame, frame_name("cam", static_cast<int>(c), frame, "ppm"), bytes);
            }
        }
        if (scenario.write_point_clouds)
            write("export", frame, frame_name("pc_frame", -1, frame, "ply"), encode_ply(export_point_cloud(prims)));
    };

    Json grid = nullptr;
    const auto& setup = scenario.setup;
    if (setup.bindings.empty() || setup.config.steps == 0) {
        log("static render at t=" + std::to_string(setup.start_time));
        emit(scene, setup.start_time, 0);
        FrameDiagnostics d;
        d.time = setup.start_time;
        result.frames.push_back(d);
        frames.push_back(diagnostics_to_json(d));
    } else {
        SimulationSetup sim_setup = setup;
        sim_setup.config.threads = options.threads;
        try {
            simulate_and_snapshot(scene, sim_setup, [&](const Snapshot& snap, const PhysicsSimulation& sim) {
                if (grid.is_null()) grid = grid_json(sim.grid());
                const auto& d = snap.diagnostics;
                log("frame " + std::to_string(d.frame) + " step " + std::to_string(d.step));
                emit(snap.scene, d.time, d.frame);
                result.frames.push_back(d);
                frames.push_back(diagnostics_to_json(d));
            });
        } catch (const PipelineError&) {
            throw;
        } catch (const SimulationFailure& e) {
            throw PipelineError("simulate", e.frame_index, e.what());
        } catch (const std::exception& e) {
            throw PipelineError("simulate", static_cast<int>(result.frames.size()), e.what());
        }
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    Json& m = result.manifest;
    m["format"] = "splatsim-manifest";
    m["version"] = 1;
    m["inputs"] = inputs;
    m["scenario"] = scenario_to_json(scenario);
    m["seed"] = options.seed;
    m["grid"] = grid;
    m["frame_interval_seconds"] = setup.config.dt * setup.config.frame_stride;
    m["frames"] = frames;
    m["artifacts"] = artifacts;
    m["runtime"] = {{"threads", options.threads}, {"wall_seconds", wall}};
    write_file_atomic(out_dir / "manifest.json", m.dump(1) + "\n");
    result.artifacts.push_back(out_dir / "manifest.json");
    return result;
}

PipelineResult run_pipeline(const std::filesystem::path& scene_path, const std::filesystem::path& scenario_path,
                            const std::filesystem::path& out_dir, const PipelineOptions& options) {
    Scene scene;
    Scenario scenario;
    std::string scene_bytes, scenario_bytes;
    try {
        scene_bytes = read_file(scene_path);
        scene = load_scene(scene_path);
    } catch (const std::exception& e) {
        throw PipelineError("load-scene", -1, e.what());
    }
    try {
        scenario_bytes = read_file(scenario_path);
        scenario = load_scenario(scenario_path);
    } catch (const std::exception& e) {
        throw PipelineError("load-scenario", -1, e.what());
    }
    Json inputs = {{"scene", {{"path", scene_path.filename().string()}, {"fnv1a64", hex64(fnv1a64(scene_bytes))}}},
                   {"scenario",
                    {{"path", scenario_path.filename().string()}, {"fnv1a64", hex64(fnv1a64(scenario_bytes))}}}};
    return run_pipeline(scene, scenario, out_dir, options, inputs);
}

Json comparable_manifest(const Json& manifest) {
    Json out = manifest;
    out.erase("runtime");
    return out;
}

} // namespace splatsim
