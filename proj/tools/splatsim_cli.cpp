#include "splatsim/formats.hpp"
#include "splatsim/pipeline.hpp"
#include "splatsim/synthetic.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>

using namespace splatsim;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    int threads = 0;
    bool verbose = false;
};

std::vector<Camera> cameras_or_default(const std::string& path, int width, int height) {
    if (path.empty()) return {demo_camera(width, height)};
    auto cams = parse_cameras(read_file(path));
    if (cams.empty()) throw std::runtime_error(path + ": no cameras");
    return cams;
}

std::string frame_file(int cam) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "cam%d_frame0.ppm", cam);
    return buf;
}

void write_json(const std::filesystem::path& p, const Json& j) { write_file_atomic(p, j.dump(1) + "\n"); }

Json plane_json(const PlaneModel& plane, const HalfSpaceCollider& collider, std::size_t candidates) {
    return {{"normal", {plane.normal.x(), plane.normal.y(), plane.normal.z()}},
            {"offset", plane.offset},
            {"inliers", plane.inlier_count()},
            {"candidates", candidates},
            {"collider", collider_to_json(collider)}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Physics-aware Gaussian splatting scene simulator"};
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Seed for randomized stages")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = serial reference mode)")
        ->envname("SPLATSIM_THREADS")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_flag("--verbose,-v", g.verbose, "Progress on stderr");

    std::string scene_path, out_path, cameras_path, script_path, scenario_path, points_path, boxes_path,
        ply_out_path;
    double time = 0.0;
    int width = 96, height = 64;

    auto* render_cmd = app.add_subcommand("render", "Render a scene to PPM images");
    render_cmd->add_option("--scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
    render_cmd->add_option("--cameras", cameras_path, "File with a \"cameras\" array")->check(CLI::ExistingFile);
    render_cmd->add_option("--time", time, "Scene time in seconds");
    render_cmd->add_option("--width", width, "Default camera width")->check(CLI::PositiveNumber);
    render_cmd->add_option("--height", height, "Default camera height")->check(CLI::PositiveNumber);
    render_cmd->add_option("--out", out_path, "Output directory")->required();

    auto* edit_cmd = app.add_subcommand("edit", "Apply an edit script to a scene");
    edit_cmd->add_option("--scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
    edit_cmd->add_option("--script", script_path, "Edit script")->required()->check(CLI::ExistingFile);
    edit_cmd->add_option("--out", out_path, "Output scene file")->required();

    auto* sim_cmd = app.add_subcommand("simulate", "Edit, simulate and render a scenario");
    sim_cmd->add_option("--scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--out", out_path, "Output directory")->required();

    RansacOptions ransac;
    double margin = -1.0;
    auto* ground_cmd = app.add_subcommand("extract-ground", "Fit a road plane to a point cloud");
    ground_cmd->add_option("--points", points_path, "Input PLY")->required()->check(CLI::ExistingFile);
    ground_cmd->add_option("--boxes", boxes_path, "Object boxes file")->check(CLI::ExistingFile);
    ground_cmd->add_option("--margin", margin, "Footprint margin in meters (overrides the boxes file)");
    ground_cmd->add_option("--threshold", ransac.threshold, "Inlier distance")->capture_default_str();
    ground_cmd->add_option("--iterations", ransac.iterations, "RANSAC iterations")->capture_default_str();
    ground_cmd->add_option("--out", out_path, "Plane JSON output")->required();
    ground_cmd->add_option("--out-ply", ply_out_path, "Colored PLY output (inliers red)");

    auto* pc_cmd = app.add_subcommand("export-pc", "Export Gaussian centres as a colored PLY");
    pc_cmd->add_option("--scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
    pc_cmd->add_option("--time", time, "Scene time in seconds");
    pc_cmd->add_option("--out", out_path, "Output PLY")->required();

    auto* demo_cmd = app.add_subcommand("synth-demo", "Write the built-in synthetic scenes and scenarios");
    demo_cmd->add_option("--out", out_path, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*render_cmd) {
            const Scene scene = load_scene(scene_path);
            const auto prims = compose_scene_at_time(scene, time);
            const auto cams = cameras_or_default(cameras_path, width, height);
            for (std::size_t c = 0; c < cams.size(); ++c) {
                const auto path = std::filesystem::path(out_path) / frame_file(static_cast<int>(c));
                write_file_atomic(path, encode_ppm(render(prims, cams[c], g.threads)));
                if (g.verbose) std::cerr << "wrote " << path.string() << '\n';
            }
        } else if (*edit_cmd) {
            const Scene scene = load_scene(scene_path);
            const auto edits = parse_edit_script(read_file(script_path));
            save_scene(out_path, apply_edits(scene, edits));
        } else if (*sim_cmd) {
            const auto result = run_pipeline(scene_path, scenario_path, out_path, {g.threads, g.seed, g.verbose});
            if (g.verbose) std::cerr << "wrote " << result.artifacts.size() << " artifacts\n";
        } else if (*ground_cmd) {
            const auto cloud = decode_ply(read_file(points_path));
            std::vector<Vec3> pts;
            pts.reserve(cloud.size());
            for (const auto& p : cloud) pts.push_back(p.position);
            std::vector<std::size_t> keep;
            if (!boxes_path.empty()) {
                auto boxes = parse_boxes(read_file(boxes_path));
                keep = filter_near_projection_indices(pts, boxes.boxes, margin >= 0.0 ? margin : boxes.margin);
            } else {
                keep.resize(pts.size());
                for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
            }
            std::vector<Vec3> candidates;
            for (auto i : keep) candidates.push_back(pts[i]);
            ransac.seed = g.seed;
            ransac.threads = g.threads;
            const auto plane = ransac_plane(candidates, ransac);
            const auto collider = make_halfspace_collider(plane, Vec3::UnitZ());
            write_json(out_path, plane_json(plane, collider, candidates.size()));
            if (!ply_out_path.empty()) {
                std::vector<ColoredPoint> colored;
                std::vector<char> inlier(candidates.size(), 0);
                for (auto i : plane.inliers) inlier[i] = 1;
                for (std::size_t i = 0; i < candidates.size(); ++i) {
                    ColoredPoint cp{candidates[i], {160, 160, 160}};
                    if (inlier[i]) cp.rgb = {255, 0, 0};
                    colored.push_back(cp);
                }
                write_file_atomic(ply_out_path, encode_ply(colored));
            }
            if (g.verbose)
                std::cerr << plane.inlier_count() << " of " << candidates.size() << " candidates are inliers\n";
        } else if (*pc_cmd) {
            const Scene scene = load_scene(scene_path);
            write_file_atomic(out_path, encode_ply(export_point_cloud(compose_scene_at_time(scene, time))));
        } else if (*demo_cmd) {
            const std::filesystem::path dir = out_path;
            const Scene demo = synth_demo_scene();
            save_scene(dir / "demo_scene.json", demo);
            save_scene(dir / "fleet_scene.json", planar_fleet_scene());
            save_scenario(dir / "conservation.json", conservation_scenario());
            save_scenario(dir / "wall_0.5.json", wall_collision_scenario(demo, 0.5));
            save_scenario(dir / "wall_2.5.json", wall_collision_scenario(demo, 2.5));
            save_scenario(dir / "fleet.json", planar_fleet_scenario());
            save_scenario(dir / "fall.json", fall_scenario(demo, true));
            Json cams = {{"cameras", Json::array({camera_to_json(demo_camera())})}};
            write_json(dir / "cameras.json", cams);
            Json boxes = {{"margin", 0.5}, {"boxes", Json::array()}};
            for (const auto& b : object_boxes(demo, 0.0))
                boxes["boxes"].push_back({{"min", {b.min.x(), b.min.y(), b.min.z()}},
                                          {"max", {b.max.x(), b.max.y(), b.max.z()}}});
            write_json(dir / "boxes.json", boxes);
            std::vector<ColoredPoint> cloud;
            for (const auto& p : synth_ground_points(demo, 0.1, g.seed)) cloud.push_back({p, {128, 128, 128}});
            write_file_atomic(dir / "ground_points.ply", encode_ply(cloud));
            if (g.verbose) std::cerr << "wrote synthetic demo to " << dir.string() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
