#pragma once

#include "splatsim/ground_extraction.hpp"
#include "splatsim/physics_bridge.hpp"
#include "splatsim/scene_editor.hpp"
#include "splatsim/scene_model.hpp"
#include "splatsim/splat_renderer.hpp"

#include "json.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace splatsim {

using Json = nlohmann::json;

inline constexpr int kSceneFormatVersion = 1;
inline constexpr int kScenarioFormatVersion = 1;

/// Parse or validation failure; the message carries a line:column or a
/// JSON path such as objects[2].primitives[5].scale.
class SceneFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Json scene_to_json(const Scene& s);
Scene scene_from_json(const Json& j);
Scene parse_scene(std::string_view text);
Scene load_scene(const std::filesystem::path& path);
void save_scene(const std::filesystem::path& path, const Scene& s);

/// Everything a pipeline run needs besides the scene.
struct Scenario {
    SimulationSetup setup;
    std::vector<EditCommand> edits;
    std::vector<Camera> cameras;
    bool write_images = true;
    bool write_point_clouds = false;
};

Json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& s);

Json edit_to_json(const EditCommand& e);
EditCommand edit_from_json(const Json& j, const std::string& where = "edit");
/// {"edits": [...]} document.
std::vector<EditCommand> parse_edit_script(std::string_view text);

Json camera_to_json(const Camera& c);
Camera camera_from_json(const Json& j, const std::string& where = "camera");
/// Reads a "cameras" array from any document that has one.
std::vector<Camera> parse_cameras(std::string_view text);

Json collider_to_json(const HalfSpaceCollider& c);
HalfSpaceCollider collider_from_json(const Json& j, const std::string& where = "collider");

Json material_to_json(const MaterialParams& m);
MaterialParams material_from_json(const Json& j, const std::string& where = "material");

/// {"margin": m, "boxes": [{"min": [...], "max": [...]}, ...]}.
struct BoxesFile {
    std::vector<AxisAlignedBox> boxes;
    double margin = 0.5;
};
BoxesFile parse_boxes(std::string_view text);

} // namespace splatsim
