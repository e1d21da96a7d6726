#include "splatsim/scene_io.hpp"

#include "splatsim/formats.hpp"

#include <algorithm>
#include <sstream>

namespace splatsim {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw SceneFormatError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

double number_field(const Json& j, const char* key, const std::string& where) {
    return number(field(j, key, where), where + "." + key);
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    return number(j.at(key), where + "." + key);
}

int int_or(const Json& j, const char* key, int fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
    return v.get<int>();
}

std::string string_field(const Json& j, const char* key, const std::string& where) {
    const auto& v = field(j, key, where);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

Vec3 vec3(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) fail(where, "expected an array of 3 numbers");
    return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]")};
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

// Quaternions are stored [w, x, y, z].
Quat quat(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4) fail(where, "expected a quaternion [w, x, y, z]");
    return Quat(number(j[0], where), number(j[1], where), number(j[2], where), number(j[3], where));
}

Json quat_json(const Quat& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

const Json& array_field(const Json& j, const char* key, const std::string& where) {
    const auto& v = field(j, key, where);
    if (!v.is_array()) fail(where + "." + key, "expected an array");
    return v;
}

Json primitive_json(const GaussianPrimitive& p) {
    Json sh = Json::array();
    for (const auto& c : p.sh) sh.push_back(vec3_json(c));
    return {{"mean", vec3_json(p.mean)},
            {"rotation", quat_json(p.rotation)},
            {"scale", vec3_json(p.scale)},
            {"opacity", p.opacity},
            {"sh", sh}};
}

GaussianPrimitive primitive_from(const Json& j, const std::string& where) {
    GaussianPrimitive p;
    p.mean = vec3(field(j, "mean", where), where + ".mean");
    p.rotation = quat(field(j, "rotation", where), where + ".rotation");
    p.scale = vec3(field(j, "scale", where), where + ".scale");
    p.opacity = number_field(j, "opacity", where);
    const auto& sh = array_field(j, "sh", where);
    p.sh.clear();
    for (std::size_t i = 0; i < sh.size(); ++i) p.sh.push_back(vec3(sh[i], where + ".sh[" + std::to_string(i) + "]"));
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return p;
}

std::vector<GaussianPrimitive> primitives_from(const Json& arr, const std::string& where) {
    std::vector<GaussianPrimitive> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(primitive_from(arr[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Json pose_json(const PoseTrack& t) {
    Json arr = Json::array();
    for (const auto& s : t.samples)
        arr.push_back({{"time", s.time}, {"rotation", quat_json(s.rotation)}, {"translation", vec3_json(s.translation)}});
    return arr;
}

PoseTrack pose_from(const Json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) fail(where, "expected a non-empty array of pose samples");
    PoseTrack t;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        PoseSample s;
        s.time = number_field(arr[i], "time", w);
        s.rotation = quat(field(arr[i], "rotation", w), w + ".rotation");
        s.translation = vec3(field(arr[i], "translation", w), w + ".translation");
        t.samples.push_back(s);
    }
    try {
        t.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return t;
}

Json appearance_json(const FourierSHAppearance& a) {
    Json coeffs = Json::array();
    for (const auto& per_channel : a.coeffs) {
        Json ch = Json::array();
        for (const auto& series : per_channel) ch.push_back(series);
        coeffs.push_back(ch);
    }
    return {{"k", a.k}, {"n_t", a.n_t}, {"coeffs", coeffs}};
}

FourierSHAppearance appearance_from(const Json& j, const std::string& where) {
    FourierSHAppearance a;
    a.k = int_or(j, "k", 0, where);
    a.n_t = number_field(j, "n_t", where);
    const auto& coeffs = array_field(j, "coeffs", where);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const std::string w = where + ".coeffs[" + std::to_string(i) + "]";
        if (!coeffs[i].is_array() || coeffs[i].size() != 3) fail(w, "expected 3 channel series");
        std::array<std::vector<double>, 3> per_channel;
        for (std::size_t c = 0; c < 3; ++c) {
            const auto& series = coeffs[i][c];
            if (!series.is_array()) fail(w, "expected an array of numbers");
            for (const auto& f : series) per_channel[c].push_back(number(f, w));
        }
        a.coeffs.push_back(std::move(per_channel));
    }
    try {
        a.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return a;
}

Json parse_json_text(std::string_view text, const std::string& what) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << what << " parse error at line " << line << ", column " << col << ": " << e.what();
        throw SceneFormatError(msg.str());
    }
}

void check_header(const Json& j, const char* format, int version) {
    if (!j.is_object()) fail("document", "expected a JSON object");
    if (j.contains("format") && j.at("format") != format)
        fail("format", std::string("expected '") + format + "'");
    const int v = int_or(j, "version", -1, "document");
    if (v != version) fail("version", "unsupported version " + std::to_string(v));
}

const char* mode_name(ContactMode m) { return m == ContactMode::sticky ? "sticky" : "slip"; }

} // namespace

Json material_to_json(const MaterialParams& m) {
    return {{"young_modulus", m.young_modulus},
            {"poisson_ratio", m.poisson_ratio},
            {"density", m.density},
            {"kind", "jelly"}};
}

MaterialParams material_from_json(const Json& j, const std::string& where) {
    MaterialParams m;
    m.young_modulus = number_or(j, "young_modulus", m.young_modulus, where);
    m.poisson_ratio = number_or(j, "poisson_ratio", m.poisson_ratio, where);
    m.density = number_or(j, "density", m.density, where);
    if (j.contains("kind")) {
        const auto kind = string_field(j, "kind", where);
        if (kind != "jelly") fail(where + ".kind", "unknown material kind '" + kind + "'");
    }
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return m;
}

Json scene_to_json(const Scene& s) {
    Json bg = Json::array();
    for (const auto& p : s.background) bg.push_back(primitive_json(p));
    Json objs = Json::array();
    for (const auto& o : s.objects) {
        Json prims = Json::array();
        for (const auto& p : o.primitives) prims.push_back(primitive_json(p));
        Json jo = {{"id", o.id}, {"primitives", prims}, {"pose", pose_json(o.pose)}};
        if (o.appearance) jo["appearance"] = appearance_json(*o.appearance);
        if (o.material) jo["material"] = material_to_json(*o.material);
        objs.push_back(jo);
    }
    return {{"format", "splatsim-scene"},
            {"version", kSceneFormatVersion},
            {"time_range", {s.time_range.first, s.time_range.second}},
            {"frame_rate", s.frame_rate},
            {"background", bg},
            {"objects", objs}};
}

Scene scene_from_json(const Json& j) {
    check_header(j, "splatsim-scene", kSceneFormatVersion);
    Scene s;
    if (j.contains("time_range")) {
        const auto& tr = j.at("time_range");
        if (!tr.is_array() || tr.size() != 2) fail("time_range", "expected [t_min, t_max]");
        s.time_range = {number(tr[0], "time_range[0]"), number(tr[1], "time_range[1]")};
    }
    s.frame_rate = number_or(j, "frame_rate", s.frame_rate, "document");
    if (j.contains("background")) s.background = primitives_from(array_field(j, "background", "document"), "background");
    if (j.contains("objects")) {
        const auto& objs = array_field(j, "objects", "document");
        for (std::size_t i = 0; i < objs.size(); ++i) {
            const std::string w = "objects[" + std::to_string(i) + "]";
            ObjectCluster o;
            o.id = string_field(objs[i], "id", w);
            if (s.find_object(o.id)) fail(w + ".id", "duplicate object id '" + o.id + "'");
            o.primitives = primitives_from(array_field(objs[i], "primitives", w), w + ".primitives");
            if (o.primitives.empty()) fail(w, "object '" + o.id + "' has no primitives");
            o.pose = pose_from(field(objs[i], "pose", w), w + ".pose");
            if (objs[i].contains("appearance"))
                o.appearance = appearance_from(objs[i].at("appearance"), w + ".appearance");
            if (objs[i].contains("material")) o.material = material_from_json(objs[i].at("material"), w + ".material");
            s.objects.push_back(std::move(o));
        }
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw SceneFormatError(e.what());
    }
    return s;
}

Scene parse_scene(std::string_view text) { return scene_from_json(parse_json_text(text, "scene")); }

Scene load_scene(const std::filesystem::path& path) {
    try {
        return parse_scene(read_file(path));
    } catch (const SceneFormatError& e) {
        throw SceneFormatError(path.string() + ": " + e.what());
    }
}

void save_scene(const std::filesystem::path& path, const Scene& s) {
    write_file_atomic(path, scene_to_json(s).dump(1) + "\n");
}

Json collider_to_json(const HalfSpaceCollider& c) {
    return {{"normal", vec3_json(c.normal)}, {"offset", c.offset}, {"mode", mode_name(c.mode)}, {"friction", c.friction}};
}

HalfSpaceCollider collider_from_json(const Json& j, const std::string& where) {
    HalfSpaceCollider c;
    c.normal = vec3(field(j, "normal", where), where + ".normal");
    c.offset = number_field(j, "offset", where);
    if (j.contains("mode")) {
        const auto mode = string_field(j, "mode", where);
        if (mode == "sticky") c.mode = ContactMode::sticky;
        else if (mode == "slip") c.mode = ContactMode::slip;
        else fail(where + ".mode", "expected 'sticky' or 'slip'");
    }
    c.friction = number_or(j, "friction", 0.0, where);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return c;
}

Json camera_to_json(const Camera& c) {
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r) rot.push_back(vec3_json(c.world_to_camera.row(r).transpose()));
    return {{"position", vec3_json(c.position)},
            {"rotation", rot},
            {"fx", c.fx},
            {"fy", c.fy},
            {"cx", c.cx},
            {"cy", c.cy},
            {"width", c.width},
            {"height", c.height},
            {"near_clip", c.near_clip},
            {"cull_margin_px", c.cull_margin_px}};
}

Camera camera_from_json(const Json& j, const std::string& where) {
    const int width = int_or(j, "width", 0, where);
    const int height = int_or(j, "height", 0, where);
    const double fx = number_field(j, "fx", where);
    const double fy = number_or(j, "fy", fx, where);
    const double near_clip = number_or(j, "near_clip", 0.01, where);
    Camera cam;
    if (j.contains("eye")) {
        const Vec3 eye = vec3(j.at("eye"), where + ".eye");
        const Vec3 target = vec3(field(j, "target", where), where + ".target");
        const Vec3 up = j.contains("up") ? vec3(j.at("up"), where + ".up") : Vec3::UnitZ();
        if ((target - eye).norm() == 0.0 || (target - eye).cross(up).norm() == 0.0)
            fail(where, "degenerate look-at (eye, target, up)");
        cam = Camera::look_at(eye, target, up, fx, fy, width, height, near_clip);
    } else {
        cam.position = vec3(field(j, "position", where), where + ".position");
        const auto& rot = array_field(j, "rotation", where);
        if (rot.size() != 3) fail(where + ".rotation", "expected 3 rows");
        for (int r = 0; r < 3; ++r)
            cam.world_to_camera.row(r) = vec3(rot[static_cast<std::size_t>(r)], where + ".rotation").transpose();
        cam.fx = fx;
        cam.fy = fy;
        cam.width = width;
        cam.height = height;
        cam.near_clip = near_clip;
    }
    cam.cx = number_or(j, "cx", 0.5 * width, where);
    cam.cy = number_or(j, "cy", 0.5 * height, where);
    cam.cull_margin_px = number_or(j, "cull_margin_px", cam.cull_margin_px, where);
    try {
        cam.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return cam;
}

std::vector<Camera> parse_cameras(std::string_view text) {
    const Json j = parse_json_text(text, "cameras");
    const auto& arr = array_field(j, "cameras", "document");
    std::vector<Camera> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(camera_from_json(arr[i], "cameras[" + std::to_string(i) + "]"));
    return out;
}

Json edit_to_json(const EditCommand& e) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, TranslateEdit>) {
                return {{"kind", "translate"}, {"target", v.target}, {"delta", vec3_json(v.delta)}};
            } else if constexpr (std::is_same_v<T, RotateEdit>) {
                return {{"kind", "rotate"}, {"target", v.target}, {"angle_deg", v.angle_deg}, {"axis", vec3_json(v.axis)}};
            } else if constexpr (std::is_same_v<T, DuplicateEdit>) {
                return {{"kind", "duplicate"}, {"target", v.target}, {"new_id", v.new_id}, {"delta", vec3_json(v.delta)}};
            } else {
                return {{"kind", "set_pose"}, {"target", v.target}, {"pose", pose_json(v.track)}};
            }
        },
        e);
}

EditCommand edit_from_json(const Json& j, const std::string& where) {
    const auto kind = string_field(j, "kind", where);
    const auto target = string_field(j, "target", where);
    if (kind == "translate") return TranslateEdit{target, vec3(field(j, "delta", where), where + ".delta")};
    if (kind == "rotate") {
        RotateEdit r{target, number_field(j, "angle_deg", where), Vec3::UnitZ()};
        if (j.contains("axis")) r.axis = vec3(j.at("axis"), where + ".axis");
        if (r.axis.norm() == 0.0) fail(where + ".axis", "rotation axis is zero");
        return r;
    }
    if (kind == "duplicate") {
        DuplicateEdit d{target, string_field(j, "new_id", where), Vec3::Zero()};
        if (j.contains("delta")) d.delta = vec3(j.at("delta"), where + ".delta");
        return d;
    }
    if (kind == "set_pose") return SetPoseEdit{target, pose_from(field(j, "pose", where), where + ".pose")};
    fail(where + ".kind", "unknown edit kind '" + kind + "'");
}

std::vector<EditCommand> parse_edit_script(std::string_view text) {
    const Json j = parse_json_text(text, "edit script");
    const auto& arr = array_field(j, "edits", "document");
    std::vector<EditCommand> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(edit_from_json(arr[i], "edits[" + std::to_string(i) + "]"));
    return out;
}

Json scenario_to_json(const Scenario& s) {
    const auto& setup = s.setup;
    const auto& cfg = setup.config;
    Json sim = {{"dt", cfg.dt},
                {"steps", cfg.steps},
                {"frame_stride", cfg.frame_stride},
                {"gravity", cfg.gravity},
                {"grid_resolution", setup.grid_resolution},
                {"start_time", setup.start_time},
                {"boundary_cells", cfg.boundary_cells},
                {"allow_cfl_violation", cfg.allow_cfl_violation}};
    if (setup.domain) sim["domain"] = {{"min", vec3_json(setup.domain->first)}, {"max", vec3_json(setup.domain->second)}};
    Json bindings = Json::array();
    for (const auto& b : setup.bindings) {
        Json jb = {{"object", b.object_id}, {"v0", vec3_json(b.v0)}};
        if (b.material) jb["material"] = material_to_json(*b.material);
        bindings.push_back(jb);
    }
    Json colliders = Json::array();
    for (const auto& c : cfg.colliders) colliders.push_back(collider_to_json(c));
    Json edits = Json::array();
    for (const auto& e : s.edits) edits.push_back(edit_to_json(e));
    Json cams = Json::array();
    for (const auto& c : s.cameras) cams.push_back(camera_to_json(c));
    return {{"format", "splatsim-scenario"},
            {"version", kScenarioFormatVersion},
            {"simulation", sim},
            {"material", material_to_json(setup.default_material)},
            {"bindings", bindings},
            {"colliders", colliders},
            {"edits", edits},
            {"cameras", cams},
            {"outputs", {{"images", s.write_images}, {"point_clouds", s.write_point_clouds}}}};
}

Scenario scenario_from_json(const Json& j) {
    check_header(j, "splatsim-scenario", kScenarioFormatVersion);
    Scenario s;
    auto& setup = s.setup;
    auto& cfg = setup.config;
    if (j.contains("simulation")) {
        const auto& sim = j.at("simulation");
        const std::string w = "simulation";
        cfg.dt = number_or(sim, "dt", cfg.dt, w);
        cfg.steps = int_or(sim, "steps", cfg.steps, w);
        cfg.frame_stride = int_or(sim, "frame_stride", cfg.frame_stride, w);
        cfg.gravity = number_or(sim, "gravity", cfg.gravity, w);
        cfg.boundary_cells = int_or(sim, "boundary_cells", cfg.boundary_cells, w);
        if (sim.contains("allow_cfl_violation")) {
            if (!sim.at("allow_cfl_violation").is_boolean()) fail(w + ".allow_cfl_violation", "expected a boolean");
            cfg.allow_cfl_violation = sim.at("allow_cfl_violation").get<bool>();
        }
        setup.grid_resolution = int_or(sim, "grid_resolution", setup.grid_resolution, w);
        setup.start_time = number_or(sim, "start_time", setup.start_time, w);
        if (sim.contains("domain")) {
            const auto& d = sim.at("domain");
            setup.domain = std::make_pair(vec3(field(d, "min", w + ".domain"), w + ".domain.min"),
                                          vec3(field(d, "max", w + ".domain"), w + ".domain.max"));
        }
        if (!(cfg.dt > 0.0)) fail(w + ".dt", "must be positive");
        if (cfg.steps < 0) fail(w + ".steps", "must be non-negative");
        if (cfg.frame_stride < 1) fail(w + ".frame_stride", "must be >= 1");
    }
    if (j.contains("material")) setup.default_material = material_from_json(j.at("material"), "material");
    if (j.contains("bindings")) {
        const auto& arr = array_field(j, "bindings", "document");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string w = "bindings[" + std::to_string(i) + "]";
            BindingRequest b;
            b.object_id = string_field(arr[i], "object", w);
            if (arr[i].contains("v0")) b.v0 = vec3(arr[i].at("v0"), w + ".v0");
            if (arr[i].contains("material")) b.material = material_from_json(arr[i].at("material"), w + ".material");
            setup.bindings.push_back(b);
        }
    }
    if (j.contains("colliders")) {
        const auto& arr = array_field(j, "colliders", "document");
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.colliders.push_back(collider_from_json(arr[i], "colliders[" + std::to_string(i) + "]"));
    }
    if (j.contains("edits")) {
        const auto& arr = array_field(j, "edits", "document");
        for (std::size_t i = 0; i < arr.size(); ++i)
            s.edits.push_back(edit_from_json(arr[i], "edits[" + std::to_string(i) + "]"));
    }
    if (j.contains("cameras")) {
        const auto& arr = array_field(j, "cameras", "document");
        for (std::size_t i = 0; i < arr.size(); ++i)
            s.cameras.push_back(camera_from_json(arr[i], "cameras[" + std::to_string(i) + "]"));
    }
    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        auto flag = [&](const char* key, bool& out) {
            if (!o.contains(key)) return;
            if (!o.at(key).is_boolean()) fail(std::string("outputs.") + key, "expected a boolean");
            out = o.at(key).get<bool>();
        };
        flag("images", s.write_images);
        flag("point_clouds", s.write_point_clouds);
    }
    return s;
}

Scenario parse_scenario(std::string_view text) { return scenario_from_json(parse_json_text(text, "scenario")); }

Scenario load_scenario(const std::filesystem::path& path) {
    try {
        return parse_scenario(read_file(path));
    } catch (const SceneFormatError& e) {
        throw SceneFormatError(path.string() + ": " + e.what());
    }
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
    write_file_atomic(path, scenario_to_json(s).dump(1) + "\n");
}

BoxesFile parse_boxes(std::string_view text) {
    const Json j = parse_json_text(text, "boxes");
    BoxesFile out;
    out.margin = number_or(j, "margin", out.margin, "document");
    const auto& arr = array_field(j, "boxes", "document");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string w = "boxes[" + std::to_string(i) + "]";
        out.boxes.push_back({vec3(field(arr[i], "min", w), w + ".min"), vec3(field(arr[i], "max", w), w + ".max")});
    }
    return out;
}

} // namespace splatsim
