#include "splatsim/scene_editor.hpp"

#include <cmath>
#include <numbers>

namespace splatsim {

namespace {

ObjectCluster& require_object(Scene& s, const std::string& id) {
    auto* obj = s.find_object(id);
    if (!obj) throw EditError("unknown object id '" + id + "'");
    return *obj;
}

} // namespace

Scene translate_object(const Scene& s, const std::string& id, const Vec3& delta) {
    Scene out = s;
    auto& obj = require_object(out, id);
    for (auto& sample : obj.pose.samples) sample.translation += delta;
    return out;
}

Scene rotate_object(const Scene& s, const std::string& id, double angle_deg, const Vec3& axis) {
    Scene out = s;
    auto& obj = require_object(out, id);
    if (axis.norm() == 0.0) throw EditError("rotation axis for '" + id + "' is zero");
    const Quat edit = quat_from_axis_angle(axis, angle_deg * std::numbers::pi / 180.0);
    const Mat3 re = edit.toRotationMatrix();
    const Vec3 pivot_local = centroid_of(obj.primitives);
    for (auto& sample : obj.pose.samples) {
        const Vec3 pivot_offset = sample.rotation * pivot_local;
        sample.translation += pivot_offset - re * pivot_offset;
        sample.rotation = (edit * sample.rotation).normalized();
    }
    return out;
}

Scene duplicate_object(const Scene& s, const std::string& id, const std::string& new_id,
                       const Vec3& delta) {
    if (s.find_object(new_id)) throw EditError("object id '" + new_id + "' already exists");
    const auto* src = s.find_object(id);
    if (!src) throw EditError("unknown object id '" + id + "'");
    Scene out = s;
    ObjectCluster copy = *src;
    copy.id = new_id;
    out.objects.push_back(std::move(copy));
    return translate_object(out, new_id, delta);
}

Scene set_pose_override(const Scene& s, const std::string& id, const PoseTrack& track) {
    if (track.samples.empty()) throw EditError("pose override for '" + id + "' is empty");
    track.validate();
    Scene out = s;
    require_object(out, id).pose = track;
    return out;
}

Scene apply_edit(const Scene& s, const EditCommand& edit) {
    return std::visit(
        [&](const auto& e) -> Scene {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, TranslateEdit>) {
                return translate_object(s, e.target, e.delta);
            } else if constexpr (std::is_same_v<T, RotateEdit>) {
                return rotate_object(s, e.target, e.angle_deg, e.axis);
            } else if constexpr (std::is_same_v<T, DuplicateEdit>) {
                return duplicate_object(s, e.target, e.new_id, e.delta);
            } else {
                return set_pose_override(s, e.target, e.track);
            }
        },
        edit);
}

Scene apply_edits(const Scene& s, const std::vector<EditCommand>& edits) {
    Scene cur = s;
    for (const auto& e : edits) cur = apply_edit(cur, e);
    return cur;
}

} // namespace splatsim
