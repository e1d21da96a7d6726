#pragma once

#include "splatsim/scene_model.hpp"

#include <string>
#include <variant>
#include <vector>

namespace splatsim {

/// Raised when an edit names an object that does not exist, or would create
/// a duplicate id.
class EditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Scene translate_object(const Scene& s, const std::string& id, const Vec3& delta);

/// Rotates about the cluster centroid in world space: every pose sample's
/// rotation is left-multiplied by the edit rotation and its translation is
/// adjusted so the centroid stays put.
Scene rotate_object(const Scene& s, const std::string& id, double angle_deg, const Vec3& axis);

Scene duplicate_object(const Scene& s, const std::string& id, const std::string& new_id,
                       const Vec3& delta);

Scene set_pose_override(const Scene& s, const std::string& id, const PoseTrack& track);

struct TranslateEdit {
    std::string target;
    Vec3 delta = Vec3::Zero();
};
struct RotateEdit {
    std::string target;
    double angle_deg = 0.0;
    Vec3 axis = Vec3::UnitZ();
};
struct DuplicateEdit {
    std::string target;
    std::string new_id;
    Vec3 delta = Vec3::Zero();
};
struct SetPoseEdit {
    std::string target;
    PoseTrack track;
};

using EditCommand = std::variant<TranslateEdit, RotateEdit, DuplicateEdit, SetPoseEdit>;

Scene apply_edit(const Scene& s, const EditCommand& edit);
Scene apply_edits(const Scene& s, const std::vector<EditCommand>& edits);

} // namespace splatsim
