#pragma once

#include "splatsim/material.hpp"
#include "splatsim/types.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace splatsim {

/// One anisotropic 3D Gaussian. `sh` holds RGB coefficients per real SH
/// basis function, ordered by flat index l*l + l + m, so its length is
/// (degree+1)^2.
struct GaussianPrimitive {
    Vec3 mean = Vec3::Zero();
    Quat rotation = Quat::Identity();
    Vec3 scale = Vec3::Ones();
    double opacity = 1.0;
    std::vector<Vec3> sh{Vec3::Zero()};

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
    int sh_degree() const;
};

struct PoseSample {
    double time = 0.0;
    Quat rotation = Quat::Identity();
    Vec3 translation = Vec3::Zero();
};

struct PoseTrack {
    std::vector<PoseSample> samples;

    static PoseTrack constant(const Quat& rotation, const Vec3& translation);
    void validate() const;
};

/// Time-varying SH coefficients as a cosine series over frame time.
/// coeffs[j][c] is the length-k series for flat SH index j, channel c.
struct FourierSHAppearance {
    int k = 4;
    double n_t = 1.0;
    std::vector<std::array<std::vector<double>, 3>> coeffs;

    void validate() const;
    std::size_t sh_count() const { return coeffs.size(); }
};

struct ObjectCluster {
    std::string id;
    std::vector<GaussianPrimitive> primitives;
    PoseTrack pose;
    std::optional<FourierSHAppearance> appearance;
    std::optional<MaterialParams> material;

    void validate() const;
};

struct Scene {
    std::vector<GaussianPrimitive> background;
    std::vector<ObjectCluster> objects;
    std::pair<double, double> time_range{0.0, 0.0};
    // Scene seconds to appearance frame units.
    double frame_rate = 10.0;

    void validate() const;
    const ObjectCluster* find_object(const std::string& id) const;
    ObjectCluster* find_object(const std::string& id);
    std::size_t primitive_count() const;
};

/// R S S^T R^T.
Mat3 covariance_of(const GaussianPrimitive& p);

/// Pose at time t: exact at samples, lerp/slerp between, clamped outside.
std::pair<Quat, Vec3> pose_at(const PoseTrack& track, double t);

/// Sum_i f_i cos(i pi t / N_t) for flat SH index `sh_index` and `channel`.
double evaluate_fourier_sh(const FourierSHAppearance& a, std::size_t sh_index, int channel,
                           double frame_time);

/// Seconds to the appearance frame time used by evaluate_fourier_sh.
double frame_time_of(const Scene& s, double t, double n_t);

/// Flattens background and posed objects into world-frame primitives.
std::vector<GaussianPrimitive> compose_scene_at_time(const Scene& s, double t);

/// World-frame primitives of one object at time t.
std::vector<GaussianPrimitive> compose_object_at_time(const Scene& s, const ObjectCluster& obj,
                                                      double t);

/// Builds a cluster whose local origin is the centroid of `world_primitives`.
/// The centroid is folded into a constant pose.
ObjectCluster make_centered_cluster(std::string id, std::vector<GaussianPrimitive> world_primitives);

Vec3 centroid_of(const std::vector<GaussianPrimitive>& prims);

} // namespace splatsim
