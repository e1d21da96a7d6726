#include "splatsim/scene_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace splatsim {

namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr int kMaxShDegree = 3;

bool is_unit(const Quat& q) { return std::abs(q.norm() - 1.0) <= kUnitTolerance; }

} // namespace

void GaussianPrimitive::validate() const {
    if (!mean.allFinite()) throw std::invalid_argument("mean must be finite");
    if (!is_unit(rotation)) throw std::invalid_argument("rotation quaternion must have unit norm");
    if (!(scale.array() > 0.0).all() || !scale.allFinite())
        throw std::invalid_argument("scale components must be strictly positive");
    if (!(opacity >= 0.0 && opacity <= 1.0)) throw std::invalid_argument("opacity must lie in [0,1]");
    sh_degree();
}

int GaussianPrimitive::sh_degree() const {
    for (int l = 0; l <= kMaxShDegree; ++l)
        if (sh.size() == static_cast<std::size_t>((l + 1) * (l + 1))) return l;
    throw std::invalid_argument("sh must hold (L+1)^2 coefficients with L in [0,3]");
}

PoseTrack PoseTrack::constant(const Quat& rotation, const Vec3& translation) {
    return PoseTrack{{PoseSample{0.0, rotation, translation}}};
}

void PoseTrack::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!is_unit(samples[i].rotation))
            throw std::invalid_argument("pose sample " + std::to_string(i) + " rotation is not unit");
        if (i > 0 && !(samples[i].time > samples[i - 1].time))
            throw std::invalid_argument("pose sample times must be strictly increasing");
    }
}

void FourierSHAppearance::validate() const {
    if (k < 1) throw std::invalid_argument("fourier appearance needs k >= 1");
    if (!(n_t > 0.0)) throw std::invalid_argument("fourier appearance needs n_t > 0");
    if (coeffs.empty()) throw std::invalid_argument("fourier appearance has no coefficients");
    for (const auto& per_channel : coeffs)
        for (const auto& series : per_channel)
            if (series.size() != static_cast<std::size_t>(k))
                throw std::invalid_argument("fourier coefficient series must have length k");
}

void ObjectCluster::validate() const {
    if (primitives.empty()) throw std::invalid_argument("object '" + id + "' has no primitives");
    if (pose.samples.empty()) throw std::invalid_argument("object '" + id + "': empty pose track");
    try {
        pose.validate();
        if (appearance) appearance->validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("object '" + id + "': " + e.what());
    }
    for (std::size_t i = 0; i < primitives.size(); ++i) {
        try {
            primitives[i].validate();
        } catch (const std::invalid_argument& e) {
            std::ostringstream msg;
            msg << "object '" << id << "' primitive " << i << ": " << e.what();
            throw std::invalid_argument(msg.str());
        }
    }
}

void Scene::validate() const {
    for (std::size_t i = 0; i < background.size(); ++i) {
        try {
            background[i].validate();
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("background primitive " + std::to_string(i) + ": " + e.what());
        }
    }
    std::set<std::string> ids;
    for (const auto& obj : objects) {
        if (!ids.insert(obj.id).second)
            throw std::invalid_argument("duplicate object id '" + obj.id + "'");
        obj.validate();
    }
    if (time_range.second < time_range.first) throw std::invalid_argument("time_range is reversed");
    if (!(frame_rate > 0.0)) throw std::invalid_argument("frame_rate must be positive");
}

const ObjectCluster* Scene::find_object(const std::string& id) const {
    auto it = std::find_if(objects.begin(), objects.end(), [&](const auto& o) { return o.id == id; });
    return it == objects.end() ? nullptr : &*it;
}

ObjectCluster* Scene::find_object(const std::string& id) {
    auto it = std::find_if(objects.begin(), objects.end(), [&](const auto& o) { return o.id == id; });
    return it == objects.end() ? nullptr : &*it;
}

std::size_t Scene::primitive_count() const {
    std::size_t n = background.size();
    for (const auto& o : objects) n += o.primitives.size();
    return n;
}

Mat3 covariance_of(const GaussianPrimitive& p) {
    const Mat3 rs = p.rotation.toRotationMatrix() * p.scale.asDiagonal();
    Mat3 cov = rs * rs.transpose();
    // RS(RS)^T is symmetric in exact arithmetic; make it so bitwise.
    return 0.5 * (cov + cov.transpose());
}

std::pair<Quat, Vec3> pose_at(const PoseTrack& track, double t) {
    const auto& s = track.samples;
    if (s.empty()) throw std::invalid_argument("empty pose track");
    if (t <= s.front().time) return {s.front().rotation, s.front().translation};
    if (t >= s.back().time) return {s.back().rotation, s.back().translation};
    auto hi = std::lower_bound(s.begin(), s.end(), t,
                               [](const PoseSample& a, double value) { return a.time < value; });
    if (hi->time == t) return {hi->rotation, hi->translation};
    const auto lo = hi - 1;
    const double u = (t - lo->time) / (hi->time - lo->time);
    // Eigen's slerp takes the shortest arc.
    const Quat q = lo->rotation.slerp(u, hi->rotation);
    const Vec3 x = (1.0 - u) * lo->translation + u * hi->translation;
    return {q, x};
}

double evaluate_fourier_sh(const FourierSHAppearance& a, std::size_t sh_index, int channel,
                           double frame_time) {
    if (sh_index >= a.coeffs.size()) throw std::out_of_range("fourier sh index out of range");
    if (channel < 0 || channel > 2) throw std::out_of_range("fourier sh channel out of range");
    const auto& f = a.coeffs[sh_index][static_cast<std::size_t>(channel)];
    double z = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i == 0) {
            z += f[0];
        } else {
            z += f[i] * std::cos(static_cast<double>(i) * std::numbers::pi * frame_time / a.n_t);
        }
    }
    return z;
}

double frame_time_of(const Scene& s, double t, double n_t) {
    return std::clamp((t - s.time_range.first) * s.frame_rate, 0.0, n_t);
}

std::vector<GaussianPrimitive> compose_object_at_time(const Scene& s, const ObjectCluster& obj,
                                                      double t) {
    const auto [rot, trans] = pose_at(obj.pose, t);
    const Mat3 r = rot.toRotationMatrix();
    std::vector<Vec3> sh_now;
    if (obj.appearance) {
        const auto& app = *obj.appearance;
        const double ft = frame_time_of(s, t, app.n_t);
        sh_now.resize(app.sh_count());
        for (std::size_t j = 0; j < app.sh_count(); ++j)
            for (int c = 0; c < 3; ++c) sh_now[j][c] = evaluate_fourier_sh(app, j, c, ft);
    }
    std::vector<GaussianPrimitive> out;
    out.reserve(obj.primitives.size());
    for (const auto& p : obj.primitives) {
        GaussianPrimitive w = p;
        w.mean = r * p.mean + trans;
        w.rotation = rot * p.rotation;
        if (obj.appearance) w.sh = sh_now;
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<GaussianPrimitive> compose_scene_at_time(const Scene& s, double t) {
    const double tc = s.time_range.second > s.time_range.first
                          ? std::clamp(t, s.time_range.first, s.time_range.second)
                          : t;
    std::vector<GaussianPrimitive> out;
    out.reserve(s.primitive_count());
    out.insert(out.end(), s.background.begin(), s.background.end());
    for (const auto& obj : s.objects) {
        auto prims = compose_object_at_time(s, obj, tc);
        out.insert(out.end(), std::make_move_iterator(prims.begin()), std::make_move_iterator(prims.end()));
    }
    return out;
}

Vec3 centroid_of(const std::vector<GaussianPrimitive>& prims) {
    Vec3 c = Vec3::Zero();
    if (prims.empty()) return c;
    for (const auto& p : prims) c += p.mean;
    return c / static_cast<double>(prims.size());
}

ObjectCluster make_centered_cluster(std::string id, std::vector<GaussianPrimitive> world_primitives) {
    const Vec3 c = centroid_of(world_primitives);
    for (auto& p : world_primitives) p.mean -= c;
    ObjectCluster obj;
    obj.id = std::move(id);
    obj.primitives = std::move(world_primitives);
    obj.pose = PoseTrack::constant(Quat::Identity(), c);
    return obj;
}

} // namespace splatsim
