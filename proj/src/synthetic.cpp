#include "splatsim/synthetic.hpp"

#include <limits>
#include <random>

namespace splatsim {

ObjectCluster make_vehicle(const std::string& id, const VehicleSpec& spec) {
    std::vector<GaussianPrimitive> prims;
    const Vec3 cell(spec.size.x() / spec.counts[0], spec.size.y() / spec.counts[1], spec.size.z() / spec.counts[2]);
    const Vec3 corner = spec.bottom_center - Vec3(0.5 * spec.size.x(), 0.5 * spec.size.y(), 0.0);
    for (int i = 0; i < spec.counts[0]; ++i)
        for (int j = 0; j < spec.counts[1]; ++j)
            for (int k = 0; k < spec.counts[2]; ++k) {
                GaussianPrimitive p;
                p.mean = corner + cell.cwiseProduct(Vec3(i + 0.5, j + 0.5, k + 0.5));
                p.scale = 0.6 * cell;
                p.opacity = spec.opacity;
                // Darker roof and underside.
                const double shade = (k == spec.counts[2] - 1 || k == 0) ? 0.7 : 1.0;
                p.sh = {shade * spec.color};
                prims.push_back(std::move(p));
            }
    return make_centered_cluster(id, std::move(prims));
}

std::vector<GaussianPrimitive> make_ground(const Vec2& lo, const Vec2& hi, double spacing, double z,
                                           const Vec3& color) {
    std::vector<GaussianPrimitive> out;
    const int nx = static_cast<int>((hi.x() - lo.x()) / spacing);
    const int ny = static_cast<int>((hi.y() - lo.y()) / spacing);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            GaussianPrimitive p;
            p.mean = Vec3(lo.x() + (i + 0.5) * spacing, lo.y() + (j + 0.5) * spacing, z);
            p.scale = Vec3(0.6 * spacing, 0.6 * spacing, 0.02);
            p.opacity = 0.95;
            // Lane markings every 3.5 m across y.
            const bool marking = std::abs(std::remainder(p.mean.y(), 3.5)) < 0.5 * spacing && (i / 4) % 2 == 0;
            p.sh = {marking ? Vec3(0.9, 0.9, 0.8) : color};
            out.push_back(std::move(p));
        }
    return out;
}

Scene synth_demo_scene() {
    Scene s;
    s.time_range = {0.0, 10.0};
    s.frame_rate = 10.0;
    s.background = make_ground({-12.0, -6.0}, {12.0, 6.0}, 0.5, 0.0, {0.35, 0.35, 0.38});
    s.objects.push_back(make_vehicle("car_0", {{-5.0, -1.75, 0.0}, {4.5, 1.8, 1.5}, {16, 7, 6}, {0.9, 0.9, 0.92}}));
    s.objects.push_back(make_vehicle("car_1", {{2.0, -1.75, 0.0}, {4.5, 1.8, 1.5}, {16, 7, 6}, {0.15, 0.15, 0.18}}));
    auto car2 = make_vehicle("car_2", {{-1.0, 1.75, 0.0}, {4.5, 1.8, 1.5}, {16, 7, 6}, {0.75, 0.2, 0.15}});
    const Vec3 start = car2.pose.samples.front().translation;
    car2.pose.samples.push_back({10.0, Quat::Identity(), start + Vec3(10.0, 0.0, 0.0)});
    FourierSHAppearance app;
    app.k = 4;
    app.n_t = 100.0;
    app.coeffs = {{std::vector<double>{0.65, 0.1, 0.0, 0.0}, std::vector<double>{0.2, 0.0, 0.0, 0.0},
                   std::vector<double>{0.15, 0.0, 0.05, 0.0}}};
    car2.appearance = app;
    s.objects.push_back(std::move(car2));
    return s;
}

Camera demo_camera(int width, int height) {
    return Camera::look_at({-16.0, -9.0, 7.0}, {-1.0, 0.0, 0.75}, Vec3::UnitZ(), 0.95 * width, 0.95 * width, width,
                           height, 0.1);
}

std::vector<Vec3> synth_ground_points(const Scene& s, double outlier_fraction, std::uint64_t seed) {
    std::vector<Vec3> pts;
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
    for (const auto& p : s.background) {
        pts.push_back(p.mean);
        lo = lo.cwiseMin(p.mean);
        hi = hi.cwiseMax(p.mean);
    }
    if (pts.empty() || outlier_fraction <= 0.0) return pts;
    const auto n = static_cast<std::size_t>(std::llround(pts.size() * outlier_fraction / (1.0 - outlier_fraction)));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y()), uz(0.2, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(rng), y = uy(rng), z = uz(rng);
        pts.emplace_back(x, y, z);
    }
    return pts;
}

std::vector<AxisAlignedBox> object_boxes(const Scene& s, double t) {
    std::vector<AxisAlignedBox> out;
    for (const auto& obj : s.objects) {
        const auto prims = compose_object_at_time(s, obj, t);
        AxisAlignedBox b{prims.front().mean, prims.front().mean};
        for (const auto& p : prims) {
            b.min = b.min.cwiseMin(p.mean);
            b.max = b.max.cwiseMax(p.mean);
        }
        out.push_back(b);
    }
    return out;
}

namespace {

Scenario base_scenario() {
    Scenario sc;
    sc.setup.default_material = MaterialParams{};
    sc.cameras.push_back(demo_camera());
    return sc;
}

} // namespace

Scenario conservation_scenario(int steps) {
    Scenario sc = base_scenario();
    auto& cfg = sc.setup.config;
    cfg.dt = 2e-4;
    cfg.gravity = 0.0;
    cfg.steps = steps;
    cfg.frame_stride = 100;
    sc.setup.grid_resolution = 50;
    sc.setup.bindings = {{"car_0", {1.0, 0.0, 0.0}, std::nullopt},
                         {"car_1", {-0.5, 0.2, 0.0}, std::nullopt},
                         {"car_2", {0.0, -0.3, 0.1}, std::nullopt}};
    return sc;
}

Scenario wall_collision_scenario(const Scene& demo, double v0, int steps) {
    Scenario sc = base_scenario();
    auto& cfg = sc.setup.config;
    cfg.dt = 2e-4;
    cfg.gravity = 9.8;
    cfg.steps = steps;
    cfg.frame_stride = 50;
    sc.setup.grid_resolution = 50;
    sc.setup.bindings = {{"car_0", {v0, 0.0, 0.0}, std::nullopt}};

    const auto* car = demo.find_object("car_0");
    double front = -std::numeric_limits<double>::infinity();
    for (const auto& p : compose_object_at_time(demo, *car, 0.0)) front = std::max(front, p.mean.x());
    HalfSpaceCollider road{Vec3::UnitZ(), 0.0, ContactMode::slip, 0.0};
    HalfSpaceCollider wall{-Vec3::UnitX(), -(front + 0.3), ContactMode::sticky, 0.0};
    cfg.colliders = {road, wall};
    return sc;
}

Scene planar_fleet_scene() {
    Scene s;
    s.time_range = {0.0, 10.0};
    s.background = make_ground({-8.0, -4.0}, {8.0, 4.0}, 0.5, 0.0, {0.35, 0.35, 0.38});
    const std::array<int, 3> counts{30, 12, 1};
    auto flat = [&](const std::string& id, double x, double y, const Vec3& color) {
        VehicleSpec spec{{x, y, 0.75}, {4.5, 1.8, 1e-9}, counts, color};
        auto obj = make_vehicle(id, spec);
        for (auto& p : obj.primitives) {
            p.mean.z() = 0.0;
            p.scale = Vec3(0.09, 0.09, 0.6);
        }
        obj.pose.samples.front().translation.z() = 0.75;
        return obj;
    };
    // Moving pair behind, parked pair ahead; lane y = -1.75 has the wider gap.
    s.objects.push_back(flat("mover_0", -3.0, -1.75, {0.9, 0.9, 0.92}));
    s.objects.push_back(flat("mover_1", -3.0, 1.75, {0.85, 0.85, 0.9}));
    s.objects.push_back(flat("parked_0", 1.75, -1.75, {0.2, 0.3, 0.7}));
    s.objects.push_back(flat("parked_1", 1.6, 1.75, {0.7, 0.3, 0.2}));
    return s;
}

Scenario planar_fleet_scenario(int steps) {
    Scenario sc = base_scenario();
    auto& cfg = sc.setup.config;
    cfg.dt = 2e-4;
    cfg.gravity = 0.0;
    cfg.steps = steps;
    cfg.frame_stride = 25;
    sc.setup.grid_resolution = 200;
    sc.setup.domain = std::make_pair(Vec3(-7.5, -4.5, -2.5), Vec3(7.5, 4.5, 4.0));
    sc.setup.bindings = {{"mover_0", {3.5, 0.0, 0.0}, std::nullopt},
                         {"mover_1", {3.5, 0.0, 0.0}, std::nullopt},
                         {"parked_0", Vec3::Zero(), std::nullopt},
                         {"parked_1", Vec3::Zero(), std::nullopt}};
    return sc;
}

Scenario fall_scenario(const Scene& demo, bool with_ground, int steps) {
    Scenario sc = base_scenario();
    auto& cfg = sc.setup.config;
    cfg.dt = 2e-4;
    cfg.gravity = 9.8;
    cfg.steps = steps;
    cfg.frame_stride = 50;
    sc.setup.grid_resolution = 100;
    sc.setup.bindings = {{"car_0", Vec3::Zero(), std::nullopt}};

    const auto* car = demo.find_object("car_0");
    const auto prims = compose_object_at_time(demo, *car, 0.0);
    double lowest = std::numeric_limits<double>::infinity();
    Vec3 lo = prims.front().mean, hi = prims.front().mean;
    for (const auto& p : prims) {
        lowest = std::min(lowest, p.mean.z());
        lo = lo.cwiseMin(p.mean);
        hi = hi.cwiseMax(p.mean);
    }
    const double lift = kFallHeight - lowest;
    sc.edits.push_back(TranslateEdit{"car_0", Vec3(0.0, 0.0, lift)});
    sc.setup.domain = std::make_pair(Vec3(lo.x() - 1.2, lo.y() - 1.2, -0.3),
                                     Vec3(hi.x() + 1.2, hi.y() + 1.2, hi.z() + lift + 0.3));
    if (with_ground) cfg.colliders.push_back(HalfSpaceCollider{Vec3::UnitZ(), 0.0, ContactMode::sticky, 0.0});
    return sc;
}

} // namespace splatsim
