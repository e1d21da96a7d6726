#include "splatsim/mpm_solver.hpp"

#include "splatsim/parallel.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace splatsim {

void MaterialParams::validate() const {
    if (!(young_modulus > 0.0)) throw std::invalid_argument("young_modulus must be positive");
    if (!(poisson_ratio > 0.0 && poisson_ratio < 0.5))
        throw std::invalid_argument("poisson_ratio must lie in (0, 0.5)");
    if (!(density > 0.0)) throw std::invalid_argument("density must be positive");
}

LameParams lame_from_young_poisson(const MaterialParams& m) {
    const double e = m.young_modulus;
    const double nu = m.poisson_ratio;
    return {e / (2.0 * (1.0 + nu)), e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))};
}

void HalfSpaceCollider::validate() const {
    if (std::abs(normal.norm() - 1.0) > 1e-9) throw std::invalid_argument("collider normal must be unit length");
    if (!(friction >= 0.0)) throw std::invalid_argument("collider friction must be non-negative");
}

Vec3 HalfSpaceCollider::project_velocity(const Vec3& node_position, const Vec3& v) const {
    if (signed_distance(node_position) > 0.0) return v;
    const double vn = v.dot(normal);
    if (vn >= 0.0) return v;
    if (mode == ContactMode::sticky) return Vec3::Zero();
    Vec3 vt = v - vn * normal;
    const double vt_norm = vt.norm();
    if (friction > 0.0) {
        if (vt_norm <= -friction * vn) return Vec3::Zero();
        vt *= 1.0 + friction * vn / vt_norm;
    }
    return vt;
}

GridSpec GridSpec::fit(std::span<const Vec3> points, int resolution, double margin_fraction,
                       int pad_cells) {
    if (points.empty()) throw std::invalid_argument("cannot fit a grid to zero points");
    Vec3 lo = points.front(), hi = points.front();
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec3 grow = Vec3::Constant(margin_fraction * (hi - lo).maxCoeff());
    return from_box(lo - grow, hi + grow, resolution, pad_cells);
}

GridSpec GridSpec::from_box(const Vec3& lo, const Vec3& hi, int resolution, int pad_cells) {
    if (resolution <= 2 * pad_cells + 2)
        throw std::invalid_argument("grid resolution too small for boundary padding");
    double longest = (hi - lo).cwiseMax(0.0).maxCoeff();
    if (!(longest > 0.0)) longest = 1.0;
    GridSpec g;
    g.dx = longest / static_cast<double>(resolution - 1 - 2 * pad_cells);
    g.dims = {resolution, resolution, resolution};
    // Centred on the box; the longest axis then starts pad_cells below lo.
    const Vec3 center = 0.5 * (lo + hi);
    g.origin = center - 0.5 * static_cast<double>(resolution - 1) * g.dx * Vec3::Ones();
    return g;
}

std::array<int, 3> GridSpec::cell_of(const Vec3& x) const {
    const Vec3 r = (x - origin) / dx;
    return {static_cast<int>(std::floor(r.x())), static_cast<int>(std::floor(r.y())),
            static_cast<int>(std::floor(r.z()))};
}

KernelStencil bspline_stencil(const Vec3& x, const GridSpec& grid, std::size_t particle) {
    KernelStencil st;
    const double inv_dx = 1.0 / grid.dx;
    for (std::size_t a = 0; a < 3; ++a) {
        const double r = (x[static_cast<Eigen::Index>(a)] - grid.origin[static_cast<Eigen::Index>(a)]) * inv_dx;
        if (!std::isfinite(r)) throw ParticleEscapedError(particle);
        const double fb = std::floor(r - 0.5);
        if (fb < 0.0 || fb + 2.0 > static_cast<double>(grid.dims[a] - 1)) throw ParticleEscapedError(particle);
        st.base[a] = static_cast<int>(fb);
        const double fx = r - fb;  // in [0.5, 1.5)
        st.w[a] = {0.5 * (1.5 - fx) * (1.5 - fx), 0.75 - (fx - 1.0) * (fx - 1.0), 0.5 * (fx - 0.5) * (fx - 0.5)};
        st.dw[a] = {(fx - 1.5) * inv_dx, -2.0 * (fx - 1.0) * inv_dx, (fx - 0.5) * inv_dx};
    }
    return st;
}

std::array<KernelSample, 27> bspline_weights(const Vec3& x, const GridSpec& grid) {
    const auto st = bspline_stencil(x, grid);
    std::array<KernelSample, 27> out;
    std::size_t n = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c, ++n) {
                out[n].node = {st.base[0] + a, st.base[1] + b, st.base[2] + c};
                out[n].weight = st.weight(a, b, c);
                out[n].gradient = st.gradient(a, b, c);
            }
    return out;
}

void MpmGrid::clear() {
    nodes_.clear();
    lookup_.clear();
    slots_.clear();
}

const GridNode* MpmGrid::find(int i, int j, int k) const {
    auto it = lookup_.find(spec_.linear_index(i, j, k));
    return it == lookup_.end() ? nullptr : &nodes_[it->second];
}

std::uint32_t MpmGrid::touch(int i, int j, int k) {
    const auto key = spec_.linear_index(i, j, k);
    auto [it, inserted] = lookup_.try_emplace(key, static_cast<std::uint32_t>(nodes_.size()));
    if (inserted) {
        GridNode node;
        node.index = {i, j, k};
        nodes_.push_back(node);
    }
    return it->second;
}

double MpmGrid::total_mass() const {
    double m = 0.0;
    for (const auto& n : nodes_) m += n.mass;
    return m;
}

Vec3 MpmGrid::total_momentum() const {
    Vec3 p = Vec3::Zero();
    for (const auto& n : nodes_) p += n.momentum;
    return p;
}

Vec3 MpmGrid::total_force() const {
    Vec3 f = Vec3::Zero();
    for (const auto& n : nodes_) f += n.force;
    return f;
}

void SimConfig::validate(double dx, std::span<const MaterialParams> materials) const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    if (frame_stride < 1) throw std::invalid_argument("frame_stride must be >= 1");
    for (const auto& c : colliders) c.validate();
    if (allow_cfl_violation) return;
    for (const auto& m : materials) {
        const double bound = max_stable_dt(m, dx);
        if (dt > bound)
            throw std::invalid_argument("dt = " + std::to_string(dt) + " exceeds CFL bound " +
                                        std::to_string(bound));
    }
}

double max_stable_dt(const MaterialParams& m, double dx) {
    return 0.3 * dx / std::sqrt(m.young_modulus / m.density);
}

Mat3 polar_rotation(const Mat3& f) {
    Eigen::JacobiSVD<Mat3> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    Mat3 v = svd.matrixV();
    if (u.determinant() < 0.0) u.col(2) *= -1.0;
    if (v.determinant() < 0.0) v.col(2) *= -1.0;
    return u * v.transpose();
}

Mat3 first_piola_kirchhoff(const Mat3& f, const LameParams& lame) {
    const double j = f.determinant();
    if (!(j > 0.0)) throw std::invalid_argument("first_piola_kirchhoff: det(F) must be positive");
    const Mat3 r = polar_rotation(f);
    const Mat3 f_inv_t = f.inverse().transpose();
    return 2.0 * lame.mu * (f - r) + lame.lambda * (j - 1.0) * j * f_inv_t;
}

Mat3 first_piola_kirchhoff(const Mat3& f, const MaterialParams& m) {
    return first_piola_kirchhoff(f, lame_from_young_poisson(m));
}

void p2g(std::span<const MpmParticle> particles, MpmGrid& grid) {
    grid.clear();
    grid.slots_.resize(particles.size());
    for (std::size_t p = 0; p < particles.size(); ++p) {
        const auto& part = particles[p];
        const auto st = bspline_stencil(part.position, grid.spec(), p);
        auto& slots = grid.slots_[p];
        std::size_t n = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c, ++n) {
                    const auto slot = grid.touch(st.base[0] + a, st.base[1] + b, st.base[2] + c);
                    slots[n] = slot;
                    const double mw = part.mass * st.weight(a, b, c);
                    auto& node = grid.nodes_[slot];
                    node.mass += mw;
                    node.momentum += mw * part.velocity;
                }
    }
}

void grid_forces(std::span<const MpmParticle> particles, MpmGrid& grid,
                 std::span<const MaterialParams> materials, int threads) {
    if (grid.particle_slots().size() != particles.size())
        throw std::logic_error("grid_forces requires p2g on the same particle set");
    std::vector<LameParams> lame(materials.size());
    for (std::size_t m = 0; m < materials.size(); ++m) lame[m] = lame_from_young_poisson(materials[m]);

    // V0 P F^T per particle: the cited force line with the kernel gradient
    // taken in material space, grad_X w = F^T grad_x w.
    std::vector<Mat3> affine(particles.size());
    parallel_for(particles.size(), threads, [&](std::size_t p) {
        const auto& part = particles[p];
        const Mat3& f = part.deformation_gradient;
        affine[p] = part.rest_volume * first_piola_kirchhoff(f, lame.at(part.material)) * f.transpose();
    });

    auto nodes = grid.nodes();
    for (auto& n : nodes) n.force.setZero();
    const auto slots = grid.particle_slots();
    for (std::size_t p = 0; p < particles.size(); ++p) {
        const auto st = bspline_stencil(particles[p].position, grid.spec(), p);
        std::size_t n = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c, ++n) nodes[slots[p][n]].force -= affine[p] * st.gradient(a, b, c);
    }
}

void grid_update(MpmGrid& grid, const SimConfig& config) {
    const auto& spec = grid.spec();
    const Vec3 gravity(0.0, 0.0, -config.gravity);
    const int bc = config.boundary_cells;
    auto nodes = grid.nodes();
    parallel_for(nodes.size(), config.threads, [&](std::size_t i) {
        auto& node = nodes[i];
        if (node.mass < config.mass_epsilon) {
            node.velocity.setZero();
            return;
        }
        Vec3 v = (node.momentum + config.dt * node.force) / node.mass;
        v += config.dt * gravity;
        const auto& idx = node.index;
        for (std::size_t a = 0; a < 3; ++a) {
            if (idx[a] < bc || idx[a] >= spec.dims[a] - bc) {
                v.setZero();
                break;
            }
        }
        const Vec3 x = spec.node_position(idx[0], idx[1], idx[2]);
        for (const auto& col : config.colliders) v = col.project_velocity(x, v);
        node.velocity = v;
    });
}

void g2p(std::span<MpmParticle> particles, const MpmGrid& grid, double dt, int threads) {
    const auto slots = grid.particle_slots();
    if (slots.size() != particles.size()) throw std::logic_error("g2p requires p2g on the same particle set");
    const auto nodes = grid.nodes();
    parallel_for(particles.size(), threads, [&](std::size_t p) {
        auto& part = particles[p];
        const auto st = bspline_stencil(part.position, grid.spec(), p);
        Vec3 v = Vec3::Zero();
        Mat3 grad_v = Mat3::Zero();
        std::size_t n = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c, ++n) {
                    const Vec3& vi = nodes[slots[p][n]].velocity;
                    v += st.weight(a, b, c) * vi;
                    grad_v += vi * st.gradient(a, b, c).transpose();
                }
        part.velocity = v;
        part.position += dt * v;
        part.deformation_gradient = (Mat3::Identity() + dt * grad_v) * part.deformation_gradient;
    });
}

void step(MpmState& state, const SimConfig& config) {
    p2g(state.particles, state.grid);
    grid_forces(state.particles, state.grid, state.materials, config.threads);
    grid_update(state.grid, config);
    g2p(state.particles, state.grid, config.dt, config.threads);
    for (std::size_t p = 0; p < state.particles.size(); ++p) {
        const double det = state.particles[p].deformation_gradient.determinant();
        if (!(det > 0.0)) throw SimulationInstability(p, det);
    }
}

void assign_rest_volumes(std::span<MpmParticle> particles, const GridSpec& grid,
                         std::span<const MaterialParams> materials) {
    std::unordered_map<std::int64_t, int> counts;
    std::vector<std::int64_t> keys(particles.size());
    for (std::size_t p = 0; p < particles.size(); ++p) {
        const auto c = grid.cell_of(particles[p].position);
        keys[p] = grid.linear_index(c[0], c[1], c[2]);
        ++counts[keys[p]];
    }
    const double cell_volume = grid.dx * grid.dx * grid.dx;
    for (std::size_t p = 0; p < particles.size(); ++p) {
        auto& part = particles[p];
        part.rest_volume = cell_volume / counts[keys[p]];
        part.mass = materials[part.material].density * part.rest_volume;
    }
}

double total_mass(std::span<const MpmParticle> particles) {
    double m = 0.0;
    for (const auto& p : particles) m += p.mass;
    return m;
}

Vec3 total_momentum(std::span<const MpmParticle> particles) {
    Vec3 mv = Vec3::Zero();
    for (const auto& p : particles) mv += p.mass * p.velocity;
    return mv;
}

double min_det_f(std::span<const MpmParticle> particles) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : particles) m = std::min(m, p.deformation_gradient.determinant());
    return m;
}

} // namespace splatsim
