#pragma once

namespace splatsim {

enum class MaterialKind { jelly };

/// Elastic body parameters; defaults are the single-vehicle collision
/// settings (E = 2e6 Pa, nu = 0.4, rho = 200 kg/m^3).
struct MaterialParams {
    double young_modulus = 2e6;
    double poisson_ratio = 0.4;
    double density = 200.0;
    MaterialKind kind = MaterialKind::jelly;

    void validate() const;
    bool operator==(const MaterialParams&) const = default;
};

} // namespace splatsim
