#pragma once

// Isotropic film materials and thickness-weighted laminate properties.
//
// Every quantity is per unit out-of-plane width (W = 1 m): areas are
// lengths and second moments are lengths cubed. W scales forces and
// impedances identically and drops out of all dimensionless results.

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rodwave/errors.hpp"

namespace rodwave {

struct Material {
  std::string name;
  double youngs_modulus{};  // Pa
  double density{};         // kg/m^3

  Material() = default;
  Material(std::string n, double e, double rho)
      : name(std::move(n)), youngs_modulus(e), density(rho) {
    if (!(youngs_modulus > 0.0) || !std::isfinite(youngs_modulus))
      throw ConfigError("material '" + name + "': youngs_modulus must be > 0");
    if (!(density > 0.0) || !std::isfinite(density))
      throw ConfigError("material '" + name + "': density must be > 0");
  }
};

struct Layer {
  Material material;
  double thickness{};  // m

  Layer() = default;
  Layer(Material m, double t) : material(std::move(m)), thickness(t) {
    if (!(thickness > 0.0) || !std::isfinite(thickness))
      throw ConfigError("layer of '" + material.name + "': thickness must be > 0");
  }
};

/// Effective single-material stand-in for a stacked region.
struct LaminateSection {
  double effective_E{};    // Pa
  double effective_rho{};  // kg/m^3
  double thickness{};      // m

  double area_per_width() const noexcept { return thickness; }
  double inertia_per_width() const noexcept { return thickness * thickness * thickness / 12.0; }
  double bending_stiffness() const noexcept { return effective_E * inertia_per_width(); }
  double mass_per_length() const noexcept { return effective_rho * area_per_width(); }
};

/// Thickness-weighted mean of E and rho over the layers.
inline LaminateSection effective_properties(std::span<const Layer> layers) {
  if (layers.empty()) throw ConfigError("laminate needs at least one layer");
  double h = 0.0, eh = 0.0, rh = 0.0;
  for (const auto& l : layers) {
    if (!(l.thickness > 0.0)) throw ConfigError("layer thickness must be > 0");
    h += l.thickness;
    eh += l.material.youngs_modulus * l.thickness;
    rh += l.material.density * l.thickness;
  }
  return {eh / h, rh / h, h};
}

inline double longitudinal_velocity(const LaminateSection& s) {
  return std::sqrt(s.effective_E / s.effective_rho);
}

using MaterialLibrary = std::map<std::string, Material>;

namespace defaults {

// Handbook values for sputtered films. Configuration inputs, not measured data.
inline Material aluminum_nitride() { return {"AlN", 345e9, 3260.0}; }
inline Material aluminum() { return {"Al", 70e9, 2700.0}; }
inline Material platinum() { return {"Pt", 168e9, 21450.0}; }

inline MaterialLibrary material_library() {
  MaterialLibrary lib;
  for (auto m : {aluminum_nitride(), aluminum(), platinum()}) lib.emplace(m.name, m);
  return lib;
}

}  // namespace defaults

/// Two-region film stack of a rod/trench unit cell.
///
/// The trench is the thin piezo film on the bottom metal plate; the rod is
/// the thick piezo film capped by the top metal strip.
struct StackSpec {
  Material piezo = defaults::aluminum_nitride();
  Material bottom_metal = defaults::platinum();
  Material top_metal = defaults::aluminum();
  double t_piezo_trench = 400e-9;  // thin piezo layer under the trench
  double t_piezo_rod = 600e-9;     // thick piezo layer forming the rod
  double t_bottom_metal = 250e-9;
  double t_top_metal = 330e-9;

  std::vector<Layer> trench_layers() const {
    return {Layer(piezo, t_piezo_trench), Layer(bottom_metal, t_bottom_metal)};
  }
  std::vector<Layer> rod_layers() const {
    return {Layer(piezo, t_piezo_rod), Layer(top_metal, t_top_metal)};
  }
  LaminateSection trench_section() const { return effective_properties(trench_layers()); }
  LaminateSection rod_section() const { return effective_properties(rod_layers()); }
};

}  // namespace rodwave
