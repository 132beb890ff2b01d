#pragma once

// A0 (flexural) dispersion of the bare trench treated as an
// Euler-Bernoulli beam.

#include <cmath>
#include <complex>
#include <numbers>

#include "rodwave/errors.hpp"
#include "rodwave/materials.hpp"

namespace rodwave {

struct TrenchModel {
  LaminateSection section;
  double thickness{};  // h_t

  TrenchModel() = default;
  explicit TrenchModel(const LaminateSection& s) : section(s), thickness(s.thickness) {}

  double bending_stiffness() const noexcept { return section.bending_stiffness(); }
};

/// k = sqrt(2) 3^(1/4) sqrt(w) rho^(1/4) / (sqrt(h) E^(1/4)).
inline double flexural_wavevector(const TrenchModel& trench, double f) {
  if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("flexural_wavevector: f must be > 0");
  const double omega = 2.0 * std::numbers::pi * f;
  return std::numbers::sqrt2 * std::pow(3.0, 0.25) * std::sqrt(omega) *
         std::pow(trench.section.effective_rho, 0.25) /
         (std::sqrt(trench.thickness) * std::pow(trench.section.effective_E, 0.25));
}

/// Principal fourth root of rho A w^2 / (E I) for complex w. For w with a
/// small positive imaginary part this is the root continuing the real k.
inline std::complex<double> flexural_wavevector_at(const TrenchModel& trench,
                                                   std::complex<double> omega) {
  const double ratio = trench.section.mass_per_length() / trench.bending_stiffness();
  return std::sqrt(omega) * std::pow(ratio, 0.25);
}

inline double wavelength_over_thickness(const TrenchModel& trench, double f) {
  return 2.0 * std::numbers::pi / (flexural_wavevector(trench, f) * trench.thickness);
}

}  // namespace rodwave
