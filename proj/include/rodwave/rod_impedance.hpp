#pragma once

// Thickness-extensional rod: driving impedance at its base and the
// vertical displacement profile, from the lossless transmission-line
// (Mason) description of a rod with a stress-free top face.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "rodwave/errors.hpp"
#include "rodwave/materials.hpp"

namespace rodwave {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

struct RodModel {
  LaminateSection section;  // rod stack
  double height{};          // m, equals section.thickness
  double velocity{};        // m/s, longitudinal_velocity(section)
  double contact_width{};   // m, rod width a (base area per unit width)

  RodModel() = default;
  RodModel(const LaminateSection& s, double width)
      : section(s), height(s.thickness), velocity(longitudinal_velocity(s)), contact_width(width) {
    if (!(contact_width > 0.0)) throw ConfigError("rod width must be > 0");
  }

  /// rho * A * c, the characteristic line impedance per unit width.
  double characteristic_impedance() const noexcept {
    return section.effective_rho * contact_width * velocity;
  }
  /// First quarter-wave frequency c / (4 h); the rod clamps its base here.
  double quarter_wave_frequency() const noexcept { return velocity / (4.0 * height); }
  /// First half-wave frequency c / (2 h); the rod base is unloaded here.
  double half_wave_frequency() const noexcept { return velocity / (2.0 * height); }
};

struct DrivingImpedance {
  cplx value;              // kg m^-1 s^-1, per unit width
  bool near_pole = false;  // within 1e-4 c/h of a tan pole
};

namespace detail {

inline bool near_rod_pole(const RodModel& rod, double f) {
  const double period = rod.velocity / rod.height;  // spacing of poles in f
  const double first = rod.quarter_wave_frequency();
  const double n = std::round((f - first) / (2.0 * first));
  return std::abs(f - (first + n * 2.0 * first)) <= 1e-4 * period;
}

}  // namespace detail

/// Z_b at a complex angular frequency. Used for the limiting-absorption
/// direction test; no pole bookkeeping.
inline cplx driving_impedance_at(const RodModel& rod, cplx omega) {
  const cplx k = omega / rod.velocity;
  return -kI * rod.characteristic_impedance() * std::tan(k * rod.height);
}

inline DrivingImpedance driving_impedance(const RodModel& rod, double f) {
  if (f < 0.0 || !std::isfinite(f)) throw DomainError("driving_impedance: f must be >= 0");
  const double kh = 2.0 * std::numbers::pi * f / rod.velocity * rod.height;
  const double c = std::cos(kh);
  DrivingImpedance z;
  z.near_pole = f > 0.0 && detail::near_rod_pole(rod, f);
  if (c == 0.0) {
    const double s = std::sin(kh);
    z.value = cplx(0.0, -std::copysign(std::numeric_limits<double>::infinity(), s));
    z.near_pole = true;
    return z;
  }
  z.value = cplx(0.0, -rod.characteristic_impedance() * std::sin(kh) / c);
  return z;
}

namespace detail {

inline void check_modeshape_frequency(const RodModel& rod, double f) {
  if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("rod_modeshape: f must be > 0");
  const double kh = 2.0 * std::numbers::pi * f / rod.velocity * rod.height;
  if (std::abs(std::tan(kh)) < 1e-12)
    throw SingularFrequencyError("rod_modeshape: cot(k h) is singular at this frequency");
}

}  // namespace detail

/// u_z(z) for a base force `force` (N per unit width), 0 <= z <= height.
inline double rod_displacement(const RodModel& rod, double f, double force, double z) {
  detail::check_modeshape_frequency(rod, f);
  const double omega = 2.0 * std::numbers::pi * f;
  const double k = omega / rod.velocity;
  return -force / (omega * rod.characteristic_impedance()) *
         (std::sin(k * z) + std::cos(k * z) / std::tan(k * rod.height));
}

/// du_z/dz, zero at the free top face.
inline double rod_strain(const RodModel& rod, double f, double force, double z) {
  detail::check_modeshape_frequency(rod, f);
  const double omega = 2.0 * std::numbers::pi * f;
  const double k = omega / rod.velocity;
  return -force * k / (omega * rod.characteristic_impedance()) *
         (std::cos(k * z) - std::sin(k * z) / std::tan(k * rod.height));
}

struct ModeshapeSample {
  double z;
  double u;
};

inline std::vector<ModeshapeSample> rod_modeshape(const RodModel& rod, double f, double force,
                                                  int z_samples) {
  if (z_samples < 2) throw DomainError("rod_modeshape: need at least 2 samples");
  detail::check_modeshape_frequency(rod, f);
  std::vector<ModeshapeSample> out;
  out.reserve(static_cast<std::size_t>(z_samples));
  for (int i = 0; i < z_samples; ++i) {
    const double z = rod.height * i / (z_samples - 1);
    out.push_back({z, rod_displacement(rod, f, force, z)});
  }
  return out;
}

enum class ExtremumKind { zero, pole };

struct ImpedanceExtremum {
  double f;
  ExtremumKind kind;
};

/// Zeros n c/(2h) and poles (2n-1) c/(4h) up to f_max_search, ascending.
inline std::vector<ImpedanceExtremum> impedance_extrema(const RodModel& rod, double f_max_search) {
  if (!(f_max_search > 0.0)) throw DomainError("impedance_extrema: f_max_search must be > 0");
  std::vector<ImpedanceExtremum> out;
  const double quarter = rod.quarter_wave_frequency();
  // Extrema sit on the odd (pole) and even (zero) multiples of c/(4h).
  for (long m = 1;; ++m) {
    const double f = static_cast<double>(m) * quarter;
    if (f > f_max_search) break;
    out.push_back({f, m % 2 == 1 ? ExtremumKind::pole : ExtremumKind::zero});
  }
  return out;
}

}  // namespace rodwave
