#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// Default stack by hand.
inline constexpr double E_rod = (345e9 * 600e-9 + 70e9 * 330e-9) / 930e-9;
inline constexpr double rho_rod = (3260.0 * 600e-9 + 2700.0 * 330e-9) / 930e-9;
inline constexpr double h_rod = 930e-9;
inline constexpr double E_t = (345e9 * 400e-9 + 168e9 * 250e-9) / 650e-9;
inline constexpr double rho_t = (3260.0 * 400e-9 + 21450.0 * 250e-9) / 650e-9;
inline constexpr double h_t = 650e-9;

inline double c_rod() { return std::sqrt(E_rod / rho_rod); }
inline double EI_t() { return E_t * h_t * h_t * h_t / 12.0; }

/// Positive root of E I k^4 = rho A w^2 by Newton iteration in long double.
inline double quartic_k(double E, double rho, double h, double f) {
  const long double w = 2.0L * std::numbers::pi_v<long double> * f;
  const long double EI = static_cast<long double>(E) * h * h * h / 12.0L;
  const long double rhs = static_cast<long double>(rho) * h * w * w;
  long double k = 1e6L;
  for (int i = 0; i < 200; ++i) {
    const long double g = EI * k * k * k * k - rhs;
    const long double dg = 4.0L * EI * k * k * k;
    const long double next = k - g / dg;
    if (std::fabs(next - k) <= 1e-22L * k) {
      k = next;
      break;
    }
    k = next;
  }
  return static_cast<double>(k);
}

/// Reference closed-form transfer matrix with F = sigma k^3. Its entry (3,4)
/// (1-based) carries an extra e^{-ak}; a = 0 gives the corrected entry.
inline Eigen::Matrix4cd closed_form_transfer(double k, cplx sigma, double a, double L) {
  const cplx F = sigma * k * k * k;
  const double k3 = k * k * k;
  const double h = 0.5;
  auto E = [](cplx z) { return std::exp(z); };
  Eigen::Matrix4cd T;
  T(0, 0) = E(-I * k * L) * (-I * F + 4.0 * k3) / (4.0 * k3);
  T(0, 1) = -I * E((h - I / 2.0) * k * L) * F / (4.0 * k3);
  T(0, 2) = -I * F / (4.0 * k3);
  T(0, 3) = -I * E((-h - I / 2.0) * k * L) * F / (4.0 * k3);
  T(1, 0) = E((h - I / 2.0) * k * L) * F / (4.0 * k3);
  T(1, 1) = 0.25 * E(k * L) * (4.0 + F / k3);
  T(1, 2) = E((h + I / 2.0) * k * L) * F / (4.0 * k3);
  T(1, 3) = F / (4.0 * k3);
  T(2, 0) = I * F / (4.0 * k3);
  T(2, 1) = I * E((h + I / 2.0) * k * L) * F / (4.0 * k3);
  T(2, 2) = E(I * k * L) * (I * F + 4.0 * k3) / (4.0 * k3);
  T(2, 3) = I * E(-a * k - (h - I / 2.0) * k * L) * F / (4.0 * k3);
  T(3, 0) = -E((-h - I / 2.0) * k * L) * F / (4.0 * k3);
  T(3, 1) = -F / (4.0 * k3);
  T(3, 2) = -E((-h + I / 2.0) * k * L) * F / (4.0 * k3);
  T(3, 3) = 0.25 * E(-k * L) * (4.0 - F / k3);
  return T;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20261016);
  return g;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

}  // namespace oracle
