#pragma once

// Scattering of flexural waves by one rod, and the 4x4 G, C, D, T matrices
// of a unit cell. All amplitude vectors are ordered
//   [e^{-ikx}, e^{kx}, e^{ikx}, e^{-kx}]
// with each component referenced locally.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "rodwave/errors.hpp"
#include "rodwave/materials.hpp"
#include "rodwave/rod_impedance.hpp"
#include "rodwave/trench_dispersion.hpp"

namespace rodwave {

using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

/// Above this |sigma| the scattering coefficients use their F -> inf limits.
inline constexpr double kSigmaLimit = 1e8;

struct UnitCell {
  double a{};  // rod width
  double L{};  // cell length
  TrenchModel trench;
  RodModel rod;
  double forcing_scale = 1.0;  // 0 detaches the rod

  UnitCell() = default;
  UnitCell(const StackSpec& stack, double rod_width, double cell_length)
      : UnitCell(TrenchModel(stack.trench_section()), stack.rod_section(), rod_width, cell_length) {}
  UnitCell(const TrenchModel& t, const LaminateSection& rod_section, double rod_width,
           double cell_length)
      : a(rod_width), L(cell_length), trench(t) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("geometry.a must be > 0", "geometry.a");
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("geometry.L must be > 0", "geometry.L");
    if (!(a < L))
      throw ConfigError("geometry.a must be smaller than geometry.L", "geometry.a, geometry.L");
    rod = RodModel(rod_section, a);
  }
};

struct Forcing {
  cplx F_eff;   // dynamic stiffness per unit width per unit displacement
  cplx sigma;   // F_eff / (E_t I_t k^3)
  cplx k;       // flexural wavevector
  bool near_pole = false;
  bool infinite = false;  // exactly at a tan pole; sigma holds a signed infinity
};

inline Forcing forcing_strength(const UnitCell& cell, double f) {
  if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("forcing_strength: f must be > 0");
  const double omega = 2.0 * std::numbers::pi * f;
  const double k = flexural_wavevector(cell.trench, f);
  const DrivingImpedance z = driving_impedance(cell.rod, f);
  Forcing out;
  out.k = k;
  out.near_pole = z.near_pole;
  if (cell.forcing_scale == 0.0) return out;
  // -i w (i X) = w X: real for real f.
  const double F = omega * z.value.imag() * cell.forcing_scale;
  out.F_eff = F;
  out.sigma = F / (cell.trench.bending_stiffness() * k * k * k);
  out.infinite = !std::isfinite(F);
  return out;
}

/// Same quantities at a complex angular frequency (direction tests only).
inline Forcing forcing_strength_at(const UnitCell& cell, cplx omega) {
  Forcing out;
  out.k = flexural_wavevector_at(cell.trench, omega);
  if (cell.forcing_scale == 0.0) return out;
  out.F_eff = -kI * omega * driving_impedance_at(cell.rod, omega) * cell.forcing_scale;
  out.sigma = out.F_eff / (cell.trench.bending_stiffness() * out.k * out.k * out.k);
  return out;
}

struct ScatterCoeffs {
  cplx r, t, r_ef, t_ef, r_fe, t_fe, r_e, t_e;
  cplx F_eff, sigma;
  bool limit = false;  // F -> inf forms were used
};

namespace detail {

inline ScatterCoeffs coefficients(cplx s, cplx ak, bool infinite) {
  const cplx one_m_i(1.0, -1.0), one_p_i(1.0, 1.0);
  const cplx e_prop = std::exp(-kI * ak);
  const cplx e_half = std::exp(cplx(0.5, -0.5) * ak);
  const cplx e_grow = std::exp(ak);
  ScatterCoeffs c;
  c.sigma = s;
  if (infinite || std::abs(s) > kSigmaLimit) {
    c.limit = true;
    c.r = -one_m_i * 0.5 * e_prop;
    c.t = one_p_i * 0.5 * e_prop;
    c.r_ef = c.t_ef = -one_m_i * 0.5 * e_half;
    c.r_fe = c.t_fe = -one_p_i * 0.5 * e_half;
    c.r_e = -one_p_i * 0.5 * e_grow;
    c.t_e = one_m_i * 0.5 * e_grow;
    return c;
  }
  const cplx den = 2.0 * s + cplx(4.0, 4.0);
  const cplx den2 = s + cplx(2.0, 2.0);
  c.r = -one_m_i * e_prop * s / den;
  c.t = 0.5 * one_p_i * e_prop * (s + 4.0) / den2;
  c.r_ef = c.t_ef = -one_m_i * e_half * s / den;
  c.r_fe = c.t_fe = -one_p_i * e_half * s / den;
  c.r_e = -one_p_i * e_grow * s / den;
  c.t_e = 0.5 * one_m_i * e_grow * (s + cplx(0.0, 4.0)) / den2;
  return c;
}

}  // namespace detail

inline ScatterCoeffs scatter_coefficients(const UnitCell& cell, double f) {
  const Forcing fs = forcing_strength(cell, f);
  ScatterCoeffs c = detail::coefficients(fs.sigma, cell.a * fs.k, fs.infinite);
  c.F_eff = fs.F_eff;
  return c;
}

/// Outgoing [t_l, t_le, w_r, w_re] = G * incoming [t_r, t_re, w_l, w_le].
inline Mat4 scattering_matrix(const ScatterCoeffs& c) {
  Mat4 G;
  G << c.r, c.r_ef, c.t, c.t_ef,
       c.r_fe, c.r_e, c.t_fe, c.t_e,
       c.t, c.t_ef, c.r, c.r_ef,
       c.t_fe, c.t_e, c.r_fe, c.r_e;
  return G;
}

/// Rearranges G into [w_l, w_le, w_r, w_re] = C * [t_l, t_le, t_r, t_re].
inline Mat4 coupling_from_scattering(const Mat4& G) {
  const Eigen::Matrix2cd G11 = G.block<2, 2>(0, 0), G12 = G.block<2, 2>(0, 2);
  const Eigen::Matrix2cd G21 = G.block<2, 2>(2, 0), G22 = G.block<2, 2>(2, 2);
  const cplx det = G12.determinant();
  if (det == cplx(0.0)) throw NumericError("coupling matrix: transmission block is singular");
  const Eigen::Matrix2cd X = G12.inverse();
  Mat4 C;
  C.block<2, 2>(0, 0) = X;
  C.block<2, 2>(0, 2) = -X * G11;
  C.block<2, 2>(2, 0) = G22 * X;
  C.block<2, 2>(2, 2) = G21 - G22 * X * G11;
  return C;
}

inline Mat4 phase_matrix(cplx phi) {
  Vec4 d(std::exp(-kI * phi), std::exp(phi), std::exp(kI * phi), std::exp(-phi));
  return d.asDiagonal();
}

namespace detail {

// C is affine in sigma; its two parts come from G at sigma = 0 and 1.
struct AffineCoupling {
  Mat4 C0, C1, D;
};

inline AffineCoupling affine_coupling(cplx k, double a, double L) {
  const Mat4 c0 = coupling_from_scattering(scattering_matrix(coefficients(0.0, a * k, false)));
  const Mat4 c_unit = coupling_from_scattering(scattering_matrix(coefficients(1.0, a * k, false)));
  return {c0, c_unit - c0, phase_matrix(k * (L + a) / 2.0)};
}

}  // namespace detail

struct CellMatrices {
  Mat4 G, C, D, T;
  double f{};
  double k{};
  double phi{};
  ScatterCoeffs coeffs;
};

inline CellMatrices cell_matrices(const UnitCell& cell, double f) {
  const Forcing fs = forcing_strength(cell, f);
  if (fs.infinite)
    throw SingularFrequencyError("cell_matrices: transfer matrix is unbounded at an exact rod pole");
  CellMatrices m;
  m.f = f;
  m.k = fs.k.real();
  m.phi = m.k * (cell.L + cell.a) / 2.0;
  m.coeffs = detail::coefficients(fs.sigma, cell.a * fs.k, false);
  m.coeffs.F_eff = fs.F_eff;
  m.G = scattering_matrix(m.coeffs);
  const auto parts = detail::affine_coupling(fs.k, cell.a, cell.L);
  m.C = parts.C0 + fs.sigma * parts.C1;
  m.D = parts.D;
  m.T = m.D * m.C * m.D;
  return m;
}

/// T = diag(d) + sigma * u * v^T.
struct TransferDecomposition {
  Vec4 d, u, v;
  cplx sigma;
  bool infinite = false;
  cplx k;
  double L{};

  Mat4 matrix() const {
    Mat4 T = sigma * u * v.transpose();
    T.diagonal() += d;
    return T;
  }
  Vec4 apply(const Vec4& s) const { return d.cwiseProduct(s) + (sigma * v.cwiseProduct(s).sum()) * u; }
};

namespace detail {

inline TransferDecomposition decompose(const Forcing& fs, double a, double L) {
  const auto parts = affine_coupling(fs.k, a, L);
  const Mat4 T0 = parts.D * parts.C0 * parts.D;
  const Mat4 T1 = parts.D * parts.C1 * parts.D;
  TransferDecomposition out;
  out.d = T0.diagonal();
  Eigen::Index i = 0, j = 0;
  T1.cwiseAbs().maxCoeff(&i, &j);
  out.u = T1.col(j);
  out.v = T1.row(i).transpose() / T1(i, j);
  out.sigma = fs.sigma;
  out.infinite = fs.infinite;
  out.k = fs.k;
  out.L = L;
  return out;
}

}  // namespace detail

inline TransferDecomposition transfer_decomposition(const UnitCell& cell, double f) {
  return detail::decompose(forcing_strength(cell, f), cell.a, cell.L);
}

inline TransferDecomposition transfer_decomposition_at(const UnitCell& cell, cplx omega) {
  return detail::decompose(forcing_strength_at(cell, omega), cell.a, cell.L);
}

}  // namespace rodwave
