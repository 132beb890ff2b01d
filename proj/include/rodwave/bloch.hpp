#pragma once

// Bloch analysis of the cell transfer matrix: eigenvalues and modes,
// transmission and stopbands, semi-infinite reflection, finite-chain
// decay and the field inside one cell.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rodwave/cell_scattering.hpp"

namespace rodwave {

inline constexpr double kBandTol = 1e-6;         // 1 - |lambda| threshold for a stopband
inline constexpr double kUnitCircleTol = 1e-8;   // ||lambda| - 1| treated as propagating
inline constexpr double kReciprocityTol = 1e-9;  // |lambda lambda' - 1|
inline constexpr double kAbsorption = 1e-6;      // omega -> omega (1 + i eps) for direction tests
inline constexpr double kDegenerateShiftHz = 10.0;
inline constexpr double kEdgeResolutionHz = 1e3;

namespace detail {

struct Spectrum {
  // lambda[0], lambda[1]: flexural pair; lambda[2], lambda[3]: evanescent pair
  std::array<cplx, 4> lambda{};
  double reciprocity_error = 0.0;
};

inline cplx secular(const TransferDecomposition& t, cplx lam, cplx& deriv) {
  cplx h = t.infinite ? cplx(0.0) : 1.0 / t.sigma;
  deriv = 0.0;
  for (int i = 0; i < 4; ++i) {
    const cplx q = 1.0 / (t.d[i] - lam);
    const cplx w = t.u[i] * t.v[i];
    h += w * q;
    deriv += w * q * q;
  }
  return h;
}

// Newton on 1/sigma + sum u_i v_i / (d_i - lambda); steps that do not
// reduce the residual are rejected.
inline cplx polish(const TransferDecomposition& t, cplx lam) {
  if (!std::isfinite(std::abs(lam))) return lam;
  cplx dh;
  cplx h = secular(t, lam, dh);
  for (int it = 0; it < 6 && std::abs(h) > 0.0 && std::abs(dh) > 0.0; ++it) {
    const cplx next = lam - h / dh;
    cplx dn;
    const cplx hn = secular(t, next, dn);
    if (!(std::abs(hn) < std::abs(h))) break;
    lam = next;
    h = hn;
    dh = dn;
  }
  return lam;
}

// Roots of lambda^2 - z lambda + 1 = 0, larger modulus first.
inline std::pair<cplx, cplx> reciprocal_pair(cplx z) {
  const cplx r = std::sqrt(z * z - 4.0);
  const cplx a = 0.5 * (z + r), b = 0.5 * (z - r);
  const cplx big = std::abs(a) >= std::abs(b) ? a : b;
  return {big, 1.0 / big};
}

inline double pair_attenuation(cplx p) {
  const double m = std::abs(p);
  if (m == 0.0 || !std::isfinite(m)) return std::numeric_limits<double>::infinity();
  return std::abs(std::log(m));
}

// The characteristic polynomial of T is palindromic (det T = 1, symplectic
// structure), so with z = lambda + 1/lambda it reduces to
//   z^2 - c1 z + (c2 - 2) = 0.
// T0 is diagonal and T1 rank one, so c1 and c2 are affine in sigma.
inline Spectrum spectrum(const TransferDecomposition& t) {
  Spectrum s;
  const Vec4& d = t.d;
  if (!t.infinite && t.sigma == cplx(0.0)) {
    s.lambda = {d[0], d[2], d[1], d[3]};
    s.reciprocity_error = std::max(std::abs(d[0] * d[2] - 1.0), std::abs(d[1] * d[3] - 1.0));
    return s;
  }
  const Vec4 w = t.u.cwiseProduct(t.v);
  cplx t0 = 0.0, t1 = 0.0, e2 = 0.0, b = 0.0;
  for (int i = 0; i < 4; ++i) {
    t0 += d[i];
    t1 += w[i];
    cplx others = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      others += d[j];
      if (j > i) e2 += d[i] * d[j];
    }
    b += w[i] * others;
  }
  cplx zf;
  std::pair<cplx, cplx> evan;
  if (t.infinite) {
    zf = b / t1;
    evan = {cplx(std::numeric_limits<double>::infinity()), cplx(0.0)};
  } else {
    const cplx c1 = t0 + t.sigma * t1;
    const cplx c2 = e2 + t.sigma * b;
    const cplx disc = std::sqrt(c1 * c1 - 4.0 * (c2 - 2.0));
    const cplx za = 0.5 * (c1 + disc), zb = 0.5 * (c1 - disc);
    const cplx ze = std::abs(za) >= std::abs(zb) ? za : zb;
    zf = (c2 - 2.0) / ze;
    evan = reciprocal_pair(ze);
  }
  auto flex = reciprocal_pair(zf);
  std::array<cplx, 4> lam = {polish(t, flex.first), polish(t, flex.second), polish(t, evan.first),
                             polish(t, evan.second)};
  if (pair_attenuation(lam[2]) < pair_attenuation(lam[0])) {
    std::swap(lam[0], lam[2]);
    std::swap(lam[1], lam[3]);
  }
  s.lambda = lam;
  for (int p = 0; p < 4; p += 2) {
    if (!std::isfinite(std::abs(lam[p])) || !std::isfinite(std::abs(lam[p + 1]))) continue;
    if (lam[p] == 0.0 || lam[p + 1] == 0.0) continue;
    s.reciprocity_error = std::max(s.reciprocity_error, std::abs(lam[p] * lam[p + 1] - 1.0));
  }
  return s;
}

inline Vec4 eigenvector(const TransferDecomposition& t, cplx lam) {
  Vec4 x = Vec4::Zero();
  if (!t.infinite && t.sigma == cplx(0.0)) {
    Eigen::Index i = 0;
    (t.d.array() - lam).abs().minCoeff(&i);
    x[i] = 1.0;
    return x;
  }
  if (!std::isfinite(std::abs(lam))) {
    x = t.u;
  } else {
    for (int i = 0; i < 4; ++i) {
      const cplx gap = t.d[i] - lam;
      if (gap == cplx(0.0)) {
        x.setZero();
        x[i] = 1.0;
        return x;
      }
      x[i] = t.u[i] / gap;
    }
  }
  return x / x.norm();
}

inline int nearest(const std::array<cplx, 4>& values, cplx target) {
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(values[i] - target) < std::abs(values[best] - target)) best = i;
  return best;
}

}  // namespace detail

/// Eigenvalues and eigenvectors of T, split into right-directed (forward)
/// and left-directed (backward) members of the flexural and evanescent pairs.
struct BlochModes {
  double f{};
  double f_evaluated{};  // differs from f when a degenerate point was shifted
  cplx lambda_f, lambda_fb, lambda_e, lambda_eb;
  Vec4 x_f, x_fb, x_e, x_eb;
  TransferDecomposition transfer;
  Forcing forcing;
  double reciprocity_error = 0.0;
  bool degenerate = false;
};

namespace detail {

inline std::optional<BlochModes> try_modes(const UnitCell& cell, double f) {
  BlochModes m;
  m.f = m.f_evaluated = f;
  m.forcing = forcing_strength(cell, f);
  m.transfer = detail::decompose(m.forcing, cell.a, cell.L);
  const Spectrum s = spectrum(m.transfer);
  m.reciprocity_error = s.reciprocity_error;

  std::optional<Spectrum> perturbed;
  bool degenerate = false;
  auto orient = [&](cplx p, cplx q) -> std::pair<cplx, cplx> {
    const bool propagating = std::abs(std::abs(p) - 1.0) <= kUnitCircleTol ||
                             std::abs(std::abs(q) - 1.0) <= kUnitCircleTol;
    if (!propagating) return std::abs(p) <= std::abs(q) ? std::pair{p, q} : std::pair{q, p};
    if (std::abs(p - q) < 1e-7) {
      degenerate = true;
      return {p, q};
    }
    if (!perturbed) {
      const cplx omega = 2.0 * std::numbers::pi * f * cplx(1.0, kAbsorption);
      perturbed = spectrum(transfer_decomposition_at(cell, omega));
    }
    const int ip = nearest(perturbed->lambda, p), iq = nearest(perturbed->lambda, q);
    if (ip == iq) {
      degenerate = true;
      return {p, q};
    }
    // The member whose modulus drops under absorption travels to the right.
    return std::abs(perturbed->lambda[ip]) < std::abs(perturbed->lambda[iq]) ? std::pair{p, q}
                                                                             : std::pair{q, p};
  };
  std::tie(m.lambda_f, m.lambda_fb) = orient(s.lambda[0], s.lambda[1]);
  std::tie(m.lambda_e, m.lambda_eb) = orient(s.lambda[2], s.lambda[3]);
  if (degenerate) return std::nullopt;
  m.x_f = eigenvector(m.transfer, m.lambda_f);
  m.x_fb = eigenvector(m.transfer, m.lambda_fb);
  m.x_e = eigenvector(m.transfer, m.lambda_e);
  m.x_eb = eigenvector(m.transfer, m.lambda_eb);
  return m;
}

}  // namespace detail

inline BlochModes bloch_modes(const UnitCell& cell, double f) {
  if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("bloch_modes: f must be > 0");
  if (auto m = detail::try_modes(cell, f)) return *m;
  for (double shift : {kDegenerateShiftHz, -kDegenerateShiftHz, 2 * kDegenerateShiftHz}) {
    if (f + shift <= 0.0) continue;
    if (auto m = detail::try_modes(cell, f + shift)) {
      m->f = f;
      m->degenerate = true;
      return *m;
    }
  }
  throw NumericError("bloch_modes: unresolved band-edge degeneracy");
}

/// |lambda| of the less attenuated pair; cheap path for edge bisection.
inline double flexural_transmission(const UnitCell& cell, double f) {
  const auto s = detail::spectrum(transfer_decomposition(cell, f));
  return std::min({1.0, std::abs(s.lambda[0]), std::abs(s.lambda[1])});
}

struct Reflection {
  cplx gamma;    // reflected propagating amplitude
  cplx gamma_e;  // reflected evanescent amplitude
  cplx alpha;    // forward flexural Bloch amplitude
  cplx beta;     // forward evanescent Bloch amplitude
};

/// State [gamma, gamma_e, 1, 0] at the left edge of a semi-infinite chain,
/// required to be a combination of the two forward Bloch modes.
inline Reflection reflection_from_modes(const BlochModes& m) {
  Eigen::Matrix2cd M;
  M << m.x_f[2], m.x_e[2], m.x_f[3], m.x_e[3];
  const cplx det = M.determinant();
  if (!(std::abs(det) > 0.0)) throw NumericError("semi-infinite matching system is singular");
  const Eigen::Vector2cd ab = M.inverse() * Eigen::Vector2cd(1.0, 0.0);
  Reflection r;
  r.alpha = ab[0];
  r.beta = ab[1];
  r.gamma = r.alpha * m.x_f[0] + r.beta * m.x_e[0];
  r.gamma_e = r.alpha * m.x_f[1] + r.beta * m.x_e[1];
  return r;
}

inline Reflection semi_infinite_reflection(const UnitCell& cell, double f) {
  return reflection_from_modes(bloch_modes(cell, f));
}

/// v and its first three x-derivatives for local amplitudes at offset xi.
struct FieldValue {
  cplx v, v1, v2, v3;
};

inline FieldValue evaluate_local(cplx k, const Vec4& amps, double xi) {
  const std::array<cplx, 4> rate = {-kI * k, k, kI * k, -k};
  FieldValue out{};
  for (int i = 0; i < 4; ++i) {
    const cplx r = rate[i];
    const cplx e = amps[i] * std::exp(r * xi);
    out.v += e;
    out.v1 += r * e;
    out.v2 += r * r * e;
    out.v3 += r * r * r * e;
  }
  return out;
}

/// Time-averaged power flux of a local state, in units of w E_t I_t k^3
/// (a unit e^{ikx} wave carries +1).
inline double normalized_power_flux(double k, const Vec4& amps) {
  const FieldValue fv = evaluate_local(k, amps, 0.0);
  return -0.5 * std::imag(fv.v3 * std::conj(fv.v) - fv.v2 * std::conj(fv.v1)) / (k * k * k);
}

struct BlochPoint {
  double f{};
  double k{};
  cplx sigma;
  std::array<cplx, 4> eigenvalues{};  // forward flex, backward flex, forward evan, backward evan
  cplx lambda_flex;
  double T_coeff{};
  double R_coeff{};
  cplx k_ef;
  cplx gamma;
  cplx gamma_e;
  double gamma_phase{};
  bool in_stopband = false;
  bool near_pole = false;
  bool degenerate = false;
  double reciprocity_error{};
  bool reciprocity_ok() const { return reciprocity_error < kReciprocityTol; }
};

inline double principal_phase(cplx z) {
  double p = std::arg(z);
  if (p <= -std::numbers::pi) p = std::numbers::pi;
  return p;
}

inline BlochPoint bloch_point(const UnitCell& cell, double f) {
  const BlochModes m = bloch_modes(cell, f);
  BlochPoint p;
  p.f = f;
  p.k = m.forcing.k.real();
  p.sigma = m.forcing.sigma;
  p.near_pole = m.forcing.near_pole;
  p.degenerate = m.degenerate;
  p.eigenvalues = {m.lambda_f, m.lambda_fb, m.lambda_e, m.lambda_eb};
  p.lambda_flex = m.lambda_f;
  p.T_coeff = std::min(1.0, std::abs(m.lambda_f));
  p.R_coeff = 1.0 - p.T_coeff;
  p.k_ef = -kI * std::log(m.lambda_f) / cell.L;
  p.in_stopband = p.T_coeff < 1.0 - kBandTol;
  p.reciprocity_error = m.reciprocity_error;
  const Reflection r = reflection_from_modes(m);
  p.gamma = r.gamma;
  p.gamma_e = r.gamma_e;
  p.gamma_phase = principal_phase(r.gamma);
  return p;
}

inline std::vector<double> frequency_grid(double f_start, double f_stop, int points) {
  if (!(f_start > 0.0) || !(f_stop > f_start) || !std::isfinite(f_stop))
    throw DomainError("sweep: need 0 < f_start < f_stop");
  if (points < 2) throw DomainError("sweep: need at least 2 points");
  std::vector<double> f(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    f[static_cast<std::size_t>(i)] =
        i == points - 1 ? f_stop : f_start + (f_stop - f_start) * i / (points - 1);
  return f;
}

inline std::vector<BlochPoint> sweep(const UnitCell& cell, double f_start, double f_stop,
                                     int points) {
  std::vector<BlochPoint> out;
  for (double f : frequency_grid(f_start, f_stop, points)) out.push_back(bloch_point(cell, f));
  return out;
}

struct Stopband {
  double f_low{};
  double f_high{};
  double f_center{};
  double max_attenuation{};  // nepers per cell, -ln|lambda_flex|
  int grid_points{};
};

struct StopbandReport {
  std::vector<Stopband> bands;
  std::vector<double> resonance_markers;  // Gamma_real -> +1 inside a band
  std::vector<std::string> warnings;
};

namespace detail {

inline double refine_edge(const UnitCell& cell, double f_pass, double f_stop) {
  while (std::abs(f_stop - f_pass) > kEdgeResolutionHz) {
    const double mid = 0.5 * (f_pass + f_stop);
    if (flexural_transmission(cell, mid) < 1.0 - kBandTol)
      f_stop = mid;
    else
      f_pass = mid;
  }
  return 0.5 * (f_pass + f_stop);
}

}  // namespace detail

inline StopbandReport stopband_report(const UnitCell& cell, const std::vector<BlochPoint>& pts) {
  StopbandReport rep;
  if (pts.size() < 3) {
    rep.warnings.push_back("grid has fewer than 3 points; stopbands cannot be resolved");
    return rep;
  }
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n;) {
    if (!pts[i].in_stopband) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && pts[j + 1].in_stopband) ++j;
    Stopband b;
    b.f_low = i == 0 ? pts[0].f : detail::refine_edge(cell, pts[i - 1].f, pts[i].f);
    b.f_high = j == n - 1 ? pts[n - 1].f : detail::refine_edge(cell, pts[j + 1].f, pts[j].f);
    double wsum = 0.0, fw = 0.0;
    for (std::size_t q = i; q <= j; ++q) {
      const double att = -std::log(pts[q].T_coeff);
      wsum += att;
      fw += att * pts[q].f;
      b.max_attenuation = std::max(b.max_attenuation, att);
    }
    b.f_center = fw / wsum;
    b.grid_points = static_cast<int>(j - i + 1);
    if (b.grid_points < 3) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "band near %.6g Hz spans %d grid point(s); refine the sweep to resolve it",
                    b.f_center, b.grid_points);
      rep.warnings.emplace_back(msg);
    }
    for (std::size_t q = i; q < j; ++q) {
      const double p0 = pts[q].gamma_phase, p1 = pts[q + 1].gamma_phase;
      const bool crosses = (p0 <= 0.0 && p1 > 0.0) || (p0 >= 0.0 && p1 < 0.0);
      if (crosses && std::abs(p1 - p0) < std::numbers::pi)
        rep.resonance_markers.push_back(pts[q].f + (0.0 - p0) / (p1 - p0) * (pts[q + 1].f - pts[q].f));
    }
    rep.bands.push_back(b);
    i = j + 1;
  }
  return rep;
}

/// The band holding the rod quarter-wave frequency, else the band closest to it.
inline std::optional<Stopband> principal_band(const StopbandReport& rep, const UnitCell& cell) {
  if (rep.bands.empty()) return std::nullopt;
  const double fp = cell.rod.quarter_wave_frequency();
  const Stopband* best = &rep.bands.front();
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& b : rep.bands) {
    const double gap = fp < b.f_low ? b.f_low - fp : (fp > b.f_high ? fp - b.f_high : 0.0);
    if (gap < best_gap) {
      best_gap = gap;
      best = &b;
    }
  }
  return *best;
}

struct ChainProfile {
  std::vector<double> amplitude;        // |forward flexural amplitude| at boundaries 0..n, relative to 0
  std::vector<double> log10_amplitude;
  double fitted_slope{};  // least-squares d ln(amplitude) / d(cell index)
  double eigen_slope{};   // ln|lambda_flex|
  cplx lambda_flex;
};

/// Unit right-going input on a matched (semi-infinite) termination, pushed
/// through n_cells transfer matrices. Each step projects out the
/// left-directed Bloch content and renormalizes, keeping a log scale.
inline ChainProfile chain_profile(const UnitCell& cell, double f, int n_cells) {
  if (n_cells < 2) throw DomainError("chain_profile: need at least 2 cells");
  const BlochModes m = bloch_modes(cell, f);
  if (m.transfer.infinite) throw SingularFrequencyError("chain_profile: exact rod pole");
  const Reflection r = reflection_from_modes(m);
  Mat4 X;
  X << m.x_f, m.x_e, m.x_fb, m.x_eb;
  const Eigen::FullPivLU<Mat4> lu(X);
  const Mat4 T = m.transfer.matrix();

  ChainProfile out;
  out.lambda_flex = m.lambda_f;
  out.eigen_slope = std::log(std::abs(m.lambda_f));
  Vec4 s(r.gamma, r.gamma_e, 1.0, 0.0);
  Vec4 c = lu.solve(s);
  const double ln0 = std::log(std::abs(c[0]));
  std::vector<double> ln_amp = {0.0};
  double log_scale = 0.0;
  for (int j = 1; j <= n_cells; ++j) {
    c = lu.solve(T * s);
    ln_amp.push_back(log_scale + std::log(std::abs(c[0])) - ln0);
    c[2] = 0.0;
    c[3] = 0.0;
    s = X * c;
    const double nrm = s.norm();
    s /= nrm;
    log_scale += std::log(nrm);
  }
  const double nn = static_cast<double>(ln_amp.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < ln_amp.size(); ++j) {
    const double x = static_cast<double>(j);
    sx += x;
    sy += ln_amp[j];
    sxx += x * x;
    sxy += x * ln_amp[j];
  }
  out.fitted_slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  for (double l : ln_amp) {
    out.amplitude.push_back(std::exp(l));
    out.log10_amplitude.push_back(l / std::numbers::ln10);
  }
  return out;
}

enum class Region { left_trench, region_a, right_trench };

struct FieldSample {
  double x;  // measured from the rod centre, -L/2 .. L/2
  cplx v;
  Region region;
};

/// Left and right limits of the field at the junction x = 0, for a state
/// given at the left cell edge.
inline std::pair<FieldValue, FieldValue> junction_values(const UnitCell& cell, double f,
                                                         const Vec4& amps_left) {
  const CellMatrices cm = cell_matrices(cell, f);
  const Vec4 right = cm.T * amps_left;
  return {evaluate_local(cm.k, amps_left, cell.L / 2.0),
          evaluate_local(cm.k, right, -cell.L / 2.0)};
}

inline std::vector<FieldSample> field_profile(const UnitCell& cell, double f, const Vec4& amps_left,
                                              int x_samples) {
  if (x_samples < 2) throw DomainError("field_profile: need at least 2 samples");
  const CellMatrices cm = cell_matrices(cell, f);
  const Vec4 right = cm.T * amps_left;
  std::vector<FieldSample> out;
  for (int i = 0; i < x_samples; ++i) {
    const double x = -cell.L / 2.0 + cell.L * i / (x_samples - 1);
    FieldSample s;
    s.x = x;
    s.v = x < 0.0 ? evaluate_local(cm.k, amps_left, x + cell.L / 2.0).v
                  : evaluate_local(cm.k, right, x - cell.L / 2.0).v;
    s.region = std::abs(x) < cell.a / 2.0 ? Region::region_a
                                          : (x < 0.0 ? Region::left_trench : Region::right_trench);
    out.push_back(s);
  }
  return out;
}

}  // namespace rodwave
