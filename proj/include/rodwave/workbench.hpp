#pragma once

// Run orchestration behind the rodwave CLI: frequency sweeps, stopband
// tables, chain profiles, geometry sweeps and matrix dumps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <filesystem>
#include <string>
#include <vector>

#include "rodwave/bloch.hpp"
#include "rodwave/config.hpp"
#include "rodwave/output.hpp"

namespace rodwave {

/// Figure of merit for the a-sweep tunability reported by FEM on the real device.
inline constexpr double kReferenceTunabilityHz = 117e6;

struct RunResult {
  std::vector<std::string> files;
  std::vector<std::string> summary;   // lines for stdout
  std::vector<std::string> warnings;  // lines for stderr
  bool numeric_ok = true;             // false when an invariant check failed
};

namespace detail {

inline std::string printf_line(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

}  // namespace detail

struct FrequencySweep {
  UnitCell cell;
  std::vector<BlochPoint> points;
  StopbandReport report;
  int reciprocity_failures = 0;
};

inline FrequencySweep frequency_sweep(const RunConfig& cfg, const Geometry& g) {
  FrequencySweep out;
  out.cell = cfg.cell(g);
  out.points = sweep(out.cell, cfg.sweep.f_start, cfg.sweep.f_stop, cfg.sweep.points);
  out.report = stopband_report(out.cell, out.points);
  for (const auto& p : out.points)
    if (!p.reciprocity_ok()) ++out.reciprocity_failures;
  return out;
}

inline FrequencySweep frequency_sweep(const RunConfig& cfg) { return frequency_sweep(cfg, cfg.geometry); }

inline CsvTable sweep_table(const FrequencySweep& s) {
  CsvTable t;
  t.header = {"f_hz",   "k_rad_per_m", "lambda_over_ht", "re_sigma",  "T_coeff",     "R_coeff",
              "re_kef", "im_kef",      "re_gamma",       "im_gamma",  "gamma_phase", "in_stopband"};
  const double ht = s.cell.trench.thickness;
  for (const auto& p : s.points) {
    t.rows.push_back({csv_number(p.f), csv_number(p.k), csv_number(2.0 * std::numbers::pi / (p.k * ht)),
                      csv_number(p.sigma.real()), csv_number(p.T_coeff), csv_number(p.R_coeff),
                      csv_number(p.k_ef.real()), csv_number(p.k_ef.imag()), csv_number(p.gamma.real()),
                      csv_number(p.gamma.imag()), csv_number(p.gamma_phase), p.in_stopband ? "1" : "0"});
  }
  return t;
}

inline CsvTable stopband_table(const StopbandReport& rep) {
  CsvTable t;
  t.header = {"f_low_hz", "f_high_hz", "f_center_hz", "max_atten_per_cell"};
  for (const auto& b : rep.bands)
    t.rows.push_back({csv_number(b.f_low), csv_number(b.f_high), csv_number(b.f_center),
                      csv_number(b.max_attenuation)});
  return t;
}

inline void report_sweep_health(const FrequencySweep& s, RunResult& r) {
  for (const auto& w : s.report.warnings) r.warnings.push_back(w);
  if (s.reciprocity_failures > 0) {
    r.numeric_ok = false;
    r.warnings.push_back(std::to_string(s.reciprocity_failures) +
                         " frequency point(s) failed the eigenvalue reciprocity check");
  }
}

inline Figure sweep_figure(const FrequencySweep& s) {
  Figure fig;
  fig.title = "Flexural transmission through the periodic cell";
  fig.xlabel = "frequency (GHz)";
  fig.x_scale = 1e9;
  Series T{"T", {}, {}, "#1f77b4"}, R{"R = 1 - T", {}, {}, "#d62728"}, K{"Im(k_ef) L", {}, {}, "#2ca02c"};
  for (const auto& p : s.points) {
    T.x.push_back(p.f);
    T.y.push_back(p.T_coeff);
    R.x.push_back(p.f);
    R.y.push_back(p.R_coeff);
    K.x.push_back(p.f);
    K.y.push_back(p.k_ef.imag() * s.cell.L);
  }
  std::vector<std::pair<double, double>> bands;
  for (const auto& b : s.report.bands) bands.emplace_back(b.f_low, b.f_high);
  fig.panels.push_back({"T, R", {T, R}, bands});
  fig.panels.push_back({"Im(k_ef) L (Np/cell)", {K}, bands});
  return fig;
}

inline RunResult run_stopbands(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  RunResult r;
  const FrequencySweep s = frequency_sweep(cfg);
  const std::string hash = config_hash(cfg);
  ensure_directory(out_dir);
  write_text(out_dir / "stopbands.csv", stopband_table(s.report).render(hash));
  r.files.push_back((out_dir / "stopbands.csv").string());
  report_sweep_health(s, r);
  r.summary.push_back(std::to_string(s.report.bands.size()) + " stopband(s) found");
  return r;
}

inline RunResult run_frequency_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir, bool plot) {
  RunResult r;
  const FrequencySweep s = frequency_sweep(cfg);
  const std::string hash = config_hash(cfg);
  const std::string sweep_csv = sweep_table(s).render(hash);
  const std::string bands_csv = stopband_table(s.report).render(hash);
  ensure_directory(out_dir);
  write_text(out_dir / "sweep.csv", sweep_csv);
  write_text(out_dir / "stopbands.csv", bands_csv);
  r.files = {(out_dir / "sweep.csv").string(), (out_dir / "stopbands.csv").string()};
  if (plot) {
    write_text(out_dir / "sweep.svg", render_svg(sweep_figure(s)));
    r.files.push_back((out_dir / "sweep.svg").string());
  }
  report_sweep_health(s, r);
  r.summary.push_back(std::to_string(s.points.size()) + " frequency points, " +
                      std::to_string(s.report.bands.size()) + " stopband(s)");
  if (auto pb = principal_band(s.report, s.cell))
    r.summary.push_back(detail::printf_line("principal band %.6g-%.6g Hz, centre %.6g Hz", pb->f_low,
                                            pb->f_high, pb->f_center));
  return r;
}

/// Z_b over a grid that may start at 0 Hz.
inline CsvTable impedance_table(const RunConfig& cfg, double f_start, double f_stop, int points) {
  if (!(f_start >= 0.0) || !(f_stop > f_start)) throw DomainError("impedance: need 0 <= f_start < f_stop");
  if (points < 2) throw DomainError("impedance: need at least 2 points");
  const UnitCell cell = cfg.cell();
  CsvTable t;
  t.header = {"f_hz", "im_Zb", "flag_near_pole"};
  for (int i = 0; i < points; ++i) {
    const double f = i == points - 1 ? f_stop : f_start + (f_stop - f_start) * i / (points - 1);
    const DrivingImpedance z = driving_impedance(cell.rod, f);
    const double im = z.value.imag();
    t.rows.push_back({csv_number(f), std::isfinite(im) ? csv_number(im) : (im > 0 ? "inf" : "-inf"),
                      z.near_pole ? "1" : "0"});
  }
  return t;
}

struct ChainRun {
  ChainProfile profile;
  RunResult result;
};

inline ChainRun run_chain(const RunConfig& cfg, const std::filesystem::path& out_dir, double f, int n_cells,
                          bool plot) {
  if (!(f > 0.0)) throw DomainError("chain: frequency must be > 0");
  if (n_cells < 2 || n_cells > 200) throw DomainError("chain: cells must be in [2, 200]");
  ChainRun run;
  const UnitCell cell = cfg.cell();
  run.profile = chain_profile(cell, f, n_cells);
  CsvTable t;
  t.header = {"cell_index", "amplitude_mag", "log10_amplitude"};
  for (std::size_t j = 0; j < run.profile.amplitude.size(); ++j)
    t.rows.push_back({std::to_string(j), csv_number(run.profile.amplitude[j]),
                      csv_number(run.profile.log10_amplitude[j])});
  ensure_directory(out_dir);
  write_text(out_dir / "chain.csv", t.render(config_hash(cfg)));
  run.result.files.push_back((out_dir / "chain.csv").string());
  if (plot) {
    Figure fig;
    fig.title = "Forward flexural amplitude along the chain";
    fig.xlabel = "cell boundary";
    Series s{"log10 |amplitude|", {}, {}, "#1f77b4"};
    for (std::size_t j = 0; j < run.profile.amplitude.size(); ++j) {
      s.x.push_back(static_cast<double>(j));
      s.y.push_back(run.profile.log10_amplitude[j]);
    }
    fig.panels.push_back({"log10 |amplitude|", {s}, {}});
    write_text(out_dir / "chain.svg", render_svg(fig));
    run.result.files.push_back((out_dir / "chain.svg").string());
  }
  auto& sum = run.result.summary;
  sum.push_back(detail::printf_line("fitted slope      %.9g Np/cell", run.profile.fitted_slope));
  sum.push_back(detail::printf_line("ln|lambda_flex|   %.9g Np/cell", run.profile.eigen_slope));
  if (std::abs(run.profile.eigen_slope) > kBandTol)
    sum.push_back(detail::printf_line("slope ratio       %.6f", run.profile.fitted_slope / run.profile.eigen_slope));
  else
    sum.push_back("passband frequency: profile is flat");
  return run;
}

enum class GeomStatus { ok, invalid_geometry, no_band };

inline const char* to_string(GeomStatus s) {
  switch (s) {
    case GeomStatus::ok: return "ok";
    case GeomStatus::invalid_geometry: return "invalid_geometry";
    case GeomStatus::no_band: return "no_band";
  }
  return "?";
}

struct GeomSweepRow {
  double param_value{};
  double f_center_first_band{};
  double band_width{};
  double attenuation_peak{};
  GeomStatus status = GeomStatus::ok;
  std::string detail;
};

enum class Shape { constant, increasing, decreasing, unimodal, irregular };

inline const char* to_string(Shape s) {
  switch (s) {
    case Shape::constant: return "constant";
    case Shape::increasing: return "monotonically increasing";
    case Shape::decreasing: return "monotonically decreasing";
    case Shape::unimodal: return "unimodal";
    case Shape::irregular: return "irregular";
  }
  return "?";
}

inline Shape classify_shape(const std::vector<double>& y) {
  int changes = 0, last = 0;
  bool any = false;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const int dir = (y[i] > y[i - 1]) - (y[i] < y[i - 1]);
    if (dir == 0) continue;
    if (last != 0 && dir != last) ++changes;
    if (!any) any = true;
    last = dir;
  }
  if (!any) return Shape::constant;
  if (changes == 0) return last > 0 ? Shape::increasing : Shape::decreasing;
  return changes == 1 ? Shape::unimodal : Shape::irregular;
}

struct GeomSweepResult {
  std::string parameter;
  std::vector<GeomSweepRow> rows;
  double delta_f = 0.0;  // max - min of f_center over ok rows
  Shape shape = Shape::constant;
  int reciprocity_failures = 0;
};

inline GeomSweepResult geometry_sweep(const RunConfig& cfg) {
  if (!cfg.geometry_sweep) throw ConfigError("geometry_sweep section is required", "geometry_sweep");
  const GeometrySweep& gs = *cfg.geometry_sweep;
  GeomSweepResult out;
  out.parameter = gs.parameter;
  std::vector<double> centers;
  for (double v : gs.values()) {
    GeomSweepRow row;
    row.param_value = v;
    Geometry g = cfg.geometry;
    geometry_field(g, gs.parameter) = v;
    UnitCell cell;
    try {
      cell = cfg.cell(g);
    } catch (const ConfigError& e) {
      row.status = GeomStatus::invalid_geometry;
      row.detail = e.what();
      out.rows.push_back(row);
      continue;
    }
    const FrequencySweep s = frequency_sweep(cfg, g);
    out.reciprocity_failures += s.reciprocity_failures;
    const auto pb = principal_band(s.report, s.cell);
    if (!pb) {
      row.status = GeomStatus::no_band;
    } else {
      row.f_center_first_band = pb->f_center;
      row.band_width = pb->f_high - pb->f_low;
      row.attenuation_peak = pb->max_attenuation;
      centers.push_back(pb->f_center);
    }
    out.rows.push_back(row);
  }
  if (!centers.empty())
    out.delta_f = *std::max_element(centers.begin(), centers.end()) -
                  *std::min_element(centers.begin(), centers.end());
  out.shape = classify_shape(centers);
  return out;
}

inline RunResult run_geometry_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir, bool plot) {
  const GeomSweepResult gsr = geometry_sweep(cfg);
  RunResult r;
  CsvTable t;
  t.header = {"param_value_m", "f_center_first_band_hz", "band_width_hz", "attenuation_peak", "status"};
  for (const auto& row : gsr.rows) {
    if (row.status == GeomStatus::ok)
      t.rows.push_back({csv_number(row.param_value), csv_number(row.f_center_first_band),
                        csv_number(row.band_width), csv_number(row.attenuation_peak), to_string(row.status)});
    else
      t.rows.push_back({csv_number(row.param_value), "", "", "", to_string(row.status)});
  }
  for (const auto& row : gsr.rows) {
    char buf[128];
    if (row.status == GeomStatus::invalid_geometry) {
      std::snprintf(buf, sizeof buf, "%s = %.6g m skipped: ", gsr.parameter.c_str(), row.param_value);
      r.warnings.push_back(buf + row.detail);
    } else if (row.status == GeomStatus::no_band) {
      std::snprintf(buf, sizeof buf, "%s = %.6g m: no stopband in the sweep range", gsr.parameter.c_str(),
                    row.param_value);
      r.warnings.push_back(buf);
    }
  }
  ensure_directory(out_dir);
  write_text(out_dir / "geomsweep.csv", t.render(config_hash(cfg)));
  r.files.push_back((out_dir / "geomsweep.csv").string());
  if (plot) {
    Figure fig;
    fig.title = "First-band centre vs " + gsr.parameter;
    fig.xlabel = gsr.parameter + " (um)";
    fig.x_scale = 1e-6;
    Series s{"f_center (GHz)", {}, {}, "#1f77b4"};
    for (const auto& row : gsr.rows)
      if (row.status == GeomStatus::ok) {
        s.x.push_back(row.param_value);
        s.y.push_back(row.f_center_first_band / 1e9);
      }
    fig.panels.push_back({"f_center (GHz)", {s}, {}});
    write_text(out_dir / "geomsweep.svg", render_svg(fig));
    r.files.push_back((out_dir / "geomsweep.svg").string());
  }
  if (gsr.reciprocity_failures > 0) {
    r.numeric_ok = false;
    r.warnings.push_back(std::to_string(gsr.reciprocity_failures) +
                         " frequency point(s) failed the eigenvalue reciprocity check");
  }
  r.summary.push_back(detail::printf_line("delta_f of first-band centre: %.6g Hz (%.4g MHz)", gsr.delta_f,
                                          gsr.delta_f / 1e6));
  r.summary.push_back(std::string("shape over the range: ") + to_string(gsr.shape));
  r.summary.push_back(detail::printf_line(
      "reference: finite-element tunability of the fabricated device is > %.4g MHz; this 1D beam model is "
      "not expected to reproduce that figure quantitatively (ratio %.3g)",
      kReferenceTunabilityHz / 1e6, gsr.delta_f / kReferenceTunabilityHz));
  return r;
}

inline CsvTable matrices_table(const RunConfig& cfg, double f) {
  const CellMatrices m = cell_matrices(cfg.cell(), f);
  CsvTable t;
  t.header = {"matrix", "row"};
  for (int c = 1; c <= 4; ++c) {
    t.header.push_back("re_" + std::to_string(c));
    t.header.push_back("im_" + std::to_string(c));
  }
  const std::pair<const char*, const Mat4*> mats[] = {{"G", &m.G}, {"C", &m.C}, {"D", &m.D}, {"T", &m.T}};
  for (const auto& [name, M] : mats)
    for (int i = 0; i < 4; ++i) {
      std::vector<std::string> row = {name, std::to_string(i + 1)};
      for (int j = 0; j < 4; ++j) {
        row.push_back(csv_number((*M)(i, j).real()));
        row.push_back(csv_number((*M)(i, j).imag()));
      }
      t.rows.push_back(row);
    }
  return t;
}

}  // namespace rodwave
