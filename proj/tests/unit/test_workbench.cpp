#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rodwave/workbench.hpp"

using namespace rodwave;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rodwave_wb_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Workbench, SweepOutputIsDeterministic) {
  const auto cfg = parse_config({{"sweep", {{"points", 400}}}});
  const auto d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
  run_frequency_sweep(cfg, d1, false);
  run_frequency_sweep(cfg, d2, false);
  for (const char* name : {"sweep.csv", "stopbands.csv"}) {
    const auto a = slurp(d1 / name), b = slurp(d2 / name);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b) << name;
  }
}

TEST(Workbench, SweepCsvLayout) {
  const auto cfg = parse_config({{"sweep", {{"points", 300}}}});
  const auto d = scratch_dir("layout");
  const auto r = run_frequency_sweep(cfg, d, true);
  EXPECT_TRUE(r.numeric_ok);
  const auto text = slurp(d / "sweep.csv");
  EXPECT_EQ(text.rfind("# rodwave " + std::string(kVersion) + " config_hash=" + config_hash(cfg) + "\n", 0), 0u);
  const auto rows = csv_rows(text);
  ASSERT_EQ(rows.size(), 301u);
  ASSERT_EQ(rows[0].size(), 12u);
  EXPECT_EQ(rows[0][0], "f_hz");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 12u) << i;
    for (const auto& c : rows[i]) {
      std::size_t used = 0;
      const double v = std::stod(c, &used);
      EXPECT_EQ(used, c.size()) << c;
      EXPECT_TRUE(std::isfinite(v));
    }
  }
  const auto svg = slurp(d / "sweep.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
}

TEST(Workbench, StopbandCsvLayout) {
  const auto cfg = parse_config(json::object());
  const auto d = scratch_dir("stop");
  run_stopbands(cfg, d);
  const auto rows = csv_rows(slurp(d / "stopbands.csv"));
  ASSERT_GE(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i].size(), rows[0].size());
}

TEST(Workbench, TwoPointSweepWarnsWithoutBands) {
  const auto cfg = parse_config({{"sweep", {{"points", 2}}}});
  const auto s = frequency_sweep(cfg);
  EXPECT_EQ(s.points.size(), 2u);
  EXPECT_TRUE(s.report.bands.empty());
  EXPECT_FALSE(s.report.warnings.empty());
  const auto d = scratch_dir("two");
  const auto r = run_frequency_sweep(cfg, d, false);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(csv_rows(slurp(d / "sweep.csv")).size(), 3u);
}

TEST(GeomSweep, SingleValueRange) {
  const auto cfg = parse_config({{"geometry_sweep", {{"parameter", "a"}, {"from_um", 2}, {"to_um", 2}}}});
  const auto g = geometry_sweep(cfg);
  ASSERT_EQ(g.rows.size(), 1u);
  EXPECT_EQ(g.rows[0].status, GeomStatus::ok);
  EXPECT_EQ(g.delta_f, 0.0);
}

TEST(GeomSweep, InvalidGeometriesAreFlaggedNotFatal) {
  const auto cfg = parse_config(
      {{"sweep", {{"points", 400}}},
       {"geometry_sweep", {{"parameter", "a"}, {"from_um", 3.6}, {"to_um", 5.6}, {"steps", 3}}}});
  const auto d = scratch_dir("invalid");
  const auto r = run_geometry_sweep(cfg, d, false);
  const auto rows = csv_rows(slurp(d / "geomsweep.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"param_value_m", "f_center_first_band_hz", "band_width_hz",
                                               "attenuation_peak", "status"}));
  EXPECT_EQ(rows[2][4], "invalid_geometry");
  EXPECT_EQ(rows[3][4], "invalid_geometry");
  EXPECT_EQ(rows[2][1], "");
  EXPECT_EQ(rows[1][4], "ok");
  EXPECT_EQ(r.warnings.size(), 2u);
}

TEST(GeomSweep, WidthSweepIsTunable) {
  const auto cfg =
      parse_config({{"geometry_sweep", {{"parameter", "a"}, {"from_um", 1.5}, {"to_um", 3.5}, {"steps", 11}}}});
  const auto g = geometry_sweep(cfg);
  EXPECT_GT(g.delta_f, 10e6);
  EXPECT_TRUE(g.shape == Shape::increasing || g.shape == Shape::decreasing || g.shape == Shape::unimodal);
  EXPECT_EQ(g.reciprocity_failures, 0);
}

TEST(GeomSweep, ThickerRodPiezoLowersFirstBandCentre) {
  const auto cfg = parse_config(
      {{"geometry_sweep", {{"parameter", "t_aln2"}, {"from_nm", 500}, {"to_nm", 700}, {"steps", 5}}}});
  const auto g = geometry_sweep(cfg);
  for (std::size_t i = 1; i < g.rows.size(); ++i) {
    ASSERT_EQ(g.rows[i].status, GeomStatus::ok);
    EXPECT_LT(g.rows[i].f_center_first_band, g.rows[i - 1].f_center_first_band)
        << "t_aln2 = " << g.rows[i].param_value;
  }
}

TEST(GeomSweep, SummaryMentionsReferenceFigure) {
  const auto cfg =
      parse_config({{"sweep", {{"points", 300}}},
                    {"geometry_sweep", {{"parameter", "a"}, {"from_um", 1.5}, {"to_um", 3.5}, {"steps", 3}}}});
  const auto r = run_geometry_sweep(cfg, scratch_dir("summary"), false);
  std::string all;
  for (const auto& s : r.summary) all += s + "\n";
  EXPECT_NE(all.find("delta_f"), std::string::npos);
  EXPECT_NE(all.find("117 MHz"), std::string::npos);
  EXPECT_NE(all.find("not expected to reproduce"), std::string::npos);
}

TEST(ShapeClassifier, Cases) {
  EXPECT_EQ(classify_shape({}), Shape::constant);
  EXPECT_EQ(classify_shape({1, 1, 1}), Shape::constant);
  EXPECT_EQ(classify_shape({1, 2, 2, 3}), Shape::increasing);
  EXPECT_EQ(classify_shape({3, 2, 1}), Shape::decreasing);
  EXPECT_EQ(classify_shape({1, 3, 2}), Shape::unimodal);
  EXPECT_EQ(classify_shape({1, 3, 2, 4}), Shape::irregular);
}

TEST(Chain, CellRangeEnforced) {
  const auto cfg = parse_config(json::object());
  const auto d = scratch_dir("chain");
  EXPECT_THROW(run_chain(cfg, d, 2.33e9, 1, false), DomainError);
  EXPECT_THROW(run_chain(cfg, d, 2.33e9, 201, false), DomainError);
  const auto run = run_chain(cfg, d, 2.33e9, 7, false);
  const auto rows = csv_rows(slurp(d / "chain.csv"));
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"cell_index", "amplitude_mag", "log10_amplitude"}));
  EXPECT_EQ(rows[1][1], "1");
  EXPECT_NEAR(run.profile.fitted_slope / run.profile.eigen_slope, 1.0, 0.02);
}

TEST(Impedance, TableStartsAtDcAndFlagsPole) {
  const auto cfg = parse_config(json::object());
  const double fp = cfg.cell().rod.quarter_wave_frequency();
  const auto t = impedance_table(cfg, 0.0, 2 * fp, 3);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.header, (std::vector<std::string>{"f_hz", "im_Zb", "flag_near_pole"}));
  EXPECT_EQ(t.rows[0][1], "0");
  EXPECT_EQ(t.rows[0][2], "0");
  EXPECT_EQ(t.rows[1][2], "1");
  EXPECT_THROW(impedance_table(cfg, -1.0, 1e9, 3), DomainError);
}

TEST(Matrices, SixteenRows) {
  const auto t = matrices_table(parse_config(json::object()), 1e9);
  ASSERT_EQ(t.rows.size(), 16u);
  EXPECT_EQ(t.header.size(), 10u);
  EXPECT_EQ(t.rows[0][0], "G");
  EXPECT_EQ(t.rows[15][0], "T");
  EXPECT_EQ(t.rows[15][1], "4");
}

TEST(Output, CsvNumberRules) {
  EXPECT_EQ(csv_number(-0.0), "0");
  EXPECT_EQ(csv_number(2.5e9), "2500000000");
  EXPECT_THROW(csv_number(std::nan("")), NumericError);
  EXPECT_THROW(csv_number(INFINITY), NumericError);
}

TEST(Output, UnwritableDirectoryIsIoError) {
  const auto blocker = scratch_dir("blocker");
  std::ofstream(blocker) << "file";
  EXPECT_THROW(ensure_directory(blocker / "sub"), IoError);
  fs::remove(blocker);
}
