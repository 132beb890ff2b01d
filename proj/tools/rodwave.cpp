#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "rodwave/rodwave.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

rodwave::RunConfig load(const std::string& path) {
  rodwave::RunConfig cfg = rodwave::load_config(path);
  for (const auto& n : cfg.notes) std::cerr << "note: " << n << "\n";
  return cfg;
}

int finish(const rodwave::RunResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& s : r.summary) std::cout << s << "\n";
  for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
  return r.numeric_ok ? kOk : kNumeric;
}

std::filesystem::path out_dir(const rodwave::RunConfig& cfg, const std::string& override_dir) {
  return override_dir.empty() ? std::filesystem::path(cfg.output.directory) : std::filesystem::path(override_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rodwave: flexural-wave Bloch analysis of resonant-rod unit cells"};
  app.set_version_flag("--version", std::string(rodwave::kVersion));
  app.require_subcommand(1);

  std::string config, out;
  bool plot = false;
  double f_start = 0, f_stop = 0, freq = 0;
  int points = 0, cells = 7;

  auto* sweep = app.add_subcommand("sweep", "frequency sweep: sweep.csv, stopbands.csv, optional sweep.svg");
  sweep->add_option("--config", config, "JSON config")->required();
  sweep->add_option("--out", out, "output directory (overrides config)");
  sweep->add_flag("--plot", plot, "also write sweep.svg");

  auto* stop = app.add_subcommand("stopbands", "stopband table only");
  stop->add_option("--config", config, "JSON config")->required();
  stop->add_option("--out", out, "output directory (overrides config)");

  auto* imp = app.add_subcommand("impedance", "rod driving impedance to stdout");
  imp->add_option("--config", config, "JSON config")->required();
  imp->add_option("--f-start", f_start, "Hz")->required();
  imp->add_option("--f-stop", f_stop, "Hz")->required();
  imp->add_option("--points", points, "grid points")->required();

  auto* chain = app.add_subcommand("chain", "finite-chain decay profile: chain.csv");
  chain->add_option("--config", config, "JSON config")->required();
  chain->add_option("--freq", freq, "Hz")->required();
  chain->add_option("--cells", cells, "number of cells, 2..200")->required();
  chain->add_option("--out", out, "output directory (overrides config)");
  chain->add_flag("--plot", plot, "also write chain.svg");

  auto* geom = app.add_subcommand("geom-sweep", "first-band centre vs a geometry parameter: geomsweep.csv");
  geom->add_option("--config", config, "JSON config")->required();
  geom->add_option("--out", out, "output directory (overrides config)");
  geom->add_flag("--plot", plot, "also write geomsweep.svg");

  auto* mats = app.add_subcommand("matrices", "G, C, D, T at one frequency to stdout");
  mats->add_option("--config", config, "JSON config")->required();
  mats->add_option("--freq", freq, "Hz")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const rodwave::RunConfig cfg = load(config);
    const std::string hash = rodwave::config_hash(cfg);
    if (*sweep) return finish(rodwave::run_frequency_sweep(cfg, out_dir(cfg, out), plot || cfg.output.plot));
    if (*stop) return finish(rodwave::run_stopbands(cfg, out_dir(cfg, out)));
    if (*imp) {
      std::cout << rodwave::impedance_table(cfg, f_start, f_stop, points).render(hash);
      return kOk;
    }
    if (*chain) return finish(rodwave::run_chain(cfg, out_dir(cfg, out), freq, cells, plot || cfg.output.plot).result);
    if (*geom) return finish(rodwave::run_geometry_sweep(cfg, out_dir(cfg, out), plot || cfg.output.plot));
    if (*mats) {
      std::cout << rodwave::matrices_table(cfg, freq).render(hash);
      return kOk;
    }
  } catch (const rodwave::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const rodwave::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const rodwave::SingularFrequencyError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const rodwave::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kConfig;
  } catch (const rodwave::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
  return kConfig;
}
