#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "cfts/config.hpp"
#include "cfts/grid_file.hpp"
#include "cfts/interferometer.hpp"
#include "cfts/noise_bench.hpp"
#include "cfts/reconstruction.hpp"
#include "cfts/spdc_model.hpp"

namespace fs = std::filesystem;
using namespace cfts;

namespace {

struct Context {
  io::RunConfig config;
  fs::path out;

  std::string path(const std::string& name) const { return (out / name).string(); }

  void emit(const std::string& name, io::GridFile grid, bool heatmap = false) const {
    grid.meta["config_sha256"] = config.digest;
    io::write_grid(path(name + ".grid"), grid);
    io::write_text(path(name + ".csv"), io::to_csv(grid));
    if (heatmap && config.reconstruction.heatmaps) io::write_text(path(name + ".pgm"), io::to_pgm(grid));
    std::cout << "wrote " << path(name + ".grid") << "\n";
  }
};

Context load(const std::string& config_path) {
  Context c;
  c.config = io::load_run_config(io::read_config(config_path));
  c.out = c.config.output_directory;
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw ConfigError("cannot create output directory '" + c.out.string() + "'");
  return c;
}

JointSpectrum simulate(const io::RunConfig& c) {
  const spdc::JointAmplitude amp =
      spdc::joint_amplitude(c.source_grid, c.crystal, c.pump, c.collection, c.quadrature);
  return spdc::joint_intensity(amp, true);
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void cmd_simulate(const std::string& config_path) {
  const Context c = load(config_path);
  io::GridFile g = io::spectrum_grid(simulate(c.config), "joint_spectral_intensity");
  g.meta["normalization"] = "unit-maximum";
  g.meta["quadrature_order"] = std::to_string(c.config.quadrature.order);
  g.meta["sellmeier"] = c.config.crystal.sellmeier.name;
  c.emit("jsa", g, true);
}

void cmd_synthesize(const std::string& config_path, std::string spectrum_path) {
  const Context c = load(config_path);
  if (spectrum_path.empty()) spectrum_path = c.path("jsa.grid");
  const std::string text = io::read_text(spectrum_path);
  const JointSpectrum s = io::spectrum_from_grid(io::parse_grid(text));
  if (s.grid.quantity != SpectralQuantity::AngularFrequency)
    throw ConfigError("synthesize needs a spectrum on angular-frequency axes");
  std::vector<std::string> warnings;
  const interf::ScanPlan plan = c.config.scan.plan(&warnings);
  warn(warnings);
  io::GridFile g = io::interferogram_grid(
      interf::synthesize(s, plan, c.config.detection, c.config.sampled, c.config.workers));
  g.meta["input_sha256"] = io::sha256_hex(text);
  c.emit("interferogram", g);
}

struct Reconstruction {
  interf::Interferogram interferogram;
  std::string input_digest;
  std::shared_ptr<recon::FrequencyMap> map;
  recon::TermDecomposition terms;
  recon::WavelengthMap wavelength;
  std::optional<recon::PoissonErrors> errors;
};

std::unique_ptr<Reconstruction> reconstruct(const Context& c, std::string path) {
  if (path.empty()) path = c.path("interferogram.grid");
  auto r = std::make_unique<Reconstruction>();
  const std::string text = io::read_text(path);
  r->input_digest = io::sha256_hex(text);
  r->interferogram = io::interferogram_from_grid(io::parse_grid(text));
  const auto& rc = c.config.reconstruction;
  r->map = std::make_shared<recon::FrequencyMap>(
      recon::dft2(r->interferogram, rc.window, rc.detrend));
  r->terms = recon::extract_terms(*r->map, rc.extract);
  r->wavelength = recon::joint_in_wavelength(r->terms, rc.jacobian, rc.lambda);
  if (r->interferogram.kind == interf::CountKind::Sampled) r->errors.emplace(*r->map, r->interferogram);
  return r;
}

void tag(io::GridFile& g, const Reconstruction& r, const io::ReconConfig& rc) {
  g.meta["input_sha256"] = r.input_digest;
  g.meta["window"] = rc.window == recon::Window::None ? "none" : "raised-cosine";
  g.meta["detrended"] = rc.detrend ? "true" : "false";
  g.meta["jacobian"] = rc.jacobian ? "applied" : "not-applied";
  g.meta["estimator"] = "modulus";
}

std::string section_name(recon::LineKind kind) {
  return kind == recon::LineKind::Sum ? "cross_section_sum" : "cross_section_difference";
}

void write_section(const Context& c, const Reconstruction& r, recon::LineKind kind,
                   const recon::CrossSectionOptions& options) {
  const recon::CrossSection cs =
      recon::cross_section(r.wavelength, kind, options, r.errors ? &*r.errors : nullptr);
  const std::string file = c.path(section_name(kind) + ".csv");
  io::write_text(file, io::cross_section_csv(cs, c.config.digest));
  std::cout << "wrote " << file << "\n";
}

void cmd_reconstruct(const std::string& config_path, const std::string& interferogram_path) {
  const Context c = load(config_path);
  const auto r = reconstruct(c, interferogram_path);
  const auto& rc = c.config.reconstruction;
  if (r->terms.marginals_overlap)
    std::cerr << "warning: axis-term footprints overlap; marginals are not separable\n";

  io::GridFile fmap = io::frequency_map_grid(*r->map);
  fmap.meta["input_sha256"] = r->input_digest;
  c.emit("frequency_map", fmap, true);

  io::GridFile joint = io::spectrum_grid(r->terms.joint, "joint_term_frequency");
  tag(joint, *r, rc);
  c.emit("joint_omega", joint, true);

  io::GridFile wl = io::spectrum_grid(r->wavelength.spectrum, "joint_term_wavelength");
  tag(wl, *r, rc);
  wl.meta["normalization"] = "unit-maximum";
  wl.meta["interpolation"] = "bilinear";
  wl.meta["peak_value"] = io::format_double(r->wavelength.peak_value);
  c.emit("joint_lambda", wl, true);

  std::string marginals = "# config_sha256 = " + c.config.digest + "\nomega_a,marginal_a\n";
  for (std::size_t i = 0; i < r->terms.marginal_a.size(); ++i)
    marginals += io::format_double(r->terms.grid.a.at(i)) + "," +
                 io::format_double(r->terms.marginal_a[i]) + "\n";
  marginals += "omega_b,marginal_b\n";
  for (std::size_t j = 0; j < r->terms.marginal_b.size(); ++j)
    marginals += io::format_double(r->terms.grid.b.at(j)) + "," +
                 io::format_double(r->terms.marginal_b[j]) + "\n";
  io::write_text(c.path("marginals.csv"), marginals);

  recon::CrossSectionOptions options;
  options.samples = rc.cross_section_samples;
  write_section(c, *r, recon::LineKind::Sum, options);
  write_section(c, *r, recon::LineKind::Difference, options);
}

void cmd_cross_section(const std::string& config_path, const std::string& interferogram_path,
                       const std::string& kind, std::optional<double> anchor_a,
                       std::optional<double> anchor_b) {
  const Context c = load(config_path);
  if (anchor_a.has_value() != anchor_b.has_value())
    throw ConfigError("give both --anchor-a-nm and --anchor-b-nm or neither");
  const auto r = reconstruct(c, interferogram_path);
  recon::CrossSectionOptions options;
  options.samples = c.config.reconstruction.cross_section_samples;
  if (anchor_a) options.anchor = {nanometers(*anchor_a), nanometers(*anchor_b)};
  write_section(c, *r, kind == "sum" ? recon::LineKind::Sum : recon::LineKind::Difference,
                options);
}

void cmd_bench(const std::string& config_path, const std::string& spectrum_path) {
  const Context c = load(config_path);
  std::string source_digest = "simulated";
  JointSpectrum s;
  if (spectrum_path.empty()) {
    s = simulate(c.config);
  } else {
    const std::string text = io::read_text(spectrum_path);
    source_digest = io::sha256_hex(text);
    s = io::spectrum_from_grid(io::parse_grid(text));
  }
  bench::BenchSpec spec = c.config.bench;
  if (c.config.scan.explicit_mesh) {
    std::vector<std::string> warnings;
    spec.mesh = c.config.scan.plan(&warnings);
    warn(warnings);
  }
  const bench::BenchReport report = bench::compare(s, spec);
  if (report.insufficient_trials)
    std::cerr << "warning: fewer than 10 trials; statistics are insufficient\n";
  std::ostringstream text;
  text << "config_sha256 = " << c.config.digest << "\n";
  text << "source = " << source_digest << "\n";
  bench::write_report(text, report);
  io::write_text(c.path("bench_report.txt"), text.str());
  std::cout << "wrote " << c.path("bench_report.txt") << "\n";

  const SpectralGrid pixels = spec.pixel_centres();
  auto grid = [&](const Array2D<double>& values, const std::string& kind) {
    io::GridFile g = io::spectrum_grid(JointSpectrum{pixels, values}, kind);
    g.meta["units"] = kind.rfind("bench_snr", 0) == 0 ? "ratio" : "pair probability per pixel";
    return g;
  };
  c.emit("bench_truth", grid(report.truth, "bench_truth"));
  c.emit("bench_mean_fourier", grid(report.mean_fourier, "bench_mean_fourier"));
  c.emit("bench_mean_scanning", grid(report.mean_scanning, "bench_mean_scanning"));
  c.emit("bench_snr_fourier", grid(report.snr_fourier, "bench_snr_fourier"));
  c.emit("bench_snr_scanning", grid(report.snr_scanning, "bench_snr_scanning"));
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coincidence Fourier-transform spectroscopy of photon pairs"};
  app.require_subcommand(1);
  std::string config, input, kind = "sum";
  std::optional<double> anchor_a, anchor_b;

  auto* sim = app.add_subcommand("simulate-jsa", "Compute the joint spectral intensity on the source grid");
  sim->add_option("--config", config, "run configuration")->required();

  auto* syn = app.add_subcommand("synthesize", "Simulate a coincidence interferogram");
  syn->add_option("--config", config, "run configuration")->required();
  syn->add_option("--spectrum", input, "joint spectrum grid (default <output>/jsa.grid)");

  auto* rec = app.add_subcommand("reconstruct", "Fourier analysis of an interferogram");
  rec->add_option("--config", config, "run configuration")->required();
  rec->add_option("--interferogram", input, "interferogram grid (default <output>/interferogram.grid)");

  auto* cs = app.add_subcommand("cross-section", "Cut the wavelength map along a sum or difference line");
  cs->add_option("--config", config, "run configuration")->required();
  cs->add_option("--interferogram", input, "interferogram grid (default <output>/interferogram.grid)");
  cs->add_option("--kind", kind, "sum or difference")->check(CLI::IsMember({"sum", "difference"}));
  cs->add_option("--anchor-a-nm", anchor_a, "line anchor, photon A (default: map maximum)");
  cs->add_option("--anchor-b-nm", anchor_b, "line anchor, photon B");

  auto* bn = app.add_subcommand("bench", "Fourier versus scanning comparison under dark counts");
  bn->add_option("--config", config, "run configuration")->required();
  bn->add_option("--spectrum", input, "joint spectrum grid (default: simulate from the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (*sim) cmd_simulate(config);
    else if (*syn) cmd_synthesize(config, input);
    else if (*rec) cmd_reconstruct(config, input);
    else if (*cs) cmd_cross_section(config, input, kind, anchor_a, anchor_b);
    else if (*bn) cmd_bench(config, input);
  } catch (const Error& e) {
    const char* label = e.kind() == Error::Kind::Config   ? "config"
                        : e.kind() == Error::Kind::Domain ? "domain"
                                                          : "numeric";
    std::cerr << "error: " << label << ": " << one_line(e.what()) << "\n";
    return e.kind() == Error::Kind::Numeric ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << one_line(e.what()) << "\n";
    return 2;
  }
  return 0;
}
