#pragma once

// Flat key = value run configuration. Units are part of the key names; every
// key in the schema is required and unknown keys are rejected.

#include <map>
#include <string>
#include <vector>

#include "cfts/interferometer.hpp"
#include "cfts/noise_bench.hpp"
#include "cfts/reconstruction.hpp"
#include "cfts/spdc_model.hpp"

namespace cfts::io {

struct KeyDoc {
  const char* key;
  const char* description;
};

/// The schema, in file order.
const std::vector<KeyDoc>& config_schema();

struct ConfigFile {
  std::map<std::string, std::string> values;
  /// SHA-256 (hex) of the canonical form: sorted "key=value\n" lines.
  std::string digest;
};

/// Parses text; '#' starts a comment, blank lines are ignored. Throws
/// ConfigError naming the key or line.
ConfigFile parse_config(const std::string& text);
ConfigFile read_config(const std::string& path);

std::string sha256_hex(const std::string& bytes);

struct ScanConfig {
  bool explicit_mesh = true;  // scan.mode = mesh | auto
  interf::SpectralBand band;
  std::size_t n_u = 0, n_v = 0;
  double du = 0.0, dv = 0.0;
  interf::PlanOptions options;

  /// Builds and checks the plan; throws DomainError on sampling or range
  /// violations. Resolution shortfalls are appended to `warnings`.
  interf::ScanPlan plan(std::vector<std::string>* warnings = nullptr) const;
};

struct ReconConfig {
  recon::Window window = recon::Window::None;
  bool detrend = false;
  recon::ExtractOptions extract;
  bool jacobian = true;
  recon::WavelengthGridSpec lambda;
  std::size_t cross_section_samples = 201;
  bool heatmaps = true;
};

struct RunConfig {
  spdc::CrystalSpec crystal;
  spdc::PumpSpec pump;
  spdc::CollectionSpec collection;
  spdc::QuadratureSpec quadrature;
  SpectralGrid source_grid;
  ScanConfig scan;
  interf::DetectionSpec detection;
  bool sampled = true;
  ReconConfig reconstruction;
  bench::BenchSpec bench;
  std::string output_directory;
  unsigned workers = 0;
  std::string digest;
};

/// Converts and validates every value with the owning module's checks.
RunConfig load_run_config(const ConfigFile& file);

}  // namespace cfts::io
