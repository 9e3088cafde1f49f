#include "cfts/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace cfts::io {

const std::vector<KeyDoc>& config_schema() {
  static const std::vector<KeyDoc> schema = {
      {"crystal.length_mm", "crystal thickness"},
      {"crystal.cut_angle_deg", "optic axis to pump propagation"},
      {"crystal.sellmeier", "dispersion model; bbo-eimerl-1987"},
      {"pump.center_wavelength_nm", "pump centre wavelength"},
      {"pump.duration_fwhm_fs", "transform-limited pulse, intensity FWHM"},
      {"pump.waist_radius_um", "1/e^2 intensity radius"},
      {"collection.angle_a_deg", "external angle of photon A (+x side)"},
      {"collection.angle_b_deg", "external angle of photon B (-x side)"},
      {"collection.fiber_waist_a_um", "collected mode waist, photon A"},
      {"collection.fiber_waist_b_um", "collected mode waist, photon B"},
      {"quadrature.order", "Gauss-Hermite nodes per transverse dimension"},
      {"quadrature.central_plane_wave_only", "skip the transverse integral (true/false)"},
      {"quadrature.check_convergence", "compare against doubled order (true/false)"},
      {"quadrature.convergence_tolerance", "relative change allowed at the peak"},
      {"grid.lambda_a_min_nm", "source grid, photon A"},
      {"grid.lambda_a_max_nm", "source grid, photon A"},
      {"grid.points_a", "source grid, photon A, uniform in frequency"},
      {"grid.lambda_b_min_nm", "source grid, photon B"},
      {"grid.lambda_b_max_nm", "source grid, photon B"},
      {"grid.points_b", "source grid, photon B, uniform in frequency"},
      {"scan.mode", "mesh (explicit steps and counts) or auto (planned)"},
      {"scan.center_wavelength_a_nm", "band centre, photon A"},
      {"scan.center_wavelength_b_nm", "band centre, photon B"},
      {"scan.bandwidth_a_rad_per_fs", "band width in angular frequency, photon A"},
      {"scan.bandwidth_b_rad_per_fs", "band width in angular frequency, photon B"},
      {"scan.points_u", "mesh points along the fringe-perpendicular axis"},
      {"scan.points_v", "mesh points along the fringe-parallel axis"},
      {"scan.step_u_fs", "mesh step along u"},
      {"scan.step_v_fs", "mesh step along v"},
      {"scan.oversampling", "margin over the Nyquist step"},
      {"scan.resolution_divisions", "Fourier bins per bandwidth (auto) or warning level (mesh)"},
      {"scan.resolve_marginal_terms", "keep axis terms unaliased along v (true/false)"},
      {"scan.delay_min_fs", "hardware delay limit"},
      {"scan.delay_max_fs", "hardware delay limit"},
      {"detection.dwell_s", "counting time per point"},
      {"detection.pair_rate_scale_per_s", "coincidence rate at zero delay"},
      {"detection.dark_coinc_rate_per_s", "uniform accidental rate"},
      {"detection.visibility", "fringe visibility, 0..1"},
      {"detection.rng_seed", "Poisson seed"},
      {"detection.sampled", "Poisson counts (true) or expectations (false)"},
      {"reconstruction.window", "none or raised-cosine"},
      {"reconstruction.detrend", "remove the mean before the transform (true/false)"},
      {"reconstruction.dc_radius_bins", "DC mask radius"},
      {"reconstruction.axis_halfwidth_bins", "axis-term mask half-width along v"},
      {"reconstruction.jacobian", "multiply by d(omega_A)d(omega_B)/d(lambda_A)d(lambda_B)"},
      {"reconstruction.lambda_a_min_nm", "wavelength map, photon A"},
      {"reconstruction.lambda_a_max_nm", "wavelength map, photon A"},
      {"reconstruction.points_a", "wavelength map, photon A"},
      {"reconstruction.lambda_b_min_nm", "wavelength map, photon B"},
      {"reconstruction.lambda_b_max_nm", "wavelength map, photon B"},
      {"reconstruction.points_b", "wavelength map, photon B"},
      {"reconstruction.cross_section_samples", "points per cross-section"},
      {"reconstruction.heatmaps", "write PGM images (true/false)"},
      {"bench.total_time_s", "time shared by each method"},
      {"bench.dark_coinc_rate_per_s", "additive accidental rate"},
      {"bench.pair_rate_scale_per_s", "pair rate with all frequencies passed"},
      {"bench.pixels_a", "scanning monochromator settings, photon A"},
      {"bench.pixels_b", "scanning monochromator settings, photon B"},
      {"bench.trials", "Monte-Carlo repetitions"},
      {"bench.rng_seed", "seed of the trial streams"},
      {"bench.supersample", "truth and readout points per pixel and axis"},
      {"output.directory", "where commands write their files"},
      {"runtime.workers", "threads; 0 uses the available parallelism"},
  };
  return schema;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericError("SHA-256 digest failed");
  std::ostringstream s;
  for (unsigned i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return s.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(const ConfigFile& f) : f_(f) {}

  const std::string& text(const std::string& key) const {
    auto it = f_.values.find(key);
    if (it == f_.values.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const {
    const std::string& v = text(key);
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
      throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    return out;
  }

  std::uint64_t unsigned_integer(const std::string& key) const {
    const std::string& v = text(key);
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    return out;
  }

  std::size_t count(const std::string& key) const {
    return static_cast<std::size_t>(unsigned_integer(key));
  }

  bool flag(const std::string& key) const {
    const std::string& v = text(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> allowed) const {
    const std::string& v = text(key);
    for (const char* a : allowed)
      if (v == a) return v;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw ConfigError("key '" + key + "': expected one of " + list + ", got '" + v + "'");
  }

 private:
  const ConfigFile& f_;
};

// Module validation errors become config errors that name the section.
template <class Fn>
void checked(const char* section, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(std::string(section) + ": " + e.what());
  }
}

}  // namespace

ConfigFile parse_config(const std::string& text) {
  std::set<std::string> known;
  for (const auto& k : config_schema()) known.insert(k.key);
  ConfigFile out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known.count(key))
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("key '" + key + "' has no value");
    if (!out.values.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
  }
  for (const auto& k : config_schema())
    if (!out.values.count(k.key)) throw ConfigError(std::string("missing required key '") + k.key + "'");
  std::string canonical;
  for (const auto& [k, v] : out.values) canonical += k + "=" + v + "\n";
  out.digest = sha256_hex(canonical);
  return out;
}

ConfigFile read_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

interf::ScanPlan ScanConfig::plan(std::vector<std::string>* warnings) const {
  if (!explicit_mesh) return interf::plan_scan(band, options);
  const interf::ScanPlan p = interf::mesh_plan(band, n_u, n_v, du, dv);
  const interf::PlanCheck check =
      interf::check_plan(p, options.oversampling, options.range, options.resolution_divisions);
  if (warnings) warnings->insert(warnings->end(), check.warnings.begin(), check.warnings.end());
  return p;
}

RunConfig load_run_config(const ConfigFile& file) {
  const Reader r(file);
  RunConfig c;
  c.digest = file.digest;

  r.choice("crystal.sellmeier", {"bbo-eimerl-1987"});
  c.crystal.length = millimeters(r.number("crystal.length_mm"));
  c.crystal.cut_angle = degrees(r.number("crystal.cut_angle_deg"));
  checked("crystal", [&] { c.crystal.validate(); });

  c.pump.center_wavelength = nanometers(r.number("pump.center_wavelength_nm"));
  c.pump.duration_fwhm = femtoseconds(r.number("pump.duration_fwhm_fs"));
  c.pump.waist_radius = micrometers(r.number("pump.waist_radius_um"));
  checked("pump", [&] { c.pump.validate(); });

  c.collection.angle_a = degrees(r.number("collection.angle_a_deg"));
  c.collection.angle_b = degrees(r.number("collection.angle_b_deg"));
  c.collection.fiber_waist_a = micrometers(r.number("collection.fiber_waist_a_um"));
  c.collection.fiber_waist_b = micrometers(r.number("collection.fiber_waist_b_um"));
  checked("collection", [&] { c.collection.validate(); });

  c.workers = static_cast<unsigned>(r.unsigned_integer("runtime.workers"));
  c.quadrature.order = static_cast<int>(r.unsigned_integer("quadrature.order"));
  if (c.quadrature.order < 1) throw ConfigError("key 'quadrature.order' must be at least 1");
  c.quadrature.central_plane_wave_only = r.flag("quadrature.central_plane_wave_only");
  c.quadrature.check_convergence = r.flag("quadrature.check_convergence");
  c.quadrature.convergence_tolerance = r.number("quadrature.convergence_tolerance");
  if (!(c.quadrature.convergence_tolerance > 0.0))
    throw ConfigError("key 'quadrature.convergence_tolerance' must be positive");
  c.quadrature.workers = c.workers;

  checked("grid", [&] {
    c.source_grid = frequency_grid_from_wavelengths(
        nanometers(r.number("grid.lambda_a_min_nm")), nanometers(r.number("grid.lambda_a_max_nm")),
        r.count("grid.points_a"), nanometers(r.number("grid.lambda_b_min_nm")),
        nanometers(r.number("grid.lambda_b_max_nm")), r.count("grid.points_b"));
    c.source_grid.validate();
  });

  auto& s = c.scan;
  s.explicit_mesh = r.choice("scan.mode", {"mesh", "auto"}) == "mesh";
  s.band.center_a = omega_from_wavelength(nanometers(r.number("scan.center_wavelength_a_nm")));
  s.band.center_b = omega_from_wavelength(nanometers(r.number("scan.center_wavelength_b_nm")));
  s.band.bandwidth_a = r.number("scan.bandwidth_a_rad_per_fs") * 1e15;
  s.band.bandwidth_b = r.number("scan.bandwidth_b_rad_per_fs") * 1e15;
  s.n_u = r.count("scan.points_u");
  s.n_v = r.count("scan.points_v");
  s.du = femtoseconds(r.number("scan.step_u_fs"));
  s.dv = femtoseconds(r.number("scan.step_v_fs"));
  s.options.oversampling = r.number("scan.oversampling");
  s.options.resolution_divisions = static_cast<int>(r.unsigned_integer("scan.resolution_divisions"));
  s.options.resolve_marginal_terms = r.flag("scan.resolve_marginal_terms");
  s.options.range = {femtoseconds(r.number("scan.delay_min_fs")),
                     femtoseconds(r.number("scan.delay_max_fs"))};
  if (!(s.options.oversampling >= 1.0)) throw ConfigError("key 'scan.oversampling' must be >= 1");
  if (s.options.resolution_divisions < 1)
    throw ConfigError("key 'scan.resolution_divisions' must be at least 1");
  if (!(s.options.range.max > s.options.range.min))
    throw ConfigError("scan delay limits must be increasing");
  if (s.explicit_mesh && (s.n_u < 2 || s.n_v < 2 || !(s.du > 0) || !(s.dv > 0)))
    throw ConfigError("scan mesh needs at least 2 points and positive steps on each axis");
  checked("scan", [&] { s.band.validate(); });

  auto& d = c.detection;
  d.dwell = r.number("detection.dwell_s");
  d.pair_rate_scale = r.number("detection.pair_rate_scale_per_s");
  d.dark_coinc_rate = r.number("detection.dark_coinc_rate_per_s");
  d.visibility = r.number("detection.visibility");
  d.rng_seed = r.unsigned_integer("detection.rng_seed");
  c.sampled = r.flag("detection.sampled");
  checked("detection", [&] { d.validate(); });

  auto& rc = c.reconstruction;
  rc.window = r.choice("reconstruction.window", {"none", "raised-cosine"}) == "none"
                  ? recon::Window::None
                  : recon::Window::RaisedCosine;
  rc.detrend = r.flag("reconstruction.detrend");
  rc.extract.dc_radius = r.number("reconstruction.dc_radius_bins");
  rc.extract.axis_halfwidth = r.number("reconstruction.axis_halfwidth_bins");
  if (rc.extract.dc_radius < 0 || rc.extract.axis_halfwidth < 0)
    throw ConfigError("reconstruction mask sizes must be nonnegative");
  rc.jacobian = r.flag("reconstruction.jacobian");
  rc.lambda = {nanometers(r.number("reconstruction.lambda_a_min_nm")),
               nanometers(r.number("reconstruction.lambda_a_max_nm")),
               r.count("reconstruction.points_a"),
               nanometers(r.number("reconstruction.lambda_b_min_nm")),
               nanometers(r.number("reconstruction.lambda_b_max_nm")),
               r.count("reconstruction.points_b")};
  if (!(rc.lambda.a_min > 0 && rc.lambda.a_max > rc.lambda.a_min && rc.lambda.b_min > 0 &&
        rc.lambda.b_max > rc.lambda.b_min && rc.lambda.n_a >= 2 && rc.lambda.n_b >= 2))
    throw ConfigError("reconstruction wavelength grid needs increasing limits and >= 2 points");
  rc.cross_section_samples = r.count("reconstruction.cross_section_samples");
  if (rc.cross_section_samples < 2)
    throw ConfigError("key 'reconstruction.cross_section_samples' must be at least 2");
  rc.heatmaps = r.flag("reconstruction.heatmaps");

  auto& b = c.bench;
  b.total_time = r.number("bench.total_time_s");
  b.dark_coinc_rate = r.number("bench.dark_coinc_rate_per_s");
  b.pair_rate_scale = r.number("bench.pair_rate_scale_per_s");
  b.pixels_a = r.count("bench.pixels_a");
  b.pixels_b = r.count("bench.pixels_b");
  b.trials = r.count("bench.trials");
  b.rng_seed = r.unsigned_integer("bench.rng_seed");
  b.supersample = r.count("bench.supersample");
  b.band = s.band;
  b.plan = s.options;
  b.extract = rc.extract;
  b.workers = c.workers;
  checked("bench", [&] { b.validate(); });

  c.output_directory = r.text("output.directory");
  return c;
}

}  // namespace cfts::io
