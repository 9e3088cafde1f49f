#include "cfts/grid_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cfts::io {

namespace {

constexpr const char* kMagic = "jsi-grid 1";

double parse_double(const std::string& s, const std::string& what) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("grid file: bad number '" + s + "' in " + what);
  return out;
}

std::uint64_t parse_unsigned(const std::string& s, const std::string& what) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("grid file: bad integer '" + s + "' in " + what);
  return out;
}

std::string axis_line(const GridAxis& g) {
  return g.name + " " + g.unit + " " + format_double(g.axis.start) + " " +
         format_double(g.axis.step) + " " + std::to_string(g.axis.size);
}

GridAxis parse_axis(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  GridAxis g;
  std::string start, step, count, extra;
  if (!(in >> g.name >> g.unit >> start >> step >> count) || (in >> extra))
    throw ConfigError("grid file: malformed " + what);
  g.axis = {parse_double(start, what), parse_double(step, what),
            static_cast<std::size_t>(parse_unsigned(count, what))};
  return g;
}

const std::string& meta_value(const GridFile& g, const std::string& key) {
  auto it = g.meta.find(key);
  if (it == g.meta.end()) throw ConfigError("grid file: missing metadata '" + key + "'");
  return it->second;
}

double meta_double(const GridFile& g, const std::string& key) {
  return parse_double(meta_value(g, key), "metadata '" + key + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_text(const GridFile& g) {
  if (g.values.rows() != g.a.axis.size || g.values.cols() != g.b.axis.size)
    throw DomainError("grid values do not match the axes");
  std::string out;
  out.reserve(g.values.size() * 24 + 512);
  out += kMagic;
  out += "\nkind = " + g.kind + "\n";
  out += "axis_a = " + axis_line(g.a) + "\n";
  out += "axis_b = " + axis_line(g.b) + "\n";
  for (const auto& [k, v] : g.meta) out += "meta." + k + " = " + v + "\n";
  out += "data\n";
  for (std::size_t i = 0; i < g.values.rows(); ++i) {
    const auto row = g.values.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ' ';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

GridFile parse_grid(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw ConfigError("grid file: missing 'jsi-grid 1' header");
  GridFile g;
  bool have_a = false, have_b = false;
  while (std::getline(in, line) && line != "data") {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ConfigError("grid file: malformed header line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (key == "kind") {
      g.kind = value;
    } else if (key == "axis_a") {
      g.a = parse_axis(value, "axis_a");
      have_a = true;
    } else if (key == "axis_b") {
      g.b = parse_axis(value, "axis_b");
      have_b = true;
    } else if (key.rfind("meta.", 0) == 0) {
      g.meta[key.substr(5)] = value;
    } else {
      throw ConfigError("grid file: unknown header key '" + key + "'");
    }
  }
  if (line != "data" || !have_a || !have_b || g.kind.empty())
    throw ConfigError("grid file: incomplete header");
  g.values = Array2D<double>(g.a.axis.size, g.b.axis.size);
  for (std::size_t i = 0; i < g.a.axis.size; ++i) {
    if (!std::getline(in, line)) throw ConfigError("grid file: too few data rows");
    std::size_t j = 0, pos = 0;
    while (pos < line.size()) {
      const auto end = std::min(line.find(' ', pos), line.size());
      if (j >= g.b.axis.size) throw ConfigError("grid file: too many values in a row");
      g.values(i, j++) = parse_double(line.substr(pos, end - pos), "data");
      pos = end + 1;
    }
    if (j != g.b.axis.size) throw ConfigError("grid file: too few values in a row");
  }
  if (std::getline(in, line) && !line.empty()) throw ConfigError("grid file: trailing data");
  return g;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError("cannot write '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_grid(const std::string& path, const GridFile& grid) { write_text(path, to_text(grid)); }

GridFile read_grid(const std::string& path) { return parse_grid(read_text(path)); }

std::string to_csv(const GridFile& g) {
  std::string out;
  if (auto it = g.meta.find("config_sha256"); it != g.meta.end())
    out += "# config_sha256 = " + it->second + "\n";
  out += g.a.name + "\\" + g.b.name;
  for (std::size_t j = 0; j < g.b.axis.size; ++j) out += "," + format_double(g.b.axis.at(j));
  out += '\n';
  for (std::size_t i = 0; i < g.a.axis.size; ++i) {
    out += format_double(g.a.axis.at(i));
    for (double v : g.values.row(i)) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

std::string to_pgm(const GridFile& g) {
  double peak = 0.0;
  for (double v : g.values.values()) peak = std::max(peak, v);
  std::string out = "P5\n";
  if (auto it = g.meta.find("config_sha256"); it != g.meta.end())
    out += "# config_sha256 = " + it->second + "\n";
  out += std::to_string(g.b.axis.size) + " " + std::to_string(g.a.axis.size) + "\n255\n";
  for (double v : g.values.values()) {
    const double x = peak > 0.0 ? std::clamp(v / peak, 0.0, 1.0) : 0.0;
    out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * x)));
  }
  return out;
}

GridFile spectrum_grid(const JointSpectrum& s, const std::string& kind) {
  GridFile g;
  g.kind = kind;
  const bool wl = s.grid.quantity == SpectralQuantity::Wavelength;
  g.a = {wl ? "lambda_a" : "omega_a", wl ? "m" : "rad/s", s.grid.a};
  g.b = {wl ? "lambda_b" : "omega_b", wl ? "m" : "rad/s", s.grid.b};
  g.values = s.intensity;
  return g;
}

JointSpectrum spectrum_from_grid(const GridFile& g) {
  JointSpectrum s;
  if (g.a.unit == "rad/s" && g.b.unit == "rad/s")
    s.grid.quantity = SpectralQuantity::AngularFrequency;
  else if (g.a.unit == "m" && g.b.unit == "m")
    s.grid.quantity = SpectralQuantity::Wavelength;
  else
    throw ConfigError("grid file: spectrum axes must both be rad/s or both m");
  s.grid.a = g.a.axis;
  s.grid.b = g.b.axis;
  s.intensity = g.values;
  return s;
}

GridFile interferogram_grid(const interf::Interferogram& ig) {
  const auto& p = ig.plan;
  GridFile g;
  g.kind = "interferogram";
  g.a = {"u", "s", UniformAxis{0.0, p.du, p.n_u}};
  g.b = {"v", "s", UniformAxis{0.0, p.dv, p.n_v}};
  g.values = ig.counts;
  const auto& d = ig.detection;
  g.meta["rotation_rad"] = format_double(p.rotation);
  g.meta["origin_a_s"] = format_double(p.origin_a);
  g.meta["origin_b_s"] = format_double(p.origin_b);
  g.meta["band_center_a_rad_per_s"] = format_double(p.band.center_a);
  g.meta["band_center_b_rad_per_s"] = format_double(p.band.center_b);
  g.meta["band_width_a_rad_per_s"] = format_double(p.band.bandwidth_a);
  g.meta["band_width_b_rad_per_s"] = format_double(p.band.bandwidth_b);
  g.meta["matched_spacing_rad_per_s"] = format_double(p.matched_spacing);
  g.meta["dwell_s"] = format_double(d.dwell);
  g.meta["pair_rate_scale_per_s"] = format_double(d.pair_rate_scale);
  g.meta["dark_coinc_rate_per_s"] = format_double(d.dark_coinc_rate);
  g.meta["visibility"] = format_double(d.visibility);
  g.meta["rng_seed"] = std::to_string(d.rng_seed);
  g.meta["count_kind"] = ig.kind == interf::CountKind::Sampled ? "sampled" : "expected";
  return g;
}

interf::Interferogram interferogram_from_grid(const GridFile& g) {
  if (g.kind != "interferogram") throw ConfigError("grid file: expected kind 'interferogram'");
  interf::Interferogram ig;
  auto& p = ig.plan;
  p.du = g.a.axis.step;
  p.dv = g.b.axis.step;
  p.n_u = g.a.axis.size;
  p.n_v = g.b.axis.size;
  p.rotation = meta_double(g, "rotation_rad");
  p.origin_a = meta_double(g, "origin_a_s");
  p.origin_b = meta_double(g, "origin_b_s");
  p.band = {meta_double(g, "band_center_a_rad_per_s"), meta_double(g, "band_center_b_rad_per_s"),
            meta_double(g, "band_width_a_rad_per_s"), meta_double(g, "band_width_b_rad_per_s")};
  p.matched_spacing = meta_double(g, "matched_spacing_rad_per_s");
  auto& d = ig.detection;
  d.dwell = meta_double(g, "dwell_s");
  d.pair_rate_scale = meta_double(g, "pair_rate_scale_per_s");
  d.dark_coinc_rate = meta_double(g, "dark_coinc_rate_per_s");
  d.visibility = meta_double(g, "visibility");
  d.rng_seed = parse_unsigned(meta_value(g, "rng_seed"), "metadata 'rng_seed'");
  const std::string& kind = meta_value(g, "count_kind");
  if (kind != "sampled" && kind != "expected")
    throw ConfigError("grid file: count_kind must be sampled or expected");
  ig.kind = kind == "sampled" ? interf::CountKind::Sampled : interf::CountKind::Expected;
  ig.counts = g.values;
  try {
    ig.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("grid file: ") + e.what());
  }
  return ig;
}

GridFile frequency_map_grid(const recon::FrequencyMap& map) {
  GridFile g;
  g.kind = "frequency_map_modulus";
  const std::size_t n_u = map.plan.n_u, n_v = map.plan.n_v;
  // FFT order is not uniform in frequency; store the bin index axes.
  g.a = {"k_u", "bin", UniformAxis{0.0, 1.0, n_u}};
  g.b = {"k_v", "bin", UniformAxis{0.0, 1.0, n_v}};
  g.values = Array2D<double>(n_u, n_v);
  for (std::size_t k = 0; k < map.values.size(); ++k) g.values[k] = std::abs(map.values[k]);
  g.meta["bin_u_rad_per_s"] = format_double(map.delta_u());
  g.meta["bin_v_rad_per_s"] = format_double(map.delta_v());
  g.meta["rotation_rad"] = format_double(map.plan.rotation);
  g.meta["order"] = "fft";
  g.meta["window"] = map.window == recon::Window::None ? "none" : "raised-cosine";
  g.meta["detrended"] = map.detrended ? "true" : "false";
  return g;
}

std::string cross_section_csv(const recon::CrossSection& cs, const std::string& digest) {
  std::string out = "# config_sha256 = " + digest + "\n";
  out += "# kind = ";
  out += cs.kind == recon::LineKind::Sum ? "sum" : "difference";
  out += ", anchor_lambda_a_m = " + format_double(cs.anchor_a) +
         ", anchor_lambda_b_m = " + format_double(cs.anchor_b) + ", abscissa_unit = 1/m\n";
  out += "abscissa,value,sigma\n";
  for (std::size_t k = 0; k < cs.abscissa.size(); ++k)
    out += format_double(cs.abscissa[k]) + "," + format_double(cs.values[k]) + "," +
           format_double(cs.sigma[k]) + "\n";
  return out;
}

}  // namespace cfts::io
