#pragma once

// Self-describing text grid format:
//
//   jsi-grid 1
//   kind = <name>
//   axis_a = <name> <unit> <start> <step> <count>
//   axis_b = <name> <unit> <start> <step> <count>
//   meta.<key> = <value>          (any number, sorted by key)
//   data
//   <count_a lines of count_b values, %.17g, single spaces>
//
// Values and axis numbers round-trip exactly; metadata is kept verbatim.

#include <map>
#include <string>
#include <vector>

#include "cfts/common.hpp"
#include "cfts/interferometer.hpp"
#include "cfts/reconstruction.hpp"

namespace cfts::io {

struct GridAxis {
  std::string name;
  std::string unit;
  UniformAxis axis;
};

struct GridFile {
  std::string kind;
  GridAxis a, b;
  std::map<std::string, std::string> meta;
  Array2D<double> values;
};

std::string format_double(double v);  // %.17g

std::string to_text(const GridFile& grid);
GridFile parse_grid(const std::string& text);
void write_grid(const std::string& path, const GridFile& grid);
GridFile read_grid(const std::string& path);

/// First row: axis names then the b coordinates; each further row starts
/// with its a coordinate. A leading '#' line carries the config digest.
std::string to_csv(const GridFile& grid);

/// Binary portable graymap (P5), height = count_a, width = count_b, linear
/// from 0 to the grid maximum; negative values map to 0.
std::string to_pgm(const GridFile& grid);

GridFile spectrum_grid(const JointSpectrum& spectrum, const std::string& kind);
JointSpectrum spectrum_from_grid(const GridFile& grid);

GridFile interferogram_grid(const interf::Interferogram& interferogram);
interf::Interferogram interferogram_from_grid(const GridFile& grid);

/// |X| in FFT order with signed-bin axes in rad/s along e_u and e_v.
GridFile frequency_map_grid(const recon::FrequencyMap& map);

std::string cross_section_csv(const recon::CrossSection& cs, const std::string& digest);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace cfts::io
