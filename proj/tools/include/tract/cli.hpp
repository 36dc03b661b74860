#pragma once

// Command-line layer: configuration, table ingestion, CSV/JSON output, and
// the forward / inverse / roundtrip commands.

#include <filesystem>
#include <optional>
#include <string>

#include "tract/gelfand_levitan.hpp"
#include "tract/types.hpp"

namespace tract::cli {

struct RunConfig {
  PhysicalConstants consts;
  std::optional<double> ell;  // duct length override; nullopt = from table
  bool ell_auto = false;      // detect the length from the data
  double dk = 0.003;
  std::size_t n_k = 1000;
  std::size_t n_x = 401;
  InverseMethod method = InverseMethod::gl;
  BoundStateRoute bound_route = BoundStateRoute::darboux;
  double beta_max = 0.0;  // 0 = automatic
  bool allow_negative_lip_slope = false;
  std::filesystem::path out_dir = ".";
};

// Reads a two-column x/area table (CSV with header or plain whitespace
// columns), shifts the abscissa to start at zero, and resamples onto a
// uniform grid by linear interpolation. The length comes from the last row
// unless overridden.
AreaFunction ingest_area_table(const std::filesystem::path& path,
                               std::size_t n_x,
                               std::optional<double> ell_override);

void write_area_csv(const std::filesystem::path& path, const AreaFunction& a);
void write_radius_csv(const std::filesystem::path& path,
                      const RadiusProfile& r);
RadiusProfile read_radius_csv(const std::filesystem::path& path);
void write_spectrum_csv(const std::filesystem::path& path,
                        const PressureSpectrum& s);
// Plateau and tail constant are re-fitted from the samples on read.
PressureSpectrum read_spectrum_csv(const std::filesystem::path& path);

int cmd_forward(const RunConfig& config, const std::filesystem::path& area_path);
int cmd_inverse(const RunConfig& config,
                const std::filesystem::path& spectrum_path);
int cmd_roundtrip(const RunConfig& config,
                  const std::filesystem::path& area_path);

// Full argv entry point; maps validation errors to exit code 2 and numeric
// failures to exit code 3.
int run(int argc, char** argv);

}  // namespace tract::cli
