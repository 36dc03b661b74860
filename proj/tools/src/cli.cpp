#include "tract/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tract/direct.hpp"
#include "tract/numeric.hpp"
#include "tract/time_domain.hpp"

namespace tract::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_two_column_csv(const fs::path& path, const char* header,
                          const std::vector<double>& x,
                          const std::vector<double>& y) {
  std::ofstream out(path);
  if (!out) {
    throw validation_error("cli: cannot open for writing: " + path.string());
  }
  out << header << "\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << fmt17(x[i]) << "," << fmt17(y[i]) << "\n";
  }
}

struct Table {
  std::vector<double> x;
  std::vector<double> y;
};

// Two numeric columns separated by commas and/or whitespace; lines that do
// not start with a number (headers, comments) are skipped.
Table read_two_column_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw validation_error("cli: cannot open: " + path.string());
  }
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream row(line);
    double a, b;
    if (row >> a >> b) {
      t.x.push_back(a);
      t.y.push_back(b);
    }
  }
  if (t.x.size() < 2) {
    throw validation_error("cli: table has fewer than 2 numeric rows: " +
                           path.string());
  }
  return t;
}

double interp_table(const Table& t, double x) {
  if (x <= t.x.front()) return t.y.front();
  if (x >= t.x.back()) return t.y.back();
  const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - t.x.begin()) - 1;
  const double w = (x - t.x[i]) / (t.x[i + 1] - t.x[i]);
  return t.y[i] * (1.0 - w) + t.y[i + 1] * w;
}

json report_json(const ResonanceReport& report,
                 const std::vector<Candidate>& with_bound, double p_inf,
                 double ell) {
  std::vector<double> g, m;
  std::vector<bool> adm;
  for (std::size_t j = 0; j < report.m_count; ++j) {
    g.push_back(report.g_sq[j]);
    m.push_back(report.m_sq[j]);
  }
  for (const Candidate& c : with_bound) adm.push_back(c.admissible);
  json out;
  out["m_count"] = report.m_count;
  out["betas"] = report.betas;
  out["g_sq"] = g;
  out["m_sq"] = m;
  out["scenario"] = to_string(report.scenario);
  out["admissible"] = adm;
  out["p_inf"] = p_inf;
  out["ell"] = ell;
  return out;
}

const char* method_name(InverseMethod m) {
  switch (m) {
    case InverseMethod::gl: return "gl";
    case InverseMethod::marchenko: return "marchenko";
    case InverseMethod::timedomain: return "timedomain";
  }
  return "unknown";
}

void write_manifest(const RunConfig& config, const std::string& command,
                    const fs::path& input, const std::vector<std::string>& outputs,
                    const std::vector<std::string>& warnings,
                    std::optional<double> resolved_ell,
                    const json& results = json::object()) {
  json m;
  m["command"] = command;
  m["input"] = input.string();
  m["outputs"] = outputs;
  json cfg;
  cfg["sound_speed_cm_s"] = config.consts.sound_speed;
  cfg["air_density_g_cm3"] = config.consts.air_density;
  cfg["dk"] = config.dk;
  cfg["n_k"] = config.n_k;
  cfg["n_x"] = config.n_x;
  if (config.ell_auto) {
    cfg["ell"] = "auto";
  } else if (config.ell) {
    cfg["ell"] = *config.ell;
  } else {
    cfg["ell"] = "from-table";
  }
  if (resolved_ell) cfg["ell_resolved"] = *resolved_ell;
  cfg["method"] = method_name(config.method);
  cfg["beta_max"] = config.beta_max;
  cfg["allow_negative_lip_slope"] = config.allow_negative_lip_slope;
  m["config"] = cfg;
  json tol;
  tol["ode_abs_tol"] = 1e-9;
  tol["ode_rel_tol"] = 1e-9;
  tol["tail_fit_top_fraction"] = 0.05;
  tol["beta_scan_points"] = 2000;
  m["tolerances"] = tol;
  m["warnings"] = warnings;
  if (!results.empty()) m["results"] = results;

  std::ofstream out(config.out_dir / "manifest.json");
  out << m.dump(2) << "\n";
}

void ensure_out_dir(const RunConfig& config) {
  if (!config.out_dir.empty()) fs::create_directories(config.out_dir);
}

}  // namespace

AreaFunction ingest_area_table(const fs::path& path, std::size_t n_x,
                               std::optional<double> ell_override) {
  const Table t = read_two_column_table(path);
  for (std::size_t i = 1; i < t.x.size(); ++i) {
    if (t.x[i] == t.x[i - 1]) {
      throw validation_error("ingest_area_table: duplicate x entry");
    }
    if (t.x[i] < t.x[i - 1]) {
      throw validation_error("ingest_area_table: x column must be increasing");
    }
  }
  for (double a : t.y) {
    if (!(a > 0.0)) {
      throw validation_error("ingest_area_table: areas must be positive");
    }
  }

  // Shift so the glottis sits at x = 0.
  Table shifted = t;
  const double x0 = t.x.front();
  for (double& x : shifted.x) x -= x0;
  const double span = shifted.x.back();

  double ell = span;
  if (ell_override) {
    if (!(*ell_override > 0.0) || *ell_override > span * (1.0 + 1e-9)) {
      throw validation_error(
          "ingest_area_table: ell override must lie within the table span");
    }
    ell = std::min(*ell_override, span);
  }

  AreaFunction area;
  area.grid = Grid1D::over(0.0, ell, n_x);
  area.values.resize(n_x);
  for (std::size_t i = 0; i < n_x; ++i) {
    area.values[i] = interp_table(shifted, area.grid.coord(i));
  }
  area.validate();
  return area;
}

void write_area_csv(const fs::path& path, const AreaFunction& a) {
  write_two_column_csv(path, "x_cm,area_cm2", a.grid.coords(), a.values);
}

void write_radius_csv(const fs::path& path, const RadiusProfile& r) {
  write_two_column_csv(path, "x_cm,radius_cm", r.grid.coords(), r.values);
}

RadiusProfile read_radius_csv(const fs::path& path) {
  const Table t = read_two_column_table(path);
  RadiusProfile r;
  const double step = t.x[1] - t.x[0];
  r.grid = Grid1D{t.x.front(), step, t.x.size()};
  r.values = t.y;
  r.slope0 = end_slope_left(r.grid, r.values);
  r.slopeL = end_slope_right(r.grid, r.values);
  r.validate();
  return r;
}

void write_spectrum_csv(const fs::path& path, const PressureSpectrum& s) {
  write_two_column_csv(path, "k_rad_per_cm,abs_pressure", s.kgrid.coords(),
                       s.values);
}

PressureSpectrum read_spectrum_csv(const fs::path& path) {
  const Table t = read_two_column_table(path);
  PressureSpectrum s;
  const double step = t.x[1] - t.x[0];
  s.kgrid = Grid1D{t.x.front(), step, t.x.size()};
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    const double expected = s.kgrid.coord(i);
    if (std::abs(t.x[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw validation_error("read_spectrum_csv: k column is not a uniform grid");
    }
  }
  s.values = t.y;
  const TailFit fit = fit_tail_plateau(s.kgrid, s.values);
  s.p_inf = fit.p_inf;
  s.tail_c = fit.c;
  s.validate();
  return s;
}

namespace {

struct TimeDomainOutcome {
  RadiusProfile radius;
  ResonanceReport report;
  bool flagged = false;
};

TimeDomainOutcome run_timedomain(const PressureSpectrum& spectrum, double ell,
                                 std::size_t n_x, bool allow_negative_slope,
                                 const PhysicalConstants& consts) {
  const BKernel b = b_kernel(spectrum, 2.0 * ell, 2 * n_x - 1);
  const DownwardResult dr = downward_continuation(b, ell, n_x);
  if (dr.negative_slope_flag && !allow_negative_slope) {
    throw validation_error(
        "timedomain: reconstructed lip slope is negative, which this method "
        "cannot represent; rerun with --allow-negative-lip-slope to keep the "
        "result anyway");
  }
  TimeDomainOutcome out;
  out.flagged = dr.negative_slope_flag;
  out.radius = rescale_radius(dr, spectrum.p_inf, consts);
  out.report.m_count = 0;
  out.report.beta_max = 0.0;
  const double slope_tol = 1e-6 * dr.normalized.back() / dr.xgrid.step;
  out.report.scenario = (dr.slope_end > slope_tol)
                            ? Scenario::NoBoundPositiveSlope
                            : Scenario::NoBoundZeroSlope;
  return out;
}

double detect_ell(const PressureSpectrum& spectrum, std::size_t n_x) {
  // Reconstruct on an enlarged interval and look for the point beyond which
  // the curvature of r/r(0) dies out. The marching grid is scaled so its
  // step matches what n_x would give on a typical duct length.
  const double ell_wide = 24.0;
  const std::size_t n_wide = std::max<std::size_t>(
      n_x, static_cast<std::size_t>(std::llround(
               static_cast<double>(n_x - 1) * ell_wide / 16.0)) + 1);
  const BKernel b = b_kernel(spectrum, 2.0 * ell_wide, 2 * n_wide - 1);
  const DownwardResult dr = downward_continuation(b, ell_wide, n_wide);
  return estimate_ell(dr);
}

}  // namespace

int cmd_forward(const RunConfig& config, const fs::path& area_path) {
  ensure_out_dir(config);
  const AreaFunction area =
      ingest_area_table(area_path, config.n_x, config.ell);
  const RadiusProfile radius = radius_from_area(area);
  const Grid1D kgrid{config.dk, config.dk, config.n_k};
  const PressureSpectrum spectrum =
      pressure_spectrum(radius, kgrid, config.consts);

  write_spectrum_csv(config.out_dir / "spectrum.csv", spectrum);
  write_area_csv(config.out_dir / "area_ingested.csv", area);
  write_radius_csv(config.out_dir / "radius_ingested.csv", radius);
  write_manifest(config, "forward", area_path,
                 {"spectrum.csv", "area_ingested.csv", "radius_ingested.csv"},
                 {}, area.grid.back(),
                 json{{"p_inf", spectrum.p_inf}, {"tail_c", spectrum.tail_c}});

  std::cout << "forward: wrote " << (config.out_dir / "spectrum.csv").string()
            << " (p_inf = " << spectrum.p_inf << ")\n";
  return 0;
}

int cmd_inverse(const RunConfig& config, const fs::path& spectrum_path) {
  ensure_out_dir(config);
  const PressureSpectrum spectrum = read_spectrum_csv(spectrum_path);

  double ell = 0.0;
  if (config.ell_auto) {
    ell = detect_ell(spectrum, config.n_x);
  } else if (config.ell) {
    ell = *config.ell;
  } else {
    throw validation_error("inverse: --ell <length|auto> is required");
  }

  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  json report;

  if (config.method == InverseMethod::timedomain) {
    const TimeDomainOutcome td =
        run_timedomain(spectrum, ell, config.n_x, config.allow_negative_lip_slope,
                       config.consts);
    if (td.flagged) {
      warnings.push_back("timedomain: negative lip slope kept by override");
    }
    write_radius_csv(config.out_dir / "candidate_0.csv", td.radius);
    outputs.push_back("candidate_0.csv");
    report = report_json(td.report, {}, spectrum.p_inf, ell);
  } else {
    InverseOptions options;
    options.n_x = config.n_x;
    options.beta_max = config.beta_max;
    options.method = config.method;
    options.bound_route = config.bound_route;
    const InverseResult result =
        enumerate_candidates(spectrum, ell, options, config.consts);
    warnings = result.report.warnings;

    write_radius_csv(config.out_dir / "candidate_0.csv",
                     result.candidates.no_bound);
    outputs.push_back("candidate_0.csv");
    for (std::size_t j = 0; j < result.candidates.with_bound.size(); ++j) {
      const Candidate& c = result.candidates.with_bound[j];
      if (!c.radius) continue;
      const std::string name = "candidate_" + std::to_string(j + 1) + ".csv";
      write_radius_csv(config.out_dir / name, *c.radius);
      outputs.push_back(name);
    }
    report = report_json(result.report, result.candidates.with_bound,
                         spectrum.p_inf, ell);
  }

  {
    std::ofstream out(config.out_dir / "report.json");
    out << report.dump(2) << "\n";
    outputs.push_back("report.json");
  }
  write_spectrum_csv(config.out_dir / "spectrum_input.csv", spectrum);
  outputs.push_back("spectrum_input.csv");
  write_manifest(config, "inverse", spectrum_path, outputs, warnings, ell);

  std::cout << "inverse: " << report["m_count"] << " eligible resonance(s), "
            << "scenario " << report["scenario"] << ", wrote "
            << outputs.size() << " file(s) to " << config.out_dir.string()
            << "\n";
  return 0;
}

int cmd_roundtrip(const RunConfig& config, const fs::path& area_path) {
  ensure_out_dir(config);
  const AreaFunction area =
      ingest_area_table(area_path, config.n_x, config.ell);
  const RadiusProfile radius = radius_from_area(area);
  const double ell = area.grid.back();
  const Grid1D kgrid{config.dk, config.dk, config.n_k};
  const PressureSpectrum forward =
      pressure_spectrum(radius, kgrid, config.consts);

  // Go through the serialized form so the journey matches two separate runs.
  write_spectrum_csv(config.out_dir / "spectrum.csv", forward);
  const PressureSpectrum spectrum =
      read_spectrum_csv(config.out_dir / "spectrum.csv");

  struct Entry {
    std::string label;
    double l2_rel;
    double max_rel;
  };
  std::vector<Entry> entries;
  std::vector<std::string> outputs{"spectrum.csv"};
  std::vector<std::string> warnings;

  auto compare = [&](const std::string& label, const RadiusProfile& cand) {
    double num2 = 0.0, den2 = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < cand.grid.count; ++i) {
      const double ref =
          numeric::interp_clamped(radius.grid, radius.values, cand.grid.coord(i));
      const double d = cand.values[i] - ref;
      num2 += d * d;
      den2 += ref * ref;
      worst = std::max(worst, std::abs(d) / std::abs(ref));
    }
    entries.push_back({label, std::sqrt(num2 / den2), worst});
  };

  if (config.method == InverseMethod::timedomain) {
    const TimeDomainOutcome td =
        run_timedomain(spectrum, ell, config.n_x, config.allow_negative_lip_slope,
                       config.consts);
    write_radius_csv(config.out_dir / "candidate_0.csv", td.radius);
    outputs.push_back("candidate_0.csv");
    compare("candidate_0", td.radius);
  } else {
    InverseOptions options;
    options.n_x = config.n_x;
    options.beta_max = config.beta_max;
    options.method = config.method;
    options.bound_route = config.bound_route;
    const InverseResult result =
        enumerate_candidates(spectrum, ell, options, config.consts);
    warnings = result.report.warnings;
    write_radius_csv(config.out_dir / "candidate_0.csv",
                     result.candidates.no_bound);
    outputs.push_back("candidate_0.csv");
    compare("candidate_0", result.candidates.no_bound);
    for (std::size_t j = 0; j < result.candidates.with_bound.size(); ++j) {
      const Candidate& c = result.candidates.with_bound[j];
      if (!c.radius) continue;
      const std::string name = "candidate_" + std::to_string(j + 1) + ".csv";
      write_radius_csv(config.out_dir / name, *c.radius);
      outputs.push_back(name);
      compare("candidate_" + std::to_string(j + 1), *c.radius);
    }
  }

  const Entry* best = &entries.front();
  for (const Entry& e : entries) {
    if (e.max_rel < best->max_rel) best = &e;
  }

  json rep;
  rep["method"] = method_name(config.method);
  rep["ell"] = ell;
  rep["best_match"] = best->label;
  json per;
  for (const Entry& e : entries) {
    per.push_back({{"candidate", e.label},
                   {"l2_relative_error", e.l2_rel},
                   {"max_relative_error", e.max_rel}});
  }
  rep["errors"] = per;
  {
    std::ofstream out(config.out_dir / "roundtrip_report.json");
    out << rep.dump(2) << "\n";
    outputs.push_back("roundtrip_report.json");
  }
  write_manifest(config, "roundtrip", area_path, outputs, warnings, ell);

  std::cout << "roundtrip: best match " << best->label
            << " (max relative error " << best->max_rel << ")\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Acoustic duct shapes from pressure-modulus spectra"};
  app.require_subcommand(1);

  RunConfig config;
  std::string ell_arg;
  std::string method_arg = "gl";
  std::string input;

  auto add_common = [&](CLI::App* cmd, bool needs_method) {
    cmd->add_option("input", input, "Input file")->required();
    cmd->add_option("--dk", config.dk, "k-grid spacing (rad/cm)");
    cmd->add_option("--nk", config.n_k, "number of k samples");
    cmd->add_option("--nx", config.n_x, "number of x samples");
    cmd->add_option("--ell", ell_arg, "duct length in cm, or 'auto'");
    cmd->add_option("--beta-max", config.beta_max,
                    "upper end of the resonance scan (0 = automatic)");
    cmd->add_option("--out", config.out_dir, "output directory");
    cmd->add_flag("--allow-negative-lip-slope",
                  config.allow_negative_lip_slope,
                  "keep time-domain results with a negative lip slope");
    if (needs_method) {
      cmd->add_option("--method", method_arg,
                      "inversion method: gl, marchenko, timedomain")
          ->check(CLI::IsMember({"gl", "marchenko", "timedomain"}));
    }
  };

  CLI::App* fwd = app.add_subcommand("forward", "area table -> spectrum CSV");
  add_common(fwd, false);
  CLI::App* inv =
      app.add_subcommand("inverse", "spectrum CSV -> candidate radii + report");
  add_common(inv, true);
  CLI::App* rt = app.add_subcommand(
      "roundtrip", "area table -> spectrum -> radii, with error report");
  add_common(rt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!ell_arg.empty()) {
      if (ell_arg == "auto") {
        config.ell_auto = true;
      } else {
        config.ell = std::stod(ell_arg);
        if (!(*config.ell > 0.0)) {
          throw validation_error("cli: --ell must be positive");
        }
      }
    }
    if (method_arg == "gl") {
      config.method = InverseMethod::gl;
    } else if (method_arg == "marchenko") {
      config.method = InverseMethod::marchenko;
    } else {
      config.method = InverseMethod::timedomain;
    }

    if (app.got_subcommand(fwd)) return cmd_forward(config, input);
    if (app.got_subcommand(inv)) return cmd_inverse(config, input);
    return cmd_roundtrip(config, input);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace tract::cli
