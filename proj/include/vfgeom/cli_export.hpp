#pragma once

// Command implementations behind the vfgeom command-line tool: configuration,
// mesh and point-cloud export, verification and atlas reports.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfgeom/property_verifier.hpp"

namespace vfgeom {

inline constexpr int kExitPass = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kJsonSchema = 1;
inline constexpr int kAtlasCheckPoints = 200;
inline constexpr double kAtlasAnalyticTolerance = 1e-9;
inline constexpr double kAtlasFdTolerance = 1e-6;
inline constexpr double kAtlasOdeTolerance = 1e-8;

enum class OutputFormat { obj, ply, csv, json };
std::string format_name(OutputFormat f);
OutputFormat parse_format(const std::string& text);

/// Settings as key=value strings, in the form read from a config file.
using Settings = std::map<std::string, std::string>;

/// Parses "key=value" lines; blank lines and lines starting with '#' are skipped.
Settings parse_settings(std::istream& in);
Settings load_settings(const std::string& path);

struct RunConfig {
  std::string command;     // generate, verify, atlas, gallery
  std::string subcommand;  // list or check for atlas and gallery
  std::string target;      // gallery entry or atlas map
  GalleryParams params;
  std::optional<std::vector<int>> grid;
  std::string field;
  std::vector<std::string> properties;  // cr, pd, tn, nc, geodesic, polar
  std::map<std::string, double> tolerances;
  Along along = Along::all_directions;
  GeodesicSpeed speed = GeodesicSpeed::unit;
  std::string output;  // empty writes to stdout
  std::optional<OutputFormat> format;
  int n = 2;
  unsigned seed = 1;
  int points = kAtlasCheckPoints;

  /// Builds a config from settings. Keys: command, subcommand, target, grid, field,
  /// property, along, speed, output, format, rho, n, seed, points, tol.<property>,
  /// and param.<name> for numeric gallery parameters. Throws ConfigError.
  static RunConfig from_settings(const Settings& settings);
};

/// "64x64" or "64" -> per-axis counts, each at least 2.
std::vector<int> parse_grid(const std::string& text);
/// "cr,pd" or "all" -> property list.
std::vector<std::string> parse_properties(const std::string& text);

/// Fixed "%.12e" formatting used by every writer.
std::string format_double(double x);

/// Grid samples of an immersion: parameters and images in grid order.
struct SampledImmersion {
  std::string name;
  std::vector<int> shape;
  std::vector<VectorXd> params;
  std::vector<VectorXd> points;
};

SampledImmersion sample_immersion(const ImmersionSpec& f, const std::vector<int>& shape);
/// True for surfaces in Euclidean 3-space, which are exported as meshes.
bool is_mesh_exportable(const ImmersionSpec& f);

void write_obj(std::ostream& out, const SampledImmersion& s);
void write_ply(std::ostream& out, const SampledImmersion& s);
/// Columns u1..um, x1..xN.
void write_point_csv(std::ostream& out, const SampledImmersion& s);

/// The field a bare name refers to on f: a claimed field with that prefix
/// (killing -> killing:1,2), otherwise the catalog field of that name.
std::string resolve_field_name(const ImmersionSpec& f, const std::string& name);

struct PropertyOutcome {
  std::string property;  // cr, pd, tn, nc, geodesic, polar
  std::vector<DiagnosticsReport> reports;
  bool declared = false;  // the immersion claims this property for the field
  bool passed = false;
};

struct VerifyResult {
  std::string immersion;
  std::string ambient;
  std::string field;
  std::vector<int> grid_shape;
  std::vector<PropertyOutcome> outcomes;
  std::string error;  // verifier exception message, if any
  int exit_code = kExitPass;
};

VerifyResult run_verify(const RunConfig& config);
void write_verify_json(std::ostream& out, const RunConfig& config, const VerifyResult& result);
/// One row per grid point and report: property, report, u1..um, residual, value, masked.
void write_verify_csv(std::ostream& out, const VerifyResult& result);

struct AtlasReport {
  AtlasCheck check;
  std::string scheme;  // analytic or fd
  double conformality_tolerance = 0.0;
  bool passed = false;
};

AtlasReport run_atlas_check(const RunConfig& config);
void write_atlas_json(std::ostream& out, const RunConfig& config, const AtlasReport& report);

/// Commands write files (or stdout) and diagnostics to `log`; they return an exit code.
int cmd_generate(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_atlas_check(const RunConfig& config, std::ostream& log);
int cmd_atlas_list(std::ostream& out);
int cmd_gallery_list(std::ostream& out);
/// Dispatches on config.command and maps ConfigError to kExitConfigError.
int run_command(const RunConfig& config, std::ostream& log);

}  // namespace vfgeom
