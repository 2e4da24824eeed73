#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vfgeom/cli_export.hpp"

namespace {

using vfgeom::ConfigError;
using vfgeom::Settings;

// Remaining "--key value" or "--key=value" pairs become numeric gallery parameters.
void collect_params(const std::vector<std::string>& extras, Settings& settings) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() < 3) {
      throw ConfigError("unexpected argument '" + arg + "'");
    }
    std::string key = arg.substr(2), value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("parameter --" + key + " needs a value");
      value = extras[++i];
    }
    settings["param." + key] = value;
  }
}

struct Flags {
  std::string config_file, grid, output, format, rho, field, property, along, speed;
  int n = 2, points = vfgeom::kAtlasCheckPoints;
  unsigned seed = 1;
  std::map<std::string, double> tolerances;
};

void put(Settings& s, const CLI::App& app, const std::string& opt, const std::string& key,
         const std::string& value) {
  if (app.count(opt) > 0) s[key] = value;
}

// VFGEOM_TOL_<PROP> sets a default tolerance below the config file and flags.
void apply_env_tolerances(Settings& settings) {
  for (std::string p : {"cr", "pd", "tn", "nc", "geodesic", "polar"}) {
    std::string var = "VFGEOM_TOL_" + p;
    std::transform(var.begin(), var.end(), var.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    const char* value = std::getenv(var.c_str());
    if (value != nullptr && settings.count("tol." + p) == 0) settings["tol." + p] = value;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector-field properties of immersions: generate, verify, atlas checks"};
  app.require_subcommand(1);
  Flags flags;
  std::string target, action;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_file, "key=value config file; flags override it");
    sub->add_option("-o,--output", flags.output, "Output path (stdout if omitted)");
    sub->add_option("--fmt", flags.format, "Output format: obj, ply, csv or json");
    sub->add_option("--rho", flags.rho, "Warping: sin, sinh, cosh, exp, id, sqrt2_exp");
  };

  CLI::App* generate = app.add_subcommand("generate", "Sample a gallery immersion to a mesh or CSV");
  generate->add_option("name", target, "Gallery entry")->required();
  generate->add_option("--grid", flags.grid, "Grid per axis, e.g. 64x64");
  add_common(generate);
  generate->allow_extras();

  CLI::App* verify = app.add_subcommand("verify", "Run property verifiers on a gallery immersion");
  verify->add_option("name", target, "Gallery entry")->required();
  verify->add_option("--grid", flags.grid, "Grid per axis, e.g. 21x21");
  verify->add_option("--field", flags.field, "Ambient field (default: the claimed field)");
  verify->add_option("--property", flags.property, "cr,pd,tn,nc,geodesic,polar or all");
  verify->add_option("--along", flags.along, "Normal-connection directions: all or perp");
  verify->add_option("--speed", flags.speed, "Geodesic parametrization: unit or field");
  for (const std::string p : {"cr", "pd", "tn", "nc", "geodesic", "polar"}) {
    verify->add_option("--tol-" + p, flags.tolerances[p], "Tolerance override for " + p);
  }
  add_common(verify);
  verify->allow_extras();

  CLI::App* atlas = app.add_subcommand("atlas", "List or check conformal maps");
  atlas->add_option("action", action, "list or check")->required();
  atlas->add_option("name", target, "Atlas map");
  atlas->add_option("--n", flags.n, "Model dimension");
  atlas->add_option("--points", flags.points, "Random sample points");
  atlas->add_option("--seed", flags.seed, "Sampling seed");
  add_common(atlas);

  CLI::App* gallery = app.add_subcommand("gallery", "List gallery immersions");
  gallery->add_option("action", action, "list")->required();
  add_common(gallery);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? vfgeom::kExitPass : vfgeom::kExitConfigError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Settings settings;
    if (sub->count("--config") > 0) settings = vfgeom::load_settings(flags.config_file);
    settings["command"] = sub->get_name();
    if (!action.empty()) settings["subcommand"] = action;
    if (!target.empty()) settings["target"] = target;
    if (sub == generate || sub == verify) collect_params(sub->remaining(), settings);
    put(settings, *sub, "--output", "output", flags.output);
    put(settings, *sub, "--fmt", "format", flags.format);
    put(settings, *sub, "--rho", "rho", flags.rho);
    if (sub == generate || sub == verify) put(settings, *sub, "--grid", "grid", flags.grid);
    if (sub == verify) {
      put(settings, *sub, "--field", "field", flags.field);
      put(settings, *sub, "--property", "property", flags.property);
      put(settings, *sub, "--along", "along", flags.along);
      put(settings, *sub, "--speed", "speed", flags.speed);
      for (const auto& [p, tol] : flags.tolerances) {
        put(settings, *sub, "--tol-" + p, "tol." + p, vfgeom::format_double(tol));
      }
      apply_env_tolerances(settings);
    }
    if (sub == atlas) {
      put(settings, *sub, "--n", "n", std::to_string(flags.n));
      put(settings, *sub, "--points", "points", std::to_string(flags.points));
      put(settings, *sub, "--seed", "seed", std::to_string(flags.seed));
      if (action == "check" && settings.count("target") == 0) {
        throw ConfigError("atlas check needs a map name");
      }
    }
    const vfgeom::RunConfig config = vfgeom::RunConfig::from_settings(settings);
    return vfgeom::run_command(config, std::cerr);
  } catch (const vfgeom::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return vfgeom::kExitConfigError;
  }
}
