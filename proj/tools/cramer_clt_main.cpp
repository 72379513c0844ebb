#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cramer/acceptance.hpp"
#include "cramer/errors.hpp"
#include "cramer/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kDomainError = 3, kSelftestFailed = 4 };

struct FlagSpec {
  const char* key;
  const char* help;
};

// Every flag is kept as text and routed through apply_setting so that flags
// and config files share one parser.
const std::map<std::string, FlagSpec> kFlags{
    {"modulus", {"modulus", "modulus k"}},
    {"character", {"character", "character index, builtin name or table file"}},
    {"n-terms", {"n_terms", "number of terms N"}},
    {"t", {"t", "frequency t of the B-series"}},
    {"states", {"states", "ensemble size"}},
    {"seed", {"seed", "master seed"}},
    {"bins", {"bins", "histogram bins"}},
    {"out-dir", {"out_dir", "output root directory"}},
    {"threads", {"threads", "worker threads (0 = hardware)"}},
    {"prefix", {"prefix", "ensemble prefix rule: expected|nth"}},
    {"filtered", {"filtered", "drop n sharing a factor with k before sampling"}},
    {"mode", {"euler_mode", "euler mode: zeta|l"}},
    {"sigma", {"sigma", "real part of s"}},
    {"t-grid", {"t_grid", "comma separated imaginary parts of s"}},
    {"c-mult", {"c_mult", "truncated zeta uses ceil(c t^2) primes"}},
    {"factors", {"factors", "Euler factors in L mode"}},
    {"window", {"window", "window width K for gs-check"}},
};

void experiment_defaults(const std::string& name, cramer::RunConfig& c) {
  if (name == "clt-b") {
    c.modulus = 1;
    c.character = "trivial";
    c.t = 1000.0;
  } else if (name == "gs-check") {
    c.states = 1000;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Central limit experiments for character sums over Cramer pseudo-primes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> flags;
  for (const auto& [flag, spec] : kFlags) {
    app.add_option("--" + flag, flags[flag], spec.help);
  }
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file (flags take precedence)");
  std::optional<bool> svg;
  app.add_flag_function("--svg,!--no-svg", [&](std::int64_t n) { svg = n > 0; }, "write hist.svg (default on)");
  bool trace_off = false;
  app.add_flag("--no-trace", trace_off, "skip trace.csv in euler runs");

  app.add_subcommand("clt-c", "ensemble of normalized C'_N for a non-principal character");
  app.add_subcommand("clt-b", "ensemble of normalized B'_N(t)");
  app.add_subcommand("actual", "normalized C_N and B_N(t) over the actual primes");
  app.add_subcommand("euler", "truncated Euler products for zeta or L(s, chi)");
  app.add_subcommand("gs-check", "window (Grosswald-Schnitzer) ensemble constraints");
  app.add_subcommand("selftest", "run the acceptance checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    cramer::RunConfig config;
    experiment_defaults(name, config);
    if (const char* env = std::getenv("CRAMER_CLT_SEED"); env && *env) cramer::apply_setting(config, "seed", env);
    if (!config_path.empty()) {
      for (const auto& [key, value] : cramer::read_config_file(config_path)) cramer::apply_setting(config, key, value);
    }
    for (const auto& [flag, spec] : kFlags) {
      if (app.count("--" + flag) > 0) cramer::apply_setting(config, spec.key, flags[flag]);
    }
    if (svg) config.svg = *svg;
    if (trace_off) config.trace = false;

    if (name == "selftest") {
      cramer::AcceptanceOptions options;
      options.threads = config.threads;
      options.seed = config.seed;
      bool all = true;
      for (const auto& r : cramer::run_acceptance(options)) {
        std::cout << cramer::format_result(r) << '\n';
        all = all && r.passed;
      }
      return all ? kOk : kSelftestFailed;
    }

    cramer::RunManifest manifest;
    if (name == "clt-c") {
      manifest = cramer::run_clt_c(config);
    } else if (name == "clt-b") {
      manifest = cramer::run_clt_b(config);
    } else if (name == "actual") {
      manifest = cramer::run_actual_reference(config);
    } else if (name == "euler") {
      manifest = cramer::run_euler(config);
    } else {
      manifest = cramer::run_gs_check(config);
    }
    for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << cramer::dump_manifest(manifest.to_json());
    return kOk;
  } catch (const cramer::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const cramer::WrongSeriesError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const cramer::InsufficientStateError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const cramer::InsufficientDataError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomainError;
  }
}
