#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cramer/characters.hpp"
#include "cramer/series.hpp"

namespace cramer {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Experiment { CltC, CltB, ActualReference, EulerProduct, GsCheck };

std::string_view to_string(Experiment e);

// Every input of every experiment. Keys in a config file use the same names
// as the fields (character_table for an explicit list of values).
struct RunConfig {
  std::uint64_t modulus = 7;
  std::string character = "paper-chi7";  // canonical index, builtin name, or file path
  std::string character_table;           // explicit values, overrides `character`
  std::uint64_t n_terms = 5000;
  double t = 0.0;
  std::uint64_t states = 10000;
  std::uint64_t seed = 1;
  std::uint64_t bins = 50;
  std::string out_dir = "out";
  unsigned threads = 0;  // 0: hardware concurrency
  bool svg = true;
  bool write_files = true;
  PrefixRule prefix = PrefixRule::ExpectedCutoff;
  bool filtered = false;

  // euler
  std::string euler_mode = "zeta";  // zeta | l
  double sigma = 0.6;
  std::vector<double> t_grid{20.0, 50.0, 100.0};
  double c_mult = 1.0;
  std::uint64_t factors = 1000000;
  bool trace = true;

  // gs-check
  std::uint64_t window = 7;
};

// Applies key=value pairs; unknown keys and malformed values throw ConfigError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
// Reads a flat key=value file ('#' starts a comment).
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Resolves the configured character against config.modulus.
DirichletCharacter resolve_character(const RunConfig& config);

// nlohmann ordered_json, so keys keep insertion order.
using Json = nlohmann::ordered_json;

// Serializes with stable key order and every floating-point number written
// with 17 significant digits.
std::string dump_manifest(const Json& manifest);

struct RunManifest {
  Experiment experiment = Experiment::CltC;
  Json parameters = Json::object();
  Json results = Json::object();
  std::vector<std::string> warnings;
  Json artifacts = Json::object();
  double wall_time_s = 0.0;
  // Per-state normalized statistics (not serialized).
  std::vector<double> samples;

  Json to_json() const;
};

// Normalized statistic of each state, evaluated in parallel; element i comes
// from substream_seed(seed, i) whatever the thread count.
std::vector<double> clt_c_samples(const RunConfig& config, const DirichletCharacter& chi);
std::vector<double> clt_b_samples(const RunConfig& config);

RunManifest run_clt_c(const RunConfig& config);
RunManifest run_clt_b(const RunConfig& config);
RunManifest run_actual_reference(const RunConfig& config);
RunManifest run_euler(const RunConfig& config);
RunManifest run_gs_check(const RunConfig& config);

// Normalized actual-prime statistics under both prime-2 conventions.
struct ActualReference {
  double with_two = 0.0;     // 2 counted as the first of the N terms
  double without_two = 0.0;  // the first N odd primes
};
ActualReference actual_c_reference(const DirichletCharacter& chi, std::uint64_t n_terms);
ActualReference actual_b_reference(double t, std::uint64_t n_terms, std::uint64_t modulus);

// Histogram SVG with the fitted normal (red) and N(0, 1) (blue) overlaid.
std::string histogram_svg(const std::vector<double>& edges, const std::vector<double>& density, double mu_hat,
                          double sigma_hat, bool have_fit, const std::string& title);

}  // namespace cramer
