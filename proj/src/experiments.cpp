#include "cramer/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "cramer/errors.hpp"
#include "cramer/eulerprod.hpp"
#include "cramer/pseudoprimes.hpp"
#include "cramer/rng.hpp"
#include "cramer/stats.hpp"

namespace cramer {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a finite number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::string prefix_name(PrefixRule rule) { return rule == PrefixRule::NthMember ? "nth" : "expected"; }

unsigned worker_count(unsigned requested, std::uint64_t jobs) {
  unsigned n = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(jobs, 1)));
}

// Runs job(i) for i in [0, count) on a pool; job writes only its own slot.
template <class Job>
void parallel_for(std::uint64_t count, unsigned threads, Job&& job) {
  const unsigned workers = worker_count(threads, count);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Coefficients kernel(n) for n <= limit, shared read-only by the workers.
std::vector<double> coefficient_table(const SeriesKernel& kernel, std::uint64_t limit) {
  std::vector<double> c(limit + 1, 0.0);
  for (std::uint64_t n = 3; n <= limit; ++n) c[n] = kernel(n);
  return c;
}

// Raw series value of state `index` under the configured prefix rule.
class EnsembleEvaluator {
 public:
  EnsembleEvaluator(const RunConfig& config, EnsembleSpec spec, SeriesKernel kernel)
      : config_(config),
        kernel_(std::move(kernel)),
        table_limit_(config.prefix == PrefixRule::ExpectedCutoff ? expected_cutoff(config.n_terms)
                                                                 : 3 * initial_cutoff_for_count(config.n_terms)),
        sampler_(spec, table_limit_),
        coef_(coefficient_table(kernel_, table_limit_)) {}

  double raw(std::uint64_t index) const {
    const std::uint64_t seed = substream_seed(config_.seed, index);
    if (config_.prefix == PrefixRule::ExpectedCutoff) {
      const auto state = sampler_.sample(seed, table_limit_);
      return sum(state, table_limit_);
    }
    std::uint64_t cutoff = initial_cutoff_for_count(config_.n_terms);
    for (;;) {
      const auto state = cutoff <= table_limit_ ? sampler_.sample(seed, cutoff)
                                                : sample_cramer(sampler_.spec(), seed, cutoff);
      if (state.size() >= config_.n_terms) return sum(state, nth_pseudoprime(state, config_.n_terms));
      cutoff = static_cast<std::uint64_t>(std::ceil(1.5 * static_cast<double>(cutoff)));
    }
  }

 private:
  double sum(const PseudoPrimeState& state, std::uint64_t upper) const {
    double s = 0.0;
    state.for_each_member(upper, [&](std::uint64_t n) { s += n <= table_limit_ ? coef_[n] : kernel_(n); });
    return s;
  }

  const RunConfig& config_;
  SeriesKernel kernel_;
  std::uint64_t table_limit_;
  CramerSampler sampler_;
  std::vector<double> coef_;
};

EnsembleSpec ensemble_spec(const RunConfig& config) {
  EnsembleSpec spec;
  spec.kind = StateKind::Cramer;
  spec.modulus = config.modulus;
  spec.cramer_filtered = config.filtered;
  return spec;
}

void validate_ensemble(const RunConfig& config) {
  if (config.modulus == 0) throw ConfigError("modulus must be >= 1");
  if (config.states == 0) throw ConfigError("states must be >= 1");
  if (config.n_terms < 3) throw ConfigError("n_terms must be >= 3");
  if (config.bins == 0) throw ConfigError("bins must be >= 1");
}

Json ensemble_json(const RunConfig& config) {
  Json e = Json::object();
  e["kind"] = std::string(to_string(StateKind::Cramer));
  e["modulus"] = config.modulus;
  e["filtered"] = config.filtered;
  e["prefix"] = prefix_name(config.prefix);
  e["upper_limit"] = config.prefix == PrefixRule::ExpectedCutoff ? Json(expected_cutoff(config.n_terms)) : Json("p'_N");
  return e;
}

Json character_json(const RunConfig& config, const DirichletCharacter& chi) {
  Json c = Json::object();
  c["id"] = config.character_table.empty() ? config.character : std::string("table");
  c["index"] = canonical_index(chi);
  c["values"] = format_character_values(chi);
  return c;
}

Json common_parameters(const RunConfig& config) {
  Json p = Json::object();
  p["modulus"] = config.modulus;
  p["n_terms"] = config.n_terms;
  p["t"] = config.t;
  p["states"] = config.states;
  p["seed"] = config.seed;
  p["bins"] = config.bins;
  return p;
}

std::filesystem::path run_directory(const RunConfig& config, Experiment e) {
  std::string name(to_string(e));
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) {
    return ch == '_' ? '-' : static_cast<char>(std::tolower(ch));
  });
  return std::filesystem::path(config.out_dir) / fmt::format("{}-{}", name, config.seed);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

// Histogram, fit, KS and tail frequencies of an ensemble; writes hist.csv/hist.svg.
void summarize_samples(RunManifest& m, const RunConfig& config, const std::string& title) {
  const auto& xs = m.samples;
  m.results["n_samples"] = xs.size();
  const Histogram h = histogram(xs, config.bins);
  if (xs.size() >= 2) {
    const NormalFit fit = fit_normal(xs);
    m.results["fit"] = Json{{"mu_hat", fit.mu_hat}, {"sigma_hat", fit.sigma_hat}, {"n", fit.n}};
  } else {
    m.results["fit"] = nullptr;
    m.warnings.emplace_back("fewer than 2 states: no normal fit");
  }
  if (xs.size() >= 8) {
    const KsResult ks = ks_test(xs);
    m.results["ks"] = Json{{"statistic", ks.statistic}, {"p_value", ks.p_value}};
  } else {
    m.results["ks"] = nullptr;
    m.warnings.emplace_back("fewer than 8 states: no KS test");
  }
  Json tails = Json::array();
  for (const double kappa : {1.0, 2.0}) {
    const auto below = std::count_if(xs.begin(), xs.end(), [kappa](double x) { return x <= kappa; });
    tails.push_back(Json{{"kappa", kappa},
                         {"empirical", static_cast<double>(below) / static_cast<double>(xs.size())},
                         {"normal_cdf", normal_cdf(kappa)}});
  }
  m.results["tail"] = tails;
  m.results["sample_min"] = *std::min_element(xs.begin(), xs.end());
  m.results["sample_max"] = *std::max_element(xs.begin(), xs.end());

  if (!config.write_files) return;
  const auto dir = run_directory(config, m.experiment);
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  write_histogram_csv(csv, h);
  write_text(dir / "hist.csv", csv.str());
  m.artifacts["hist_csv"] = (dir / "hist.csv").string();
  if (config.svg) {
    const bool have_fit = xs.size() >= 2;
    const double mu = have_fit ? m.results["fit"]["mu_hat"].get<double>() : 0.0;
    const double sd = have_fit ? m.results["fit"]["sigma_hat"].get<double>() : 1.0;
    write_text(dir / "hist.svg", histogram_svg(h.edges, h.density, mu, sd, have_fit, title));
    m.artifacts["hist_svg"] = (dir / "hist.svg").string();
  }
}

void finish(RunManifest& m, const RunConfig& config, std::chrono::steady_clock::time_point start) {
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.write_files) return;
  const auto dir = run_directory(config, m.experiment);
  std::filesystem::create_directories(dir);
  m.artifacts["manifest"] = (dir / "manifest.json").string();
  write_text(dir / "manifest.json", dump_manifest(m.to_json()));
}

void dump_value(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_value(it.value(), out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_value(j[i], out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      std::string s = fmt::format("{:.17g}", v);
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

std::uint64_t first_odd_primes_cutoff(std::uint64_t count) {
  return nth_pseudoprime(sieve_actual(odd_prime_bound(count)), count);
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::CltC:
      return "CLT_C";
    case Experiment::CltB:
      return "CLT_B";
    case Experiment::ActualReference:
      return "ACTUAL_REFERENCE";
    case Experiment::EulerProduct:
      return "EULER_PRODUCT";
    case Experiment::GsCheck:
      return "GS_CHECK";
  }
  return "?";
}

void apply_setting(RunConfig& c, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  if (key == "modulus") {
    c.modulus = parse_u64(key, value);
  } else if (key == "character") {
    c.character = value;
  } else if (key == "character_table") {
    c.character_table = value;
  } else if (key == "n_terms") {
    c.n_terms = parse_u64(key, value);
  } else if (key == "t") {
    c.t = parse_double(key, value);
  } else if (key == "states") {
    c.states = parse_u64(key, value);
  } else if (key == "seed") {
    c.seed = parse_u64(key, value);
  } else if (key == "bins") {
    c.bins = parse_u64(key, value);
  } else if (key == "out_dir") {
    c.out_dir = value;
  } else if (key == "threads") {
    c.threads = static_cast<unsigned>(parse_u64(key, value));
  } else if (key == "svg") {
    c.svg = parse_bool(key, value);
  } else if (key == "prefix") {
    if (value == "nth") {
      c.prefix = PrefixRule::NthMember;
    } else if (value == "expected") {
      c.prefix = PrefixRule::ExpectedCutoff;
    } else {
      throw ConfigError("prefix: expected nth or expected, got '" + value + "'");
    }
  } else if (key == "filtered") {
    c.filtered = parse_bool(key, value);
  } else if (key == "euler_mode") {
    if (value != "zeta" && value != "l") throw ConfigError("euler_mode: expected zeta or l");
    c.euler_mode = value;
  } else if (key == "sigma") {
    c.sigma = parse_double(key, value);
  } else if (key == "t_grid") {
    c.t_grid.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!trim(item).empty()) c.t_grid.push_back(parse_double(key, trim(item)));
    }
    if (c.t_grid.empty()) throw ConfigError("t_grid is empty");
  } else if (key == "c_mult") {
    c.c_mult = parse_double(key, value);
  } else if (key == "factors") {
    c.factors = parse_u64(key, value);
  } else if (key == "trace") {
    c.trace = parse_bool(key, value);
  } else if (key == "window") {
    c.window = parse_u64(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key=value", path.string(), line_no));
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

DirichletCharacter resolve_character(const RunConfig& config) {
  auto check_modulus = [&](DirichletCharacter chi) {
    if (chi.modulus() != config.modulus) {
      throw ConfigError(fmt::format("character has modulus {}, but modulus is {}", chi.modulus(), config.modulus));
    }
    return chi;
  };
  if (!config.character_table.empty()) return check_modulus(parse_character_values(config.character_table));
  const std::string& id = config.character;
  if (id.empty()) throw ConfigError("no character given");
  if (std::all_of(id.begin(), id.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
    const std::uint64_t index = parse_u64("character", id);
    if (config.modulus == 0) throw ConfigError("modulus must be >= 1");
    if (index >= totient(config.modulus)) {
      throw ConfigError(fmt::format("character index {} out of range: there are {} characters mod {}", index,
                                    totient(config.modulus), config.modulus));
    }
    return character_at(config.modulus, index);
  }
  if (auto builtin = builtin_character(id)) return check_modulus(*builtin);
  std::ifstream in(id);
  if (!in) throw ConfigError("character '" + id + "' is not an index, a builtin name, or a readable file");
  std::stringstream ss;
  ss << in.rdbuf();
  return check_modulus(parse_character_values(ss.str()));
}

std::string dump_manifest(const Json& manifest) {
  std::string out;
  dump_value(manifest, out, 0);
  out += "\n";
  return out;
}

Json RunManifest::to_json() const {
  Json j = Json::object();
  j["experiment"] = std::string(to_string(experiment));
  j["parameters"] = parameters;
  j["results"] = results;
  j["warnings"] = warnings;
  j["artifacts"] = artifacts;
  j["tool_version"] = kToolVersion;
  j["wall_time_s"] = wall_time_s;
  return j;
}

std::vector<double> clt_c_samples(const RunConfig& config, const DirichletCharacter& chi) {
  validate_ensemble(config);
  if (chi.is_principal()) throw ConfigError("clt-c needs a non-principal character; use clt-b");
  const EnsembleEvaluator eval(config, ensemble_spec(config), SeriesKernel::character(chi));
  const double a = chi.a_factor().value();
  std::vector<double> slots(config.states);
  parallel_for(config.states, config.threads, [&](std::uint64_t i) {
    slots[i] = normalize_c(eval.raw(i), config.n_terms, chi.modulus(), a);
  });
  return slots;
}

std::vector<double> clt_b_samples(const RunConfig& config) {
  validate_ensemble(config);
  if (!std::isfinite(config.t)) throw ConfigError("t must be finite");
  const EnsembleEvaluator eval(config, ensemble_spec(config), SeriesKernel::principal(config.modulus, config.t));
  const double mean = m_N_ei(config.t, config.n_terms, config.modulus);
  std::vector<double> slots(config.states);
  parallel_for(config.states, config.threads, [&](std::uint64_t i) {
    slots[i] = normalize_b_with_mean(eval.raw(i), mean, config.n_terms, config.modulus);
  });
  return slots;
}

RunManifest run_clt_c(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const DirichletCharacter chi = resolve_character(config);
  RunManifest m;
  m.experiment = Experiment::CltC;
  m.parameters = common_parameters(config);
  m.parameters["character"] = character_json(config, chi);
  m.parameters["ensemble"] = ensemble_json(config);
  m.samples = clt_c_samples(config, chi);
  const double s2 = chi.a_factor().value() * static_cast<double>(totient(chi.modulus())) /
                    static_cast<double>(chi.modulus());
  m.results["normalization"] = Json{{"s2", s2}, {"prefactor", clt_prefactor(config.n_terms, s2)}, {"mean", 0.0}};
  summarize_samples(m, config, fmt::format("C'_N, k = {}, N = {}", config.modulus, config.n_terms));
  finish(m, config, start);
  return m;
}

RunManifest run_clt_b(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.experiment = Experiment::CltB;
  m.parameters = common_parameters(config);
  m.parameters["ensemble"] = ensemble_json(config);
  m.samples = clt_b_samples(config);
  const double s2 = 0.5 * static_cast<double>(totient(config.modulus)) / static_cast<double>(config.modulus);
  const double mean = m_N_ei(config.t, config.n_terms, config.modulus);
  m.results["normalization"] =
      Json{{"s2", s2}, {"prefactor", clt_prefactor(config.n_terms, s2)}, {"mean", mean},
           {"mean_approx", m_N_approx(config.t, config.n_terms, config.modulus)}};
  const bool large_t = config.t > std::sqrt(static_cast<double>(config.n_terms));
  m.results["t_above_sqrt_n"] = large_t;
  if (!large_t) m.warnings.emplace_back("outside large-t regime (t <= sqrt(N))");
  summarize_samples(m, config, fmt::format("B'_N(t), k = {}, N = {}, t = {}", config.modulus, config.n_terms, config.t));
  finish(m, config, start);
  return m;
}

ActualReference actual_c_reference(const DirichletCharacter& chi, std::uint64_t n_terms) {
  if (chi.is_principal()) throw WrongSeriesError("C-series needs a non-principal character");
  if (n_terms < 3) throw DomainError("N must be >= 3");
  const auto primes = sieve_actual(odd_prime_bound(n_terms));
  const auto sums = c_partial_sums(primes, chi, n_terms);
  const double a = chi.a_factor().value();
  const double with_two = chi.cos_theta(2) + sums[n_terms - 2];
  return {normalize_c(with_two, n_terms, chi.modulus(), a), normalize_c(sums.back(), n_terms, chi.modulus(), a)};
}

ActualReference actual_b_reference(double t, std::uint64_t n_terms, std::uint64_t modulus) {
  if (n_terms < 3) throw DomainError("N must be >= 3");
  const auto primes = sieve_actual(odd_prime_bound(n_terms));
  const auto kernel = SeriesKernel::principal(modulus, t);
  const std::uint64_t p_n = nth_pseudoprime(primes, n_terms);
  const std::uint64_t p_n_minus_1 = nth_pseudoprime(primes, n_terms - 1);
  const double without_two = prefix_sum(primes, kernel, p_n);
  const double with_two = kernel(2) + prefix_sum(primes, kernel, p_n_minus_1);
  const double mean = m_N_ei(t, n_terms, modulus);
  return {normalize_b_with_mean(with_two, mean, n_terms, modulus),
          normalize_b_with_mean(without_two, mean, n_terms, modulus)};
}

RunManifest run_actual_reference(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.n_terms < 3) throw ConfigError("n_terms must be >= 3");
  if (config.modulus == 0) throw ConfigError("modulus must be >= 1");
  RunManifest m;
  m.experiment = Experiment::ActualReference;
  m.parameters["modulus"] = config.modulus;
  m.parameters["n_terms"] = config.n_terms;
  m.parameters["t"] = config.t;
  const DirichletCharacter chi = resolve_character(config);
  m.parameters["character"] = character_json(config, chi);
  m.parameters["prefix"] = "nth";

  if (!chi.is_principal()) {
    const auto c = actual_c_reference(chi, config.n_terms);
    m.results["c_normalized"] = Json{{"with_two", c.with_two}, {"without_two", c.without_two}};
  } else {
    m.results["c_normalized"] = nullptr;
    m.warnings.emplace_back("principal character: no C reference");
  }
  const auto b = actual_b_reference(config.t, config.n_terms, config.modulus);
  m.results["b_normalized"] = Json{{"with_two", b.with_two}, {"without_two", b.without_two}};
  m.results["b_mean"] = m_N_ei(config.t, config.n_terms, config.modulus);
  finish(m, config, start);
  return m;
}

RunManifest run_euler(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.experiment = Experiment::EulerProduct;
  m.parameters["mode"] = config.euler_mode;
  m.parameters["sigma"] = config.sigma;
  m.parameters["t_grid"] = config.t_grid;
  ProductTrace last_trace;

  if (config.euler_mode == "zeta") {
    m.parameters["c_mult"] = config.c_mult;
    Json rows = Json::array();
    double previous = INFINITY;
    bool decreasing = true;
    for (const double t : config.t_grid) {
      const ComplexPoint s{config.sigma, t};
      if (s.sigma == 1.0 && t == 0.0) throw DomainError("zeta has a pole at s = 1");
      const TruncatedZeta z = zeta_truncated(s, t, config.c_mult);
      const double r = std::abs(z.residual);
      decreasing = decreasing && r < previous;
      previous = r;
      rows.push_back(Json{{"t", t},
                          {"n_primes", z.n_primes},
                          {"re_residual", z.residual.real()},
                          {"im_residual", z.residual.imag()},
                          {"abs_residual", r}});
      if (config.trace) {
        const auto primes = sieve_actual(odd_prime_bound(z.n_primes - 1));
        last_trace = log_euler_product(primes, *builtin_character("trivial"), s, z.n_primes - 1, true);
      }
    }
    m.results["points"] = rows;
    m.results["strictly_decreasing"] = decreasing;
  } else {
    const DirichletCharacter chi = resolve_character(config);
    if (chi.is_principal()) throw ConfigError("L mode needs a non-principal character");
    if (config.factors < 2) throw ConfigError("factors must be >= 2");
    m.parameters["modulus"] = config.modulus;
    m.parameters["character"] = character_json(config, chi);
    m.parameters["factors"] = config.factors;
    const auto primes = sieve_actual(odd_prime_bound(config.factors - 1));
    Json rows = Json::array();
    for (const double t : config.t_grid) {
      const ComplexPoint s{config.sigma, t};
      const Complex ref = l_reference(chi, s);
      auto trace = log_euler_product(primes, chi, s, config.factors - 1, true);
      const Complex product = std::exp(trace.partial_log.back());
      rows.push_back(Json{{"t", t},
                          {"re_reference", ref.real()},
                          {"im_reference", ref.imag()},
                          {"re_product", product.real()},
                          {"im_product", product.imag()},
                          {"relative_gap", std::abs(product / ref - 1.0)}});
      if (config.trace) last_trace = std::move(trace);
    }
    m.results["points"] = rows;
  }

  if (config.write_files && config.trace && !last_trace.partial_log.empty()) {
    const auto dir = run_directory(config, m.experiment);
    std::filesystem::create_directories(dir);
    std::ostringstream csv;
    write_trace_csv(csv, last_trace);
    write_text(dir / "trace.csv", csv.str());
    m.artifacts["trace_csv"] = (dir / "trace.csv").string();
    m.artifacts["trace_t"] = config.t_grid.back();
  }
  finish(m, config, start);
  return m;
}

RunManifest run_gs_check(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.modulus == 0) throw ConfigError("modulus must be >= 1");
  if (config.states == 0) throw ConfigError("states must be >= 1");
  if (config.n_terms < 1) throw ConfigError("n_terms must be >= 1");
  RunManifest m;
  m.experiment = Experiment::GsCheck;
  m.parameters["modulus"] = config.modulus;
  m.parameters["window"] = config.window;
  m.parameters["n_terms"] = config.n_terms;
  m.parameters["states"] = config.states;
  m.parameters["seed"] = config.seed;

  const auto primes = sieve_actual(first_odd_primes_cutoff(config.n_terms));
  const auto prime_list = primes.members();
  std::vector<std::uint64_t> clamps(config.states);
  std::vector<char> ok(config.states);
  parallel_for(config.states, config.threads, [&](std::uint64_t i) {
    const GsSample g = sample_gs(primes, config.window, config.modulus, substream_seed(config.seed, i));
    clamps[i] = g.clamp_events;
    ok[i] = satisfies_window_constraints(prime_list, g.values, config.window, config.modulus) ? 1 : 0;
  });
  std::uint64_t total_clamps = 0, failing = 0;
  for (std::uint64_t i = 0; i < config.states; ++i) {
    total_clamps += clamps[i];
    failing += ok[i] ? 0 : 1;
  }
  const double indices = static_cast<double>(config.states) * static_cast<double>(prime_list.size());
  m.results["states_violating"] = failing;
  m.results["clamp_events"] = total_clamps;
  m.results["clamp_fraction"] = static_cast<double>(total_clamps) / indices;
  m.results["pass"] = failing == 0 && static_cast<double>(total_clamps) < 0.01 * indices;
  finish(m, config, start);
  return m;
}

std::string histogram_svg(const std::vector<double>& edges, const std::vector<double>& density, double mu_hat,
                          double sigma_hat, bool have_fit, const std::string& title) {
  constexpr double width = 640, height = 420, left = 50, right = 20, top = 40, bottom = 40;
  const double x_lo = std::min(edges.front(), -4.0), x_hi = std::max(edges.back(), 4.0);
  double y_hi = 0.45;
  for (const double d : density) y_hi = std::max(y_hi, 1.05 * d);
  if (have_fit && sigma_hat > 0.0) y_hi = std::max(y_hi, 1.05 * normal_pdf(0.0) / sigma_hat);
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - y / y_hi * (height - top - bottom); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{3}</text>\n",
      width, height, width / 2, title);
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double x0 = px(edges[i]), x1 = px(edges[i + 1]), y = py(density[i]);
    svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#bbbbbb\" "
                       "stroke=\"#888888\" stroke-width=\"0.5\"/>\n",
                       x0, y, std::max(0.0, x1 - x0), py(0.0) - y);
  }
  auto curve = [&](double mu, double sd, const char* colour) {
    std::string pts;
    for (int i = 0; i <= 400; ++i) {
      const double x = x_lo + (x_hi - x_lo) * i / 400.0;
      pts += fmt::format("{:.2f},{:.2f} ", px(x), py(normal_pdf((x - mu) / sd) / sd));
    }
    return fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", pts, colour);
  };
  svg += curve(0.0, 1.0, "blue");
  if (have_fit && sigma_hat > 0.0) svg += curve(mu_hat, sigma_hat, "red");
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left, py(0.0),
                     width - right);
  for (int tick = static_cast<int>(std::ceil(x_lo)); tick <= static_cast<int>(std::floor(x_hi)); ++tick) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                       "text-anchor=\"middle\">{}</text>\n",
                       px(tick), height - bottom + 16, tick);
  }
  if (have_fit) {
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"red\">"
                       "fit N({:.5g}, {:.5g})</text>\n",
                       width - right - 170, top + 10, mu_hat, sigma_hat);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"blue\">N(0, 1)</text>\n",
                     width - right - 170, top + 26);
  svg += "</svg>\n";
  return svg;
}

}  // namespace cramer
