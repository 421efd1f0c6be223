#include "mfbai/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace mfbai {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 4> kAlgorithmTags{{
    {Algorithm::TaS, "TaS"},
    {Algorithm::TaSMediatorsKnown, "TaS-MF-k"},
    {Algorithm::TaSMediatorsUnknown, "TaS-MF-u"},
    {Algorithm::Uniform, "Uniform"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::string_view source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(std::string(source_), line_, message);
  }

  double number(std::string_view key, std::string_view text) const {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) {
      fail("'" + std::string(key) + "': expected a number, got '" + std::string(text) + "'");
    }
    return v;
  }

  std::uint64_t integer(std::string_view key, std::string_view text) const {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) {
      fail("'" + std::string(key) + "': expected a non-negative integer, got '" +
           std::string(text) + "'");
    }
    return v;
  }

  std::vector<double> numbers(std::string_view key, std::string_view text) const {
    std::vector<double> out;
    for (auto item : split_list(text)) out.push_back(number(key, item));
    return out;
  }

  bool boolean(std::string_view key, std::string_view text) const {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    fail("'" + std::string(key) + "': expected true or false, got '" + std::string(text) + "'");
  }

 private:
  std::string_view source_;
  std::size_t line_;
};

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
  for (const auto& [alg, tag] : kAlgorithmTags) {
    if (alg == algorithm) return tag;
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_string(std::string_view tag) noexcept {
  for (const auto& [alg, name] : kAlgorithmTags) {
    if (name == tag) return alg;
  }
  return std::nullopt;
}

ConfigError::ConfigError(std::string source, std::size_t line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                         message),
      source_(std::move(source)),
      line_(line) {}

double ExperimentConfig::effective_beta_c() const {
  return beta_c.value_or(static_cast<double>(means.size()) - 1.0);
}

EngineConfig ExperimentConfig::engine_config(Algorithm algorithm) const {
  EngineConfig cfg;
  cfg.solver = solver;
  cfg.warm_budget = warm_budget;
  cfg.max_steps = max_steps;
  switch (algorithm) {
    case Algorithm::TaS:
    case Algorithm::TaSMediatorsKnown:
      cfg.mode = SamplingMode::KnownPolicies;
      break;
    case Algorithm::TaSMediatorsUnknown:
      cfg.mode = SamplingMode::UnknownPolicies;
      break;
    case Algorithm::Uniform:
      cfg.mode = SamplingMode::UniformBaseline;
      break;
  }
  cfg.prune_duplicates = prune_duplicates && algorithm == Algorithm::TaSMediatorsKnown;
  return cfg;
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view source) {
  ExperimentConfig cfg;
  std::vector<std::vector<double>> rows;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    LineParser p(source, line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) p.fail("expected 'key = value', got '" + std::string(line) + "'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key != "policy" && !seen.insert(std::string(key)).second) {
      p.fail("duplicate key '" + std::string(key) + "'");
    }

    if (key == "name") {
      cfg.name = std::string(value);
    } else if (key == "family") {
      if (value == "gaussian") {
        cfg.family = Family::GaussianUnitVariance;
      } else if (value == "bernoulli") {
        cfg.family = Family::Bernoulli;
      } else {
        p.fail("'family': expected gaussian or bernoulli, got '" + std::string(value) + "'");
      }
    } else if (key == "means") {
      cfg.means = p.numbers(key, value);
    } else if (key == "policy") {
      rows.push_back(p.numbers(key, value));
    } else if (key == "algorithms") {
      for (auto tag : split_list(value)) {
        const auto alg = algorithm_from_string(tag);
        if (!alg) p.fail("'algorithms': unknown algorithm '" + std::string(tag) + "'");
        cfg.algorithms.push_back(*alg);
      }
    } else if (key == "deltas") {
      cfg.deltas = p.numbers(key, value);
    } else if (key == "runs") {
      cfg.runs = p.integer(key, value);
    } else if (key == "seed") {
      cfg.base_seed = p.integer(key, value);
    } else if (key == "beta_alpha") {
      cfg.beta_alpha = p.number(key, value);
    } else if (key == "beta_c") {
      cfg.beta_c = p.number(key, value);
    } else if (key == "solver_budget") {
      cfg.solver.budget = p.integer(key, value);
    } else if (key == "solver_tol") {
      cfg.solver.tol = p.number(key, value);
    } else if (key == "warm_budget") {
      cfg.warm_budget = p.integer(key, value);
    } else if (key == "prune_duplicates") {
      cfg.prune_duplicates = p.boolean(key, value);
    } else if (key == "max_steps") {
      cfg.max_steps = p.integer(key, value);
    } else {
      p.fail("unknown key '" + std::string(key) + "'");
    }
  }

  if (!rows.empty()) {
    const std::size_t k = rows.front().size();
    cfg.policies = Matrix(rows.size(), k);
    for (std::size_t e = 0; e < rows.size(); ++e) {
      if (rows[e].size() != k) {
        throw ConfigError(std::string(source), 0,
                          "'policy': row " + std::to_string(e) + " has " +
                              std::to_string(rows[e].size()) + " entries, expected " +
                              std::to_string(k));
      }
      std::copy(rows[e].begin(), rows[e].end(), cfg.policies.row(e).begin());
    }
  }
  validate_config(cfg, source);
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::system_error(errno ? errno : ENOENT, std::generic_category(),
                            "cannot open config file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

void validate_config(const ExperimentConfig& config, std::string_view source) {
  auto fail = [&](const std::string& message) { throw ConfigError(std::string(source), 0, message); };
  if (config.means.empty()) fail("'means': missing");
  if (config.policies.rows() == 0) fail("'policy': at least one mediator policy is required");
  if (config.policies.cols() != config.means.size()) {
    fail("'policy': rows have " + std::to_string(config.policies.cols()) + " entries but " +
         std::to_string(config.means.size()) + " means were given");
  }
  if (config.algorithms.empty()) fail("'algorithms': missing");
  if (config.deltas.empty()) fail("'deltas': missing");
  for (double d : config.deltas) {
    if (!(d > 0.0 && d < 1.0)) fail("'deltas': every risk must lie in (0, 1)");
  }
  if (config.runs < 1) fail("'runs': must be at least 1");
  if (!(config.beta_alpha > 1.0)) fail("'beta_alpha': must exceed 1");
  if (config.beta_c && !(*config.beta_c > 0.0)) fail("'beta_c': must be positive");
  if (config.solver.budget < 1) fail("'solver_budget': must be at least 1");
  if (!(config.solver.tol > 0.0)) fail("'solver_tol': must be positive");
  if (config.max_steps < 1) fail("'max_steps': must be at least 1");
  try {
    (void)config.model();
  } catch (const std::exception& e) {
    fail(std::string("'means': ") + e.what());
  }
  try {
    (void)config.mediators();
  } catch (const std::exception& e) {
    fail(std::string("'policy': ") + e.what());
  }
}

std::optional<std::uint64_t> apply_seed_override(ExperimentConfig& config) {
  const char* env = std::getenv("MFBAI_BASE_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  const std::string_view text(env);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("MFBAI_BASE_SEED", 0, "expected a non-negative integer, got '" +
                                                std::string(text) + "'");
  }
  config.base_seed = seed;
  return seed;
}

}  // namespace mfbai
