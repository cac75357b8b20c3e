#pragma once
/**
 * @brief Run configuration and a workspace that memoizes the expensive
 *        artifacts (cosets, coefficients, symbols) with optional disk caches.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "modsym/cuspform.hpp"
#include "modsym/enumerate.hpp"
#include "modsym/errors.hpp"
#include "modsym/halfplane.hpp"
#include "modsym/modsym.hpp"
#include "modsym/numeric.hpp"

namespace modsym {

struct RunConfig {
  i64 level = 11;
  std::optional<GroupElement> gamma1;  // nullopt: automatic commutator choice
  HPoint z_ref{0.0, 1.0};
  double T = 500.0;
  std::vector<double> T_grid{250.0, 500.0, 1000.0, 2000.0};
  int digits = 10;
  double U = 10.0;
  std::string output_dir = ".";
  std::string coeff_file;  // empty: eta product (level 11 only)
  bool allow_bound_violation = false;
  std::optional<double> petersson_norm;  // ||f||^2 override for ingested forms
  std::string cache_dir;                 // empty: MODSYM_CACHE_DIR or no disk cache
  unsigned threads = 1;
};

namespace detail {

inline std::vector<double> parse_grid(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("T_grid must be an array of numbers");
  std::vector<double> g;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError("T_grid entries must be numbers");
    g.push_back(v.get<double>());
  }
  return g;
}

}  // namespace detail

/// Checks ranges and structural constraints that do not need any computation.
inline void validate(const RunConfig& c) {
  if (c.level < 1) throw ConfigError("level must be >= 1");
  if (!(c.z_ref.y > 0.0)) throw ConfigError("z_ref must lie in the upper half-plane");
  if (!(c.T >= 1.0)) throw ConfigError("T must be >= 1");
  for (std::size_t i = 0; i < c.T_grid.size(); ++i) {
    if (!(c.T_grid[i] >= 1.0)) throw ConfigError("T_grid entries must be >= 1");
    if (i > 0 && !(c.T_grid[i] > c.T_grid[i - 1])) throw ConfigError("T_grid must be strictly increasing");
  }
  if (c.digits < 1 || c.digits > 15) throw ConfigError("digits must lie in [1, 15]");
  if (!(c.U >= 2.0)) throw ConfigError("U must be >= 2");
  if (c.petersson_norm && !(*c.petersson_norm > 0.0)) throw ConfigError("petersson_norm must be positive");
  if (c.coeff_file.empty() && c.level != 11)
    throw ConfigError("levels other than 11 need a coefficient file");
  if (c.gamma1) {
    if (!is_member(*c.gamma1, c.level)) throw ConfigError("gamma1 is not in Gamma_0(N)");
    if (std::abs(c.gamma1->trace()) <= 2 || c.gamma1->c == 0) throw ConfigError("gamma1 is not hyperbolic");
  }
}

/// Applies the fields of a JSON object onto `base`; unknown keys are rejected.
inline RunConfig apply_config(RunConfig c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "level") c.level = v.get<i64>();
      else if (key == "gamma1") {
        if (v.is_string() && v.get<std::string>() == "auto") c.gamma1.reset();
        else if (v.is_array() && v.size() == 4) {
          try {
            c.gamma1 = GroupElement(v[0].get<i64>(), v[1].get<i64>(), v[2].get<i64>(), v[3].get<i64>());
          } catch (const DomainError& e) {
            throw ConfigError(std::string("gamma1: ") + e.what());
          }
        } else throw ConfigError("gamma1 must be \"auto\" or [a, b, c, d]");
      } else if (key == "z_ref") {
        if (!v.is_array() || v.size() != 2) throw ConfigError("z_ref must be [x, y]");
        if (!(v[1].get<double>() > 0.0)) throw ConfigError("z_ref must lie in the upper half-plane");
        c.z_ref = HPoint(v[0].get<double>(), v[1].get<double>());
      } else if (key == "T") c.T = v.get<double>();
      else if (key == "T_grid") c.T_grid = detail::parse_grid(v);
      else if (key == "digits") c.digits = v.get<int>();
      else if (key == "U") c.U = v.get<double>();
      else if (key == "output_dir") c.output_dir = v.get<std::string>();
      else if (key == "coeff_file") c.coeff_file = v.get<std::string>();
      else if (key == "allow_bound_violation") c.allow_bound_violation = v.get<bool>();
      else if (key == "petersson_norm") c.petersson_norm = v.get<double>();
      else if (key == "cache_dir") c.cache_dir = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else throw ConfigError("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return apply_config(RunConfig{}, j);
}

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["level"] = c.level;
  if (c.gamma1) j["gamma1"] = {c.gamma1->a, c.gamma1->b, c.gamma1->c, c.gamma1->d};
  else j["gamma1"] = "auto";
  j["z_ref"] = {c.z_ref.x, c.z_ref.y};
  j["T"] = c.T;
  j["T_grid"] = c.T_grid;
  j["digits"] = c.digits;
  j["U"] = c.U;
  j["output_dir"] = c.output_dir;
  j["coeff_file"] = c.coeff_file;
  j["allow_bound_violation"] = c.allow_bound_violation;
  if (c.petersson_norm) j["petersson_norm"] = *c.petersson_norm;
  j["threads"] = c.threads;
  return j;
}

/// Cache location: MODSYM_CACHE_DIR beats the config field; empty means none.
inline std::optional<std::filesystem::path> resolve_cache_dir(const RunConfig& c) {
  if (const char* env = std::getenv("MODSYM_CACHE_DIR"); env && *env) return std::filesystem::path(env);
  if (!c.cache_dir.empty()) return std::filesystem::path(c.cache_dir);
  return std::nullopt;
}

/// Memoizing access to the artifacts of a run.
class Workspace {
 public:
  explicit Workspace(RunConfig cfg) : cfg_(std::move(cfg)), cache_dir_(resolve_cache_dir(cfg_)) {
    validate(cfg_);
    if (cache_dir_) std::filesystem::create_directories(*cache_dir_);
  }

  const RunConfig& config() const { return cfg_; }
  const std::optional<std::filesystem::path>& cache_dir() const { return cache_dir_; }
  double volume() const { return covolume_gamma0(cfg_.level); }

  /// gamma1 context; explicit choices must have a vanishing symbol.
  const HyperbolicContext& context() {
    if (!ctx_) {
      if (cfg_.gamma1) {
        ctx_ = analyze_hyperbolic(*cfg_.gamma1);
        const auto s = symbol(ctx_->gamma1, coefficients(symbol_terms(ctx_->gamma1.c, 12)), 12);
        if (std::abs(s.value) > 1e-8)
          throw ConfigError("gamma1 has nonzero modular symbol (|<gamma1,f>| = " + detail::format_double(std::abs(s.value)) +
                            ")");
      } else {
        ctx_ = default_gamma1(cfg_.level).context;
      }
    }
    return *ctx_;
  }

  /// Cosets with norm <= T; served from memory or the disk cache when it covers T.
  EnumerationResult enumeration(double T) {
    if (enum_ && enum_->T >= T) return truncate(*enum_, T);
    const auto& ctx = context();
    if (cache_dir_) {
      const auto path = coset_cache_path();
      if (std::filesystem::exists(path)) {
        try {
          auto cached = load_cache(path, cfg_.level, ctx.gamma1);
          if (cached.T >= T && cached.z_ref.x == cfg_.z_ref.x && cached.z_ref.y == cfg_.z_ref.y) {
            cache_hit_ = true;
            enum_ = std::move(cached);
            return truncate(*enum_, T);
          }
        } catch (const FormatError&) {
          // Corrupt caches are rebuilt.
        }
      }
    }
    cache_hit_ = false;
    enum_ = enumerate_cosets(cfg_.level, ctx, T, cfg_.z_ref);
    if (cache_dir_) save_cache(*enum_, coset_cache_path());
    return *enum_;
  }

  bool last_enumeration_cached() const { return cache_hit_; }

  /// Coefficients a_1..a_M (at least M).
  const QExpansion& coefficients(i64 M) {
    if (q_ && q_->M() >= M) return *q_;
    if (!cfg_.coeff_file.empty()) {
      if (!q_) q_ = load_coeffs(cfg_.coeff_file, cfg_.allow_bound_violation);
      if (q_->level() != cfg_.level) throw ConfigError("coefficient file level does not match config level");
      if (q_->M() < M) throw InsufficientCoefficients(M, q_->M());
      return *q_;
    }
    q_ = eta_expansion_11(std::max<i64>(M, q_ ? q_->M() : 0));
    return *q_;
  }

  /// Symbols for every rep of e at the configured precision.
  const SymbolTable& symbols(const EnumerationResult& e) {
    if (!symbols_) {
      symbols_ = SymbolTable(cfg_.digits);
      if (cache_dir_ && std::filesystem::exists(symbol_cache_path())) {
        try {
          auto t = load_symbols(symbol_cache_path());
          if (t.digits() >= cfg_.digits) symbols_ = std::move(t);
        } catch (const FormatError&) {
        }
      }
    }
    std::vector<CosetRep> missing;
    for (const auto& r : e.reps)
      if (!symbols_->contains(r.rep)) missing.push_back(r);
    if (!missing.empty()) {
      const auto& q = coefficients(required_coefficients(missing, symbols_->digits()));
      fill_symbols(*symbols_, missing, q, cfg_.threads);
      if (cache_dir_) save_symbols(*symbols_, symbol_cache_path());
    }
    return *symbols_;
  }

  /// ||f||^2: config override, else the covolume of the lattice of the given symbols.
  PeterssonNorm petersson(const EnumerationResult& e) {
    if (cfg_.petersson_norm) return {*cfg_.petersson_norm, NormMethod::quadrature};
    const auto& t = symbols(e);
    std::vector<SymbolValue> v;
    for (const auto& r : e.reps) v.push_back(t.at(r.rep));
    return petersson_norm(period_lattice(v));
  }

 private:
  std::filesystem::path coset_cache_path() const {
    const auto& g = ctx_->gamma1;
    std::ostringstream os;
    os << "cosets_N" << cfg_.level << "_g" << g.a << '_' << g.b << '_' << g.c << '_' << g.d << "_z"
       << detail::format_double(cfg_.z_ref.x) << '_' << detail::format_double(cfg_.z_ref.y) << ".csv";
    return *cache_dir_ / os.str();
  }

  std::filesystem::path symbol_cache_path() const {
    std::string source = "eta";
    if (!cfg_.coeff_file.empty()) source = std::filesystem::path(cfg_.coeff_file).stem().string();
    return *cache_dir_ / ("symbols_N" + std::to_string(cfg_.level) + "_" + source + ".csv");
  }

  RunConfig cfg_;
  std::optional<std::filesystem::path> cache_dir_;
  std::optional<HyperbolicContext> ctx_;
  std::optional<EnumerationResult> enum_;
  std::optional<QExpansion> q_;
  std::optional<SymbolTable> symbols_;
  bool cache_hit_ = false;
};

}  // namespace modsym
