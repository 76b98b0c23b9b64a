/**
 * @file radial_sle_main.cpp
 * @brief radial-sle command line: kappa parameter tables, link-pattern and
 *        meander combinatorics, screened partition-function evaluation,
 *        null-vector / rotation / Ward / Calogero-Sutherland / commutator
 *        verification, Loewner-chain simulation, and quadrature calibration.
 *
 * Conventions shared by every subcommand:
 *   - `--config FILE` preloads option values from a flat JSON object keyed by
 *     long option names (unknown keys rejected); explicit flags override file
 *     values.
 *   - every run writes a manifest JSON (schema radsle.manifest.v1) echoing
 *     the fully resolved options and the library version; `--from-manifest
 *     FILE` re-runs a manifest, and remaining flags still override.
 *   - the environment variable RADIAL_SLE_SEED supplies the seed when
 *     neither a flag nor a config file sets one.
 *   - exit codes: 0 success, 2 validation error, 3 tolerance failure in a
 *     verify/calibrate check, 4 runtime failure (a simulate collision is a
 *     regular outcome and exits 0 with halt_reason "collision").
 */
#include "radsle/calogero.hpp"
#include "radsle/constants.hpp"
#include "radsle/contour.hpp"
#include "radsle/integrand.hpp"
#include "radsle/linkpattern.hpp"
#include "radsle/loewner.hpp"
#include "radsle/meander.hpp"
#include "radsle/nullvec.hpp"
#include "radsle/params.hpp"
#include "radsle/rng.hpp"
#include "radsle/screening.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitTolerance = 3;
constexpr int kExitRuntime = 4;

/// Pre-parse usage problems (bad --config/--from-manifest plumbing).
struct UsageError {
  std::string msg;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError{"cannot open JSON file: " + path};
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw UsageError{"cannot parse JSON file " + path + ": " + e.what()};
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const std::string& path, const std::string& subcommand, const json& options) {
  json m;
  m["schema_id"] = "radsle.manifest.v1";
  m["library_version"] = radsle::kLibraryVersion;
  m["subcommand"] = subcommand;
  m["options"] = options;
  write_text_file(path, m.dump(2) + "\n");
}

void print_report(const json& rep) { std::cout << rep.dump(2) << "\n"; }

// --------------------------------------------------------------------------
// Option binding: one declaration feeds the CLI flag, the config-file key,
// and the resolved-options echo in the manifest.
// --------------------------------------------------------------------------
class OptionBinder {
 public:
  OptionBinder(CLI::App* cmd, json cfg) : cmd_(cmd), cfg_(std::move(cfg)) {
    if (!cfg_.is_object()) throw UsageError{"config for '" + cmd->get_name() + "' must be a JSON object"};
  }

  template <typename T>
  CLI::Option* add(const std::string& flag, T& var, const std::string& help) {
    const std::string key = key_of(flag);
    allowed_.insert(key);
    seed_from_config(key, var);
    CLI::Option* opt = cmd_->add_option(flag, var, help)->capture_default_str();
    writers_.push_back([key, &var](json& j) { j[key] = var; });
    return opt;
  }

  CLI::Option* add_flag(const std::string& flag, bool& var, const std::string& help) {
    const std::string key = key_of(flag);
    allowed_.insert(key);
    seed_from_config(key, var);
    CLI::Option* opt = cmd_->add_flag(flag, var, help);
    writers_.push_back([key, &var](json& j) { j[key] = var; });
    return opt;
  }

  bool from_config(const std::string& key) const {
    return cfg_.contains(key) && !cfg_.at(key).is_null();
  }

  /// Reject config keys that match no declared option of this subcommand.
  void check_unknown() const {
    for (const auto& item : cfg_.items())
      if (!allowed_.count(item.key()))
        throw CLI::ValidationError("unknown config key for '" + cmd_->get_name() + "': " + item.key());
  }

  /// Materialize the final option values (after defaults and overrides).
  json resolved() const {
    json j;
    for (const auto& w : writers_) w(j);
    return j;
  }

 private:
  static std::string key_of(const std::string& flag) {
    std::string key = flag.substr(flag.find_first_not_of('-'));
    return key;
  }

  template <typename T>
  void seed_from_config(const std::string& key, T& var) {
    if (!from_config(key)) return;
    try {
      var = cfg_.at(key).get<T>();
    } catch (const std::exception&) {
      throw UsageError{"config key '" + key + "' has the wrong type"};
    }
  }

  CLI::App* cmd_;
  json cfg_;
  std::set<std::string> allowed_;
  std::vector<std::function<void(json&)>> writers_;
};

/// Seed precedence: explicit flag or config value, then RADIAL_SLE_SEED, then default.
std::uint64_t resolve_seed(std::uint64_t current, bool explicitly_set) {
  if (explicitly_set) return current;
  const char* env = std::getenv("RADIAL_SLE_SEED");
  if (!env || !*env) return current;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || end == env || *end != '\0')
    throw CLI::ValidationError(std::string("RADIAL_SLE_SEED is not an unsigned integer: ") + env);
  return v;
}

// --------------------------------------------------------------------------
// Small parsers for list-valued flags (kept as strings so they round-trip
// through config files and manifests unchanged).
// --------------------------------------------------------------------------
std::vector<double> parse_csv_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what + ": not a number: '" + tok + "'");
    }
  }
  return out;
}

std::vector<int> parse_csv_ints(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (double v : parse_csv_doubles(text, what)) {
    const int k = static_cast<int>(std::llround(v));
    if (std::abs(v - k) > 0) throw CLI::ValidationError(what + ": not an integer: " + format_double(v));
    out.push_back(k);
  }
  return out;
}

/// Marked points as "angle:sigma,angle:sigma".
std::vector<radsle::MarkedPoint> parse_marked(const std::string& text) {
  std::vector<radsle::MarkedPoint> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const std::size_t colon = tok.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--marked: expected angle:sigma, got '" + tok + "'");
    const std::vector<double> a = parse_csv_doubles(tok.substr(0, colon), "--marked angle");
    const std::vector<double> s = parse_csv_doubles(tok.substr(colon + 1), "--marked sigma");
    if (a.size() != 1 || s.size() != 1)
      throw CLI::ValidationError("--marked: expected angle:sigma, got '" + tok + "'");
    out.push_back({a[0], s[0]});
  }
  return out;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out;
}

// --------------------------------------------------------------------------
// Shared verification scaffolding.
// --------------------------------------------------------------------------

/// Jittered near-equispaced chamber configurations; config 0 is the base.
std::vector<std::vector<double>> jittered_configs(int n, int count, double jitter,
                                                  std::uint64_t seed) {
  if (n < 1) throw CLI::ValidationError("--n must be >= 1");
  if (count < 1) throw CLI::ValidationError("--configs must be >= 1");
  if (!(jitter >= 0.0 && jitter < 0.45))
    throw CLI::ValidationError("--jitter must lie in [0, 0.45)");
  const double gap = radsle::kTwoPi / n;
  std::vector<std::vector<double>> configs;
  radsle::GaussianStream stream(radsle::derive_stream_seed(seed, 0xC0FF16ULL));
  for (int c = 0; c < count; ++c) {
    std::vector<double> theta(n);
    for (int j = 0; j < n; ++j) {
      theta[j] = 0.3 + gap * j;
      if (c > 0) theta[j] += jitter * gap * (2.0 * stream.uniform() - 1.0);
    }
    std::sort(theta.begin(), theta.end());
    configs.push_back(std::move(theta));
  }
  return configs;
}

radsle::ScreeningSpec build_spec(const std::string& family, int n, int m, double kappa,
                                 double eta, double excited_radius, const std::string& pattern,
                                 double quad_abs, double quad_rel) {
  radsle::ScreeningSpec spec;
  spec.family = radsle::family_from_name(family);
  spec.n = n;
  spec.m = m;
  spec.kappa = kappa;
  spec.eta = eta;
  spec.excited_radius = excited_radius;
  spec.quad_abs_tol = quad_abs;
  spec.quad_rel_tol = quad_rel;
  if (!pattern.empty()) {
    const radsle::PatternKind kind = spec.family == radsle::Family::ChordalL
                                         ? radsle::PatternKind::Chordal
                                         : radsle::PatternKind::Radial;
    spec.pattern = radsle::LinkPattern::parse(kind, n, pattern);
    spec.has_pattern = true;
  }
  const std::string warn = spec.validate();
  if (!warn.empty()) throw CLI::ValidationError("screening spec: " + warn);
  return spec;
}

/// Finite-difference step for screened evaluators: the frozen-contour probe
/// radius shrinks with the minimal gap, so larger n needs a smaller stencil.
double auto_fd_step(double requested, int n) {
  if (requested > 0.0) return requested;
  if (n <= 2) return 2e-2;
  if (n == 3) return 1.5e-2;
  return 1.2e-2;
}

// --------------------------------------------------------------------------
// Pochhammer Beta integrals for the calibration subcommand.
// --------------------------------------------------------------------------
radsle::QuadResult beta_pochhammer(radsle::cplx alpha, radsle::cplx beta,
                                   double abs_tol, double rel_tol) {
  radsle::IteratedIntegral ii;
  ii.num_vars = 1;
  radsle::LevelSpec lv;
  lv.contour = radsle::make_pochhammer(0.0, 1.0, 0.1, 0.1, 0.5);
  lv.abs_tol = abs_tol;
  lv.rel_tol = rel_tol;
  ii.levels.push_back(lv);
  radsle::Factor f0;
  f0.core = radsle::CoreKind::Linear;
  f0.owner = 0;
  f0.ref = 0.0;
  f0.exponent = alpha;
  radsle::Factor f1 = f0;
  f1.ref = 1.0;
  f1.exponent = beta;
  ii.factors = {f0, f1};
  return ii.evaluate();
}

radsle::QuadResult beta_reduced(radsle::cplx alpha, radsle::cplx beta,
                                double abs_tol, double rel_tol) {
  radsle::IteratedIntegral ii;
  ii.num_vars = 1;
  radsle::LevelSpec lv;
  lv.contour = radsle::make_interval(0.0, 1.0, 0.5);
  lv.abs_tol = abs_tol;
  lv.rel_tol = rel_tol;
  lv.reduced = true;
  lv.reduction_prefactor = radsle::reduction_prefactor(alpha, beta);
  lv.endpoint_lo = 0;
  lv.endpoint_hi = 1;
  ii.levels.push_back(lv);
  radsle::Factor f0;
  f0.core = radsle::CoreKind::Linear;
  f0.owner = 0;
  f0.ref = 0.0;
  f0.exponent = alpha;
  radsle::Factor f1 = f0;
  f1.ref = 1.0;
  f1.exponent = beta;
  ii.factors = {f0, f1};
  return ii.evaluate();
}

} // namespace

// ==========================================================================
// main
// ==========================================================================
int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  int exit_code = kExitOk;

  try {
    // ---- pre-parse plumbing: --config / --from-manifest -------------------
    auto take_flag_value = [&args](const std::string& flag, bool& found) -> std::string {
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == flag) {
          if (i + 1 >= args.size()) throw UsageError{flag + " needs a file path"};
          std::string v = args[i + 1];
          args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
          found = true;
          return v;
        }
        if (args[i].rfind(flag + "=", 0) == 0) {
          std::string v = args[i].substr(flag.size() + 1);
          args.erase(args.begin() + static_cast<long>(i));
          found = true;
          return v;
        }
      }
      found = false;
      return {};
    };

    bool has_config = false, has_manifest_in = false;
    const std::string config_path = take_flag_value("--config", has_config);
    const std::string manifest_in = take_flag_value("--from-manifest", has_manifest_in);
    if (has_config && has_manifest_in)
      throw UsageError{"--config and --from-manifest cannot be combined"};

    json file_cfg = json::object();
    if (has_config) {
      file_cfg = load_json_file(config_path);
      if (!file_cfg.is_object()) throw UsageError{"config file must hold a JSON object"};
    }
    if (has_manifest_in) {
      const json m = load_json_file(manifest_in);
      if (!m.is_object() || m.value("schema_id", std::string()) != "radsle.manifest.v1")
        throw UsageError{"not a radsle.manifest.v1 file: " + manifest_in};
      if (!m.contains("subcommand") || !m.contains("options") || !m["options"].is_object())
        throw UsageError{"manifest is missing subcommand/options: " + manifest_in};
      file_cfg = m["options"];
      // Re-insert the manifest's subcommand path unless already typed.
      std::vector<std::string> path;
      {
        std::stringstream ss(m["subcommand"].get<std::string>());
        std::string tok;
        while (std::getline(ss, tok, '.')) path.push_back(tok);
      }
      std::size_t have = 0;
      while (have < path.size() && have < args.size() && args[have] == path[have]) ++have;
      if (have < path.size()) {
        if (have < args.size() && !args[have].empty() && args[have][0] != '-')
          throw UsageError{"subcommand '" + args[have] + "' conflicts with manifest subcommand '" +
                           m["subcommand"].get<std::string>() + "'"};
        args.insert(args.begin() + static_cast<long>(have), path.begin() + static_cast<long>(have),
                    path.end());
      }
    }

    // Route the config object to the invoked subcommand (must come first).
    std::string active;
    if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
      active = args[0];
      if ((active == "verify" || active == "calibrate") && args.size() > 1 && !args[1].empty() &&
          args[1][0] != '-')
        active += "." + args[1];
    }
    if ((has_config || has_manifest_in) && !file_cfg.empty() && active.empty())
      throw UsageError{"--config/--from-manifest requires a subcommand"};
    auto cfg_for = [&](const std::string& id) -> json {
      return id == active ? file_cfg : json::object();
    };

    // ---- application skeleton --------------------------------------------
    CLI::App app{"numerical laboratory for multiple radial SLE(kappa)"};
    app.set_version_flag("--version", radsle::kLibraryVersion);
    app.require_subcommand(1);
    std::string dummy_cfg, dummy_mf;
    app.add_option("--config", dummy_cfg,
                   "JSON file with option values (flags override; unknown keys rejected)")
        ->group("Global");
    app.add_option("--from-manifest", dummy_mf, "re-run a previously written manifest JSON")
        ->group("Global");

    std::vector<std::unique_ptr<OptionBinder>> binders;
    auto bind = [&](CLI::App* cmd, const std::string& id) -> OptionBinder& {
      binders.push_back(std::make_unique<OptionBinder>(cmd, cfg_for(id)));
      return *binders.back();
    };

    // =======================================================================
    // params
    // =======================================================================
    auto* cmd_params = app.add_subcommand("params", "kappa-derived constants and charge dimensions");
    {
      auto& b = bind(cmd_params, "params");
      struct {
        double kappa = 4.0;
        double sigma = std::nan("");
        bool classical = false;
        bool halved = false;
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--kappa", o.kappa, "SLE parameter kappa > 0");
      b.add("--sigma", o.sigma, "optional charge: also report its conformal dimension");
      b.add_flag("--classical", o.classical, "report the classical (kappa -> 0) dimension instead");
      b.add_flag("--halved", o.halved, "classical dimension with the halved normalization");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_params->callback([&binder]() {
        binder.check_unknown();
        write_manifest(o.manifest, "params", binder.resolved());
        const radsle::KappaParams p = radsle::derive_params(o.kappa);
        json rep;
        rep["schema_id"] = "radsle.params.v1";
        rep["kappa"] = p.kappa;
        rep["a"] = p.a;
        rep["b"] = p.b;
        rep["central_charge"] = p.central_charge;
        rep["fugacity"] = p.fugacity;
        if (!std::isnan(o.sigma)) {
          rep["sigma"] = o.sigma;
          if (o.classical)
            rep["classical_dimension"] = radsle::classical_dimension(o.sigma, o.halved);
          else
            rep["dimension"] = radsle::conformal_dimension(radsle::cplx(o.sigma, 0.0), p).real();
        }
        print_report(rep);
      });
    }

    // =======================================================================
    // patterns
    // =======================================================================
    auto* cmd_patterns = app.add_subcommand("patterns", "enumerate link patterns in canonical text");
    {
      auto& b = bind(cmd_patterns, "patterns");
      struct {
        int n = 4;
        int m = 2;
        std::string kind = "radial";
        bool count_only = false;
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--n", o.n, "number of boundary points");
      b.add("--m", o.m, "number of links");
      b.add("--kind", o.kind, "pattern kind: radial | chordal");
      b.add_flag("--count-only", o.count_only, "print only the number of patterns");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_patterns->callback([&binder]() {
        binder.check_unknown();
        write_manifest(o.manifest, "patterns", binder.resolved());
        std::vector<radsle::LinkPattern> pats;
        if (o.kind == "radial")
          pats = radsle::enumerate_radial(o.n, o.m);
        else if (o.kind == "chordal")
          pats = radsle::enumerate_chordal(o.n, o.m);
        else
          throw CLI::ValidationError("--kind must be radial or chordal");
        if (o.count_only) {
          std::cout << pats.size() << "\n";
          return;
        }
        for (const auto& p : pats) std::cout << p.to_string() << "\n";
      });
    }

    // =======================================================================
    // meander
    // =======================================================================
    auto* cmd_meander = app.add_subcommand("meander", "meander (Gram) matrix of link patterns");
    {
      auto& b = bind(cmd_meander, "meander");
      struct {
        int n = 4;
        int m = 2;
        double kappa = 4.0;
        std::string kind = "radial";
        bool check_invertible = false;
        bool print_matrix = false;
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--n", o.n, "number of boundary points");
      b.add("--m", o.m, "number of links");
      b.add("--kappa", o.kappa, "kappa fixing the loop fugacity n(kappa)");
      b.add("--kind", o.kind, "pattern kind: radial | chordal");
      b.add_flag("--check-invertible", o.check_invertible, "exit 3 unless the matrix is invertible");
      b.add_flag("--print-matrix", o.print_matrix, "include the full matrix in the report");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_meander->callback([&binder, &exit_code]() {
        binder.check_unknown();
        write_manifest(o.manifest, "meander", binder.resolved());
        std::vector<radsle::LinkPattern> pats;
        if (o.kind == "radial")
          pats = radsle::enumerate_radial(o.n, o.m);
        else if (o.kind == "chordal")
          pats = radsle::enumerate_chordal(o.n, o.m);
        else
          throw CLI::ValidationError("--kind must be radial or chordal");
        if (pats.empty()) throw CLI::ValidationError("no patterns for these (n, m)");
        const auto M = radsle::meander_matrix(pats, o.kappa);
        const int N = static_cast<int>(M.size());
        Eigen::MatrixXd A(N, N);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) A(i, j) = M[i][j];
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        const double det = lu.determinant();
        const bool invertible = lu.isInvertible();
        json rep;
        rep["schema_id"] = "radsle.meander.v1";
        rep["kind"] = o.kind;
        rep["n"] = o.n;
        rep["m"] = o.m;
        rep["kappa"] = o.kappa;
        rep["fugacity"] = radsle::derive_params(o.kappa).fugacity;
        rep["size"] = N;
        rep["determinant"] = det;
        rep["rank"] = static_cast<int>(lu.rank());
        rep["invertible"] = invertible;
        if (o.print_matrix) rep["matrix"] = M;
        print_report(rep);
        if (o.check_invertible && !invertible) exit_code = kExitTolerance;
      });
    }

    // =======================================================================
    // eval-psi
    // =======================================================================
    auto* cmd_eval = app.add_subcommand("eval-psi", "evaluate a screened partition function");
    {
      auto& b = bind(cmd_eval, "eval-psi");
      struct {
        std::string family = "ground";
        int n = 2;
        int m = 0;
        double kappa = 4.0;
        double eta = 0.0;
        double excited_radius = 0.5;
        std::string pattern;
        std::string theta;
        double quad_abs = 1e-9;
        double quad_rel = 1e-10;
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--family", o.family, "ground | excited | spin | chordal");
      b.add("--n", o.n, "number of boundary points");
      b.add("--m", o.m, "number of screening integrals");
      b.add("--kappa", o.kappa, "SLE parameter kappa > 0");
      b.add("--eta", o.eta, "spin family interior spin");
      b.add("--excited-radius", o.excited_radius, "excited family w-circle radius in (0,1)");
      b.add("--pattern", o.pattern, "link pattern in canonical text (default: adjacent links)");
      b.add("--theta", o.theta, "comma-separated angles, ascending, span < 2 pi");
      b.add("--quad-abs-tol", o.quad_abs, "quadrature absolute tolerance");
      b.add("--quad-rel-tol", o.quad_rel, "quadrature relative tolerance");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_eval->callback([&binder]() {
        binder.check_unknown();
        std::vector<double> theta = parse_csv_doubles(o.theta, "--theta");
        if (theta.empty()) {
          for (int j = 0; j < o.n; ++j) theta.push_back(0.3 + radsle::kTwoPi * j / o.n);
          o.theta = join_doubles(theta);
        }
        write_manifest(o.manifest, "eval-psi", binder.resolved());
        const radsle::ScreeningSpec spec = build_spec(o.family, o.n, o.m, o.kappa, o.eta,
                                                      o.excited_radius, o.pattern, o.quad_abs,
                                                      o.quad_rel);
        radsle::ScreeningEvaluator ev(spec, theta);
        const radsle::cplx v = ev.eval(theta);
        json rep;
        rep["schema_id"] = "radsle.evalpsi.v1";
        rep["family"] = o.family;
        rep["n"] = o.n;
        rep["m"] = o.m;
        rep["kappa"] = o.kappa;
        rep["eta"] = o.eta;
        rep["theta"] = theta;
        rep["value_re"] = v.real();
        rep["value_im"] = v.imag();
        rep["abs_error"] = ev.last_abs_error();
        rep["integration_vars"] = ev.num_integration_vars();
        rep["probe_radius"] = ev.probe_radius();
        print_report(rep);
      });
    }

    // =======================================================================
    // verify
    // =======================================================================
    auto* cmd_verify = app.add_subcommand("verify", "numerical identity checks (exit 3 on failure)");
    cmd_verify->require_subcommand(1);

    // ---- verify nullvec / verify rotation (shared options) ----------------
    struct FamilyVerifyOpts {
      std::string family = "ground";
      int n = 2;
      int m = 0;
      double kappa = 4.0;
      double eta = 0.0;
      double excited_radius = 0.5;
      std::string pattern;
      double quad_abs = 1e-9;
      double quad_rel = 1e-10;
      double fd_step = 0.0; // 0 = auto by n
      int fd_order = 4;
      int fd_levels = 2;
      int configs = 4;
      double jitter = 0.04;
      std::uint64_t seed = 2026;
      double tol = 1e-3;
      double tol_spread = std::nan(""); // NaN = report only
      double rigid_shift = 1e-2;        // rotation only
      std::string manifest = "radsle_manifest.json";
    };
    auto bind_family_verify = [&](OptionBinder& b, FamilyVerifyOpts& o, bool rotation) {
      b.add("--family", o.family, "ground | excited | spin | chordal");
      b.add("--n", o.n, "number of boundary points");
      b.add("--m", o.m, "number of screening integrals");
      b.add("--kappa", o.kappa, "SLE parameter kappa > 0");
      b.add("--eta", o.eta, "spin family interior spin");
      b.add("--excited-radius", o.excited_radius, "excited family w-circle radius in (0,1)");
      b.add("--pattern", o.pattern, "link pattern in canonical text");
      b.add("--quad-abs-tol", o.quad_abs, "quadrature absolute tolerance");
      b.add("--quad-rel-tol", o.quad_rel, "quadrature relative tolerance");
      b.add("--fd-step", o.fd_step, "finite-difference step (0 = choose by n)");
      b.add("--fd-order", o.fd_order, "stencil order (2 or 4)");
      b.add("--fd-levels", o.fd_levels, "Richardson extrapolation levels");
      b.add("--configs", o.configs, "number of pooled chamber configurations");
      b.add("--jitter", o.jitter, "configuration jitter as a fraction of the mean gap");
      CLI::Option* seed_opt = b.add("--seed", o.seed, "jitter seed (RADIAL_SLE_SEED fallback)");
      b.add("--tol", o.tol, "eigenvalue tolerance against the closed form");
      b.add("--tol-spread", o.tol_spread, "optional gate on the reading spread");
      if (rotation) b.add("--rigid-shift", o.rigid_shift, "rigid-rotation cross-check shift");
      b.add("--manifest", o.manifest, "manifest output path");
      return seed_opt;
    };

    auto run_family_verify = [&](OptionBinder& binder, FamilyVerifyOpts& o, CLI::Option* seed_opt,
                                 bool rotation, int& rc) {
      binder.check_unknown();
      o.seed = resolve_seed(o.seed, seed_opt->count() > 0 || binder.from_config("seed"));
      o.fd_step = auto_fd_step(o.fd_step, o.n);
      write_manifest(o.manifest, rotation ? "verify.rotation" : "verify.nullvec",
                     binder.resolved());
      const radsle::ScreeningSpec spec = build_spec(o.family, o.n, o.m, o.kappa, o.eta,
                                                    o.excited_radius, o.pattern, o.quad_abs,
                                                    o.quad_rel);
      const auto configs = jittered_configs(spec.n, o.configs, o.jitter, o.seed);
      const radsle::PsiFn psi = radsle::adaptive_screening_psi(spec, 2.0 * o.fd_step);
      const radsle::FiniteDiffScheme scheme{o.fd_step, o.fd_order, o.fd_levels};
      const radsle::Estimate est = rotation
                                       ? radsle::estimate_omega(psi, configs, scheme, o.rigid_shift)
                                       : radsle::estimate_h(psi, spec.kappa, configs, scheme);
      const double target = rotation
                                ? radsle::family_omega(spec.family, o.n, o.m, o.kappa, o.eta)
                                : radsle::family_h(spec.family, o.n, o.m, o.kappa, o.eta);
      const double diff = std::fabs(est.value - target);
      bool pass = diff <= o.tol;
      if (!std::isnan(o.tol_spread)) pass = pass && est.spread <= o.tol_spread;
      json rep;
      rep["schema_id"] = "radsle.verify.v1";
      rep["check"] = rotation ? "rotation" : "nullvec";
      rep["family"] = o.family;
      rep["n"] = o.n;
      rep["m"] = o.m;
      rep["kappa"] = o.kappa;
      if (spec.family == radsle::Family::SpinJ) rep["eta"] = o.eta;
      rep["measured"] = est.value;
      rep["spread"] = est.spread;
      rep["samples"] = est.samples;
      rep["target"] = target;
      rep["formula"] = rotation ? radsle::family_omega_formula(spec.family)
                                : radsle::family_h_formula(spec.family);
      rep["abs_diff"] = diff;
      rep["tol"] = o.tol;
      rep["fd"] = {{"step", o.fd_step}, {"order", o.fd_order}, {"levels", o.fd_levels}};
      rep["configs"] = o.configs;
      rep["seed"] = o.seed;
      rep["pass"] = pass;
      print_report(rep);
      if (!pass) rc = kExitTolerance;
    };

    auto* cmd_nullvec = cmd_verify->add_subcommand("nullvec", "null-vector eigenvalue L_j psi = h psi");
    {
      auto& b = bind(cmd_nullvec, "verify.nullvec");
      static FamilyVerifyOpts o;
      CLI::Option* seed_opt = bind_family_verify(b, o, false);
      auto& binder = b;
      cmd_nullvec->callback([&binder, seed_opt, &exit_code, &run_family_verify]() {
        run_family_verify(binder, o, seed_opt, false, exit_code);
      });
    }

    auto* cmd_rotation = cmd_verify->add_subcommand("rotation", "rotation eigenvalue sum_j d_j psi");
    {
      auto& b = bind(cmd_rotation, "verify.rotation");
      static FamilyVerifyOpts o;
      CLI::Option* seed_opt = bind_family_verify(b, o, true);
      auto& binder = b;
      cmd_rotation->callback([&binder, seed_opt, &exit_code, &run_family_verify]() {
        run_family_verify(binder, o, seed_opt, true, exit_code);
      });
    }

    // ---- verify ward -------------------------------------------------------
    auto* cmd_ward = cmd_verify->add_subcommand("ward", "projective Ward identities in the half-plane");
    {
      auto& b = bind(cmd_ward, "verify.ward");
      struct {
        int n = 2;
        int m = 0;
        double kappa = 4.0;
        std::string xs;
        std::string u = "0.15,0.9";
        double fd_step = 1e-2;
        int fd_order = 4;
        int fd_levels = 2;
        double tol = 1e-5;
        double falsify_shift = 0.25;
        double falsify_floor = 1e-2;
        bool no_falsify = false;
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--n", o.n, "number of boundary points");
      b.add("--m", o.m, "number of screening integrals (0 or 1)");
      b.add("--kappa", o.kappa, "SLE parameter kappa > 0");
      b.add("--xs", o.xs, "comma-separated boundary positions (default: equispaced)");
      b.add("--u", o.u, "interior point as re,im with im > 0");
      b.add("--fd-step", o.fd_step, "finite-difference step");
      b.add("--fd-order", o.fd_order, "stencil order (2 or 4)");
      b.add("--fd-levels", o.fd_levels, "Richardson extrapolation levels");
      b.add("--tol", o.tol, "residual tolerance for all three identities");
      b.add("--falsify-shift", o.falsify_shift, "interior-weight shift of the negative control");
      b.add("--falsify-floor", o.falsify_floor, "control dilation residual must exceed this");
      b.add_flag("--no-falsify", o.no_falsify, "skip the falsified-weight control");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_ward->callback([&binder, &exit_code]() {
        binder.check_unknown();
        std::vector<double> xs = parse_csv_doubles(o.xs, "--xs");
        if (xs.empty()) {
          for (int j = 0; j < o.n; ++j)
            xs.push_back(o.n == 1 ? 0.0 : -0.75 + 1.5 * j / (o.n - 1.0));
          o.xs = join_doubles(xs);
        }
        if (static_cast<int>(xs.size()) != o.n)
          throw CLI::ValidationError("--xs must list exactly n positions");
        const std::vector<double> uv = parse_csv_doubles(o.u, "--u");
        if (uv.size() != 2 || !(uv[1] > 0.0))
          throw CLI::ValidationError("--u must be re,im with im > 0");
        write_manifest(o.manifest, "verify.ward", binder.resolved());
        const radsle::cplx u(uv[0], uv[1]);
        const radsle::WardEvaluator ev(xs, u, o.kappa, o.m);
        const radsle::FiniteDiffScheme scheme{o.fd_step, o.fd_order, o.fd_levels};
        const radsle::WardReport rep0 = radsle::check_ward(ev, xs, u, scheme, 0.0);
        const double worst = std::max({rep0.translation, rep0.dilation, rep0.special});
        bool pass = worst <= o.tol;
        json rep;
        rep["schema_id"] = "radsle.verify.v1";
        rep["check"] = "ward";
        rep["n"] = o.n;
        rep["m"] = o.m;
        rep["kappa"] = o.kappa;
        rep["xs"] = xs;
        rep["u"] = {uv[0], uv[1]};
        rep["translation"] = rep0.translation;
        rep["dilation"] = rep0.dilation;
        rep["special"] = rep0.special;
        rep["lambda_boundary"] = rep0.lambda_boundary;
        rep["lambda_interior"] = rep0.lambda_interior;
        rep["value_abs"] = std::abs(rep0.value);
        rep["tol"] = o.tol;
        if (!o.no_falsify) {
          const radsle::WardReport repf = radsle::check_ward(ev, xs, u, scheme, o.falsify_shift);
          const bool triggered = repf.dilation > o.falsify_floor;
          rep["falsified"] = {{"shift", o.falsify_shift},
                              {"dilation", repf.dilation},
                              {"floor", o.falsify_floor},
                              {"triggered", triggered}};
          pass = pass && triggered;
        }
        rep["pass"] = pass;
        print_report(rep);
        if (!pass) exit_code = kExitTolerance;
      });
    }

    // ---- verify cs ---------------------------------------------------------
    auto* cmd_cs = cmd_verify->add_subcommand("cs", "Calogero-Sutherland spectrum via the gauge map");
    {
      auto& b = bind(cmd_cs, "verify.cs");
      struct {
        int n = 2;
        double kappa = 4.0;
        double tol_e = 1e-5;
        double tol_conj = 1e-4;
        double tol_slope = 1e-3;
        int configs = 3;
        double jitter = 0.05;
        std::uint64_t seed = 2026;
        double fd_step = 1e-3;
        int fd_order = 4;
        int fd_levels = 2;
        std::string etas = "0,0.5,1";
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--n", o.n, "number of boundary points");
      b.add("--kappa", o.kappa, "SLE parameter kappa > 0");
      b.add("--tol-e", o.tol_e, "eigenvalue tolerance |E - E(h)|");
      b.add("--tol-conj", o.tol_conj, "conjugation-identity residual tolerance");
      b.add("--tol-slope", o.tol_slope, "tolerance on the fitted slope against -n/kappa");
      b.add("--configs", o.configs, "number of pooled chamber configurations");
      b.add("--jitter", o.jitter, "configuration jitter as a fraction of the mean gap");
      CLI::Option* seed_opt = b.add("--seed", o.seed, "jitter seed (RADIAL_SLE_SEED fallback)");
      b.add("--fd-step", o.fd_step, "finite-difference step");
      b.add("--fd-order", o.fd_order, "stencil order (2 or 4)");
      b.add("--fd-levels", o.fd_levels, "Richardson extrapolation levels");
      b.add("--etas", o.etas, "spin values whose states feed the E(h) slope fit");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_cs->callback([&binder, seed_opt, &exit_code]() {
        binder.check_unknown();
        o.seed = resolve_seed(o.seed, seed_opt->count() > 0 || binder.from_config("seed"));
        write_manifest(o.manifest, "verify.cs", binder.resolved());
        const auto configs = jittered_configs(o.n, o.configs, o.jitter, o.seed);
        const radsle::FiniteDiffScheme scheme{o.fd_step, o.fd_order, o.fd_levels};
        const double kappa = o.kappa;
        const radsle::PsiFn psi = [kappa](const std::vector<double>& th) {
          return radsle::fermionic_ground(th, kappa);
        };
        const double h0 = radsle::family_h(radsle::Family::GroundJ, o.n, 0, kappa);
        const radsle::CSEigenReport eig = radsle::cs_eigencheck(psi, kappa, h0, configs, scheme);
        const radsle::OperatorResidual conj_p =
            radsle::conjugation_identity_check(kappa, +1, configs, scheme);
        const radsle::OperatorResidual conj_m =
            radsle::conjugation_identity_check(kappa, -1, configs, scheme);

        json rep;
        rep["schema_id"] = "radsle.verify.v1";
        rep["check"] = "cs";
        rep["n"] = o.n;
        rep["kappa"] = kappa;
        rep["h"] = h0;
        rep["energy_measured"] = eig.measured.value;
        rep["energy_theory"] = eig.theory;
        rep["energy_mismatch"] = eig.mismatch;
        rep["energy_mismatch_other_sign"] = eig.mismatch_other;
        rep["resolved_sign"] = eig.resolved_sign;
        rep["conjugation_residual_plus"] = conj_p.max_residual;
        rep["conjugation_residual_minus"] = conj_m.max_residual;
        bool pass = eig.resolved_sign == radsle::kResolvedCsGaugeSign &&
                    eig.mismatch <= o.tol_e && conj_p.max_residual <= o.tol_conj &&
                    (o.n < 2 || conj_m.max_residual > 1e-2);

        const std::vector<double> etas = parse_csv_doubles(o.etas, "--etas");
        if (etas.size() >= 2) {
          std::vector<std::pair<radsle::PsiFn, double>> states;
          for (double eta : etas) {
            const radsle::ScreeningSpec spec =
                build_spec("spin", o.n, 0, kappa, eta, 0.5, "", 1e-9, 1e-10);
            states.emplace_back(
                [spec](const std::vector<double>& th) { return radsle::eval_psi(spec, th); },
                radsle::family_h(radsle::Family::SpinJ, o.n, 0, kappa, eta));
          }
          const radsle::SlopeReport sl = radsle::cs_slope_regression(states, kappa, configs, scheme);
          const double slope_expected = -o.n / kappa;
          const double intercept_expected = o.n * (o.n * o.n - 1.0) / (6.0 * kappa * kappa);
          rep["slope"] = {{"measured", sl.slope},
                          {"expected", slope_expected},
                          {"intercept_measured", sl.intercept},
                          {"intercept_expected", intercept_expected},
                          {"points", sl.points}};
          pass = pass && std::fabs(sl.slope - slope_expected) <= o.tol_slope;
        }
        rep["pass"] = pass;
        print_report(rep);
        if (!pass) exit_code = kExitTolerance;
      });
    }

    // ---- verify commutators -------------------------------------------------
    auto* cmd_comm = cmd_verify->add_subcommand("commutators", "operator and generator commutation");
    {
      auto& b = bind(cmd_comm, "verify.commutators");
      struct {
        int n = 3;
        double kappa = 4.0;
        double inner_step = 1e-2;
        int fd_order = 4;
        int fd_levels = 2;
        double tol_op = 1e-4;
        double tol_gen = 1e-3;
        int configs = 2;
        double jitter = 0.05;
        std::uint64_t seed = 2026;
        bool no_control = false;
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--n", o.n, "number of boundary points");
      b.add("--kappa", o.kappa, "SLE parameter kappa > 0");
      b.add("--inner-step", o.inner_step, "inner finite-difference step");
      b.add("--fd-order", o.fd_order, "inner stencil order (2 or 4)");
      b.add("--fd-levels", o.fd_levels, "inner Richardson levels");
      b.add("--tol-op", o.tol_op, "tolerance for [L_j, L_k] on smooth functions");
      b.add("--tol-gen", o.tol_gen, "tolerance for [M_i, M_j] with on-shell drifts");
      b.add("--configs", o.configs, "number of chamber configurations");
      b.add("--jitter", o.jitter, "configuration jitter as a fraction of the mean gap");
      CLI::Option* seed_opt = b.add("--seed", o.seed, "jitter seed (RADIAL_SLE_SEED fallback)");
      b.add_flag("--no-control", o.no_control, "skip the zero-drift negative control");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_comm->callback([&binder, seed_opt, &exit_code]() {
        binder.check_unknown();
        o.seed = resolve_seed(o.seed, seed_opt->count() > 0 || binder.from_config("seed"));
        write_manifest(o.manifest, "verify.commutators", binder.resolved());
        const auto configs = jittered_configs(o.n, o.configs, o.jitter, o.seed);
        const radsle::FiniteDiffScheme inner{o.inner_step, o.fd_order, o.fd_levels};
        const double kappa = o.kappa;
        const radsle::PsiFn psi = [kappa](const std::vector<double>& th) {
          return radsle::fermionic_ground(th, kappa);
        };
        const auto funcs = radsle::default_test_functions();
        double op_worst = 0.0;
        json op_list = json::array();
        for (std::size_t i = 0; i < funcs.size() && i < 2; ++i) {
          const auto value = funcs[i].value;
          const radsle::PsiFn F = [value](const std::vector<double>& th) {
            return radsle::cplx(value(th), 0.0);
          };
          const auto r = radsle::commutator_check_nullvec(F, kappa, configs, inner);
          op_list.push_back(r.max_residual);
          op_worst = std::max(op_worst, r.max_residual);
        }
        const auto r_psi = radsle::commutator_check_nullvec(psi, kappa, configs, inner);
        op_list.push_back(r_psi.max_residual);
        op_worst = std::max(op_worst, r_psi.max_residual);
        const auto gen = radsle::commutator_check_generators(psi, kappa, configs, inner);
        bool pass = op_worst <= o.tol_op && gen.max_residual <= o.tol_gen;
        json rep;
        rep["schema_id"] = "radsle.verify.v1";
        rep["check"] = "commutators";
        rep["n"] = o.n;
        rep["kappa"] = kappa;
        rep["operator_residuals"] = op_list;
        rep["operator_worst"] = op_worst;
        rep["generator_residual"] = gen.max_residual;
        rep["tol_op"] = o.tol_op;
        rep["tol_gen"] = o.tol_gen;
        if (!o.no_control) {
          const auto ctl = radsle::commutator_check_generators(psi, kappa, configs, inner, true);
          const bool at_six = std::fabs(kappa - 6.0) < 1e-9;
          const bool ctl_ok = at_six ? ctl.max_residual <= o.tol_gen : ctl.max_residual > 1e-2;
          rep["zero_drift_control"] = {{"residual", ctl.max_residual},
                                       {"expected", at_six ? "pass (kappa = 6)" : "fail"},
                                       {"ok", ctl_ok}};
          pass = pass && ctl_ok;
        }
        rep["pass"] = pass;
        print_report(rep);
        if (!pass) exit_code = kExitTolerance;
      });
    }

    // =======================================================================
    // simulate
    // =======================================================================
    auto* cmd_sim = app.add_subcommand("simulate", "multiple radial Loewner chains");
    {
      auto& b = bind(cmd_sim, "simulate");
      struct {
        int n = 1;
        double kappa = 2.0;
        std::string theta0;
        std::string nu;
        std::string labels;
        double T = 1.0;
        double dt = 1e-3;
        std::uint64_t seed = 0;
        std::string mode = "closed_form_fermionic";
        std::string family = "ground";
        int m = 0;
        double eta = 0.0;
        double excited_radius = 0.5;
        std::string pattern;
        double fd_step = 2e-2;
        int fd_order = 4;
        int fd_levels = 2;
        std::string marked;
        std::string rho;
        std::string rho_convention = "direct";
        double collision_eps = 1e-3;
        double blowup_guard = 1e8;
        double proxy_y = 10.0;
        double tip_offset = 1e-4;
        int stride = 10;
        bool no_tips = false;
        bool no_log_cr = false;
        std::string out = "trace";
        int ensemble = 1;
        int jobs = 1;
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--n", o.n, "number of curves");
      b.add("--kappa", o.kappa, "SLE parameter kappa >= 0");
      b.add("--theta0", o.theta0, "initial angles CSV (default: equispaced)");
      b.add("--nu", o.nu, "capacity speeds CSV (default: all ones)");
      b.add("--labels", o.labels, "per-curve noise labels CSV (default: 0..n-1)");
      b.add("--T", o.T, "time horizon");
      b.add("--dt", o.dt, "Euler-Maruyama step");
      CLI::Option* seed_opt = b.add("--seed", o.seed, "master seed (RADIAL_SLE_SEED fallback)");
      b.add("--drift-mode", o.mode,
            "closed_form_fermionic | numeric_psi | rational | sle_kappa_rho | kappa_zero");
      b.add("--family", o.family, "numeric_psi: screening family");
      b.add("--m", o.m, "numeric_psi: screening integrals");
      b.add("--eta", o.eta, "numeric_psi: spin family interior spin");
      b.add("--excited-radius", o.excited_radius, "numeric_psi: excited w-circle radius");
      b.add("--pattern", o.pattern, "numeric_psi: link pattern in canonical text");
      b.add("--fd-step", o.fd_step, "numeric_psi: finite-difference step for d_j log psi");
      b.add("--fd-order", o.fd_order, "numeric_psi: stencil order (2 or 4)");
      b.add("--fd-levels", o.fd_levels, "numeric_psi: Richardson levels");
      b.add("--marked", o.marked, "marked points as angle:sigma,angle:sigma");
      b.add("--rho", o.rho, "sle_kappa_rho: rho values CSV, one per marked point");
      b.add("--rho-convention", o.rho_convention,
            "direct (rho multiplies cot((theta-q)/2) as given) | halved (rho/2 multiplies it)");
      b.add("--collision-eps", o.collision_eps, "halt when a circular gap falls below this");
      b.add("--blowup-guard", o.blowup_guard, "halt when |drift| exceeds this");
      b.add("--proxy-y", o.proxy_y, "height Y of the capacity proxy point iY");
      b.add("--tip-offset", o.tip_offset, "offset delta of the backward tip start");
      b.add("--stride", o.stride, "record tips / log CR every stride-th step");
      b.add_flag("--no-tips", o.no_tips, "skip backward tip tracing");
      b.add_flag("--no-log-cr", o.no_log_cr, "skip the capacity diagnostic");
      b.add("--out", o.out, "output prefix (PREFIX.csv, PREFIX.diag.json; _k with --ensemble)");
      b.add("--ensemble", o.ensemble, "number of independent trajectories");
      b.add("--jobs", o.jobs, "worker threads for ensembles (output order is deterministic)");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_sim->callback([&binder, seed_opt, &exit_code]() {
        binder.check_unknown();
        o.seed = resolve_seed(o.seed, seed_opt->count() > 0 || binder.from_config("seed"));
        if (o.ensemble < 1) throw CLI::ValidationError("--ensemble must be >= 1");
        if (o.jobs < 1) throw CLI::ValidationError("--jobs must be >= 1");

        radsle::SimConfig cfg;
        cfg.kappa = o.kappa;
        cfg.t_end = o.T;
        cfg.dt = o.dt;
        cfg.mode = radsle::drift_mode_from_name(o.mode);
        cfg.theta0 = parse_csv_doubles(o.theta0, "--theta0");
        if (cfg.theta0.empty()) {
          for (int j = 0; j < o.n; ++j) cfg.theta0.push_back(radsle::kTwoPi * j / o.n);
          o.theta0 = join_doubles(cfg.theta0);
        }
        if (static_cast<int>(cfg.theta0.size()) != o.n)
          throw CLI::ValidationError("--theta0 must list exactly n angles");
        cfg.nu = parse_csv_doubles(o.nu, "--nu");
        if (cfg.nu.empty()) {
          cfg.nu.assign(o.n, 1.0);
          o.nu = join_doubles(cfg.nu);
        }
        cfg.labels = parse_csv_ints(o.labels, "--labels");
        if (cfg.labels.empty()) {
          for (int j = 0; j < o.n; ++j) cfg.labels.push_back(j);
          o.labels = join_ints(cfg.labels);
        }
        cfg.marked = parse_marked(o.marked);
        cfg.rho = parse_csv_doubles(o.rho, "--rho");
        if (o.rho_convention == "halved") {
          for (double& r : cfg.rho) r /= 2.0;
        } else if (o.rho_convention != "direct") {
          throw CLI::ValidationError("--rho-convention must be direct or halved");
        }
        cfg.collision_eps = o.collision_eps;
        cfg.blowup_guard = o.blowup_guard;
        cfg.proxy_y = o.proxy_y;
        cfg.tip_offset = o.tip_offset;
        cfg.sample_stride = o.stride;
        cfg.want_tips = !o.no_tips;
        cfg.want_log_cr = !o.no_log_cr;
        cfg.psi_scheme = radsle::FiniteDiffScheme{o.fd_step, o.fd_order, o.fd_levels};

        const bool numeric = cfg.mode == radsle::DriftMode::NumericPsi;
        radsle::ScreeningSpec spec;
        if (numeric)
          spec = build_spec(o.family, o.n, o.m, o.kappa, o.eta, o.excited_radius, o.pattern,
                            1e-9, 1e-10);

        write_manifest(o.manifest, "simulate", binder.resolved());

        // Per-trajectory seeds; output files are written in index order below.
        constexpr std::uint64_t kEnsembleSalt = 0x454E534DULL;
        std::vector<radsle::SimResult> results(o.ensemble);
        std::vector<std::string> errors(o.ensemble);
        std::vector<int> error_kind(o.ensemble, 0);
        std::atomic<int> next{0};
        auto worker = [&]() {
          for (;;) {
            const int k = next.fetch_add(1);
            if (k >= o.ensemble) return;
            try {
              radsle::SimConfig ck = cfg;
              ck.seed = o.ensemble == 1
                            ? o.seed
                            : radsle::derive_stream_seed(o.seed,
                                                         kEnsembleSalt + static_cast<std::uint64_t>(k));
              if (numeric) ck.psi = radsle::adaptive_screening_psi(spec, 2.0 * o.fd_step);
              results[k] = radsle::run_simulation(ck);
            } catch (const std::domain_error& e) {
              errors[k] = e.what();
              error_kind[k] = kExitValidation;
            } catch (const std::invalid_argument& e) {
              errors[k] = e.what();
              error_kind[k] = kExitValidation;
            } catch (const std::exception& e) {
              errors[k] = e.what();
              error_kind[k] = kExitRuntime;
            }
          }
        };
        const int workers = std::min(o.jobs, o.ensemble);
        if (workers <= 1) {
          worker();
        } else {
          std::vector<std::thread> pool;
          for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
          for (auto& t : pool) t.join();
        }

        bool any_blowup = false;
        for (int k = 0; k < o.ensemble; ++k) {
          if (!errors[k].empty()) {
            std::cerr << "error: trajectory " << k << ": " << errors[k] << "\n";
            exit_code = std::max(exit_code, error_kind[k]);
            continue;
          }
          const radsle::SimResult& res = results[k];
          const std::string tag = o.ensemble == 1 ? o.out : o.out + "_" + std::to_string(k);
          const std::string csv_path = tag + ".csv";
          const std::string diag_path = tag + ".diag.json";

          std::string csv = "t,curve_id,re_tip,im_tip,theta\n";
          char line[256];
          std::size_t fi = 0;
          int missing = 0;
          for (std::size_t s = 0; s < res.sample_times.size(); ++s) {
            while (fi + 1 < res.times.size() && res.times[fi] < res.sample_times[s] - 1e-12) ++fi;
            for (std::size_t j = 0; j < res.theta[fi].size(); ++j) {
              double re = std::nan(""), im = std::nan("");
              if (s < res.tips.size() && j < res.tips[s].size()) {
                re = res.tips[s][j].real();
                im = res.tips[s][j].imag();
                if (std::isnan(re)) ++missing;
              }
              std::snprintf(line, sizeof(line), "%.17g,%d,%.17g,%.17g,%.17g\n",
                            res.sample_times[s], res.labels[j], re, im, res.theta[fi][j]);
              csv += line;
            }
          }
          write_text_file(csv_path, csv);

          json diag;
          diag["schema_id"] = "radsle.trace.v1";
          diag["library_version"] = radsle::kLibraryVersion;
          diag["trajectory"] = k;
          diag["seed"] = o.ensemble == 1
                             ? o.seed
                             : radsle::derive_stream_seed(o.seed,
                                                          kEnsembleSalt + static_cast<std::uint64_t>(k));
          diag["n"] = o.n;
          diag["kappa"] = o.kappa;
          diag["drift_mode"] = o.mode;
          diag["labels"] = res.labels;
          diag["halt_reason"] = res.halt_reason;
          diag["t_halt"] = res.t_halt;
          diag["steps"] = res.steps;
          diag["rng_draws"] = res.rng_draws;
          diag["missing_tips"] = missing;
          diag["final_theta"] = res.theta.back();
          if (!res.log_cr.empty()) {
            diag["capacity"] = {{"t", res.sample_times}, {"log_cr", res.log_cr}};
            double nu_total = 0.0;
            for (double v : cfg.nu) nu_total += v;
            if (res.log_cr.size() >= 2) {
              const auto fit = radsle::fit_line(res.sample_times, res.log_cr);
              diag["capacity_slope"] = fit.slope;
              diag["capacity_slope_expected"] = -nu_total;
            }
          }
          write_text_file(diag_path, diag.dump(2) + "\n");

          std::cout << "trajectory " << k << ": halt=" << res.halt_reason
                    << " t_halt=" << format_double(res.t_halt) << " steps=" << res.steps
                    << " draws=" << res.rng_draws << " files=" << csv_path << "," << diag_path
                    << "\n";
          if (res.halt_reason == "blowup") any_blowup = true;
        }
        if (any_blowup) exit_code = std::max(exit_code, kExitRuntime);
      });
    }

    // =======================================================================
    // calibrate
    // =======================================================================
    auto* cmd_cal = app.add_subcommand("calibrate", "machinery self-checks (exit 3 on failure)");
    cmd_cal->require_subcommand(1);

    auto* cmd_poch = cmd_cal->add_subcommand("pochhammer",
                                             "double-loop Beta identity and endpoint reduction");
    {
      auto& b = bind(cmd_poch, "calibrate.pochhammer");
      struct {
        int pairs = 10;
        std::uint64_t seed = 2026;
        double tol = 1e-8;
        double quad_abs = 1e-9;
        double quad_rel = 1e-10;
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--pairs", o.pairs, "number of random exponent pairs for the dual-method check");
      CLI::Option* seed_opt = b.add("--seed", o.seed, "sampling seed (RADIAL_SLE_SEED fallback)");
      b.add("--tol", o.tol, "relative tolerance of the Beta(1/2,1/2) oracle");
      b.add("--quad-abs-tol", o.quad_abs, "quadrature absolute tolerance");
      b.add("--quad-rel-tol", o.quad_rel, "quadrature relative tolerance");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_poch->callback([&binder, seed_opt, &exit_code]() {
        binder.check_unknown();
        o.seed = resolve_seed(o.seed, seed_opt->count() > 0 || binder.from_config("seed"));
        write_manifest(o.manifest, "calibrate.pochhammer", binder.resolved());

        // Beta(1/2,1/2) oracle: the double loop around [0,1] with exponents
        // alpha = beta = -1/2 equals 4 pi after rotating the (z-1)^beta branch
        // onto the classical (1-t)^beta one.
        const radsle::cplx ab(-0.5, 0.0);
        const radsle::QuadResult P0 = beta_pochhammer(ab, ab, o.quad_abs, o.quad_rel);
        const radsle::cplx classical =
            P0.value * std::exp(radsle::cplx(0.0, -radsle::kPi) * ab);
        const double target = 4.0 * radsle::kPi;
        const double rel_err = std::abs(classical - target) / target;
        bool pass = rel_err <= o.tol;

        json rep;
        rep["schema_id"] = "radsle.calibrate.v1";
        rep["check"] = "pochhammer";
        rep["beta_half"] = {{"value_re", classical.real()},
                            {"value_im", classical.imag()},
                            {"target", target},
                            {"rel_err", rel_err},
                            {"abs_error_estimate", P0.abs_error},
                            {"pass", rel_err <= o.tol}};

        // Dual method: the same integral over the reduced interval with the
        // endpoint prefactor must agree within the combined error estimates.
        radsle::GaussianStream stream(radsle::derive_stream_seed(o.seed, 0xBE7AULL));
        json rows = json::array();
        for (int i = 0; i < o.pairs; ++i) {
          auto draw = [&stream]() {
            for (;;) {
              const double re = -0.85 + 2.0 * stream.uniform();
              const double im = -0.35 + 0.7 * stream.uniform();
              if (std::fabs(re - std::round(re)) < 0.08 && std::fabs(im) < 0.08) continue;
              return radsle::cplx(re, im);
            }
          };
          const radsle::cplx alpha = draw(), beta = draw();
          const radsle::QuadResult P = beta_pochhammer(alpha, beta, o.quad_abs, o.quad_rel);
          const radsle::QuadResult R = beta_reduced(alpha, beta, o.quad_abs, o.quad_rel);
          const double diff = std::abs(P.value - R.value);
          const double budget = 12.0 * (P.abs_error + R.abs_error) +
                                1e-12 * (std::abs(P.value) + std::abs(R.value)) + 1e-14;
          const bool ok = diff <= budget;
          pass = pass && ok;
          rows.push_back({{"alpha_re", alpha.real()},
                          {"alpha_im", alpha.imag()},
                          {"beta_re", beta.real()},
                          {"beta_im", beta.imag()},
                          {"pochhammer_re", P.value.real()},
                          {"pochhammer_im", P.value.imag()},
                          {"reduced_re", R.value.real()},
                          {"reduced_im", R.value.imag()},
                          {"diff", diff},
                          {"budget", budget},
                          {"pass", ok}});
        }
        rep["dual_method"] = rows;
        rep["pass"] = pass;
        print_report(rep);
        if (!pass) exit_code = kExitTolerance;
      });
    }

    auto* cmd_fdo = cmd_cal->add_subcommand("fd-order", "stencil convergence orders by step halving");
    {
      auto& b = bind(cmd_fdo, "calibrate.fd-order");
      struct {
        double step = 0.05;
        std::string manifest = "radsle_manifest.json";
      } static o;
      b.add("--step", o.step, "base finite-difference step h");
      b.add("--manifest", o.manifest, "manifest output path");
      auto& binder = b;
      cmd_fdo->callback([&binder, &exit_code]() {
        binder.check_unknown();
        if (!(o.step > 0.0 && o.step < 0.5)) throw CLI::ValidationError("--step must lie in (0, 0.5)");
        write_manifest(o.manifest, "calibrate.fd-order", binder.resolved());
        const radsle::PsiFn f = [](const std::vector<double>& th) {
          return radsle::cplx(std::exp(std::sin(th[0])), 0.0);
        };
        const double x0 = 0.7;
        const double exact = std::cos(x0) * std::exp(std::sin(x0));
        auto err = [&](double h, int order, int levels) {
          const radsle::cplx d = radsle::fd_partial(f, {x0}, 0, {h, order, levels});
          return std::abs(d.real() - exact);
        };
        const double e2a = err(o.step, 2, 1), e2b = err(o.step / 2.0, 2, 1);
        const double e4a = err(o.step, 4, 1), e4b = err(o.step / 2.0, 4, 1);
        const double r2 = e2a / e2b, r4 = e4a / e4b;
        const double rich = err(o.step, 4, 3);
        const bool pass = std::fabs(std::log2(r2) - 2.0) < 0.8 &&
                          std::fabs(std::log2(r4) - 4.0) < 1.0 && rich < e4a;
        json rep;
        rep["schema_id"] = "radsle.calibrate.v1";
        rep["check"] = "fd-order";
        rep["step"] = o.step;
        rep["order2"] = {{"err_h", e2a}, {"err_h2", e2b}, {"ratio", r2}, {"expected", 4.0}};
        rep["order4"] = {{"err_h", e4a}, {"err_h2", e4b}, {"ratio", r4}, {"expected", 16.0}};
        rep["richardson"] = {{"err", rich}, {"gain_over_raw", e4a / std::max(rich, 1e-300)}};
        rep["pass"] = pass;
        print_report(rep);
        if (!pass) exit_code = kExitTolerance;
      });
    }

    // ---- parse & dispatch ---------------------------------------------------
    try {
      std::reverse(args.begin(), args.end());
      app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? kExitOk : kExitValidation;
    }
    return exit_code;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.msg << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
