#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "confbend/analytic.hpp"
#include "confbend/nfld.hpp"
#include "confbend/verify.hpp"

#ifndef CONFBEND_VERSION
#define CONFBEND_VERSION "0.0.0"
#endif

using namespace confbend;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kSchema = 2, kNumeric = 3, kViolation = 4 };

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a run completes but an asserted check fails; carries the witness.
struct CheckViolation : std::runtime_error {
  CheckViolation(const std::string& what, json witness) : std::runtime_error(what), witness(std::move(witness)) {}
  json witness;
};

// Wraps a JSON object and rejects keys that nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_ + ": expected an object");
  }
  ~Section() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return as<T>(j_.at(key), path_ + "." + key);
  }

  template <typename T>
  T require(const std::string& key) {
    if (!has(key)) throw SchemaError(path_ + "." + key + ": required");
    return as<T>(j_.at(key), path_ + "." + key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Section sub(const std::string& key) { return Section(raw(key), path_ + "." + key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw SchemaError(path_ + "." + it.key() + ": unknown key");
  }

  template <typename T>
  static T as(const json& v, const std::string& where) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw SchemaError(where + ": expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw SchemaError(where + ": expected an integer");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw SchemaError(where + ": expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw SchemaError(where + ": expected a string");
      }
      return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + ": " + e.what());
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Expr parse_expr(const std::string& text, const std::string& where) {
  try {
    return Expr::parse(text);
  } catch (const std::exception& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 8) throw std::invalid_argument("");
      out.push_back(v);
    } catch (const std::exception&) {
      throw SchemaError("--grid: '" + item + "' is not a grid size >= 8");
    }
  }
  if (out.empty()) throw SchemaError("--grid: empty list");
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

struct Options {
  std::string config;
  std::string grid;
  std::string out;
  bool deterministic = false;
  std::optional<std::uint64_t> rng_seed;
  int n = 0;
  int k = 0;
  std::string suite;
  long samples = 0;
  bool sweep = false;
};

// Fully parsed job; every field carries its effective value so the echo
// reproduces the run.
struct Job {
  std::string command;
  json effective = json::object();
  std::uint64_t rng_seed = 1;
  bool deterministic = true;
  std::string out;

  Grid grid;
  std::vector<int> verify_sizes;
  int k = 0;
  int n = 0;
  int alpha = -1;
  double tau = 0.0;
  long theta_budget = 200000;

  BackgroundSpec background;
  std::optional<BackgroundSearch> search;

  std::string A_kind = "schouten";
  std::vector<Expr> A_entries;
  Vec bump_p0;
  double bump_radius = 2.6;
  double bump_amplitude = 1.0;

  std::string psi_kind = "constant";
  double psi_value = 1.0;
  Expr psi_expr;
  Expr u_star;
  std::string psi_path;

  SeedConfig seed_cfg;
  std::string seed_flow = "none";
  double flow_time = 2.0;
  std::string seed_path;

  SolverConfig solver;
  std::string suite;
  long samples = 0;
};

json expr_list(const std::vector<Expr>& v) {
  json a = json::array();
  for (const auto& e : v) a.push_back(e.str());
  return a;
}

void parse_grid(Job& job, Section& root, const Options& opt) {
  std::vector<int> sizes{16, 16, 16};
  std::vector<double> periods;
  if (root.has("grid")) {
    Section g = root.sub("grid");
    sizes = g.get<std::vector<int>>("sizes", sizes);
    periods = g.get<std::vector<double>>("periods", periods);
    g.finish();
  }
  if (!opt.grid.empty()) sizes = parse_sizes(opt.grid);
  if (job.command == "verify") {
    job.verify_sizes = sizes;
    job.effective["grid"] = {{"sizes", sizes}};
    return;
  }
  if (sizes.size() < 3 || sizes.size() > static_cast<std::size_t>(kMaxDim))
    throw SchemaError("grid.sizes: dimension must be between 3 and " + std::to_string(kMaxDim));
  if (periods.empty()) periods.assign(sizes.size(), 2.0 * std::numbers::pi);
  try {
    job.grid = Grid(sizes, periods);
  } catch (const std::exception& e) {
    throw SchemaError(std::string("grid: ") + e.what());
  }
  job.effective["grid"] = {{"sizes", job.grid.sizes()}, {"periods", job.grid.periods()}};
}

void parse_params(Job& job, Section& root, const Options& opt) {
  job.n = job.grid.dim();
  if (root.has("params")) {
    Section p = root.sub("params");
    job.n = p.get<int>("n", job.n);
    job.k = p.get<int>("k", job.k);
    job.alpha = p.get<int>("alpha", job.alpha);
    job.tau = p.get<double>("tau", job.tau);
    job.theta_budget = p.get<long>("theta_budget", job.theta_budget);
    p.finish();
  }
  if (opt.n) job.n = opt.n;
  if (opt.k) job.k = opt.k;
  if (job.command == "cones" && job.n == 0) throw SchemaError("cones: --n is required");
  if (job.k == 0) job.k = job.n;
  if (job.n < 3 || job.n > kMaxDim) throw SchemaError("params.n: must be between 3 and " + std::to_string(kMaxDim));
  if (job.k < 1 || job.k > job.n) throw SchemaError("params.k: must satisfy 1 <= k <= n");
  if (job.alpha != 1 && job.alpha != -1) throw SchemaError("params.alpha: must be 1 or -1");
  if (!std::isfinite(job.tau)) throw SchemaError("params.tau: must be finite");
  if (job.theta_budget < 100) throw SchemaError("params.theta_budget: must be at least 100");
  job.effective["params"] = {
      {"n", job.n}, {"k", job.k}, {"alpha", job.alpha}, {"tau", job.tau}, {"theta_budget", job.theta_budget}};
}

void parse_background(Job& job, Section& root) {
  BackgroundSpec& b = job.background;
  b.grid = job.grid;
  json eff = {{"kind", "flat"}};
  if (root.has("background")) {
    Section s = root.sub("background");
    const std::string kind = s.get<std::string>("kind", "flat");
    b.order = s.get<int>("order", 2);
    if (b.order != 2 && b.order != 4) throw SchemaError("background.order: must be 2 or 4");
    eff = {{"kind", kind}, {"order", b.order}};
    if (kind == "flat") {
      b.kind = BackgroundKind::flat;
    } else if (kind == "conformally_flat") {
      b.kind = BackgroundKind::conformally_flat;
      b.phi = parse_expr(s.require<std::string>("phi"), "background.phi");
      eff["phi"] = b.phi.str();
    } else if (kind == "warped") {
      if (job.grid.dim() != 3) throw SchemaError("background: the warped family needs n = 3");
      b.kind = BackgroundKind::warped;
      b.K = s.get<double>("K", b.K);
      if (s.has("f") != s.has("h")) throw SchemaError("background: give both f and h or neither");
      if (s.has("f")) {
        b.f_gen = parse_expr(s.require<std::string>("f"), "background.f");
        b.h_gen = parse_expr(s.require<std::string>("h"), "background.h");
        eff["f"] = b.f_gen->str();
        eff["h"] = b.h_gen->str();
      } else {
        eff["K"] = b.K;
      }
    } else if (kind == "custom") {
      b.kind = BackgroundKind::custom;
      b.path = fs::absolute(s.require<std::string>("path")).string();
      if (!fs::exists(b.path)) throw SchemaError("background.path: no such file " + b.path);
      eff["path"] = b.path;
    } else {
      throw SchemaError("background.kind: unknown kind '" + kind + "'");
    }
    if (s.has("search")) {
      if (b.kind != BackgroundKind::warped) throw SchemaError("background.search: only the warped family is searchable");
      Section q = s.sub("search");
      const double lo = q.get<double>("K_min", 2.0 * std::sqrt(2.0));
      const double hi = q.get<double>("K_max", 6.0);
      const int count = q.get<int>("K_count", 13);
      const std::string target = q.get<std::string>("target", "strict");
      q.finish();
      if (!(lo > 0.0 && hi >= lo) || count < 1) throw SchemaError("background.search: need 0 < K_min <= K_max, K_count >= 1");
      BackgroundSearch bs;
      bs.grid = job.grid;
      bs.order = b.order;
      for (int i = 0; i < count; ++i) bs.K_values.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
      if (target == "strict")
        bs.target = AdmissibilityClass::strict;
      else if (target == "weak_with_strict_point")
        bs.target = AdmissibilityClass::weak_with_strict_point;
      else
        throw SchemaError("background.search.target: must be strict or weak_with_strict_point");
      job.search = bs;
      eff["search"] = {{"K_min", lo}, {"K_max", hi}, {"K_count", count}, {"target", target}};
    }
    s.finish();
  }
  job.effective["background"] = eff;
}

void parse_A(Job& job, Section& root) {
  json eff = {{"kind", "schouten"}};
  const int n = job.grid.dim();
  if (root.has("A")) {
    Section s = root.sub("A");
    job.A_kind = s.get<std::string>("kind", "schouten");
    eff = {{"kind", job.A_kind}};
    if (job.A_kind == "entries") {
      const auto e = s.require<std::vector<std::string>>("entries");
      if (static_cast<int>(e.size()) != n * (n + 1) / 2)
        throw SchemaError("A.entries: expected n(n+1)/2 upper-triangle entries");
      for (std::size_t i = 0; i < e.size(); ++i)
        job.A_entries.push_back(parse_expr(e[i], "A.entries[" + std::to_string(i) + "]"));
      eff["entries"] = expr_list(job.A_entries);
    } else if (job.A_kind == "bump") {
      const auto p0 = s.get<std::vector<double>>("p0", std::vector<double>(n, std::numbers::pi / 2));
      if (static_cast<int>(p0.size()) != n) throw SchemaError("A.p0: dimension differs from the grid");
      job.bump_p0 = to_vec(p0);
      job.bump_radius = s.get<double>("radius", job.bump_radius);
      job.bump_amplitude = s.get<double>("amplitude", job.bump_amplitude);
      if (!(job.bump_radius > 0.0 && job.bump_amplitude > 0.0))
        throw SchemaError("A: bump radius and amplitude must be positive");
      eff["p0"] = p0;
      eff["radius"] = job.bump_radius;
      eff["amplitude"] = job.bump_amplitude;
    } else if (job.A_kind != "schouten") {
      throw SchemaError("A.kind: must be schouten, entries or bump");
    }
    s.finish();
  }
  job.effective["A"] = eff;
}

void parse_psi(Job& job, Section& root) {
  json eff = {{"kind", "constant"}, {"value", 1.0}};
  if (root.has("psi")) {
    Section s = root.sub("psi");
    job.psi_kind = s.get<std::string>("kind", "constant");
    eff = {{"kind", job.psi_kind}};
    if (job.psi_kind == "constant") {
      job.psi_value = s.get<double>("value", 1.0);
      if (!(job.psi_value > 0.0)) throw SchemaError("psi.value: must be positive");
      eff["value"] = job.psi_value;
    } else if (job.psi_kind == "expr") {
      job.psi_expr = parse_expr(s.require<std::string>("expr"), "psi.expr");
      eff["expr"] = job.psi_expr.str();
    } else if (job.psi_kind == "manufactured") {
      job.u_star = parse_expr(s.require<std::string>("u_star"), "psi.u_star");
      if (job.A_kind != "entries") throw SchemaError("psi: manufactured data needs A.kind = entries");
      if (job.background.kind == BackgroundKind::custom)
        throw SchemaError("psi: manufactured data needs a closed-form background");
      eff["u_star"] = job.u_star.str();
    } else if (job.psi_kind == "file") {
      job.psi_path = fs::absolute(s.require<std::string>("path")).string();
      if (!fs::exists(job.psi_path)) throw SchemaError("psi.path: no such file " + job.psi_path);
      eff["path"] = job.psi_path;
    } else {
      throw SchemaError("psi.kind: must be constant, expr, manufactured or file");
    }
    s.finish();
  }
  job.effective["psi"] = eff;
}

void parse_seed(Job& job, Section& root) {
  const int n = job.grid.dim();
  SeedConfig& c = job.seed_cfg;
  c.p0 = Vec(n);
  for (int i = 0; i < n; ++i) c.p0(i) = job.grid.period(i) / 4.0;
  if (root.has("seed_cfg")) {
    Section s = root.sub("seed_cfg");
    if (s.has("p0")) {
      const auto p0 = s.require<std::vector<double>>("p0");
      if (static_cast<int>(p0.size()) != n) throw SchemaError("seed_cfg.p0: dimension differs from the grid");
      c.p0 = to_vec(p0);
    }
    c.r0 = s.get<double>("r0", c.r0);
    c.N_schedule = s.get<std::vector<double>>("N_schedule", c.N_schedule);
    c.delta = s.get<double>("delta", c.delta);
    c.v_floor = s.get<double>("v_floor", c.v_floor);
    job.seed_flow = s.get<std::string>("flow", job.seed_flow);
    job.flow_time = s.get<double>("flow_time", job.flow_time);
    if (s.has("path")) {
      job.seed_path = fs::absolute(s.require<std::string>("path")).string();
      if (!fs::exists(job.seed_path)) throw SchemaError("seed_cfg.path: no such file " + job.seed_path);
    }
    s.finish();
  }
  if (job.seed_flow != "none" && job.seed_flow != "contraction")
    throw SchemaError("seed_cfg.flow: must be none or contraction");
  if (!(job.flow_time > 0.0)) throw SchemaError("seed_cfg.flow_time: must be positive");
  try {
    c.validate(job.grid);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("seed_cfg: ") + e.what());
  }
  std::vector<double> p0(c.p0.data(), c.p0.data() + n);
  job.effective["seed_cfg"] = {{"p0", p0},       {"r0", c.r0},         {"N_schedule", c.N_schedule},
                               {"delta", c.delta}, {"v_floor", c.v_floor}, {"flow", job.seed_flow},
                               {"flow_time", job.flow_time}};
  if (!job.seed_path.empty()) job.effective["seed_cfg"]["path"] = job.seed_path;
}

void parse_solver(Job& job, Section& root) {
  SolverConfig& c = job.solver;
  if (root.has("solver")) {
    Section s = root.sub("solver");
    c.newton_tol = s.get<double>("newton_tol", c.newton_tol);
    c.max_newton = s.get<int>("max_newton", c.max_newton);
    c.krylov_tol = s.get<double>("krylov_tol", c.krylov_tol);
    c.krylov_restart = s.get<int>("krylov_restart", c.krylov_restart);
    c.krylov_max = s.get<int>("krylov_max", c.krylov_max);
    c.homotopy_steps = s.get<int>("homotopy_steps", c.homotopy_steps);
    c.min_step = s.get<double>("min_step", c.min_step);
    c.guard_margin = s.get<double>("guard_margin", c.guard_margin);
    c.backtrack = s.get<double>("backtrack", c.backtrack);
    c.max_halvings = s.get<int>("max_halvings", c.max_halvings);
    c.decrease = s.get<double>("decrease", c.decrease);
    s.finish();
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("solver: ") + e.what());
  }
  job.effective["solver"] = {{"newton_tol", c.newton_tol},     {"max_newton", c.max_newton},
                             {"krylov_tol", c.krylov_tol},     {"krylov_restart", c.krylov_restart},
                             {"krylov_max", c.krylov_max},     {"homotopy_steps", c.homotopy_steps},
                             {"min_step", c.min_step},         {"guard_margin", c.guard_margin},
                             {"backtrack", c.backtrack},       {"max_halvings", c.max_halvings},
                             {"decrease", c.decrease}};
}

Job parse_job(const std::string& command, const Options& opt) {
  Job job;
  job.command = command;
  json cfg = json::object();
  if (!opt.config.empty()) {
    std::ifstream in(opt.config);
    if (!in) throw SchemaError(opt.config + ": cannot open config");
    try {
      cfg = json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(opt.config + ": " + e.what());
    }
  }
  Section root(cfg, "config");
  if (root.has("command") && root.require<std::string>("command") != command)
    throw SchemaError("config.command does not match the subcommand '" + command + "'");
  job.effective["command"] = command;
  job.rng_seed = root.get<std::uint64_t>("rng_seed", 1);
  if (opt.rng_seed) job.rng_seed = *opt.rng_seed;
  job.deterministic = root.get<bool>("deterministic", true) || opt.deterministic;
  job.effective["rng_seed"] = job.rng_seed;
  job.effective["deterministic"] = job.deterministic;
  if (root.has("paths")) {
    Section p = root.sub("paths");
    job.out = p.get<std::string>("out", "");
    p.finish();
  }
  if (!opt.out.empty()) job.out = opt.out;
  if (!job.out.empty()) {
    job.out = fs::absolute(job.out).string();
    if (fs::exists(job.out) && !fs::is_directory(job.out)) throw SchemaError("--out: " + job.out + " is not a directory");
    job.effective["paths"] = {{"out", job.out}};
  }

  if (command == "verify") {
    job.suite = opt.suite;
    if (root.has("suite") && root.require<std::string>("suite") != job.suite)
      throw SchemaError("config.suite does not match the requested suite '" + job.suite + "'");
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), job.suite) == names.end())
      throw SchemaError("verify: unknown suite '" + job.suite + "'");
    job.samples = root.get<long>("samples", opt.samples);
    if (opt.samples) job.samples = opt.samples;
    if (job.samples < 0) throw SchemaError("--samples: must be non-negative");
    if (opt.sweep && job.suite != "lemma23") throw SchemaError("--sweep: only the lemma23 suite sweeps");
    parse_grid(job, root, opt);
    if (job.suite == "conformal-identity" && job.verify_sizes.size() < 2)
      throw SchemaError("verify conformal-identity: --grid needs at least two sizes, e.g. 16,32");
    job.effective["suite"] = job.suite;
    job.effective["samples"] = job.samples;
    root.finish();
    return job;
  }
  if (command == "cones") {
    if (root.has("grid")) throw SchemaError("config.grid: not used by cones");
    parse_params(job, root, opt);
    root.finish();
    return job;
  }
  parse_grid(job, root, opt);
  parse_params(job, root, opt);
  if (job.n != job.grid.dim()) throw SchemaError("params.n: must equal the grid dimension");
  parse_background(job, root);
  if (command == "seed" || command == "solve") {
    parse_A(job, root);
    parse_psi(job, root);
    parse_seed(job, root);
    if (command == "solve") parse_solver(job, root);
  }
  root.finish();
  return job;
}

EquationParams params_of(const Job& job) {
  const ConeSpec cone = make_cone(job.n, job.k, job.theta_budget, job.rng_seed);
  return validate_params(job.n, job.alpha, job.tau, cone);
}

OperatorContext build_context(const Job& job, const MetricField& g, const EquationParams& params) {
  const Grid& grid = job.grid;
  SymTensorField A;
  if (job.A_kind == "schouten")
    A = reduced_A(g, params);
  else if (job.A_kind == "entries")
    A = sample_sym(grid, job.A_entries);
  else
    A = scalar_multiple(g, bump_field(grid, job.bump_p0, job.bump_radius, job.bump_amplitude));

  ScalarField psi;
  if (job.psi_kind == "constant")
    psi = sample(grid, Expr(job.psi_value));
  else if (job.psi_kind == "expr")
    psi = sample(grid, job.psi_expr);
  else if (job.psi_kind == "file")
    psi = read_field<FieldKind::scalar>(job.psi_path, grid);
  else
    psi = manufactured_psi(grid, AnalyticMetric(grid.dim(), g.generators()), job.A_entries, job.u_star, params);
  return OperatorContext(g, std::move(A), params, std::move(psi));
}

MorsePack build_morse(const Job& job, const MetricField& g) {
  const Grid& grid = job.grid;
  ScalarField v = job.seed_flow == "contraction"
                      ? contract_points(grid, base_morse_expr(grid, job.seed_cfg.v_floor),
                                        ContractionFlow{job.seed_cfg.p0, job.flow_time})
                      : base_morse(grid, job.seed_cfg.v_floor);
  return make_morse_pack(g, std::move(v), job.seed_cfg.p0, job.seed_cfg.r0, job.seed_cfg.v_floor);
}

json seed_failure_json(const SeedFailure& e) {
  json j = to_json(e.report());
  j["worst_point"] = e.worst_point();
  if (e.worst_lambda().size()) j["worst_lambda"] = to_json(e.worst_lambda());
  return j;
}

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  void mark(const std::string& name) {
    const auto now = Clock::now();
    timings_[name] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : timings_) j[k] = v;
    j["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
    return j;
  }

 private:
  Clock::time_point start_ = Clock::now();
  Clock::time_point last_ = start_;
  std::map<std::string, double> timings_;
};

struct Outputs {
  json results = json::object();
  std::vector<std::pair<std::string, std::function<void(const std::string&)>>> files;
};

Outputs run_cones(const Job& job) {
  Outputs o;
  const ConeSpec cone = make_cone(job.n, job.k, job.theta_budget, job.rng_seed);
  o.results["cone"] = to_json(cone);
  const EquationParams p = check_params(job.n, job.alpha, job.tau, cone);
  o.results["params"] = to_json(p);
  return o;
}

Outputs run_background(const Job& job) {
  Outputs o;
  const EquationParams params = params_of(job);
  MetricField g;
  if (job.search) {
    try {
      BackgroundMatch m = find_admissible_background(params, *job.search);
      json scan = json::array();
      for (const auto& s : m.scan) scan.push_back({{"K", s.K}, {"classification", to_json(s.cls)}});
      o.results["search"] = {{"K", m.K}, {"scan", scan}};
      g = std::move(m.g);
    } catch (const BackgroundSearchFailure& e) {
      json scan = json::array();
      for (const auto& s : e.scan()) scan.push_back({{"K", s.K}, {"classification", to_json(s.cls)}});
      throw CheckViolation(e.what(), {{"scan", scan}});
    }
  } else {
    g = make_background(job.background);
  }
  const CurvaturePack curv = curvature(g);
  o.results["params"] = to_json(params);
  o.results["classification"] = to_json(classify(g, params));
  o.results["curvature"] = curvature_summary(g, curv);
  o.files.emplace_back("metric.nfld", [g](const std::string& p) { write_field(p, g.tensor()); });
  return o;
}

Outputs run_curvature(const Job& job) {
  Outputs o;
  const MetricField g = make_background(job.background);
  const CurvaturePack curv = curvature(g);
  o.results["curvature"] = curvature_summary(g, curv);
  SymTensorField A = modified_schouten(g, curv, job.tau, job.alpha);
  o.results["schouten"] = {{"tau", job.tau}, {"alpha", job.alpha}};
  o.files.emplace_back("metric.nfld", [g](const std::string& p) { write_field(p, g.tensor()); });
  o.files.emplace_back("ricci.nfld", [r = curv.ricci](const std::string& p) { write_field(p, r); });
  o.files.emplace_back("scalar.nfld", [s = curv.scalar](const std::string& p) { write_field(p, s); });
  o.files.emplace_back("schouten.nfld", [A](const std::string& p) { write_field(p, A); });
  return o;
}

Outputs run_seed(const Job& job) {
  Outputs o;
  const EquationParams params = params_of(job);
  const MetricField g = make_background(job.background);
  const OperatorContext ctx = build_context(job, g, params);
  const MorsePack morse = build_morse(job, g);
  o.results["params"] = to_json(params);
  try {
    SeedResult s = seed(ctx, job.seed_cfg, morse);
    o.results["seed"] = to_json(s.report);
    o.results["seed"]["m0_point"] = morse.m0_point;
    if (!s.report.key_vector_in_cone)
      throw CheckViolation("seed: key vector left the cone", {{"key_vector", to_json(s.report.key_vector)}});
    o.files.emplace_back("seed.nfld", [u = std::move(s.u)](const std::string& p) { write_field(p, u); });
  } catch (const SeedFailure& e) {
    throw CheckViolation(e.what(), seed_failure_json(e));
  }
  return o;
}

Outputs run_solve(const Job& job) {
  Outputs o;
  const EquationParams params = params_of(job);
  const MetricField g = make_background(job.background);
  const OperatorContext ctx = build_context(job, g, params);
  o.results["params"] = to_json(params);
  ScalarField u0;
  if (!job.seed_path.empty()) {
    u0 = read_field<FieldKind::scalar>(job.seed_path, job.grid);
  } else {
    try {
      SeedResult s = seed(ctx, job.seed_cfg, build_morse(job, g));
      o.results["seed"] = to_json(s.report);
      u0 = std::move(s.u);
    } catch (const SeedFailure& e) {
      throw CheckViolation(e.what(), seed_failure_json(e));
    }
  }
  SolveReport rep;
  ScalarField u;
  try {
    u = continuity_solve(ctx, u0, job.solver, &rep);
  } catch (const SolveFailure& e) {
    o.results["solve"] = to_json(e.report());
    throw;
  }
  o.results["solve"] = to_json(rep);
  o.results["ellipticity"] = to_json(ellipticity_probe(ctx, u));
  o.results["c2"] = c2_diagnostic(g, u);
  if (job.psi_kind == "manufactured") {
    const ScalarField us = sample(job.grid, job.u_star);
    o.results["manufactured_error"] = max_abs_diff(u, us);
  }
  if (!(rep.min_symbol() > 0.0))
    throw CheckViolation("solve: symbol lost positivity at an accepted iterate", {{"min_symbol", rep.min_symbol()}});
  o.files.emplace_back("solution.nfld", [u](const std::string& p) { write_field(p, u); });
  o.files.emplace_back("trace.csv", [rep](const std::string& p) { write_trace_csv(p, rep); });
  return o;
}

Outputs run_verify(const Job& job) {
  Outputs o;
  const SuiteResult r = run_suite(job.suite, job.samples, job.rng_seed, job.verify_sizes);
  o.results = {{"suite", r.name}, {"passed", r.passed}, {"summary", r.summary}, {"details", r.details}};
  if (!r.passed) throw CheckViolation(job.suite + ": " + r.summary, r.details);
  return o;
}

void write_report(const std::string& dir, const json& report) {
  std::ofstream out(fs::path(dir) / "report.json");
  if (!out) throw std::runtime_error(dir + "/report.json: cannot open for writing");
  out << report.dump(2) << '\n';
}

int execute(const std::string& command, const Options& opt) {
  Job job;
  try {
    job = parse_job(command, opt);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSchema;
  }

  Timer timer;
  json report = {{"tool", "confbend"}, {"version", CONFBEND_VERSION}, {"command", command}, {"inputs", job.effective}};
  int code = kOk;
  Outputs outputs;
  try {
    if (command == "cones")
      outputs = run_cones(job);
    else if (command == "background")
      outputs = run_background(job);
    else if (command == "curvature")
      outputs = run_curvature(job);
    else if (command == "seed")
      outputs = run_seed(job);
    else if (command == "solve")
      outputs = run_solve(job);
    else
      outputs = run_verify(job);
    report["status"] = "ok";
  } catch (const CheckViolation& e) {
    code = kViolation;
    report["status"] = "check_violation";
    report["error"] = e.what();
    report["witness"] = e.witness;
  } catch (const GateFailure& e) {
    code = kViolation;
    report["status"] = "check_violation";
    report["error"] = e.what();
    report["witness"] = to_json(e.gates());
  } catch (const SolveFailure& e) {
    code = kNumeric;
    report["status"] = "numeric_failure";
    report["error"] = e.what();
    report["diagnostics"] = to_json(e.report());
  } catch (const NfldError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSchema;
  } catch (const std::exception& e) {
    code = kNumeric;
    report["status"] = "numeric_failure";
    report["error"] = e.what();
  }
  timer.mark("run");
  if (code == kOk) report["results"] = outputs.results;
  report["timings"] = timer.to_json();

  if (!job.out.empty()) {
    fs::create_directories(job.out);
    if (code == kOk)
      for (const auto& [name, write] : outputs.files) write((fs::path(job.out) / name).string());
    write_report(job.out, report);
  }
  std::cout << report.dump(2) << '\n';
  if (code != kOk) std::cerr << "error: " << report["error"].get<std::string>() << '\n';
  return code;
}

void common_flags(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "JSON job file")->check(CLI::ExistingFile);
  sub->add_option("--grid", opt.grid, "grid sizes s1,s2,s3 (verify: refinement sizes)");
  sub->add_option("--out", opt.out, "output directory");
  sub->add_flag("--deterministic", opt.deterministic, "fixed-order evaluation (always on)");
  sub->add_option("--rng-seed", opt.rng_seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confbend: conformal curvature equations on periodic grids"};
  app.set_version_flag("--version", std::string(CONFBEND_VERSION));
  app.require_subcommand(1);
  Options opt;

  auto* cones = app.add_subcommand("cones", "cone constants and parameter gates");
  common_flags(cones, opt);
  cones->add_option("--n", opt.n, "dimension")->check(CLI::Range(3, kMaxDim));
  cones->add_option("--k", opt.k, "cone index")->check(CLI::Range(1, kMaxDim));

  std::map<std::string, CLI::App*> subs;
  subs["background"] = app.add_subcommand("background", "build and classify a background metric");
  subs["curvature"] = app.add_subcommand("curvature", "Ricci, scalar and modified Schouten fields");
  subs["seed"] = app.add_subcommand("seed", "admissible seed u = exp(N v)");
  subs["solve"] = app.add_subcommand("solve", "continuation solve");
  for (auto& [name, sub] : subs) {
    common_flags(sub, opt);
    sub->add_option("--k", opt.k, "cone index")->check(CLI::Range(1, kMaxDim));
  }
  auto* verify = app.add_subcommand("verify", "property suites");
  common_flags(verify, opt);
  verify->add_option("suite", opt.suite, "suite name")->required();
  verify->add_option("--samples", opt.samples, "sample or configuration count");
  verify->add_flag("--sweep", opt.sweep, "full parameter sweep (lemma23)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kSchema;
  }
  for (auto* sub : app.get_subcommands()) return execute(sub->get_name(), opt);
  return kSchema;
}
