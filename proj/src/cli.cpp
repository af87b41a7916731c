#include "fracsob/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fracsob/checks.hpp"
#include "fracsob/errors.hpp"
#include "fracsob/spectral.hpp"
#include "json.hpp"

namespace fracsob {

namespace {

using json = nlohmann::ordered_json;

struct KeySpec {
  const char* section;
  const char* name;
  /// Empty means required.
  const char* fallback;
};

constexpr KeySpec kKeys[] = {
    {"problem", "alpha", ""},
    {"problem", "q", "1/4"},
    {"problem", "p", "2"},
    {"problem", "a", ""},
    {"problem", "N", ""},
    {"problem", "M", ""},
    {"problem", "u0", ""},
    {"problem", "v0", "zero"},
    {"problem", "nonlocal", "none"},
    {"problem", "nonlinearity", "zero"},
    {"problem", "k", "0"},
    {"problem", "Nc", "4"},
    {"problem", "radius", "1"},
    {"solver", "tol", "1e-8"},
    {"solver", "max_iter", "200"},
    {"solver", "quadrature_nodes", "200"},
    {"cost", "state_weight", "1"},
    {"cost", "control_weight", "1"},
    {"cost", "max_iter", "200"},
    {"cost", "fd_step", "1e-4"},
    {"cost", "armijo", "1e-4"},
    {"cost", "stationarity_tol", "1e-6"},
    {"cost", "inner_tol", "1e-12"},
    {"cost", "init", "random"},
    {"cost", "baseline_samples", "0"},
    {"output", "dir", "out"},
    {"output", "seed", "0"},
    {"output", "time_stride", "1"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct Value {
  std::string text;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Value> values) : values_(std::move(values)) {}

  const Value& at(const std::string& key) const { return values_.at(key); }
  bool provided(const std::string& key) const { return at(key).line > 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const { throw ParseError(at(key).line, what); }

  double number(const std::string& key, const std::string& text) const {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) fail(key, key + ": not a number: '" + text + "'");
    return v;
  }
  double number(const std::string& key) const { return number(key, at(key).text); }

  int integer(const std::string& key, const std::string& text) const {
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) fail(key, key + ": not an integer: '" + text + "'");
    return v;
  }
  int integer(const std::string& key) const { return integer(key, at(key).text); }

  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0)) fail(key, key + " out of (0,inf)");
    return v;
  }
  double nonnegative(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0)) fail(key, key + " out of [0,inf)");
    return v;
  }
  int at_least(const std::string& key, int lo) const {
    const int v = integer(key);
    if (v < lo) fail(key, key + " must be at least " + std::to_string(lo));
    return v;
  }

  /// Exact when the text is a fraction or short decimal.
  std::pair<double, std::optional<Rational>> exact(const std::string& key) const {
    const auto& text = at(key).text;
    if (auto r = Rational::parse(text)) return {r->value(), r};
    return {number(key), std::nullopt};
  }

  SpectralField field(const std::string& key, int modes) const {
    const auto w = words(at(key).text);
    if (w.empty()) fail(key, key + ": empty field");
    SpectralField u = SpectralField::zero(modes);
    if (w[0] == "zero" && w.size() == 1) return u;
    if (w[0] == "mode" && w.size() == 3) {
      const int n = integer(key, w[1]);
      if (n < 1 || n > modes) fail(key, key + ": mode index out of 1.." + std::to_string(modes));
      u(n) = number(key, w[2]);
      return u;
    }
    if (w[0] == "parabola" && w.size() == 2) {
      const double amp = number(key, w[1]);
      return amp * project([](double x) { return x * (std::numbers::pi - x); }, modes);
    }
    if (w[0] == "coeffs" && w.size() >= 2) {
      if (static_cast<int>(w.size()) - 1 > modes) fail(key, key + ": more coefficients than modes");
      for (std::size_t i = 1; i < w.size(); ++i) u(static_cast<int>(i)) = number(key, w[i]);
      return u;
    }
    fail(key, key + ": expected 'zero', 'mode n amp', 'parabola amp' or 'coeffs c1 c2 ...'");
  }

 private:
  std::map<std::string, Value> values_;
};

std::string section_key(const std::string& section, const std::string& name) { return section + "." + name; }

RunConfig interpret(const Reader& in) {
  RunConfig cfg;
  auto& P = cfg.problem;

  const auto [alpha, exact_alpha] = in.exact("problem.alpha");
  if (!(alpha > 0.0 && alpha <= 1.0)) in.fail("problem.alpha", "alpha out of (0,1]");
  const auto [q, exact_q] = in.exact("problem.q");
  if (!(q > 0.0 && q < 1.0)) in.fail("problem.q", "q out of (0,1)");
  const auto [p, exact_p] = in.exact("problem.p");
  if (!(p > 1.0)) in.fail("problem.p", "p out of (1,inf)");
  P.order = exact_alpha && exact_q && exact_p ? FracOrder::make(*exact_alpha, *exact_q, *exact_p)
                                              : FracOrder::make(alpha, q, p);

  P.horizon = in.positive("problem.a");
  P.modes = in.at_least("problem.N", 1);
  P.steps = in.at_least("problem.M", 2);
  P.u0 = in.field("problem.u0", P.modes);
  P.v0 = in.field("problem.v0", P.modes);

  const auto& nonlocal = in.at("problem.nonlocal").text;
  if (nonlocal != "none") {
    std::istringstream terms(nonlocal);
    double last = 0.0;
    for (std::string term; std::getline(terms, term, ';');) {
      const auto w = words(term);
      if (w.size() != 2) in.fail("problem.nonlocal", "nonlocal: expected 'c t' pairs separated by ';'");
      const double c = in.number("problem.nonlocal", w[0]);
      const double t = in.number("problem.nonlocal", w[1]);
      if (!(c > 0.0)) in.fail("problem.nonlocal", "nonlocal coefficient out of (0,inf)");
      if (!(t > last && t < P.horizon)) in.fail("problem.nonlocal", "nonlocal times must increase inside (0,a)");
      last = t;
      P.nonlocal.push_back({c, t});
    }
  }

  const auto nl = words(in.at("problem.nonlinearity").text);
  if (nl.size() == 1 && nl[0] == "zero") {
    P.nonlinearity = Nonlinearity::zero();
  } else if (nl[0] == "sine" && (nl.size() == 2 || nl.size() == 3)) {
    const double gain = in.number("problem.nonlinearity", nl[1]);
    const int order = nl.size() == 3 ? in.integer("problem.nonlinearity", nl[2]) : 1;
    if (order < 1 || order > 2) in.fail("problem.nonlinearity", "nonlinearity derivative order out of 1..2");
    P.nonlinearity = Nonlinearity::sine_of_slope(gain, order);
  } else {
    in.fail("problem.nonlinearity", "nonlinearity: expected 'zero' or 'sine gain [order]'");
  }

  P.controls = in.at_least("problem.k", 0);
  P.control_modes = in.provided("problem.Nc") ? in.at_least("problem.Nc", 1) : std::min(4, P.modes);
  if (P.control_modes > P.modes) in.fail("problem.Nc", "Nc out of 1..N");
  cfg.radius = in.positive("problem.radius");

  cfg.solve.tol = in.positive("solver.tol");
  cfg.solve.max_iter = in.at_least("solver.max_iter", 1);
  cfg.quadrature_nodes = in.at_least("solver.quadrature_nodes", 16);

  cfg.cost.state_weight = in.nonnegative("cost.state_weight");
  cfg.cost.control_weight = in.nonnegative("cost.control_weight");
  if (cfg.cost.state_weight == 0.0 && cfg.cost.control_weight == 0.0) {
    in.fail("cost.control_weight", "state_weight and control_weight must not both be zero");
  }
  cfg.optimize.max_iter = in.at_least("cost.max_iter", 0);
  cfg.optimize.fd_step = in.positive("cost.fd_step");
  cfg.optimize.armijo = in.positive("cost.armijo");
  if (cfg.optimize.armijo >= 1.0) in.fail("cost.armijo", "armijo out of (0,1)");
  cfg.optimize.stationarity_tol = in.positive("cost.stationarity_tol");
  cfg.optimize.solve = {in.positive("cost.inner_tol"), cfg.solve.max_iter};
  cfg.init = in.at("cost.init").text;
  if (cfg.init != "zero" && cfg.init != "random") in.fail("cost.init", "init must be 'zero' or 'random'");
  cfg.baseline_samples = in.at_least("cost.baseline_samples", 0);

  cfg.out_dir = in.at("output.dir").text;
  const int seed = in.at_least("output.seed", 0);
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.time_stride = in.at_least("output.time_stride", 1);

  for (const auto& k : kKeys) {
    std::string text = in.at(section_key(k.section, k.name)).text;
    if (std::string(k.name) == "Nc" && !in.provided("problem.Nc")) text = std::to_string(P.control_modes);
    cfg.echo.emplace_back(section_key(k.section, k.name), text);
  }
  return cfg;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const char* header) : f_(std::fopen(path.string().c_str(), "wb")) {
    if (!f_) throw std::runtime_error("cannot write " + path.string());
    std::fprintf(f_, "%s\n", header);
  }
  ~CsvFile() {
    if (f_) std::fclose(f_);
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      std::fprintf(f_, first ? "%.17g" : ",%.17g", v);
      first = false;
    }
    std::fputc('\n', f_);
  }
  std::FILE* raw() { return f_; }

 private:
  std::FILE* f_;
};

void write_json(const std::filesystem::path& path, const json& j) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  const std::string text = j.dump(2) + "\n";
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, int stride) {
  const CollocationGrid grid(traj.modes());
  const TimeGrid& tg = traj.grid();
  CsvFile csv(dir / "trajectory.csv", "t,x,u");
  CsvFile modes(dir / "modes.csv", "t,n,coefficient");
  for (int m = 0; m <= tg.steps(); ++m) {
    if (m % stride != 0 && m != tg.steps()) continue;
    const double t = tg.node(m);
    const auto& u = traj[static_cast<std::size_t>(m)];
    const auto values = evaluate(u, grid);
    for (int j = 0; j < grid.size(); ++j) csv.row({t, grid.points()[static_cast<std::size_t>(j)], values[static_cast<std::size_t>(j)]});
    for (int n = 1; n <= u.modes(); ++n) modes.row({t, static_cast<double>(n), u(n)});
  }
}

json config_json(const RunConfig& cfg) {
  json j;
  j["mode"] = mode_name(cfg.mode);
  for (const auto& [key, value] : cfg.echo) j[key] = value;
  return j;
}

json hypothesis_json(const HypothesisReport& h, bool controlled) {
  json j;
  j["alpha_q"] = h.exponents.alpha_q;
  if (h.exponents.alpha_q_exact) j["alpha_q_exact"] = h.exponents.alpha_q_exact->str();
  j["alpha_q_ok"] = h.exponents.alpha_q_ok;
  j["p_alpha_one_minus_q"] = h.exponents.p_alpha_one_minus_q;
  if (h.exponents.p_alpha_one_minus_q_exact) j["p_alpha_one_minus_q_exact"] = h.exponents.p_alpha_one_minus_q_exact->str();
  j["p_alpha_one_minus_q_ok"] = h.exponents.p_alpha_one_minus_q_ok;
  j["p_condition_required"] = controlled;
  j["growth_constant"] = h.growth_constant;
  j["growth_measured"] = h.growth_measured;
  j["growth_ok"] = h.growth_ok;
  j["lipschitz_budget"] = h.lipschitz_budget;
  j["lipschitz_measured"] = h.lipschitz_measured;
  j["lipschitz_ok"] = h.lipschitz_ok;
  j["k1"] = h.k1;
  j["k2"] = h.k2;
  j["probe_sup_q"] = h.probe_sup_q;
  j["samples"] = h.samples;
  j["passed"] = h.passed(controlled);
  return j;
}

json solve_json(const SolveReport& r) {
  json j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["contraction_ratio"] = r.contraction_ratio;
  j["residuals"] = r.residuals;
  j["warnings"] = r.warnings;
  json snapped = json::array();
  for (const auto& s : r.snapped) snapped.push_back({{"c", s.c}, {"requested", s.requested}, {"node", s.node}, {"moved", s.moved}});
  j["nonlocal"] = snapped;
  return j;
}

json constants_json(const RunConfig& cfg) {
  const auto& P = cfg.problem;
  std::vector<double> samples;
  for (int m = 0; m <= P.steps; ++m) samples.push_back(P.grid().node(m));
  const auto b = measure_bounds(std::max(P.modes, 4), samples, P.order.q);
  json j;
  j["C1"] = b.C1;
  j["C2"] = b.C2;
  j["M0"] = b.M0;
  j["Mq"] = b.Mq;
  j["q"] = b.q;
  j["growth_constant"] = P.nonlinearity.growth_constant();
  j["lipschitz_budget"] = P.nonlinearity.lipschitz_budget(P.modes, P.order.q);
  return j;
}

json error_json(const std::string& type, const std::exception& e) {
  json j;
  j["type"] = type;
  j["message"] = e.what();
  if (const auto* nc = dynamic_cast<const NonConvergence*>(&e)) j["residuals"] = nc->residuals();
  return j;
}

int run_verify(const RunConfig& cfg, const std::filesystem::path& dir, json& report) {
  const auto results = run_property_checks(cfg.seed);
  CsvFile csv(dir / "verify.csv", "id,check,measured,limit,status");
  json rows = json::array();
  bool ok = true;
  for (const auto& r : results) {
    std::fprintf(csv.raw(), "%d,%s,%.17g,%.17g,%s\n", r.id, r.name.c_str(), r.measured, r.limit, r.passed ? "pass" : "fail");
    rows.push_back({{"id", r.id},
                    {"check", r.name},
                    {"status", r.passed ? "pass" : "fail"},
                    {"measured", r.measured},
                    {"limit", r.limit},
                    {"seconds", r.seconds},
                    {"detail", r.detail}});
    ok = ok && r.passed;
  }
  report["checks"] = rows;
  return ok ? 0 : 1;
}

int run_solve(const RunConfig& cfg, const std::filesystem::path& dir, json& report) {
  const auto& P = cfg.problem;
  P.validate();
  const SolutionOperatorCache cache(P.order, P.modes, P.grid(), cfg.quadrature_nodes);
  std::optional<ControlBundle> controls;
  if (P.controls > 0) controls.emplace(P.controls, P.grid(), P.control_modes, cfg.radius);
  const auto sol = picard_solve(P, cache, controls ? &*controls : nullptr, cfg.solve);
  write_trajectory(dir, sol.trajectory, cfg.time_stride);
  report["solve"] = solve_json(sol.report);
  report["sup_q_norm"] = sol.trajectory.sup_q_norm(P.order.q);
  return 0;
}

int run_optimize(const RunConfig& cfg, const std::filesystem::path& dir, json& report) {
  const auto& P = cfg.problem;
  P.validate();
  if (P.controls < 1) throw DomainError("optimize needs k >= 1 controls");
  const SolutionOperatorCache cache(P.order, P.modes, P.grid(), cfg.quadrature_nodes);
  const ControlBundle init = cfg.init == "zero" ? ControlBundle(P.controls, P.grid(), P.control_modes, cfg.radius)
                                                : sample_admissible(P.controls, P.grid(), P.control_modes, cfg.radius, cfg.seed);
  const auto result = optimize_controls(P, cache, cfg.cost, init, cfg.optimize);

  {
    CsvFile csv(dir / "descent.csv", "iteration,J");
    for (const auto& e : result.descent) csv.row({static_cast<double>(e.iteration), e.J});
  }
  {
    CsvFile csv(dir / "controls.csv", "control,cell,t,n,coefficient");
    const auto& c = result.controls;
    for (int j = 0; j < c.count(); ++j) {
      for (int i = 0; i < c.cells(); ++i) {
        for (int n = 1; n <= c.modes(); ++n) {
          csv.row({static_cast<double>(j + 1), static_cast<double>(i), c.grid().node(i), static_cast<double>(n), c.value(j, i)(n)});
        }
      }
    }
  }
  write_trajectory(dir, result.trajectory, cfg.time_stride);

  json opt;
  opt["J"] = result.J;
  opt["iterations"] = static_cast<int>(result.descent.size()) - 1;
  opt["converged"] = result.converged;
  opt["budget_exhausted"] = result.budget_exhausted;
  opt["stationarity"] = result.stationarity;
  opt["admissibility"] = result.controls.admissibility();
  opt["radius"] = cfg.radius;
  // coercivity data implied by the quadratic cost
  opt["coercivity"] = {{"d", 0.0}, {"psi", 0.0}, {"c", cfg.cost.control_weight}};
  if (cfg.baseline_samples > 0) {
    std::mt19937_64 seeds(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    double best = INFINITY;
    for (int s = 0; s < cfg.baseline_samples; ++s) {
      const auto sample = sample_admissible(P.controls, P.grid(), P.control_modes, cfg.radius, seeds());
      best = std::min(best, evaluate_cost(P, cache, cfg.cost, sample, cfg.optimize.solve));
    }
    opt["baseline_samples"] = cfg.baseline_samples;
    opt["baseline_best_J"] = best;
    opt["beats_baseline"] = result.J <= best;
  }
  report["optimize"] = opt;
  report["solve"] = {{"sup_q_norm", result.trajectory.sup_q_norm(P.order.q)}};
  return 0;
}

}  // namespace

RunMode parse_mode(const std::string& text) {
  if (text == "verify") return RunMode::verify;
  if (text == "solve") return RunMode::solve;
  if (text == "optimize") return RunMode::optimize;
  throw DomainError("unknown mode '" + text + "' (expected verify, solve or optimize)");
}

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::verify:
      return "verify";
    case RunMode::solve:
      return "solve";
    case RunMode::optimize:
      return "optimize";
  }
  return "unknown";
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Value> values;
  std::string section;
  int line_no = 0;
  std::istringstream in(text);
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "problem" && section != "solver" && section != "cost" && section != "output") {
        throw ParseError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    if (section.empty()) throw ParseError(line_no, "key outside a section");
    const std::string name = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const bool known = std::any_of(std::begin(kKeys), std::end(kKeys),
                                   [&](const KeySpec& k) { return k.section == section && k.name == name; });
    if (!known) throw ParseError(line_no, "unknown key '" + name + "' in [" + section + "]");
    const std::string key = section_key(section, name);
    if (values.count(key)) throw ParseError(line_no, "duplicate key '" + name + "'");
    if (value.empty()) throw ParseError(line_no, "empty value for '" + name + "'");
    values[key] = {value, line_no};
  }
  for (const auto& k : kKeys) {
    const std::string key = section_key(k.section, k.name);
    if (values.count(key)) continue;
    if (std::string(k.fallback).empty()) {
      throw ParseError(line_no, "missing required key '" + std::string(k.name) + "' in [" + k.section + "]");
    }
    values[key] = {k.fallback, 0};
  }
  return interpret(Reader(std::move(values)));
}

RunConfig default_config() {
  RunConfig cfg = parse_config(
      "[problem]\n"
      "alpha = 4/5\n"
      "q = 1/4\n"
      "p = 2\n"
      "a = 1\n"
      "N = 16\n"
      "M = 512\n"
      "u0 = parabola 1\n"
      "v0 = mode 1 1\n"
      "nonlocal = 0.3 0.5\n"
      "nonlinearity = sine 0.1\n");
  cfg.mode = RunMode::verify;
  return cfg;
}

int run(const RunConfig& config) {
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  json report;
  report["config"] = config_json(config);
  const auto& P = config.problem;
  report["hypothesis"] = hypothesis_json(hypothesis_check(P, 100, config.seed), P.controls > 0);
  report["constants"] = constants_json(config);

  int status = 1;
  try {
    switch (config.mode) {
      case RunMode::verify:
        status = run_verify(config, dir, report);
        break;
      case RunMode::solve:
        status = run_solve(config, dir, report);
        break;
      case RunMode::optimize:
        status = run_optimize(config, dir, report);
        break;
    }
  } catch (const NonConvergence& e) {
    report["error"] = error_json("non_convergence", e);
  } catch (const RejectedInstance& e) {
    report["error"] = error_json("rejected_instance", e);
  } catch (const PropertyFailure& e) {
    report["error"] = error_json("property_failure", e);
  } catch (const OptimizationError& e) {
    report["error"] = error_json("optimization_error", e);
  } catch (const EvaluationError& e) {
    report["error"] = error_json("evaluation_error", e);
  } catch (const DomainError& e) {
    report["error"] = error_json("domain_error", e);
  }
  report["status"] = status == 0 ? "ok" : "failed";
  write_json(dir / "report.json", report);
  return status;
}

}  // namespace fracsob
