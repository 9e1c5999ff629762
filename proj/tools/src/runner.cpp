#include "perifront_app/runner.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <span>

#include "perifront/error.hpp"
#include "perifront/evolution.hpp"
#include "perifront/front.hpp"
#include "perifront/spectral.hpp"
#include "perifront/speed.hpp"
#include "perifront/stationary.hpp"
#include "perifront/validation.hpp"
#include "perifront_app/config.hpp"

#ifndef PERIFRONT_APP_VERSION
#define PERIFRONT_APP_VERSION "unknown"
#endif

namespace perifront_app {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace perifront;

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {}

  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::span<const double>>& columns) {
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
      if (c.size() != n) throw std::logic_error("csv columns differ in length");
    std::string text;
    for (std::size_t k = 0; k < header.size(); ++k) text += (k ? "," : "") + header[k];
    text += '\n';
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < columns.size(); ++k) {
        if (k) text += ',';
        text += fmt::format("{:.17g}", columns[k][i]);
      }
      text += '\n';
    }
    write(name, text);
  }

  void json_file(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::vector<double> grid_x(std::size_t M) {
  std::vector<double> x(M);
  for (std::size_t j = 0; j < M; ++j) x[j] = static_cast<double>(j) / static_cast<double>(M);
  return x;
}

std::vector<double> default_lambdas() {
  std::vector<double> l;
  for (int i = -30; i <= 30; ++i) l.push_back(0.1 * i);
  return l;
}

EigenOptions eig_options(const ProblemConfig& c) {
  EigenOptions o;
  o.tol = c.numerics.tol;
  return o;
}

SpeedOptions speed_options(const ProblemConfig& c) {
  SpeedOptions o;
  o.tol = c.numerics.tol;
  return o;
}

json speed_json(const SpeedResult& s) {
  return {{"c_star", s.c_star},           {"lambda_star", s.lambda_star}, {"mu_at_star", s.mu_at_star},
          {"mu_at_zero", s.mu_at_zero},   {"eps", s.eps},                 {"direction", sign(s.e)},
          {"scan_fallback", s.scan_fallback}};
}

json run_eig(const ProblemConfig& c, const Problem& P, Output& out) {
  const auto r = principal_eig(P, c.numerics.lambda, c.numerics.eps, eig_options(c));
  const auto x = grid_x(P.M());
  out.csv("phi.csv", {"x", "phi"}, {x, r.phi.values()});
  out.csv("phi_star.csv", {"x", "phi_star"}, {x, r.phi_star.values()});
  return {{"lambda", r.lambda},
          {"eps", r.eps},
          {"mu", r.mu},
          {"residual", r.residual},
          {"residual_star", r.residual_star},
          {"iterations", r.iterations},
          {"classification", std::string(to_string(r.classification))},
          {"gap", r.gap},
          {"gap_refined", r.gap_refined}};
}

json run_mu_curve(const ProblemConfig& c, const Problem& P, Output& out) {
  auto lambdas = c.numerics.lambdas.empty() ? default_lambdas() : c.numerics.lambdas;
  const auto pts = mu_curve(P, lambdas, c.numerics.eps, eig_options(c), c.numerics.threads);
  std::vector<double> l, mu;
  for (const auto& p : pts) l.push_back(p.lambda), mu.push_back(p.mu);
  out.csv("mu_curve.csv", {"lambda", "mu"}, {l, mu});
  return {{"eps", c.numerics.eps}, {"points", pts.size()}, {"lambda", l}, {"mu", mu}};
}

json run_criteria(const ProblemConfig& c, const Problem& P, Output&) {
  const auto e = existence_criteria(P, c.numerics.lambda);
  return {{"lambda", c.numerics.lambda},
          {"verdict", std::string(to_string(e.verdict))},
          {"reason", e.reason},
          {"A", e.A},
          {"I", std::isfinite(e.I) ? json(e.I) : json("inf")},
          {"I_saturated", e.I_saturated},
          {"I_sequence", e.I_sequence},
          {"M_const", e.M_const},
          {"M_const_times_I", std::isfinite(e.M_const_times_I) ? json(e.M_const_times_I) : json("inf")},
          {"m", e.m},
          {"d", e.d},
          {"shift", e.shift},
          {"eps_s", e.eps_s},
          {"constructive_value", e.constructive_value},
          {"constructive_holds", e.constructive_holds}};
}

json run_speed(const ProblemConfig& c, const Problem& P, Output& out) {
  const auto opt = speed_options(c);
  const auto s = min_speed(P, c.numerics.eps, opt);
  std::vector<double> l, g, cs, lc;
  for (const auto& p : s.curve) l.push_back(p.lambda), g.push_back(p.g);
  out.csv("speed_curve.csv", {"lambda", "g"}, {l, g});
  for (double f : c.speed.c_factors) {
    cs.push_back(f * s.c_star);
    lc.push_back(lambda_of_c(P, cs.back(), s, opt));
  }
  out.csv("lambda_of_c.csv", {"c", "lambda"}, {cs, lc});
  const auto gs = grid_min_speed(P, c.numerics.eps, P.M(), opt);
  json j = speed_json(s);
  j["grid_c_star"] = gs.c_star;
  j["grid_lambda_star"] = gs.lambda_star;
  j["lambda_of_c"] = json::array();
  for (std::size_t i = 0; i < cs.size(); ++i) j["lambda_of_c"].push_back({{"c", cs[i]}, {"lambda", lc[i]}});
  return j;
}

json run_stationary(const ProblemConfig& c, const Problem& P, Output& out) {
  StationaryOptions opt;
  opt.tol = c.numerics.tol;
  const auto above = solve_stationary(P, c.numerics.eps, StartFrom::Above, opt);
  const auto below = solve_stationary(P, c.numerics.eps, StartFrom::Below, opt);
  const auto x = grid_x(P.M());
  out.csv("p.csv", {"x", "p"}, {x, above.p.values()});
  const auto lip = lipschitz_check(P, above.p);
  return {{"eps", c.numerics.eps},
          {"mu0", above.mu0},
          {"residual_above", above.residual},
          {"residual_below", below.residual},
          {"iterations_above", above.iterations},
          {"iterations_below", below.iterations},
          {"above_below_distance", sup_distance(above.p, below.p)},
          {"p_min", above.p.min()},
          {"p_max", above.p.max()},
          {"p_mean", above.p.mean()},
          {"lipschitz",
           {{"holds", lip.holds},
            {"worst_excess", lip.worst_excess},
            {"slack", lip.slack},
            {"delta0", lip.delta0},
            {"fx_norm", lip.fx_norm}}}};
}

json diagnostics_json(const Diagnostics& d) {
  return {{"residual", d.residual},
          {"weak_residual", d.weak_residual},
          {"energy_gap", d.energy_gap},
          {"energy_lhs", d.energy_lhs},
          {"energy_rhs", d.energy_rhs},
          {"decay_rate_left", d.decay_rate_left},
          {"decay_rate_right", d.decay_rate_right},
          {"decay_samples_left", d.decay_samples_left},
          {"decay_samples_right", d.decay_samples_right},
          {"left_limit", d.left_limit},
          {"right_limit", d.right_limit},
          {"monotonicity_violation", d.monotonicity_violation},
          {"order_violation", d.order_violation},
          {"critical", d.critical},
          {"flags", d.flags}};
}

json run_front(const ProblemConfig& c, const Problem& P, Output& out) {
  ContinuationOptions opt;
  for (const auto& [k, e] : c.front.schedule) opt.schedule.push_back({k, e});
  opt.r = c.front.r;
  opt.R = c.front.R;
  opt.margin = c.front.margin;
  opt.shoot.k_norm = c.front.k_norm;
  opt.speed = speed_options(c);
  opt.on_stage = [](const StageReport& s) {
    spdlog::info("stage kappa = {:.6g}, eps = {:.6g}: sigma = {:.6g}, residual = {:.3g}, {} shots",
                 s.stage.kappa, s.stage.eps, s.sigma, s.residual, s.shots);
  };
  const double c_star = min_speed(P, 0.0, opt.speed).c_star;
  const double c_req = c.front.c > 0.0 ? c.front.c : c.front.c_factor * c_star;
  spdlog::info("front at c = {:.10g} (c* = {:.10g})", c_req, c_star);
  const auto r = continue_front(P, c_req, opt);

  const auto& F = r.front;
  const std::size_t rows = F.rows(), M = F.M;
  std::vector<double> s(rows * M), x(rows * M), sr(rows), smax(rows), smin(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    sr[i] = F.s(i);
    const auto row = F.row(i);
    smax[i] = *std::max_element(row.begin(), row.end());
    smin[i] = *std::min_element(row.begin(), row.end());
    for (std::size_t j = 0; j < M; ++j) {
      s[i * M + j] = sr[i];
      x[i * M + j] = static_cast<double>(j) / static_cast<double>(M);
    }
  }
  out.csv("psi.csv", {"s", "x", "psi"}, {s, x, F.psi});
  out.csv("profile.csv", {"s", "psi_max", "psi_min"}, {sr, smax, smin});

  json stages = json::array();
  for (const auto& st : r.stages)
    stages.push_back({{"kappa", st.stage.kappa},
                      {"eps", st.stage.eps},
                      {"sigma", st.sigma},
                      {"residual", st.residual},
                      {"shots", st.shots},
                      {"iterations", st.iterations}});
  json diag = diagnostics_json(r.diagnostics);
  diag["lambda_c"] = r.lambda_c;
  diag["stages"] = stages;
  out.json_file("diagnostics.json", diag);

  return {{"c_requested", c_req},
          {"c", r.c},
          {"c_star", r.speed.c_star},
          {"lambda_star", r.speed.lambda_star},
          {"grid_c_star", r.grid_speed.c_star},
          {"kappa_c", r.kappa_c},
          {"lambda_c", r.lambda_c},
          {"sigma", F.sigma},
          {"r", F.r},
          {"R", F.R},
          {"M", F.M},
          {"stages", stages},
          {"diagnostics", diagnostics_json(r.diagnostics)}};
}

json run_evolve(const ProblemConfig& c, const Problem& P, Output& out) {
  const auto& ev = c.evolution;
  StationaryOptions sopt;
  sopt.tol = c.numerics.tol;
  const auto p = solve_stationary(P, 0.0, StartFrom::Above, sopt).p;
  EvolutionOptions opt;
  opt.L = ev.L;
  opt.T = ev.T;
  opt.dt = ev.dt;
  opt.snapshots = ev.snapshots;
  opt.reference = p.min();
  const auto tr = evolve(P, compact_initial_data(p, ev.L, ev.halfwidth), opt);
  const double level = ev.theta * tr.reference;
  std::vector<double> t, right, left;
  for (const auto& snap : tr.snapshots) {
    t.push_back(snap.t);
    right.push_back(level_position(tr, snap, level, Front::Right).value_or(NAN));
    left.push_back(level_position(tr, snap, level, Front::Left).value_or(NAN));
  }
  out.csv("positions.csv", {"t", "right", "left"}, {t, right, left});
  std::vector<double> xs(tr.points());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = tr.x(i);
  out.csv("u_final.csv", {"x", "u"}, {xs, tr.snapshots.back().u});
  const double vr = spreading_speed(tr, ev.theta, Front::Right);
  const double vl = spreading_speed(tr, ev.theta, Front::Left);
  const auto sp = min_speed(P, 0.0, speed_options(c));
  auto mirrored = P;
  mirrored.e = Direction::Left;
  const auto sl = min_speed(mirrored, 0.0, speed_options(c));
  return {{"speed_right", vr},
          {"speed_left", vl},
          {"c_star_right", sp.c_star},
          {"c_star_left", sl.c_star},
          {"ratio_right", vr / sp.c_star},
          {"ratio_left", vl / sl.c_star},
          {"reference", tr.reference},
          {"level", level},
          {"snapshots", tr.snapshots.size()},
          {"T", tr.snapshots.back().t}};
}

json run_validate(const ProblemConfig& c, const Problem& P, Output&) {
  ValidationOptions opt;
  opt.eig_tol = std::min(c.numerics.tol, 1e-11);
  const auto checks = run_property_battery(P, opt);
  json list = json::array();
  bool all = true;
  for (const auto& k : checks) {
    all = all && k.passed;
    list.push_back({{"name", k.name}, {"passed", k.passed}, {"value", k.value}, {"threshold", k.threshold}});
    spdlog::info("{} {}: {:.6g} (threshold {:.6g})", k.passed ? "PASS" : "FAIL", k.name, k.value, k.threshold);
  }
  return {{"all_passed", all}, {"checks", list}};
}

using Handler = json (*)(const ProblemConfig&, const Problem&, Output&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"eig", run_eig},       {"mu-curve", run_mu_curve}, {"criteria", run_criteria}, {"speed", run_speed},
      {"stationary", run_stationary}, {"front", run_front}, {"evolve", run_evolve}, {"validate", run_validate}};
  return h;
}

json error_json(std::string_view name, std::string_view message) {
  return {{"name", std::string(name)}, {"message", std::string(message)}};
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"eig",   "mu-curve", "criteria", "speed",
                                              "stationary", "front", "evolve", "validate"};
  return names;
}

int run(const RunRequest& req) {
  json result{{"subcommand", req.subcommand},
              {"version", PERIFRONT_APP_VERSION},
              {"status", "ok"},
              {"error", nullptr},
              {"config", {{"source", req.config.string()}}},
              {"results", json::object()},
              {"files", json::array()}};
  std::error_code ec;
  fs::create_directories(req.out, ec);
  if (ec) {
    spdlog::error("cannot create output directory {}: {}", req.out.string(), ec.message());
    return kUnexpected;
  }
  Output out(req.out);
  int status = kSuccess;
  try {
    const auto it = handlers().find(req.subcommand);
    if (it == handlers().end()) throw ConfigError("unknown subcommand '" + req.subcommand + "'");
    auto cfg = load_config(req.config);
    if (req.threads) {
      if (*req.threads < 1 || *req.threads > 256) throw ConfigError("--threads must lie in [1, 256]");
      cfg.numerics.threads = *req.threads;
    }
    result["config"]["seed"] = cfg.seed;
    result["config"]["canonical"] = serialize_config(cfg);
    if (!cfg.experiment.empty() && cfg.experiment != req.subcommand)
      spdlog::warn("config names experiment '{}', running '{}'", cfg.experiment, req.subcommand);
    const auto problem = cfg.problem();
    spdlog::info("{}: M = {}, medium {}, kernel {}", req.subcommand, cfg.numerics.M, cfg.medium.kind,
                 cfg.kernel.profile);
    result["results"] = it->second(cfg, problem, out);
  } catch (const ConfigError& e) {
    status = kConfigError;
    result["status"] = "config_error";
    result["error"] = error_json("ConfigError", e.what());
    spdlog::error("config error: {}", e.what());
  } catch (const Error& e) {
    status = kNumericalFailure;
    result["status"] = "numerical_failure";
    result["error"] = error_json(e.name(), e.what());
    spdlog::error("{}: {}", e.name(), e.what());
  } catch (const std::exception& e) {
    status = kUnexpected;
    result["status"] = "unexpected_error";
    result["error"] = error_json("Unexpected", e.what());
    spdlog::error("unexpected error: {}", e.what());
  }
  result["files"] = out.files();
  try {
    out.json_file("result.json", result);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kUnexpected;
  }
  return status;
}

}  // namespace perifront_app
