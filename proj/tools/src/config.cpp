#include "perifront_app/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "perifront/grid.hpp"

namespace perifront_app {

perifront::KernelSpec KernelConfig::build() const {
  if (profile == "bump") return perifront::KernelSpec::bump();
  return perifront::KernelSpec::from_samples(samples);
}

perifront::Medium MediumConfig::build() const {
  using perifront::Medium;
  if (kind == "constant") return Medium::constant(mean);
  if (kind == "fourier") return Medium::fourier(mean, amplitudes, phases);
  if (kind == "samples") return Medium::samples(samples);
  return Medium::peak(top, slope, center, exponent);
}

perifront::Problem ProblemConfig::problem() const {
  return {kernel.build(),
          perifront::Nonlinearity::logistic(medium.build(), b.build(), numerics.M),
          perifront::direction_from_int(direction)};
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

// Reads optional keys from one table and rejects keys it was never asked about.
class Reader {
 public:
  Reader(const toml::table& t, std::string path) : t_(t), path_(std::move(path)) {}

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const toml::node* n = t_.get(key);
    if (n == nullptr) return;
    read(*n, where(key), out);
  }

  const toml::table* table(const char* key) {
    seen_.insert(key);
    const toml::node* n = t_.get(key);
    if (n == nullptr) return nullptr;
    if (!n->is_table()) bad(where(key), "expected a table");
    return n->as_table();
  }

  void finish() const {
    for (const auto& [k, v] : t_)
      if (!seen_.contains(std::string(k.str()))) bad(where(std::string(k.str())), "unknown key");
  }

 private:
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  static void read(const toml::node& n, const std::string& w, double& out) {
    if (auto v = n.value<double>()) {
      out = *v;
      return;
    }
    bad(w, "expected a number");
  }
  static void read(const toml::node& n, const std::string& w, std::string& out) {
    if (auto v = n.value<std::string>()) {
      out = *v;
      return;
    }
    bad(w, "expected a string");
  }
  static void read(const toml::node& n, const std::string& w, int& out) {
    const auto v = n.as_integer();
    if (v == nullptr) bad(w, "expected an integer");
    if (v->get() < std::numeric_limits<int>::min() || v->get() > std::numeric_limits<int>::max())
      bad(w, "out of range");
    out = static_cast<int>(v->get());
  }
  template <class U>
    requires std::is_unsigned_v<U>
  static void read(const toml::node& n, const std::string& w, U& out) {
    const auto v = n.as_integer();
    if (v == nullptr) bad(w, "expected an integer");
    if (v->get() < 0) bad(w, "must be nonnegative");
    if (static_cast<std::uint64_t>(v->get()) > std::numeric_limits<U>::max()) bad(w, "out of range");
    out = static_cast<U>(v->get());
  }
  static void read(const toml::node& n, const std::string& w, std::vector<double>& out) {
    const auto a = n.as_array();
    if (a == nullptr) bad(w, "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < a->size(); ++i) {
      double x;
      read((*a)[i], w + "[" + std::to_string(i) + "]", x);
      out.push_back(x);
    }
  }
  static void read(const toml::node& n, const std::string& w, std::vector<std::array<double, 2>>& out) {
    const auto a = n.as_array();
    if (a == nullptr) bad(w, "expected an array of [kappa, eps] pairs");
    out.clear();
    for (std::size_t i = 0; i < a->size(); ++i) {
      std::vector<double> pair;
      read((*a)[i], w + "[" + std::to_string(i) + "]", pair);
      if (pair.size() != 2) bad(w + "[" + std::to_string(i) + "]", "expected [kappa, eps]");
      out.push_back({pair[0], pair[1]});
    }
  }

  const toml::table& t_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

void read_medium(Reader& parent, const char* key, MediumConfig& m, bool required) {
  const toml::table* t = parent.table(key);
  if (t == nullptr) {
    if (required) bad(key, "missing table");
    return;
  }
  Reader r(*t, key);
  r.get("kind", m.kind);
  r.get("mean", m.mean);
  r.get("amplitudes", m.amplitudes);
  r.get("phases", m.phases);
  r.get("samples", m.samples);
  r.get("top", m.top);
  r.get("slope", m.slope);
  r.get("center", m.center);
  r.get("exponent", m.exponent);
  r.finish();
}

void require_finite(const std::string& w, double v) {
  if (!std::isfinite(v)) bad(w, "must be finite");
}

void validate_medium(const std::string& w, const MediumConfig& m) {
  static const std::set<std::string> kinds{"constant", "fourier", "samples", "peak"};
  if (!kinds.contains(m.kind)) bad(w + ".kind", "must be one of constant, fourier, samples, peak");
  for (double v : {m.mean, m.top, m.slope, m.center, m.exponent}) require_finite(w, v);
  for (const auto* vec : {&m.amplitudes, &m.phases, &m.samples})
    for (double v : *vec) require_finite(w, v);
  if (m.kind == "fourier" && !m.phases.empty() && m.phases.size() != m.amplitudes.size())
    bad(w + ".phases", "must be empty or match amplitudes");
  if (m.kind == "samples" && m.samples.empty()) bad(w + ".samples", "must not be empty");
  if (m.kind == "peak" && !(m.exponent > 0.0)) bad(w + ".exponent", "must be positive");
}

bool on_grid(double v, std::size_t M) {
  const double t = v * static_cast<double>(M);
  return std::abs(t - std::round(t)) <= 1e-9 * std::max(1.0, t);
}

void validate(const ProblemConfig& c) {
  if (c.kernel.profile != "bump" && c.kernel.profile != "samples")
    bad("kernel.profile", "must be bump or samples");
  if (c.kernel.profile == "samples" && c.kernel.samples.size() < 3)
    bad("kernel.samples", "need at least 3 values");
  validate_medium("medium", c.medium);
  validate_medium("b", c.b);
  if (c.direction != 1 && c.direction != -1) bad("direction", "must be 1 or -1");

  const auto& n = c.numerics;
  if (n.M < 8 || n.M > 8192 || !perifront::is_power_of_two(n.M))
    bad("numerics.M", "must be a power of two in [8, 8192]");
  if (!(n.eps >= 0.0) || !std::isfinite(n.eps)) bad("numerics.eps", "must be finite and >= 0");
  require_finite("numerics.lambda", n.lambda);
  for (double l : n.lambdas) require_finite("numerics.lambdas", l);
  if (!(n.tol > 0.0 && n.tol <= 1e-3)) bad("numerics.tol", "must lie in (0, 1e-3]");
  if (n.threads < 1 || n.threads > 256) bad("numerics.threads", "must lie in [1, 256]");

  const auto& f = c.front;
  if (!(f.c_factor > 0.0) || !std::isfinite(f.c_factor)) bad("front.c_factor", "must be positive");
  if (!(f.c >= 0.0) || !std::isfinite(f.c)) bad("front.c", "must be >= 0 (0: use c_factor)");
  for (auto [name, v] : {std::pair{"front.r", f.r}, std::pair{"front.R", f.R}})
    if (!(v > 0.0) || !std::isfinite(v) || !on_grid(v, n.M)) bad(name, "must be a positive multiple of 1/M");
  if (!(f.k_norm > 1.0) || !std::isfinite(f.k_norm)) bad("front.k_norm", "must exceed 1");
  if (!(f.margin >= 0.0 && f.margin < 1.0)) bad("front.margin", "must lie in [0, 1)");
  for (const auto& [k, e] : f.schedule)
    if (!(k >= 0.0) || !(e >= 0.0) || !std::isfinite(k) || !std::isfinite(e))
      bad("front.schedule", "kappa and eps must be finite and >= 0");

  if (c.speed.c_factors.empty()) bad("speed.c_factors", "must not be empty");
  for (double v : c.speed.c_factors)
    if (!(v >= 1.0) || !std::isfinite(v)) bad("speed.c_factors", "entries must be >= 1");

  const auto& ev = c.evolution;
  if (!(ev.L >= 1.0) || ev.L != std::floor(ev.L) || ev.L > 1e5) bad("evolution.L", "must be a positive integer");
  if (!(ev.T > 0.0) || !std::isfinite(ev.T)) bad("evolution.T", "must be positive");
  if (!(ev.dt > 0.0) || !(ev.dt <= ev.T)) bad("evolution.dt", "must lie in (0, T]");
  if (ev.snapshots < 10) bad("evolution.snapshots", "must be at least 10");
  if (!(ev.halfwidth > 0.0 && ev.halfwidth <= ev.L)) bad("evolution.halfwidth", "must lie in (0, L]");
  if (!(ev.theta > 0.0 && ev.theta < 1.0)) bad("evolution.theta", "must lie in (0, 1)");
}

std::string num(double v) {
  std::string s = fmt::format("{}", v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

void write_medium(std::ostringstream& o, const char* name, const MediumConfig& m) {
  o << "\n[" << name << "]\n"
    << "kind = " << quoted(m.kind) << "\n"
    << "mean = " << num(m.mean) << "\n"
    << "amplitudes = " << list(m.amplitudes) << "\n"
    << "phases = " << list(m.phases) << "\n"
    << "samples = " << list(m.samples) << "\n"
    << "top = " << num(m.top) << "\n"
    << "slope = " << num(m.slope) << "\n"
    << "center = " << num(m.center) << "\n"
    << "exponent = " << num(m.exponent) << "\n";
}

}  // namespace

ProblemConfig parse_config(std::string_view text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    const auto& b = e.source().begin;
    throw ConfigError(fmt::format("{}:{}:{}: {}", source, b.line, b.column, e.description()));
  }
  ProblemConfig c;
  c.b.kind = "constant";
  c.b.mean = 1.0;
  Reader r(root, "");
  r.get("experiment", c.experiment);
  r.get("seed", c.seed);
  r.get("direction", c.direction);
  if (const auto* t = r.table("kernel")) {
    Reader k(*t, "kernel");
    k.get("profile", c.kernel.profile);
    k.get("samples", c.kernel.samples);
    k.finish();
  }
  read_medium(r, "medium", c.medium, true);
  read_medium(r, "b", c.b, false);
  if (const auto* t = r.table("numerics")) {
    Reader k(*t, "numerics");
    k.get("M", c.numerics.M);
    k.get("eps", c.numerics.eps);
    k.get("lambda", c.numerics.lambda);
    k.get("lambdas", c.numerics.lambdas);
    k.get("tol", c.numerics.tol);
    k.get("threads", c.numerics.threads);
    k.finish();
  }
  if (const auto* t = r.table("front")) {
    Reader k(*t, "front");
    k.get("c_factor", c.front.c_factor);
    k.get("c", c.front.c);
    k.get("r", c.front.r);
    k.get("R", c.front.R);
    k.get("k_norm", c.front.k_norm);
    k.get("margin", c.front.margin);
    k.get("schedule", c.front.schedule);
    k.finish();
  }
  if (const auto* t = r.table("speed")) {
    Reader k(*t, "speed");
    k.get("c_factors", c.speed.c_factors);
    k.finish();
  }
  if (const auto* t = r.table("evolution")) {
    Reader k(*t, "evolution");
    k.get("L", c.evolution.L);
    k.get("T", c.evolution.T);
    k.get("dt", c.evolution.dt);
    k.get("snapshots", c.evolution.snapshots);
    k.get("halfwidth", c.evolution.halfwidth);
    k.get("theta", c.evolution.theta);
    k.finish();
  }
  r.finish();
  validate(c);
  return c;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string serialize_config(const ProblemConfig& c) {
  std::ostringstream o;
  o << "experiment = " << quoted(c.experiment) << "\n"
    << "seed = " << c.seed << "\n"
    << "direction = " << c.direction << "\n"
    << "\n[kernel]\n"
    << "profile = " << quoted(c.kernel.profile) << "\n"
    << "samples = " << list(c.kernel.samples) << "\n";
  write_medium(o, "medium", c.medium);
  write_medium(o, "b", c.b);
  const auto& n = c.numerics;
  o << "\n[numerics]\n"
    << "M = " << n.M << "\n"
    << "eps = " << num(n.eps) << "\n"
    << "lambda = " << num(n.lambda) << "\n"
    << "lambdas = " << list(n.lambdas) << "\n"
    << "tol = " << num(n.tol) << "\n"
    << "threads = " << n.threads << "\n";
  const auto& f = c.front;
  o << "\n[front]\n"
    << "c_factor = " << num(f.c_factor) << "\n"
    << "c = " << num(f.c) << "\n"
    << "r = " << num(f.r) << "\n"
    << "R = " << num(f.R) << "\n"
    << "k_norm = " << num(f.k_norm) << "\n"
    << "margin = " << num(f.margin) << "\n"
    << "schedule = [";
  for (std::size_t i = 0; i < f.schedule.size(); ++i)
    o << (i ? ", " : "") << "[" << num(f.schedule[i][0]) << ", " << num(f.schedule[i][1]) << "]";
  o << "]\n"
    << "\n[speed]\n"
    << "c_factors = " << list(c.speed.c_factors) << "\n";
  const auto& ev = c.evolution;
  o << "\n[evolution]\n"
    << "L = " << num(ev.L) << "\n"
    << "T = " << num(ev.T) << "\n"
    << "dt = " << num(ev.dt) << "\n"
    << "snapshots = " << ev.snapshots << "\n"
    << "halfwidth = " << num(ev.halfwidth) << "\n"
    << "theta = " << num(ev.theta) << "\n";
  return o.str();
}

}  // namespace perifront_app
