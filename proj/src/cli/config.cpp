#include "weakarrival/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "weakarrival/grid.hpp"

namespace weakarrival::cli {

ConfigError::ConfigError(std::string source, std::size_t line, std::string key, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         (key.empty() ? std::string() : ": key '" + key + "'") + ": " + message),
      source_(std::move(source)),
      line_(line),
      key_(std::move(key)) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Context {
  const std::string& source;
  std::size_t line;
  const std::string& key;

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(source, line, key, message); }
};

double parse_real(const std::string& v, const Context& ctx) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double d = std::strtod(begin, &end);
  if (v.empty() || end != begin + v.size()) ctx.fail("expected a number, got '" + v + "'");
  if (!std::isfinite(d)) ctx.fail("value must be finite");
  return d;
}

template <class Int>
Int parse_integer(const std::string& v, const Context& ctx) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    ctx.fail("expected a non-negative integer, got '" + v + "'");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const Context&)>;

// `access` returns a double& or std::optional<double>&.
template <class Access>
Setter real_field(Access access) {
  return [access](ExperimentConfig& c, const std::string& v, const Context& ctx) { access(c) = parse_real(v, ctx); };
}

template <class Access>
Setter optional_real_field(Access access) {
  return [access](ExperimentConfig& c, const std::string& v, const Context& ctx) {
    if (v == "auto")
      access(c).reset();
    else
      access(c) = parse_real(v, ctx);
  };
}

template <class Access>
Setter size_field(Access access) {
  return [access](ExperimentConfig& c, const std::string& v, const Context& ctx) {
    access(c) = parse_integer<std::size_t>(v, ctx);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"packet.x0", real_field([](ExperimentConfig& c) -> double& { return c.packet.x0; })},
      {"packet.p0", real_field([](ExperimentConfig& c) -> double& { return c.packet.p0; })},
      {"packet.sigma_x", real_field([](ExperimentConfig& c) -> double& { return c.packet.sigma_x; })},
      {"arrival.X", real_field([](ExperimentConfig& c) -> double& { return c.arrival.X; })},
      {"arrival.dt", real_field([](ExperimentConfig& c) -> double& { return c.arrival.dt; })},
      {"coupling.lambda", real_field([](ExperimentConfig& c) -> double& { return c.coupling.lambda; })},
      {"coupling.tau", real_field([](ExperimentConfig& c) -> double& { return c.coupling.tau; })},
      {"detector.sigma_q", real_field([](ExperimentConfig& c) -> double& { return c.detector.sigma_q; })},
      {"detector.chirp", real_field([](ExperimentConfig& c) -> double& { return c.detector.chirp; })},
      {"detector.mean_q", real_field([](ExperimentConfig& c) -> double& { return c.detector.mean_q; })},
      {"detector.mean_p", real_field([](ExperimentConfig& c) -> double& { return c.detector.mean_p; })},
      {"grid.x_min",
       optional_real_field([](ExperimentConfig& c) -> std::optional<double>& { return c.grid.x_min; })},
      {"grid.x_max",
       optional_real_field([](ExperimentConfig& c) -> std::optional<double>& { return c.grid.x_max; })},
      {"grid.x_n", size_field([](ExperimentConfig& c) -> std::size_t& { return c.grid.x_n; })},
      {"grid.q_min", real_field([](ExperimentConfig& c) -> double& { return c.grid.q_min; })},
      {"grid.q_max", real_field([](ExperimentConfig& c) -> double& { return c.grid.q_max; })},
      {"grid.q_n", size_field([](ExperimentConfig& c) -> std::size_t& { return c.grid.q_n; })},
      {"potential.kind",
       [](ExperimentConfig& c, const std::string& v, const Context& ctx) {
         if (v == "none") c.potential.kind = PotentialKind::none;
         else if (v == "harmonic") c.potential.kind = PotentialKind::harmonic;
         else if (v == "table") c.potential.kind = PotentialKind::table;
         else ctx.fail("expected none, harmonic or table, got '" + v + "'");
       }},
      {"potential.k", real_field([](ExperimentConfig& c) -> double& { return c.potential.k; })},
      {"potential.center", real_field([](ExperimentConfig& c) -> double& { return c.potential.center; })},
      {"potential.file",
       [](ExperimentConfig& c, const std::string& v, const Context& ctx) {
         if (v.empty()) ctx.fail("empty path");
         c.potential.file = v;
       }},
      {"potential.max_step", real_field([](ExperimentConfig& c) -> double& { return c.potential.max_step; })},
      {"times.start", real_field([](ExperimentConfig& c) -> double& { return c.times.start; })},
      {"times.stop", real_field([](ExperimentConfig& c) -> double& { return c.times.stop; })},
      {"times.step", real_field([](ExperimentConfig& c) -> double& { return c.times.step; })},
      {"units.hbar", real_field([](ExperimentConfig& c) -> double& { return c.units.hbar; })},
      {"units.mass", real_field([](ExperimentConfig& c) -> double& { return c.units.mass; })},
      {"seed",
       [](ExperimentConfig& c, const std::string& v, const Context& ctx) {
         c.seed = parse_integer<std::uint64_t>(v, ctx);
       }},
      {"classical.samples", size_field([](ExperimentConfig& c) -> std::size_t& { return c.classical.samples; })},
      {"diag.p_min", real_field([](ExperimentConfig& c) -> double& { return c.diag.p_min; })},
      {"diag.p_max", real_field([](ExperimentConfig& c) -> double& { return c.diag.p_max; })},
      {"diag.points", size_field([](ExperimentConfig& c) -> std::size_t& { return c.diag.points; })},
      {"diag_dt.p", real_field([](ExperimentConfig& c) -> double& { return c.diag_dt.p; })},
      {"diag_dt.dt_min", real_field([](ExperimentConfig& c) -> double& { return c.diag_dt.dt_min; })},
      {"diag_dt.dt_max", real_field([](ExperimentConfig& c) -> double& { return c.diag_dt.dt_max; })},
      {"diag_dt.points", size_field([](ExperimentConfig& c) -> std::size_t& { return c.diag_dt.points; })},
      {"simulate.tolerance",
       optional_real_field([](ExperimentConfig& c) -> std::optional<double>& { return c.simulate.tolerance; })},
  };
  return table;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kind_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::table: return "table";
    case PotentialKind::none: break;
  }
  return "none";
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& source, std::size_t line) {
  const Context ctx{source, line, key};
  const auto it = setters().find(key);
  if (it == setters().end()) ctx.fail("unknown key");
  it->second(cfg, value, ctx);
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find_first_of("#;");
    const std::string s = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(source, line, "", "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, s, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line, "", "missing key");
    if (!section.empty()) key = section + "." + key;
    apply_setting(cfg, key, value, source, line);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "", "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig cfg = parse_config(text.str(), path);
  const auto parent = std::filesystem::path(path).parent_path();
  cfg.base_dir = parent.empty() ? "." : parent.string();
  return cfg;
}

std::vector<double> ExperimentConfig::time_points() const {
  const double span = (times.stop - times.start) / times.step;
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = times.start + static_cast<double>(i) * times.step;
  return out;
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& key, const std::string& msg) { throw ConfigError("config", 0, key, msg); };
  if (!(units.hbar > 0.0)) fail("units.hbar", "must be positive");
  if (!(units.mass > 0.0)) fail("units.mass", "must be positive");
  if (!(packet.sigma_x > 0.0)) fail("packet.sigma_x", "must be positive");
  if (!(arrival.dt > 0.0)) fail("arrival.dt", "must be positive");
  if (!(coupling.tau >= 0.0)) fail("coupling.tau", "must be non-negative");
  if (!(detector.sigma_q > 0.0)) fail("detector.sigma_q", "must be positive");
  if (grid.x_min.has_value() != grid.x_max.has_value())
    fail(grid.x_min ? "grid.x_max" : "grid.x_min", "grid.x_min and grid.x_max must be given together");
  if (grid.x_min && !(*grid.x_max > *grid.x_min)) fail("grid.x_max", "must exceed grid.x_min");
  if (grid.x_n < 2 || !is_power_of_two(grid.x_n)) fail("grid.x_n", "must be a power of two >= 2");
  if (grid.q_n < 2 || !is_power_of_two(grid.q_n)) fail("grid.q_n", "must be a power of two >= 2");
  if (!(grid.q_max > grid.q_min)) fail("grid.q_max", "must exceed grid.q_min");
  if (potential.kind == PotentialKind::table && potential.file.empty())
    fail("potential.file", "required when potential.kind = table");
  if (!(potential.max_step > 0.0)) fail("potential.max_step", "must be positive");
  if (!(times.step > 0.0)) fail("times.step", "must be positive");
  if (!(times.stop >= times.start)) fail("times.stop", "must not precede times.start");
  if (classical.samples < 1) fail("classical.samples", "must be at least 1");
  if (!(diag.p_max > diag.p_min)) fail("diag.p_max", "must exceed diag.p_min");
  if (diag.points < 2) fail("diag.points", "must be at least 2");
  if (!(diag_dt.dt_min > 0.0)) fail("diag_dt.dt_min", "must be positive");
  if (!(diag_dt.dt_max > diag_dt.dt_min)) fail("diag_dt.dt_max", "must exceed diag_dt.dt_min");
  if (diag_dt.points < 2) fail("diag_dt.points", "must be at least 2");
  if (simulate.tolerance && !(*simulate.tolerance > 0.0)) fail("simulate.tolerance", "must be positive");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream o;
  const auto put = [&](const char* key, const std::string& v) { o << key << " = " << v << '\n'; };
  const auto opt = [](const std::optional<double>& v) { return v ? number(*v) : std::string("auto"); };
  put("packet.x0", number(packet.x0));
  put("packet.p0", number(packet.p0));
  put("packet.sigma_x", number(packet.sigma_x));
  put("arrival.X", number(arrival.X));
  put("arrival.dt", number(arrival.dt));
  put("coupling.lambda", number(coupling.lambda));
  put("coupling.tau", number(coupling.tau));
  put("detector.sigma_q", number(detector.sigma_q));
  put("detector.chirp", number(detector.chirp));
  put("detector.mean_q", number(detector.mean_q));
  put("detector.mean_p", number(detector.mean_p));
  put("grid.x_min", opt(grid.x_min));
  put("grid.x_max", opt(grid.x_max));
  put("grid.x_n", std::to_string(grid.x_n));
  put("grid.q_min", number(grid.q_min));
  put("grid.q_max", number(grid.q_max));
  put("grid.q_n", std::to_string(grid.q_n));
  put("potential.kind", kind_name(potential.kind));
  put("potential.k", number(potential.k));
  put("potential.center", number(potential.center));
  if (!potential.file.empty()) put("potential.file", potential.file);
  put("potential.max_step", number(potential.max_step));
  put("times.start", number(times.start));
  put("times.stop", number(times.stop));
  put("times.step", number(times.step));
  put("units.hbar", number(units.hbar));
  put("units.mass", number(units.mass));
  put("seed", std::to_string(seed));
  put("classical.samples", std::to_string(classical.samples));
  put("diag.p_min", number(diag.p_min));
  put("diag.p_max", number(diag.p_max));
  put("diag.points", std::to_string(diag.points));
  put("diag_dt.p", number(diag_dt.p));
  put("diag_dt.dt_min", number(diag_dt.dt_min));
  put("diag_dt.dt_max", number(diag_dt.dt_max));
  put("diag_dt.points", std::to_string(diag_dt.points));
  put("simulate.tolerance", opt(simulate.tolerance));
  return o.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace weakarrival::cli
