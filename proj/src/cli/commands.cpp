#include "weakarrival/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "../worker_pool.hpp"
#include "weakarrival/arrival_operator.hpp"
#include "weakarrival/classical.hpp"
#include "weakarrival/cli/csv.hpp"
#include "weakarrival/detector.hpp"
#include "weakarrival/errors.hpp"
#include "weakarrival/weak_measurement.hpp"

namespace weakarrival::cli {

namespace {

using Row = std::vector<std::string>;

void provenance(CsvWriter& csv, const std::string& command, const ExperimentConfig& cfg,
                const std::string& extra = {}) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a(cfg.canonical()));
  std::string line = std::string("weakarrival ") + WEAKARRIVAL_VERSION + " command=" + command +
                     " hbar=" + format_number(cfg.units.hbar) + " mass=" + format_number(cfg.units.mass) +
                     " config_hash=" + hash;
  if (!extra.empty()) line += " " + extra;
  csv.comment(line);
}

ArrivalConfig arrival_config(const ExperimentConfig& cfg) {
  ArrivalConfig a;
  a.X = cfg.arrival.X;
  a.dt = cfg.arrival.dt;
  a.units = cfg.units;
  return a;
}

GaussianPacket packet(const ExperimentConfig& cfg) {
  return {cfg.packet.x0, cfg.packet.p0, cfg.packet.sigma_x};
}

PositionGrid particle_grid(const ExperimentConfig& cfg) {
  if (cfg.grid.x_min) return PositionGrid(*cfg.grid.x_min, *cfg.grid.x_max, cfg.grid.x_n);
  const auto t = cfg.time_points();
  const double t_max = std::max(std::abs(t.front()), std::abs(t.back())) + cfg.arrival.dt;
  return auto_grid(packet(cfg), cfg.arrival.X, t_max, cfg.units, cfg.grid.x_n);
}

// Two whitespace- or comma-separated columns x, V with increasing x, linearly
// interpolated onto the grid nodes.
PotentialSpec load_table(const ExperimentConfig& cfg, const PositionGrid& grid) {
  std::filesystem::path path(cfg.potential.file);
  if (path.is_relative()) path = std::filesystem::path(cfg.base_dir) / path;
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "potential.file", "cannot open potential table");
  std::vector<double> xs, vs;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream fields(s);
    double x = 0.0, v = 0.0;
    if (!(fields >> x)) continue;
    std::string rest;
    if (!(fields >> v) || (fields >> rest))
      throw ConfigError(path.string(), line, "potential.file", "expected two columns 'x V'");
    if (!std::isfinite(x) || !std::isfinite(v))
      throw ConfigError(path.string(), line, "potential.file", "non-finite entry");
    if (!xs.empty() && !(x > xs.back()))
      throw ConfigError(path.string(), line, "potential.file", "x must be strictly increasing");
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 2) throw ConfigError(path.string(), 0, "potential.file", "need at least two rows");
  std::vector<double> values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.node(j);
    if (x < xs.front() || x > xs.back())
      throw ConfigError(path.string(), 0, "potential.file", "table does not cover the particle grid");
    const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const std::size_t k = std::min(hi, xs.size() - 1);
    const double s = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    values[j] = vs[k - 1] + s * (vs[k] - vs[k - 1]);
  }
  return PotentialSpec(grid, std::move(values));
}

std::unique_ptr<PotentialSpec> build_potential(const ExperimentConfig& cfg, const PositionGrid& grid) {
  switch (cfg.potential.kind) {
    case PotentialKind::harmonic:
      return std::make_unique<PotentialSpec>(PotentialSpec::harmonic(grid, cfg.potential.k, cfg.potential.center));
    case PotentialKind::table:
      return std::make_unique<PotentialSpec>(load_table(cfg, grid));
    case PotentialKind::none:
      break;
  }
  return nullptr;
}

DetectorState detector(const ExperimentConfig& cfg) {
  const PositionGrid q(cfg.grid.q_min, cfg.grid.q_max, cfg.grid.q_n);
  return DetectorState::gaussian(q, cfg.units, cfg.detector.sigma_q, cfg.detector.mean_q, cfg.detector.mean_p,
                                 cfg.detector.chirp);
}

ComplexArrivalResult arrival_at(const GridWavefunction& psi_t, const ArrivalConfig& a, const Dynamics& dyn) {
  if (dyn.is_free()) return expectation_pi(psi_t, a);
  return expectation_pi_grid(psi_t, a, dyn);
}

void emit(CsvWriter& csv, const std::vector<Row>& rows) {
  for (const auto& r : rows) csv.row(r);
}

// Trapezoid rule over the rows whose t lies in [a, b].
double window_integral(const std::vector<double>& t, const std::vector<double>& y, double a, double b) {
  double s = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] < a || t[i + 1] > b) continue;
    s += 0.5 * (y[i] + y[i + 1]) * (t[i + 1] - t[i]);
    ++used;
  }
  if (used == 0) throw NumericalError("normalize: window contains fewer than two time points");
  return s;
}

}  // namespace

int cmd_diag(const ExperimentConfig& cfg, std::ostream& out, std::ostream&, const RunOptions& opt) {
  cfg.validate();
  const ArrivalConfig a = arrival_config(cfg);
  const std::size_t n = cfg.diag.points;
  std::vector<Row> rows(n);
  detail::parallel_for(n, opt.jobs, [&](std::size_t i) {
    const double p = cfg.diag.p_min + (cfg.diag.p_max - cfg.diag.p_min) * static_cast<double>(i) /
                                          static_cast<double>(n - 1);
    const Complex v = pi_plus_diagonal(p, a);
    rows[i] = {format_number(p), format_number(v.real()), format_number(v.imag()),
               format_number(std::max(p, 0.0) / cfg.units.mass)};
  });
  CsvWriter csv(out);
  provenance(csv, "diag", cfg);
  csv.row({"p", "re", "im", "classical"});
  emit(csv, rows);
  return kExitOk;
}

int cmd_diag_dt(const ExperimentConfig& cfg, std::ostream& out, std::ostream&, const RunOptions& opt) {
  cfg.validate();
  const std::size_t n = cfg.diag_dt.points;
  const double lo = std::log(cfg.diag_dt.dt_min), hi = std::log(cfg.diag_dt.dt_max);
  std::vector<Row> rows(n);
  detail::parallel_for(n, opt.jobs, [&](std::size_t i) {
    ArrivalConfig a = arrival_config(cfg);
    // Endpoints exactly as configured; interior points log-spaced.
    a.dt = i == 0       ? cfg.diag_dt.dt_min
           : i + 1 == n ? cfg.diag_dt.dt_max
                        : std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    const Complex v = pi_plus_diagonal(cfg.diag_dt.p, a);
    rows[i] = {format_number(a.dt), format_number(v.real()), format_number(v.imag()),
               format_number(cfg.diag_dt.p / cfg.units.mass)};
  });
  CsvWriter csv(out);
  provenance(csv, "diag-dt", cfg);
  csv.row({"dt", "re", "im", "classical"});
  emit(csv, rows);
  return kExitOk;
}

int cmd_expect(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err, const RunOptions& opt) {
  cfg.validate();
  if (cfg.times.start < 0.0) throw ConfigError("config", 0, "times.start", "must be non-negative for expect");
  const ArrivalConfig a = arrival_config(cfg);
  const PositionGrid grid = particle_grid(cfg);
  const auto potential = build_potential(cfg, grid);
  const Dynamics dyn{potential.get(), cfg.potential.max_step};
  const GridWavefunction psi0 = packet(cfg).sample(grid, cfg.units);
  const double coefficient = detector_coefficient(detector(cfg));
  const std::vector<double> t = cfg.time_points();
  const std::size_t n = t.size();

  std::vector<ComplexArrivalResult> quantum(n);
  std::vector<EvolutionDiagnostics> diag(n);
  detail::parallel_for(n, opt.jobs, [&](std::size_t i) {
    quantum[i] = arrival_at(dyn.evolve(psi0, t[i], &diag[i]), a, dyn);
  });
  for (const auto& d : diag)
    if (d.boundary_leak) {
      err << "warning: wavefunction amplitude reached the grid edge (" << format_number(d.max_edge_amplitude)
          << "); widen the grid\n";
      break;
    }

  // Classical ensemble matched to the Wigner function of the packet, carried
  // forward from one output time to the next.
  const PhaseSpaceEnsemble ens0 = sample_gaussian_ensemble(
      cfg.packet.x0, cfg.packet.p0, cfg.packet.sigma_x, packet(cfg).sigma_p(cfg.units), cfg.classical.samples,
      cfg.seed);
  std::vector<WindowArrival> classical(n);
  if (dyn.is_free()) {
    for (std::size_t i = 0; i < n; ++i)
      classical[i] = arrival_probability_window(ens0, a.X, t[i], a.dt, cfg.units);
  } else {
    PhaseSpaceEnsemble ens = evolve_ensemble(ens0, t[0], cfg.units, potential.get(), opt.jobs);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) ens = evolve_ensemble(ens, t[i] - t[i - 1], cfg.units, potential.get(), opt.jobs);
      classical[i] = arrival_probability_window(ens, a.X, 0.0, a.dt, cfg.units, potential.get(), opt.jobs);
    }
  }

  std::vector<double> pi1(n), cl(n), cl_err(n);
  for (std::size_t i = 0; i < n; ++i) {
    pi1[i] = quantum[i].pi1;
    cl[i] = classical[i].pi_plus;
    cl_err[i] = classical[i].pi_plus_error;
  }
  std::string extra;
  if (opt.normalize) {
    const auto [wa, wb] = *opt.normalize;
    if (!(wb > wa)) throw ConfigError("--normalize", 0, "", "window end must exceed window start");
    const double iq = window_integral(t, pi1, wa, wb);
    const double ic = window_integral(t, cl, wa, wb);
    if (!(iq > 0.0) || !(ic > 0.0)) throw NumericalError("normalize: window integral is not positive");
    for (std::size_t i = 0; i < n; ++i) {
      pi1[i] /= iq;
      cl[i] /= ic;
      cl_err[i] /= ic;
    }
    extra = "normalize=" + format_number(wa) + "," + format_number(wb);
  }

  CsvWriter csv(out);
  provenance(csv, "expect", cfg, extra);
  csv.row({"t", "pi1", "pi2", "w12_predicted", "classical_pi_plus", "classical_err"});
  for (std::size_t i = 0; i < n; ++i)
    csv.row({format_number(t[i]), format_number(pi1[i]), format_number(quantum[i].pi2),
             format_number(w12_predicted(quantum[i], coefficient, a)), format_number(cl[i]),
             format_number(cl_err[i])});
  return kExitOk;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err, const RunOptions& opt) {
  cfg.validate();
  const ArrivalConfig a = arrival_config(cfg);
  const PositionGrid grid = particle_grid(cfg);
  const auto potential = build_potential(cfg, grid);
  const Dynamics dyn{potential.get(), cfg.potential.max_step};
  const GridWavefunction psi0 = packet(cfg).sample(grid, cfg.units);
  const DetectorState det = detector(cfg);
  const double coefficient = detector_coefficient(det);
  const CouplingConfig cc{cfg.coupling.lambda, cfg.coupling.tau};
  const double weakness = cc.weakness_ratio(cfg.detector.sigma_q, cfg.units);
  const std::vector<double> t = cfg.time_points();
  const std::size_t n = t.size();

  const std::vector<SweepPoint> sweep = run_protocol_sweep(psi0, det, a, cc, t, dyn, opt.jobs);
  std::vector<double> predicted(n);
  detail::parallel_for(n, opt.jobs, [&](std::size_t i) {
    predicted[i] = w12_predicted(arrival_at(dyn.evolve(psi0, t[i]), a, dyn), coefficient, a);
  });

  CsvWriter csv(out);
  provenance(csv, "simulate", cfg);
  csv.row({"t", "w2", "w1", "w1_given_2", "w12_sim", "w12_predicted", "weakness_ratio", "flag"});
  double max_dev = 0.0;
  std::size_t ok = 0, degenerate = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const SweepPoint& pt = sweep[i];
    const std::string pred = format_number(predicted[i]);
    const std::string ratio = format_number(weakness);
    if (pt.status == SweepStatus::ok) {
      const WeakMeasurementOutcome& o = *pt.outcome;
      max_dev = std::max(max_dev, std::abs(o.w12 - predicted[i]));
      ++ok;
      csv.row({format_number(t[i]), format_number(o.w2), format_number(o.w1), format_number(o.w1_given_2),
               format_number(o.w12), pred, ratio, std::abs(o.w12) > 1.0 ? "exceeds_unit" : "ok"});
    } else if (pt.status == SweepStatus::postselection_failed) {
      csv.row({format_number(t[i]), "", "", "", "", pred, ratio, "postselection_failed"});
    } else {
      ++degenerate;
      csv.row({format_number(t[i]), "", "", "", "", pred, ratio, "degenerate_coupling"});
    }
  }
  if (ok > 0) err << "max |w12_sim - w12_predicted| = " << format_number(max_dev) << '\n';
  if (degenerate > 0) {
    err << "error: lambda*tau = 0, weak values are undefined\n";
    return kExitPostselection;
  }
  if (ok == 0) {
    err << "error: postselection failed at every time point\n";
    return kExitPostselection;
  }
  if (cfg.simulate.tolerance && max_dev > *cfg.simulate.tolerance) {
    err << "error: deviation exceeds simulate.tolerance = " << format_number(*cfg.simulate.tolerance) << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weak-measurement arrival-time distributions"};
  app.set_version_flag("--version", std::string(WEAKARRIVAL_VERSION));
  app.require_subcommand(1);

  struct Common {
    std::string config, out;
    unsigned jobs = 1;
    std::vector<std::string> set;
  };
  Common common;
  std::vector<double> normalize;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Config file (key = value)");
    sub->add_option("--out", common.out, "Output CSV path (default stdout)");
    sub->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--set", common.set, "Override a config key, key=value (repeatable)");
  };
  CLI::App* diag = app.add_subcommand("diag", "Diagonal elements <p|Pi+|p> over a momentum range");
  CLI::App* diag_dt = app.add_subcommand("diag-dt", "<p|Pi+|p> over a log-spaced range of dt");
  CLI::App* expect = app.add_subcommand("expect", "Pi1, Pi2 and the classical density over time");
  CLI::App* simulate = app.add_subcommand("simulate", "Full weak-measurement protocol over time");
  for (auto* sub : {diag, diag_dt, expect, simulate}) add_common(sub);
  expect->add_option("--normalize", normalize, "Normalize over the time window A B")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e_out;
    const int code = app.exit(e, o, e_out);
    out << o.str();
    err << e_out.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    ExperimentConfig cfg = common.config.empty() ? ExperimentConfig{} : load_config(common.config);
    for (const auto& kv : common.set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set", 0, kv, "expected key=value");
      const auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
      };
      apply_setting(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    RunOptions opt;
    opt.jobs = common.jobs;
    if (!normalize.empty()) opt.normalize = std::make_pair(normalize[0], normalize[1]);

    std::ofstream file;
    if (!common.out.empty()) {
      file.open(common.out, std::ios::binary);
      if (!file) throw ConfigError(common.out, 0, "", "cannot open output file");
    }
    // Rows are written to a buffer first so a failed run leaves no partial CSV behind.
    std::ostringstream buffer;
    int code = kExitOk;
    if (diag->parsed()) code = cmd_diag(cfg, buffer, err, opt);
    else if (diag_dt->parsed()) code = cmd_diag_dt(cfg, buffer, err, opt);
    else if (expect->parsed()) code = cmd_expect(cfg, buffer, err, opt);
    else code = cmd_simulate(cfg, buffer, err, opt);
    (common.out.empty() ? out : file) << buffer.str();
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace weakarrival::cli
