#include "dklb/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <fstream>
#include <sstream>

#include "dklb/brackets.hpp"
#include "dklb/conjugation.hpp"
#include "dklb/csv.hpp"
#include "dklb/ensemble.hpp"
#include "dklb/error.hpp"
#include "dklb/etdrk4.hpp"
#include "dklb/manifest.hpp"
#include "dklb/norms.hpp"
#include "dklb/picard.hpp"
#include "dklb/plot.hpp"
#include "dklb/snapshot.hpp"
#include "dklb/solver.hpp"
#include "dklb/warnings.hpp"

namespace fs = std::filesystem;

namespace dklb {

namespace {

const std::vector<std::pair<std::string, std::string>> kExperiments = {
    {"simulate", "Integrate the model and tabulate norms along the trajectory"},
    {"picard", "Solve the Duhamel fixed point and report contraction diagnostics"},
    {"verify-bracket", "Check bracket reductions against numerical quadrature"},
    {"verify-smoothing", "Smoothing-estimate ratios over a random ensemble"},
    {"conjugate-check", "Exponential-weight conjugation identity for KdV-KS"},
    {"decay-experiment", "Regularity gain probe and weight exchange ratios"},
    {"existence-time", "Local existence time from the smoothing constants"},
    {"convergence", "ETDRK4 self-convergence in dt"}};

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

// Files written by one run, with their content hashes for the manifest.
class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw ValidationError("output.dir '" + dir + "' cannot be created");
    }
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void csv(const std::string& name, const CsvTable& t) {
    t.write(path(name));
    hashes_[name] = git_blob_hash(t.str());
  }

  void svg(const std::string& csv_name, PlotKind kind, const std::string& name) {
    emit_plot(path(csv_name), kind, path(name));
    hashes_[name] = file_blob_hash(path(name));
  }

  void text(const std::string& name, const std::string& content) {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + path(name) + "'");
    f << content;
    hashes_[name] = git_blob_hash(content);
  }

  void snapshot(const std::string& name, const SpectralField& f, double t) {
    fs::create_directories(fs::path(path(name)).parent_path());
    write_snapshot(path(name), f, t);
    hashes_[name] = file_blob_hash(path(name));
  }

  const std::map<std::string, std::string>& hashes() const { return hashes_; }

 private:
  fs::path dir_;
  std::map<std::string, std::string> hashes_;
};

CsvTable trajectory_table(const Trajectory& tr, const ExperimentConfig& cfg) {
  std::vector<std::string> header{"step", "t", "l2", "hs"};
  for (const auto& l : cfg.weights.labels) header.push_back(l);
  CsvTable t(header);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const SpectralField& u = tr.snapshots[k];
    std::vector<std::string> row{num(k), num(tr.times[k]), num(coefficient_l2(u)), num(hs_norm(u, cfg.solver.s))};
    for (std::size_t w = 0; w < cfg.weights.list.size(); ++w) {
      const WeightedField wf = apply_weight(u, cfg.weights.list[w]);
      if (wf.boundary_leakage > cfg.weights.leakage_threshold) {
        record_warning("weight " + cfg.weights.labels[w] + ": boundary leakage " + num(wf.boundary_leakage) +
                       " exceeds weights.leakage_threshold");
      }
      row.push_back(num(coefficient_l2(wf.field)));
    }
    t.add_row(std::move(row));
  }
  return t;
}

std::size_t integer_steps(double T, double dt, const std::string& field) {
  const double ratio = T / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * ratio) {
    throw ValidationError("T / " + field + " must be a positive integer (got T=" + num(T) + ", " + field + "=" + num(dt) + ")");
  }
  return static_cast<std::size_t>(steps);
}

PicardOptions picard_options(const ExperimentConfig& cfg) {
  PicardOptions o;
  o.nt = cfg.solver.nt;
  o.max_iter = cfg.solver.max_iter;
  o.tol = cfg.solver.tol;
  o.s = cfg.solver.s;
  o.r = cfg.solver.r;
  o.b = cfg.solver.b;
  o.cstar = cfg.solver.cstar;
  return o;
}

void write_trajectory(OutputDir& od, const std::string& stem, const Trajectory& tr,
                      const ExperimentConfig& cfg) {
  od.csv(stem + ".csv", trajectory_table(tr, cfg));
  if (cfg.output.snapshots) {
    for (std::size_t k = 0; k < tr.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_snapshots/snap_%05zu.bin", stem.c_str(), k);
      od.snapshot(name, tr.snapshots[k], tr.times[k]);
    }
  }
  if (cfg.output.plots) od.svg(stem + ".csv", PlotKind::NormVsTime, stem + ".svg");
}

int cmd_simulate(const ExperimentConfig& cfg, OutputDir& od, std::ostream& out) {
  const GridPtr grid = cfg.make_grid();
  const SpectralField u0 = cfg.make_initial(grid);
  const PhaseFunction& phi = cfg.model.phase;
  auto integrate = [&]() -> std::optional<Trajectory> {
    if (cfg.solver.method == "picard") {
      PicardResult res = picard_solve(u0, phi, cfg.solver.T, picard_options(cfg));
      if (!res.report.converged) {
        write_trajectory(od, "trajectory", res.trajectory, cfg);
        out << "simulate: picard did not converge in " << res.report.iterations << " iterations\n";
        return std::nullopt;
      }
      return std::move(res.trajectory);
    }
    const std::size_t steps = integer_steps(cfg.solver.T, cfg.solver.dt, "solver.dt");
    if (steps % cfg.output.save_every != 0) {
      throw ValidationError("output.save_every must divide the number of steps T/dt");
    }
    if (cfg.solver.method == "etdrk4") {
      return etdrk4_solve(u0, phi, cfg.solver.T, cfg.solver.dt, {true, cfg.output.save_every});
    }
    return linear_solve(u0, phi, cfg.solver.T, steps / cfg.output.save_every);
  };
  const std::optional<Trajectory> result = integrate();
  if (!result) return kExitNumerical;
  const Trajectory& tr = *result;
  write_trajectory(od, "trajectory", tr, cfg);
  out << "simulate: method=" << cfg.solver.method << " snapshots=" << tr.size()
      << " final_t=" << num(tr.final_time()) << " final_l2=" << num(coefficient_l2(tr.snapshots.back()))
      << "\n";
  return kExitOk;
}

int cmd_picard(const ExperimentConfig& cfg, OutputDir& od, std::ostream& out) {
  const GridPtr grid = cfg.make_grid();
  const SpectralField u0 = cfg.make_initial(grid);
  const PicardResult res = picard_solve(u0, cfg.model.phase, cfg.solver.T, picard_options(cfg));
  const ContractionReport& rep = res.report;

  std::vector<std::string> header{"iteration", "distance"};
  for (int i = 1; i <= 8; ++i) header.push_back("lambda" + std::to_string(i));
  for (const char* h : {"Lambda", "Omega", "Theta", "contraction_constant"}) header.emplace_back(h);
  CsvTable report(header);
  for (std::size_t i = 0; i < rep.lambda_values.size(); ++i) {
    const LambdaValues& lv = rep.lambda_values[i];
    std::vector<std::string> row{num(i), i >= 1 ? num(rep.iterate_distances[i - 1]) : ""};
    for (const auto& l : lv.lambda) row.push_back(opt(l));
    row.push_back(opt(lv.Lambda));
    row.push_back(opt(lv.Omega));
    row.push_back(opt(lv.Theta));
    row.push_back(i >= 1 && i - 1 < rep.contraction_constants.size() ? num(rep.contraction_constants[i - 1]) : "");
    report.add_row(std::move(row));
  }
  od.csv("picard_report.csv", report);
  write_trajectory(od, "picard_trajectory", res.trajectory, cfg);
  if (!rep.note.empty()) record_warning(rep.note);

  out << (rep.converged ? "converged" : "not converged") << " iterations=" << rep.iterations
      << " T=" << num(rep.T_used) << " z_bound=" << num(rep.z_bound);
  if (!rep.iterate_distances.empty()) out << " last_distance=" << num(rep.iterate_distances.back());
  out << "\n";
  if (!rep.within_hypothesis) out << "note: " << rep.note << "\n";
  return rep.converged ? kExitOk : kExitNumerical;
}

int cmd_verify_bracket(const ExperimentConfig& cfg, OutputDir& od, std::ostream& out) {
  const auto pairs = standard_test_pairs();
  CsvTable t({"n", "m", "a", "pair", "lhs", "rhs", "scaled_residual", "pass"});
  std::ostringstream reductions;
  double worst = 0.0;
  std::size_t failures = 0, checks = 0;
  for (int n = 1; n <= cfg.bracket.max_n; ++n) {
    for (int m = 0; m < n; ++m) {
      for (int a = 0; a <= cfg.bracket.max_a; ++a) {
        const Bracket b = Bracket::make(n, m, a);
        const BracketExpression e = reduce(b);
        reductions << format_reduction(b, e) << "\n";
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          const double lhs = eval_numeric(b, pairs[p].u, pairs[p].rho);
          const double rhs = eval_numeric(e, pairs[p].u, pairs[p].rho);
          const double scaled = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
          const bool pass = scaled <= cfg.bracket.tol;
          worst = std::max(worst, scaled);
          failures += pass ? 0 : 1;
          ++checks;
          t.add_row({num(static_cast<std::size_t>(n)), num(static_cast<std::size_t>(m)),
                     num(static_cast<std::size_t>(a)), num(p), num(lhs), num(rhs), num(scaled),
                     pass ? "true" : "false"});
          out << b.to_string() << " pair=" << p << " residual=" << num(scaled) << (pass ? " ok" : " FAIL")
              << "\n";
        }
      }
    }
  }
  od.csv("bracket_residuals.csv", t);
  od.text("bracket_reductions.txt", reductions.str());
  out << "verify-bracket: checks=" << checks << " failures=" << failures << " max_scaled_residual=" << num(worst)
      << " tol=" << num(cfg.bracket.tol) << "\n";
  return failures == 0 ? kExitOk : kExitNumerical;
}

int cmd_verify_smoothing(const ExperimentConfig& cfg, OutputDir& od, std::ostream& out) {
  const GridPtr grid = cfg.make_grid();
  const NormEnsembleReport rep =
      verify_smoothing(cfg.smoothing, cfg.model.phase, grid, cfg.ensemble.size, cfg.ensemble.seed);
  CsvTable t({"sample_id", "ratio"});
  for (std::size_t i = 0; i < rep.ratios.size(); ++i) t.add_row({num(i), num(rep.ratios[i])});
  t.add_row({"max", num(rep.max_ratio)});
  od.csv("smoothing.csv", t);
  if (cfg.output.plots) od.svg("smoothing.csv", PlotKind::Histogram, "smoothing.svg");
  out << rep.inequality_id << " samples=" << rep.sample_count << " max_ratio=" << num(rep.max_ratio)
      << " fitted_constant=" << num(rep.fitted_constant) << "\n";
  return kExitOk;
}

int cmd_conjugate_check(const ExperimentConfig& cfg, OutputDir& od, std::ostream& out) {
  if (cfg.model.phase_text != "kdvks") {
    throw ValidationError("conjugate-check requires model.phase = kdvks (got '" + cfg.model.phase_text + "')");
  }
  const GridPtr grid = SpectralGrid::create(cfg.conjugation.N, cfg.conjugation.L, cfg.grid.dealias);
  const SpectralField f = gaussian(grid, cfg.conjugation.center, cfg.conjugation.width);
  CsvTable t({"b", "t", "rel_error", "bound_ratio", "delta", "mu"});
  for (double b : cfg.conjugation.b) {
    for (double tt : cfg.conjugation.t) {
      const ConjugationResult r = conjugation_check(f, b, cfg.model.eta, tt, cfg.weights.leakage_threshold);
      t.add_row({num(b), num(tt), num(r.rel_error), num(r.bound_ratio), num(r.delta), num(r.mu)});
      out << "b=" << num(b) << " t=" << num(tt) << " rel_error=" << num(r.rel_error)
          << " bound_ratio=" << num(r.bound_ratio) << " leakage=" << num(r.boundary_leakage) << "\n";
    }
  }
  od.csv("conjugation.csv", t);
  return kExitOk;
}

int cmd_decay_experiment(const ExperimentConfig& cfg, OutputDir& od, std::ostream& out) {
  RegularityProbeParams prm;
  prm.k = cfg.decay.k;
  prm.alpha_decay = cfg.decay.alpha;
  prm.gamma = cfg.decay.gamma;
  prm.h = cfg.decay.h;
  prm.epsilon = cfg.decay.epsilon;
  prm.eta = cfg.model.eta;
  prm.n = cfg.decay.N;
  prm.length = cfg.decay.L;
  prm.t_grid = cfg.decay.t;
  prm.sigma_grid = cfg.decay.sigma;
  CsvTable probe({"sigma", "t", "norm", "fitted_rate"});
  for (const RegularityProbeRow& r : regularity_gain_probe(prm)) {
    probe.add_row({num(r.sigma), num(r.t), num(r.norm), num(r.fitted_rate)});
  }
  od.csv("decay.csv", probe);
  out << "decay-experiment: optimality:" << prm.k << " rows=" << probe.rows().size() << "\n";

  if (!cfg.decay.exchange_t.empty()) {
    const auto reports = weight_exchange_ensemble(cfg.model.phase, cfg.make_grid(), cfg.decay.r, cfg.decay.s,
                                                  cfg.decay.exchange_t, cfg.ensemble.size, cfg.ensemble.seed);
    CsvTable ex({"t", "sample_id", "ratio"});
    for (std::size_t j = 0; j < reports.size(); ++j) {
      for (std::size_t i = 0; i < reports[j].ratios.size(); ++i) {
        ex.add_row({num(cfg.decay.exchange_t[j]), num(i), num(reports[j].ratios[i])});
      }
      out << reports[j].inequality_id << " samples=" << reports[j].sample_count
          << " max_ratio=" << num(reports[j].max_ratio) << "\n";
    }
    od.csv("exchange.csv", ex);
  }
  return kExitOk;
}

int cmd_existence_time(const ExperimentConfig& cfg, OutputDir& od, std::ostream& out) {
  const PhaseFunction& phi = cfg.model.phase;
  std::vector<double> norms = cfg.existence.norms;
  if (norms.empty()) norms.push_back(hs_norm(cfg.make_initial(cfg.make_grid()), cfg.solver.s));
  CsvTable t({"norm", "cstar", "T0", "z0", "A_sum", "threshold"});
  for (double n : norms) {
    for (double c : cfg.existence.cstar) {
      const ExistenceTime e = existence_time(n, phi, cfg.solver.s, c);
      const double a_sum = A2(phi, e.T0) + A3(phi, cfg.solver.s, e.T0);
      const double threshold = e.z0 > 0.0 ? 1.0 / (2.0 * c * e.z0) : INFINITY;
      t.add_row({num(n), num(c), num(e.T0), num(e.z0), num(a_sum), num(threshold)});
      out << "norm=" << num(n) << " cstar=" << num(c) << " T0=" << num(e.T0) << " z0=" << num(e.z0) << "\n";
    }
  }
  od.csv("existence.csv", t);
  return kExitOk;
}

int cmd_convergence(const ExperimentConfig& cfg, OutputDir& od, std::ostream& out) {
  const GridPtr grid = SpectralGrid::create(cfg.convergence.N, cfg.convergence.L, cfg.grid.dealias);
  const SpectralField u0 = gaussian(grid, 0.0, cfg.convergence.width, cfg.convergence.norm);
  const double T = cfg.convergence.T;
  auto final_state = [&](double dt, const std::string& field) {
    const std::size_t steps = integer_steps(T, dt, field);
    return etdrk4_solve(u0, cfg.model.phase, T, dt, {true, steps}).snapshots.back();
  };
  const SpectralField ref = final_state(cfg.convergence.reference_dt, "convergence.reference_dt");
  CsvTable t({"dt", "error", "order"});
  double prev_dt = 0.0, prev_err = 0.0;
  for (double dt : cfg.convergence.dts) {
    SpectralField d = final_state(dt, "convergence.dts");
    d -= ref;
    const double err = coefficient_l2(d);
    const std::string order =
        prev_dt > 0.0 && err > 0.0 && prev_err > 0.0 ? num(std::log(prev_err / err) / std::log(prev_dt / dt)) : "";
    t.add_row({num(dt), num(err), order});
    out << "dt=" << num(dt) << " error=" << num(err) << (order.empty() ? "" : " order=" + order) << "\n";
    prev_dt = dt;
    prev_err = err;
  }
  od.csv("convergence.csv", t);
  if (cfg.output.plots) od.svg("convergence.csv", PlotKind::Convergence, "convergence.svg");
  out << "convergence: least-squares slope=" << num(loglog_slope(t)) << "\n";
  return kExitOk;
}

const std::map<std::string, std::function<int(const ExperimentConfig&, OutputDir&, std::ostream&)>>&
handlers() {
  static const std::map<std::string, std::function<int(const ExperimentConfig&, OutputDir&, std::ostream&)>> h = {
      {"simulate", cmd_simulate},
      {"picard", cmd_picard},
      {"verify-bracket", cmd_verify_bracket},
      {"verify-smoothing", cmd_verify_smoothing},
      {"conjugate-check", cmd_conjugate_check},
      {"decay-experiment", cmd_decay_experiment},
      {"existence-time", cmd_existence_time},
      {"convergence", cmd_convergence},
  };
  return h;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out) {
  const Manifest m = read_manifest(manifest_path);
  if (!handlers().contains(m.subcommand)) {
    throw ValidationError("manifest names an unknown subcommand '" + m.subcommand + "'");
  }
  ConfigValues values = m.config;
  if (!out_dir.empty()) values["output"]["dir"] = out_dir;
  const ExperimentConfig cfg = build_config(values);
  if (cfg.ensemble.seed != m.seed) throw ValidationError("manifest seed does not match ensemble.seed");
  const int code = run_experiment(m.subcommand, cfg, out, m.inputs.contains("config_file") ? m.inputs.at("config_file") : "");
  if (code != kExitOk) return code;

  const Manifest now = read_manifest((fs::path(cfg.output.dir) / "manifest.json").string());
  std::size_t same = 0, differ = 0;
  for (const auto& [name, hash] : m.outputs) {
    const auto it = now.outputs.find(name);
    if (it != now.outputs.end() && it->second == hash) {
      ++same;
    } else {
      ++differ;
      out << "replay: " << name << " differs\n";
    }
  }
  out << "replay: " << same << " outputs identical, " << differ << " differ\n";
  return differ == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int run_experiment(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& out,
                   const std::string& config_hash) {
  const auto it = handlers().find(subcommand);
  if (it == handlers().end()) throw ValidationError("unknown subcommand '" + subcommand + "'");
  clear_warnings();
  OutputDir od(cfg.output.dir);
  const int code = it->second(cfg, od, out);

  Manifest m;
  m.subcommand = subcommand;
  m.seed = cfg.ensemble.seed;
  m.config = cfg.values;
  if (!config_hash.empty()) m.inputs["config_file"] = config_hash;
  m.inputs["effective_config"] = git_blob_hash(to_ini(cfg.values));
  m.outputs = od.hashes();
  m.warnings = recorded_warnings();
  write_manifest(od.path("manifest.json"), m);
  for (const auto& w : m.warnings) out << "warning: " << w << "\n";
  return code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral laboratory for dissipative KdV-type equations", "dklb"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
  };
  std::map<std::string, Common> common;
  int max_n = -1, max_a = -1;
  double tol = -1.0;

  for (const auto& [name, help] : kExperiments) {
    CLI::App* sub = app.add_subcommand(name, help);
    Common& c = common[name];
    sub->add_option("--config", c.config, "INI configuration file");
    sub->add_option("--set", c.sets, "Override as section.key=value (repeatable)");
    sub->add_option("--out", c.out, "Output directory (overrides output.dir)");
    if (name == "verify-bracket") {
      sub->add_option("--max-n", max_n, "Largest first derivative order n");
      sub->add_option("--max-a", max_a, "Largest weight derivative order a");
      sub->add_option("--tol", tol, "Tolerance on the scaled residual");
    }
  }

  CLI::App* plot = app.add_subcommand("plot", "Render an SVG from a CSV output");
  std::string csv_path, kind_name, svg_path;
  plot->add_option("--csv", csv_path, "Input CSV")->required();
  plot->add_option("--kind", kind_name, "norm-vs-time | histogram | convergence")->required();
  plot->add_option("--svg", svg_path, "Output SVG (default: CSV path with .svg)");

  CLI::App* rep = app.add_subcommand("replay", "Re-run a manifest and compare output hashes");
  std::string manifest_path, replay_out;
  rep->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
  rep->add_option("--out", replay_out, "Output directory for the replay");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  return guarded(err, [&]() -> int {
    if (plot->parsed()) {
      if (svg_path.empty()) svg_path = fs::path(csv_path).replace_extension(".svg").string();
      emit_plot(csv_path, parse_plot_kind(kind_name), svg_path);
      out << "plot: wrote " << svg_path << "\n";
      return kExitOk;
    }
    if (rep->parsed()) return replay(manifest_path, replay_out, out);

    for (const auto& [name, help] : kExperiments) {
      if (!app.got_subcommand(name)) continue;
      const Common& c = common[name];
      ConfigValues values = c.config.empty() ? config_defaults() : load_config_file(c.config);
      const std::string config_hash = c.config.empty() ? "" : file_blob_hash(c.config);
      for (const std::string& s : c.sets) apply_override(values, s);
      if (max_n >= 0) values["bracket"]["max_n"] = std::to_string(max_n);
      if (max_a >= 0) values["bracket"]["max_a"] = std::to_string(max_a);
      if (tol >= 0.0) values["bracket"]["tol"] = format_number(tol);
      if (!c.out.empty()) values["output"]["dir"] = c.out;
      return run_experiment(name, build_config(values), out, config_hash);
    }
    return kExitValidation;
  });
}

}  // namespace dklb
