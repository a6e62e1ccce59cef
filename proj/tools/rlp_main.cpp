// Command-line front end: every subcommand assembles a manifest document from
// its flags and hands it to the same validation + runner path used for
// manifest files, so `rlp run --manifest` and direct flags cannot drift.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rlp/errors.hpp"
#include "rlp/experiments.hpp"
#include "rlp/manifest.hpp"

namespace {

std::string quoted(const std::string& s) { return '"' + s + '"'; }

std::string num(double v) { return rlp::cli::format_g17(v); }

std::string list(const std::vector<double>& vs) {
  std::string out = "[";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += num(vs[i]);
  }
  return out + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification toolkit for the reflected "
               "integrated-Brownian (Langevin) process"};
  app.set_version_flag("--version", rlp::cli::kLibraryVersion);
  app.require_subcommand(1);

  int status = 0;
  const auto execute = [&status](const std::string& text) {
    const rlp::cli::ExperimentManifest m = rlp::cli::parse_manifest(text);
    status = rlp::cli::run_experiment(m).status;
  };

  // ---- simulate ----------------------------------------------------------
  auto* sim = app.add_subcommand(
      "simulate", "sample one free, stopped, or sign-folded chain");
  struct {
    std::int64_t steps = 0, seed = 0;
    double dt = 0, v0 = 0, stopped_from = 0, level_step = 0.01,
           bandwidth_factor = 1.0;
    bool bounce = false, no_noise = false;
    std::string mode = "bridge", out, reflected_out, stable_out;
  } so;
  sim->add_option("--steps", so.steps, "number of grid steps")->required();
  sim->add_option("--dt", so.dt, "grid step size")->required();
  sim->add_option("--seed", so.seed, "random seed")->required();
  auto* sim_v0 = sim->add_option("--v0", so.v0, "initial velocity");
  auto* sim_sf = sim->add_option("--stopped-from", so.stopped_from,
                                 "start height; absorb at the first fall to 0");
  sim->add_flag("--bounce", so.bounce, "fold the position to its absolute value");
  sim->add_flag("--no-noise", so.no_noise, "disable the driving noise");
  auto* sim_mode = sim->add_option("--mode", so.mode, "generator: bridge|exact")
                       ->check(CLI::IsMember({"bridge", "exact"}));
  sim->add_option("--out", so.out, "path CSV (t,w,y)")->required();
  auto* sim_ro = sim->add_option("--reflected-out", so.reflected_out,
                                 "reflected path CSV (optional)");
  auto* sim_so = sim->add_option("--stable-out", so.stable_out,
                                 "inverse-local-time path CSV (optional)");
  auto* sim_ls = sim->add_option("--level-step", so.level_step,
                                 "local-time level grid spacing");
  auto* sim_bw = sim->add_option("--bandwidth-factor", so.bandwidth_factor,
                                 "occupation bandwidth in units of sqrt(dt)");
  sim->callback([&] {
    std::ostringstream d;
    d << "command = \"simulate\"\nversion = 1\n";
    d << "steps = " << so.steps << "\ndt = " << num(so.dt)
      << "\nseed = " << so.seed << "\n";
    if (sim_v0->count()) d << "v0 = " << num(so.v0) << "\n";
    if (sim_sf->count()) d << "stopped_from = " << num(so.stopped_from) << "\n";
    if (so.bounce) d << "bounce = true\n";
    if (so.no_noise) d << "noise = false\n";
    if (sim_mode->count()) d << "mode = " << quoted(so.mode) << "\n";
    d << "out = " << quoted(so.out) << "\n";
    if (sim_ro->count()) d << "reflected_out = " << quoted(so.reflected_out) << "\n";
    if (sim_so->count()) d << "stable_out = " << quoted(so.stable_out) << "\n";
    if (sim_ls->count()) d << "level_step = " << num(so.level_step) << "\n";
    if (sim_bw->count())
      d << "bandwidth_factor = " << num(so.bandwidth_factor) << "\n";
    execute(d.str());
  });

  // ---- excursions --------------------------------------------------------
  auto* exc = app.add_subcommand(
      "excursions", "decompose reflected chains and summarize the tail laws");
  struct {
    std::int64_t steps = 0, seed = 0, replicas = 1, hill_k = 0;
    double dt = 0, min_height = 0;
    bool no_noise = false;
    std::string mode = "bridge", out, stats;
  } eo;
  exc->add_option("--steps", eo.steps, "grid steps per replica")->required();
  exc->add_option("--dt", eo.dt, "grid step size")->required();
  exc->add_option("--seed", eo.seed, "random seed")->required();
  auto* exc_rep = exc->add_option("--replicas", eo.replicas,
                                  "independent chains to pool");
  auto* exc_mh = exc->add_option("--min-height", eo.min_height,
                                 "drop excursions below this height");
  auto* exc_hk = exc->add_option("--hill-k", eo.hill_k,
                                 "upper order statistics for the Hill index");
  exc->add_flag("--no-noise", eo.no_noise, "disable the driving noise");
  auto* exc_mode = exc->add_option("--mode", eo.mode, "generator: bridge|exact")
                       ->check(CLI::IsMember({"bridge", "exact"}));
  exc->add_option("--out", eo.out, "per-excursion CSV")->required();
  exc->add_option("--stats", eo.stats, "tail-statistics JSON")->required();
  exc->callback([&] {
    std::ostringstream d;
    d << "command = \"excursions\"\nversion = 1\n";
    d << "steps = " << eo.steps << "\ndt = " << num(eo.dt)
      << "\nseed = " << eo.seed << "\n";
    if (exc_rep->count()) d << "replicas = " << eo.replicas << "\n";
    if (exc_mh->count()) d << "min_height = " << num(eo.min_height) << "\n";
    if (exc_hk->count()) d << "hill_k = " << eo.hill_k << "\n";
    if (eo.no_noise) d << "noise = false\n";
    if (exc_mode->count()) d << "mode = " << quoted(eo.mode) << "\n";
    d << "out = " << quoted(eo.out) << "\nstats = " << quoted(eo.stats) << "\n";
    execute(d.str());
  });

  // ---- exit-law ----------------------------------------------------------
  auto* ext = app.add_subcommand(
      "exit-law", "two-sided exit of the stable walk against the analytic law");
  struct {
    std::int64_t replicas = 0, seed = 0, step_cap = 0, bins = 30, workers = 1;
    double x = 0, eps = 0, dt = 0, window_mult = 20;
    std::string out, gof;
  } xo;
  ext->add_option("--x", xo.x, "start point inside (0, eps)")->required();
  ext->add_option("--eps", xo.eps, "interval width")->required();
  ext->add_option("--replicas", xo.replicas, "independent exits")->required();
  ext->add_option("--seed", xo.seed, "random seed")->required();
  auto* ext_dt = ext->add_option("--dt", xo.dt,
                                 "walk step (default eps^3 * 1e-4)");
  auto* ext_cap = ext->add_option("--step-cap", xo.step_cap,
                                  "censor a walk after this many steps");
  auto* ext_bins = ext->add_option("--bins", xo.bins, "histogram bins");
  auto* ext_wm = ext->add_option("--window-mult", xo.window_mult,
                                 "test window is (eps, window_mult*eps]");
  auto* ext_wk = ext->add_option("--workers", xo.workers,
                                 "worker threads (replica-deterministic)");
  ext->add_option("--out", xo.out, "per-exit CSV")->required();
  ext->add_option("--gof", xo.gof, "goodness-of-fit JSON")->required();
  ext->callback([&] {
    std::ostringstream d;
    d << "command = \"exit_law\"\nversion = 1\n";
    d << "x = " << num(xo.x) << "\neps = " << num(xo.eps)
      << "\nreplicas = " << xo.replicas << "\nseed = " << xo.seed << "\n";
    if (ext_dt->count()) d << "dt = " << num(xo.dt) << "\n";
    if (ext_cap->count()) d << "step_cap = " << xo.step_cap << "\n";
    if (ext_bins->count()) d << "bins = " << xo.bins << "\n";
    if (ext_wm->count()) d << "window_mult = " << num(xo.window_mult) << "\n";
    if (ext_wk->count()) d << "workers = " << xo.workers << "\n";
    d << "out = " << quoted(xo.out) << "\ngof = " << quoted(xo.gof) << "\n";
    execute(d.str());
  });

  // ---- scaling -----------------------------------------------------------
  auto* scl = app.add_subcommand(
      "scaling", "compare reflected marginals across a time rescaling");
  struct {
    std::int64_t replicas = 0, steps = 0, seed = 0, slide_budget = 0;
    double factor = 4, dt = 0;
    std::string out;
  } co;
  auto* scl_f = scl->add_option("--factor", co.factor, "time dilation factor");
  scl->add_option("--replicas", co.replicas, "draws per group")->required();
  scl->add_option("--steps", co.steps, "substituted-grid index, both groups")
      ->required();
  scl->add_option("--dt", co.dt, "base-group grid step size")->required();
  scl->add_option("--seed", co.seed, "random seed")->required();
  auto* scl_b = scl->add_option("--slide-budget", co.slide_budget,
                                "max raw steps between kept samples");
  scl->add_option("--out", co.out, "two-group sample CSV")->required();
  scl->callback([&] {
    std::ostringstream d;
    d << "command = \"scaling\"\nversion = 1\n";
    if (scl_f->count()) d << "factor = " << num(co.factor) << "\n";
    if (scl_b->count()) d << "slide_budget = " << co.slide_budget << "\n";
    d << "replicas = " << co.replicas << "\nsteps = " << co.steps
      << "\ndt = " << num(co.dt) << "\nseed = " << co.seed
      << "\nout = " << quoted(co.out) << "\n";
    execute(d.str());
  });

  // ---- dimension ---------------------------------------------------------
  auto* dim = app.add_subcommand(
      "dimension", "box-counting slope of the reflected zero set");
  struct {
    std::int64_t steps = 0, seed = 0, replicas = 1;
    double dt = 0, expected_slope = 0, slope_tol = 0.05;
    std::vector<double> scales;
    std::string out;
  } mo;
  dim->add_option("--steps", mo.steps, "grid steps per replica")->required();
  dim->add_option("--dt", mo.dt, "grid step size")->required();
  dim->add_option("--seed", mo.seed, "random seed")->required();
  auto* dim_rep = dim->add_option("--replicas", mo.replicas,
                                  "independent chains to pool");
  auto* dim_sc = dim->add_option("--scales", mo.scales,
                                 "box widths (comma separated)")
                     ->delimiter(',');
  auto* dim_es = dim->add_option("--expected-slope", mo.expected_slope,
                                 "decision target for the fitted slope");
  auto* dim_st = dim->add_option("--slope-tol", mo.slope_tol,
                                 "decision tolerance around the target");
  dim->add_option("--out", mo.out, "scale/count CSV")->required();
  dim->callback([&] {
    std::ostringstream d;
    d << "command = \"dimension\"\nversion = 1\n";
    d << "steps = " << mo.steps << "\ndt = " << num(mo.dt)
      << "\nseed = " << mo.seed << "\n";
    if (dim_rep->count()) d << "replicas = " << mo.replicas << "\n";
    if (dim_sc->count()) d << "scales = " << list(mo.scales) << "\n";
    if (dim_es->count()) d << "expected_slope = " << num(mo.expected_slope) << "\n";
    if (dim_st->count()) d << "slope_tol = " << num(mo.slope_tol) << "\n";
    d << "out = " << quoted(mo.out) << "\n";
    execute(d.str());
  });

  // ---- entrance ----------------------------------------------------------
  auto* ent = app.add_subcommand(
      "entrance", "probability of reaching a threshold before the boundary");
  struct {
    std::int64_t replicas = 0, seed = 0, max_steps = 0;
    double threshold = 1.0, dt = 0, expected_slope = 0, slope_tol = 0.02;
    bool no_noise = false;
    std::vector<double> xs;
    std::string out;
  } no;
  ent->add_option("--xs", no.xs, "start heights (comma separated)")
      ->delimiter(',')
      ->required();
  auto* ent_th = ent->add_option("--threshold", no.threshold, "target level");
  ent->add_option("--replicas", no.replicas, "runs per start height")->required();
  ent->add_option("--dt", no.dt, "grid step size")->required();
  ent->add_option("--seed", no.seed, "random seed")->required();
  auto* ent_ms = ent->add_option("--max-steps", no.max_steps,
                                 "per-run step budget");
  ent->add_flag("--no-noise", no.no_noise, "disable the driving noise");
  auto* ent_es = ent->add_option("--expected-slope", no.expected_slope,
                                 "decision target for the log-log slope");
  auto* ent_st = ent->add_option("--slope-tol", no.slope_tol,
                                 "decision tolerance around the target");
  ent->add_option("--out", no.out, "x/probability CSV")->required();
  ent->callback([&] {
    std::ostringstream d;
    d << "command = \"entrance\"\nversion = 1\n";
    d << "xs = " << list(no.xs) << "\n";
    if (ent_th->count()) d << "threshold = " << num(no.threshold) << "\n";
    d << "replicas = " << no.replicas << "\ndt = " << num(no.dt)
      << "\nseed = " << no.seed << "\n";
    if (ent_ms->count()) d << "max_steps = " << no.max_steps << "\n";
    if (no.no_noise) d << "noise = false\n";
    if (ent_es->count()) d << "expected_slope = " << num(no.expected_slope) << "\n";
    if (ent_st->count()) d << "slope_tol = " << num(no.slope_tol) << "\n";
    d << "out = " << quoted(no.out) << "\n";
    execute(d.str());
  });

  // ---- run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "execute a manifest file");
  std::string manifest_path;
  run->add_option("--manifest", manifest_path, "manifest file (key = value)")
      ->required();
  run->callback([&] {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in)
      throw rlp::config_error("cannot read manifest file: " + manifest_path);
    std::ostringstream text;
    text << in.rdbuf();
    execute(text.str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
