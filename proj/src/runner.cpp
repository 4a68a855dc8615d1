// Experiment driver behind the command-line interface: minimizer
// certification, particle runs, epsilon sweeps, aggregated property suites,
// and plot generation, all with deterministic file outputs.
#include "swarmlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "swarmlab/asymptotic.hpp"
#include "swarmlab/csvio.hpp"
#include "swarmlab/diagnostics.hpp"
#include "swarmlab/errors.hpp"
#include "swarmlab/grid.hpp"
#include "swarmlab/kernels.hpp"
#include "swarmlab/minimizers.hpp"
#include "swarmlab/numerics.hpp"
#include "swarmlab/simulator.hpp"
#include "swarmlab/svgplot.hpp"

namespace swarmlab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void say(const RunnerOptions& opt, const std::string& msg) {
  if (!opt.quiet) std::printf("%s\n", msg.c_str());
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string resolve_out_dir(const ExperimentConfig& cfg,
                            const RunnerOptions& opt) {
  const std::string dir = opt.out_dir.empty() ? cfg.output.directory
                                              : opt.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + dir +
                      "': " + ec.message());
  return dir;
}

bool wants_format(const ExperimentConfig& cfg, const std::string& fmt) {
  const auto& f = cfg.output.formats;
  return std::find(f.begin(), f.end(), fmt) != f.end();
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

ExperimentConfig with_cli_seed(ExperimentConfig cfg, const RunnerOptions& opt) {
  if (opt.seed != 0) cfg.simulation.seed = opt.seed;
  return cfg;
}

int translate_exceptions(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const CertificationError& e) {
    std::fprintf(stderr, "certification failure: %s\n", e.what());
    return 2;
  } catch (const InstabilityError& e) {
    std::fprintf(stderr, "instability: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

// ---- profile selection -----------------------------------------------------

bool isotropic_lambda(const KernelSpec& k) {
  for (int j = 1; j < k.dim; ++j)
    if (std::abs(k.lambda[j] - k.lambda[0]) >
        1e-14 * std::max(1.0, std::abs(k.lambda[0])))
      return false;
  return true;
}

std::string resolved_method(const ExperimentConfig& cfg) {
  if (cfg.minimizer.method != "auto") return cfg.minimizer.method;
  if (cfg.kernel.dim == 1) return "one_dim";
  if (cfg.kernel.perturbation.kind != PerturbationKind::none)
    return "gradient_flow";
  return isotropic_lambda(cfg.kernel) ? "radial" : "ellipsoid";
}

// Analytic reference shape used by the particle commands: the minimizer of
// the confinement-plus-repulsion part (any kernel perturbation only enters
// the dynamics and the discrete energy reference).
MinimizerProfile analytic_profile(const ExperimentConfig& cfg) {
  if (cfg.kernel.dim != 2)
    throw ConfigError(
        "particle runs need kernel.dim = 2 (no analytic reference shape "
        "otherwise)");
  KernelSpec shape = cfg.kernel;
  shape.perturbation.kind = PerturbationKind::none;
  shape.delta = 0.0;
  if (isotropic_lambda(shape))
    return explicit_radial_minimizer(shape, cfg.minimizer.mass);
  return ellipsoid_shape_from_lambda(shape, cfg.minimizer.mass, nullptr);
}

// ---- shared particle-run plumbing -------------------------------------------

struct PreparedRun {
  SimConfig sim;                 // validated, dt resolved, blob width set
  MinimizerProfile profile;      // analytic reference shape
  ParticleEnsemble base_cloud;   // relaxed discrete ground state, centered
  double energy_reference = 0.0; // its ordered-pair interaction energy
  int n_steps = 0;
  int record_stride = 1;
};

// Seed of the gradient-flow relaxation that defines the discrete energy
// reference. Fixed so every run of a config shares one ground state.
constexpr std::uint64_t kReferenceFlowSeed = 777;

ParticleEnsemble cloud_to_ensemble(const MinimizerProfile& cloud, int dim) {
  ParticleEnsemble ens;
  ens.dim = dim;
  ens.positions = cloud.points;
  ens.velocities.assign(cloud.points.size(), Point{});
  ens.weight = cloud.point_weight;
  ens.time = 0.0;
  return ens;
}

PreparedRun prepare_run(const ExperimentConfig& cfg, double epsilon,
                        std::uint64_t run_seed,
                        const ParticleEnsemble* shared_base,
                        double shared_energy_reference) {
  PreparedRun r;
  r.profile = analytic_profile(cfg);
  const int n = cfg.simulation.n_particles;

  KernelSpec k = cfg.kernel;
  if (!(k.delta > 0.0))
    k.delta = default_blob_width(r.profile.bounding_radius(), n, k.dim,
                                 cfg.simulation.c_delta);

  r.sim.epsilon = epsilon;
  r.sim.lambda_drag = cfg.simulation.lambda_drag;
  r.sim.t_final = cfg.simulation.t_final;
  r.sim.kernel = k;
  r.sim.external_field = cfg.external_field;
  r.sim.seed = run_seed;
  r.sim.dt = 1.0;  // placeholder so validate() below sees the resolved value

  const double bound = r.sim.dt_stability_bound();
  const double dt_request =
      cfg.simulation.dt > 0.0 ? std::min(cfg.simulation.dt, bound) : bound;
  r.n_steps = std::max(
      1, static_cast<int>(std::ceil(r.sim.t_final / dt_request - 1e-9)));
  r.sim.dt = r.sim.t_final / r.n_steps;
  r.sim.validate();

  r.record_stride = cfg.simulation.record_every > 0
                        ? cfg.simulation.record_every
                        : std::max(1, r.n_steps / 64);

  if (shared_base != nullptr) {
    r.base_cloud = *shared_base;
    r.energy_reference = shared_energy_reference;
  } else {
    GradientFlowOptions fopt;
    fopt.n = n;
    fopt.max_steps = cfg.minimizer.flow_steps;
    fopt.seed = kReferenceFlowSeed;
    GradientFlowResult flow =
        gradient_flow_minimizer(k, cfg.minimizer.mass, fopt);
    r.base_cloud = cloud_to_ensemble(flow.cloud, k.dim);
    r.energy_reference = ensemble_interaction_energy(r.base_cloud, k);
  }
  return r;
}

ParticleEnsemble initial_state(const PreparedRun& r,
                               const ExperimentConfig& cfg, double thermal,
                               std::uint64_t seed) {
  const int dim = r.sim.kernel.dim;
  if (cfg.simulation.relax_initial) {
    ParticleEnsemble st = r.base_cloud;
    Rng rng(seed);
    for (auto& p : st.positions)
      for (int j = 0; j < dim; ++j) p[j] += cfg.simulation.X_init[j];
    for (auto& v : st.velocities)
      for (int j = 0; j < dim; ++j)
        v[j] = cfg.simulation.V_init[j] + thermal * rng.normal();
    return st;
  }
  const Point v_init = cfg.simulation.V_init;
  return well_prepared_initial_data(
      r.profile, cfg.simulation.X_init, [v_init](const Point&) {
        return v_init;
      },
      cfg.simulation.n_particles, thermal, seed);
}

// Steps the state across the horizon, invoking on_record at t = 0, at every
// record_stride-th step, and at the final step.
template <class F>
std::vector<ObservableRecord> run_loop(ParticleEnsemble& st,
                                       const PreparedRun& r, F&& on_record) {
  StepWorkspace ws;
  std::vector<ObservableRecord> recs;
  auto record = [&] {
    ObservableRecord ob = observables(st, r.sim, r.energy_reference);
    on_record(st, ob);
    recs.push_back(ob);
  };
  record();
  for (int k = 1; k <= r.n_steps; ++k) {
    step(st, r.sim, ws);
    if (k == r.n_steps || k % r.record_stride == 0) record();
  }
  return recs;
}

std::vector<std::string> observable_header(int dim) {
  std::vector<std::string> h{"time", "mass"};
  for (int j = 0; j < dim; ++j) h.push_back("X" + std::to_string(j + 1));
  for (int j = 0; j < dim; ++j) h.push_back("V" + std::to_string(j + 1));
  h.insert(h.end(), {"kinetic_energy", "interaction_energy", "total_energy_H",
                     "second_moment"});
  return h;
}

std::vector<double> observable_row(const ObservableRecord& ob, int dim) {
  std::vector<double> row{ob.time, ob.mass};
  for (int j = 0; j < dim; ++j) row.push_back(ob.X_eps[j]);
  for (int j = 0; j < dim; ++j) row.push_back(ob.V_eps[j]);
  row.insert(row.end(), {ob.kinetic_energy, ob.interaction_energy,
                         ob.total_energy_H, ob.second_moment});
  return row;
}

double point_distance(const Point& a, const Point& b, int dim) {
  double acc = 0.0;
  for (int j = 0; j < dim; ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(acc);
}

// Least-squares slope of log y against log x over the pairs with y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double var = sxx - sx * sx / n;
  if (!(var > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (sxy - sx * sy / n) / var;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return v.size() >= 2;
}

// ---- minimize ---------------------------------------------------------------

void write_profile_samples(const std::string& path,
                           const MinimizerProfile& prof, const KernelSpec& k) {
  CsvWriter out(path, {"axis", "coordinate", "density", "potential"});
  const int n_axes = (prof.variant == ProfileVariant::ellipsoid_2d) ? 2 : 1;
  const double reach = 1.3 * std::max(prof.bounding_radius(), 1e-12);
  const bool cloud = prof.variant == ProfileVariant::particle_cloud;
  for (int axis = 0; axis < n_axes; ++axis) {
    for (int i = 0; i <= 96; ++i) {
      const double c = -reach + 2.0 * reach * i / 96.0;
      Point x{};
      x[axis] = c;
      const double rho = cloud ? 0.0 : prof.density(x);
      out.write_row({static_cast<double>(axis), c, rho,
                     potential_at(prof, k, x)});
    }
  }
  out.flush();
}

void write_profile_svg(const std::string& path, const MinimizerProfile& prof,
                       const KernelSpec& k) {
  PlotSeries dens, pot;
  dens.label = "density";
  pot.label = "potential";
  pot.color = "#c1452b";
  const double reach = 1.3 * std::max(prof.bounding_radius(), 1e-12);
  const bool cloud = prof.variant == ProfileVariant::particle_cloud;
  for (int i = 0; i <= 96; ++i) {
    const double c = -reach + 2.0 * reach * i / 96.0;
    Point x{};
    x[0] = c;
    dens.x.push_back(c);
    dens.y.push_back(cloud ? 0.0 : prof.density(x));
    pot.x.push_back(c);
    pot.y.push_back(potential_at(prof, k, x));
  }
  PlotSpec spec;
  spec.title = "minimizer profile and potential";
  spec.x_label = "coordinate along the first axis";
  spec.y_label = "value";
  spec.series = {dens, pot};
  write_svg(path, spec);
}

int minimize_body(const ExperimentConfig& cfg_in, const RunnerOptions& opt) {
  const ExperimentConfig cfg = with_cli_seed(cfg_in, opt);
  const std::string dir = resolve_out_dir(cfg, opt);
  const std::string method = resolved_method(cfg);
  const double mass = cfg.minimizer.mass;

  json meta;
  meta["command"] = "minimize";
  meta["method"] = method;
  meta["mass"] = mass;
  meta["config_toml"] = serialize_config(cfg);

  if (method == "one_dim") {
    if (cfg.kernel.dim != 1)
      throw ConfigError("[minimizer]: method 'one_dim' needs kernel.dim = 1");
    if (std::abs(mass - 1.0) > 1e-12)
      throw ConfigError("[minimizer]: the 1-D profile is normalized to unit "
                        "mass");
    Profile1dResult res = minimizer_1d_profile(cfg.kernel.s);
    Frostman1dReport rep = frostman_1d_check(res);
    const bool certified = res.valid && rep.max_relative_deviation < 1e-3 &&
                           std::abs(rep.mass_error) < 1e-6;

    if (wants_format(cfg, "csv")) {
      CsvWriter out(join_path(dir, "profile_samples.csv"),
                    {"axis", "coordinate", "density", "potential"});
      for (int i = 0; i <= 96; ++i) {
        const double t = -1.2 * res.R_s + 2.4 * res.R_s * i / 96.0;
        Point x{};
        x[0] = t;
        out.write_row({0.0, t, res.profile.density(x), 0.0});
      }
      out.flush();
      CsvWriter cert(join_path(dir, "frostman_certificate.csv"),
                     {"A0", "max_interior_deviation", "mass_error",
                      "certified"});
      cert.write_row({res.V1, rep.max_relative_deviation, rep.mass_error,
                      certified ? 1.0 : 0.0});
      cert.flush();
    }
    meta["R_s"] = res.R_s;
    meta["C_s"] = res.C_s;
    meta["V1"] = res.V1;
    meta["valid"] = res.valid;
    meta["warning"] = res.warning;
    meta["max_interior_deviation"] = rep.max_relative_deviation;
    meta["mass_error"] = rep.mass_error;
    meta["certified"] = certified;
    if (wants_format(cfg, "json"))
      write_json_file(join_path(dir, "profile.json"), meta);

    say(opt, "minimize: method=one_dim R=" + format_full(res.R_s) +
                 " V1=" + format_full(res.V1) +
                 (certified ? " certified" : " NOT certified"));
    if (!certified)
      throw CertificationError(
          res.valid ? "1-D potential deviates beyond tolerance on the support"
                    : res.warning);
    return 0;
  }

  MinimizerProfile prof;
  EllipsoidSolveStats stats{};
  bool have_stats = false;
  if (method == "radial") {
    KernelSpec shape = cfg.kernel;
    shape.perturbation.kind = PerturbationKind::none;
    if (!isotropic_lambda(shape))
      throw ConfigError("[minimizer]: method 'radial' needs isotropic lambda");
    prof = explicit_radial_minimizer(shape, mass);
  } else if (method == "ellipsoid") {
    KernelSpec shape = cfg.kernel;
    shape.perturbation.kind = PerturbationKind::none;
    prof = ellipsoid_shape_from_lambda(shape, mass, &stats);
    have_stats = true;
  } else if (method == "gradient_flow") {
    KernelSpec flowk = cfg.kernel;
    if (!(flowk.delta > 0.0)) {
      double scale = 1.0;
      try {
        scale = analytic_profile(cfg).bounding_radius();
      } catch (const std::exception&) {
      }
      flowk.delta = default_blob_width(scale, cfg.minimizer.flow_particles,
                                       flowk.dim, cfg.simulation.c_delta);
    }
    GradientFlowOptions fopt;
    fopt.n = cfg.minimizer.flow_particles;
    fopt.max_steps = cfg.minimizer.flow_steps;
    fopt.seed = cfg.simulation.seed;
    GradientFlowResult flow = gradient_flow_minimizer(flowk, mass, fopt);
    prof = flow.cloud;
    meta["flow_energy_initial"] = flow.energy.front();
    meta["flow_energy_final"] = flow.energy.back();
    meta["flow_support_radius"] = flow.support_radius;
    meta["flow_aspect_ratio"] = flow.aspect_ratio;
  } else {
    throw ConfigError("[minimizer]: unknown method '" + method + "'");
  }

  ProbeGrid probe = default_probe_grid(prof, 200, 120, 48,
                                       cfg.simulation.seed);
  const double interior_tol = method == "gradient_flow" ? 5e-2 : 1e-3;
  FrostmanReport rep = frostman_check(prof, cfg.kernel, probe, interior_tol,
                                      1e-9);

  if (wants_format(cfg, "csv")) {
    write_profile_samples(join_path(dir, "profile_samples.csv"), prof,
                          cfg.kernel);
    CsvWriter cert(join_path(dir, "frostman_certificate.csv"),
                   {"A0", "max_interior_deviation", "min_exterior_slack",
                    "boundary_exponent_fit", "tolerance", "certified"});
    cert.write_row({rep.A0, rep.max_interior_deviation, rep.min_exterior_slack,
                    rep.boundary_exponent_fit, rep.tolerance,
                    rep.certified ? 1.0 : 0.0});
    cert.flush();
  }

  meta["variant"] = profile_variant_name(prof.variant);
  meta["radius"] = prof.radius;
  meta["semi_axes"] = {prof.semi_axes[0], prof.semi_axes[1]};
  meta["amplitude"] = prof.amplitude;
  meta["exponent"] = prof.exponent;
  meta["A0"] = rep.A0;
  meta["max_interior_deviation"] = rep.max_interior_deviation;
  meta["min_exterior_slack"] = rep.min_exterior_slack;
  meta["boundary_exponent_fit"] = rep.boundary_exponent_fit;
  meta["certified"] = rep.certified;
  if (have_stats) {
    meta["solver_iterations"] = stats.iterations;
    meta["solver_residual"] = stats.residual;
    meta["solver_hessian_definite"] = stats.hessian_definite;
  }
  if (wants_format(cfg, "json"))
    write_json_file(join_path(dir, "profile.json"), meta);
  if (wants_format(cfg, "svg"))
    write_profile_svg(join_path(dir, "profile.svg"), prof, cfg.kernel);

  say(opt, "minimize: method=" + method +
               " A0=" + format_full(rep.A0) +
               " interior_dev=" + format_full(rep.max_interior_deviation) +
               (rep.certified ? " certified" : " NOT certified"));
  if (!rep.certified)
    throw CertificationError(
        "Frostman certification failed: max interior deviation " +
        format_full(rep.max_interior_deviation) + " against tolerance " +
        format_full(rep.tolerance));
  return 0;
}

// ---- simulate ---------------------------------------------------------------

int simulate_body(const ExperimentConfig& cfg_in, const RunnerOptions& opt) {
  const ExperimentConfig cfg = with_cli_seed(cfg_in, opt);
  const std::string dir = resolve_out_dir(cfg, opt);
  const double eps = cfg.simulation.epsilon;
  const std::uint64_t seed = cfg.simulation.seed;

  PreparedRun r = prepare_run(cfg, eps, seed, nullptr, 0.0);
  const int dim = r.sim.kernel.dim;
  const double thermal = cfg.simulation.thermal_coeff * std::sqrt(eps);
  ParticleEnsemble st = initial_state(r, cfg, thermal, seed);

  const bool csv = wants_format(cfg, "csv");
  std::unique_ptr<CsvWriter> traj;
  if (csv)
    traj = std::make_unique<CsvWriter>(join_path(dir, "trajectory.csv"),
                                       observable_header(dim));
  int snapshot_index = 0;
  auto recs = run_loop(st, r, [&](const ParticleEnsemble& state,
                                  const ObservableRecord& ob) {
    if (traj) traj->write_row(observable_row(ob, dim));
    if (cfg.simulation.snapshots) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%04d.bin", snapshot_index++);
      write_snapshot(join_path(dir, name), state);
    }
  });
  if (traj) traj->flush();

  // Limiting trajectory from the realized initial center of mass so the
  // comparison isolates the epsilon error from sampling noise.
  LimitTrajectory lim =
      integrate_xv(r.profile, cfg.external_field, cfg.simulation.lambda_drag,
                   recs.front().X_eps, recs.front().V_eps, r.sim.t_final,
                   r.sim.t_final / 1024.0);

  double max_x_err = 0.0, max_v_err = 0.0;
  {
    std::unique_ptr<CsvWriter> cmp;
    if (csv) {
      std::vector<std::string> h{"time"};
      for (int j = 0; j < dim; ++j) h.push_back("Xeps" + std::to_string(j + 1));
      for (int j = 0; j < dim; ++j) h.push_back("Xlim" + std::to_string(j + 1));
      for (int j = 0; j < dim; ++j) h.push_back("Veps" + std::to_string(j + 1));
      for (int j = 0; j < dim; ++j) h.push_back("Vlim" + std::to_string(j + 1));
      h.push_back("err_X");
      h.push_back("err_V");
      cmp = std::make_unique<CsvWriter>(join_path(dir, "compare.csv"), h);
    }
    for (const auto& ob : recs) {
      Point X{}, V{};
      lim.state_at(ob.time, X, V);
      const double ex = point_distance(ob.X_eps, X, dim);
      const double ev = point_distance(ob.V_eps, V, dim);
      max_x_err = std::max(max_x_err, ex);
      max_v_err = std::max(max_v_err, ev);
      if (cmp) {
        std::vector<double> row{ob.time};
        for (int j = 0; j < dim; ++j) row.push_back(ob.X_eps[j]);
        for (int j = 0; j < dim; ++j) row.push_back(X[j]);
        for (int j = 0; j < dim; ++j) row.push_back(ob.V_eps[j]);
        for (int j = 0; j < dim; ++j) row.push_back(V[j]);
        row.push_back(ex);
        row.push_back(ev);
        cmp->write_row(row);
      }
    }
    if (cmp) cmp->flush();
  }

  if (wants_format(cfg, "json")) {
    json meta;
    meta["command"] = "simulate";
    meta["n_particles"] = st.size();
    meta["dim"] = dim;
    meta["epsilon"] = eps;
    meta["dt"] = r.sim.dt;
    meta["n_steps"] = r.n_steps;
    meta["records"] = recs.size();
    meta["seed"] = seed;
    meta["blob_width"] = r.sim.kernel.delta;
    meta["energy_reference"] = r.energy_reference;
    meta["H_initial"] = recs.front().total_energy_H;
    meta["H_final"] = recs.back().total_energy_H;
    meta["max_X_error"] = max_x_err;
    meta["max_V_error"] = max_v_err;
    meta["config_toml"] = serialize_config(cfg);
    write_json_file(join_path(dir, "run_summary.json"), meta);
  }

  if (wants_format(cfg, "svg")) {
    PlotSpec plot;
    if (dim >= 2) {
      PlotSeries emp, limit;
      emp.label = "particle center of mass";
      limit.label = "limiting trajectory";
      limit.color = "#c1452b";
      for (const auto& ob : recs) {
        Point X{}, V{};
        lim.state_at(ob.time, X, V);
        emp.x.push_back(ob.X_eps[0]);
        emp.y.push_back(ob.X_eps[1]);
        limit.x.push_back(X[0]);
        limit.y.push_back(X[1]);
      }
      plot.title = "center of mass against the limiting trajectory";
      plot.x_label = "x1";
      plot.y_label = "x2";
      plot.series = {emp, limit};
    } else {
      PlotSeries emp;
      emp.label = "X1(t)";
      for (const auto& ob : recs) {
        emp.x.push_back(ob.time);
        emp.y.push_back(ob.X_eps[0]);
      }
      plot.title = "center of mass";
      plot.x_label = "time";
      plot.y_label = "X1";
      plot.series = {emp};
    }
    write_svg(join_path(dir, "trajectory.svg"), plot);
  }

  say(opt, "simulate: n=" + std::to_string(st.size()) + " steps=" +
               std::to_string(r.n_steps) + " dt=" + format_full(r.sim.dt) +
               " max|X_eps-X|=" + format_full(max_x_err));
  return 0;
}

// ---- sweep ------------------------------------------------------------------

int sweep_body(const ExperimentConfig& cfg_in, const RunnerOptions& opt) {
  const ExperimentConfig cfg = with_cli_seed(cfg_in, opt);
  const std::string dir = resolve_out_dir(cfg, opt);

  const std::vector<double>& eps_list = cfg.sweep.epsilons;
  if (eps_list.size() < 2)
    throw ConfigError("[sweep]: needs at least two epsilons");
  for (double e : eps_list)
    if (!(e > 0.0)) throw ConfigError("[sweep]: epsilons must be positive");
  if (!strictly_decreasing(eps_list))
    throw ConfigError("[sweep]: epsilons must be strictly decreasing");

  // One relaxed ground state shared by every run of the sweep: the energy
  // reference and the density reference are then identical across epsilons.
  PreparedRun shared = prepare_run(cfg, eps_list.front(),
                                   cfg.simulation.seed, nullptr, 0.0);
  const int dim = shared.sim.kernel.dim;
  const MinimizerProfile& prof = shared.profile;

  const bool with_mod =
      dim == 2 && cfg.external_field.symmetric_linear(dim);
  std::array<double, 4> A{};
  std::array<double, 2> b{};
  if (with_mod) {
    const auto& m = cfg.external_field.matrix;
    if (cfg.external_field.kind == FieldKind::linear)
      A = {m[0], m[1], m[kMaxDim], m[kMaxDim + 1]};
    if (cfg.external_field.kind == FieldKind::linear ||
        cfg.external_field.kind == FieldKind::constant)
      b = {cfg.external_field.offset[0], cfg.external_field.offset[1]};
  }

  const bool csv = wants_format(cfg, "csv");
  std::unique_ptr<CsvWriter> diag;
  if (csv && with_mod)
    diag = std::make_unique<CsvWriter>(
        join_path(dir, "sweep_diagnostics.csv"),
        std::vector<std::string>{
            "epsilon", "seed", "time", "kinetic_modulated", "energy_gap",
            "com_position", "com_velocity", "total_H", "total_H_cg",
            "hms_lower_bound", "hms_sq", "frostman_term", "R_eps"});
  std::unique_ptr<CsvWriter> summary_csv;
  if (csv)
    summary_csv = std::make_unique<CsvWriter>(
        join_path(dir, "sweep_summary.csv"),
        std::vector<std::string>{
            "epsilon", "seed", "max_energy_gap", "max_X_err", "max_V_err",
            "H_initial", "H_final", "max_H", "C_fit", "R_integral"});

  json meta;
  meta["command"] = "sweep";
  meta["epsilons"] = eps_list;
  meta["with_modulated_energy"] = with_mod;
  meta["energy_reference"] = shared.energy_reference;
  meta["config_toml"] = serialize_config(cfg);
  json runs = json::array();

  // Aggregates over the first listed seed, in epsilon order.
  std::vector<double> agg_gap, agg_xerr, agg_verr, agg_hfinal;

  for (std::size_t si = 0; si < cfg.sweep.seeds.size(); ++si) {
    const std::uint64_t seed = cfg.sweep.seeds[si];
    for (double eps : eps_list) {
      PreparedRun r = prepare_run(cfg, eps, seed, &shared.base_cloud,
                                  shared.energy_reference);
      const double thermal = cfg.simulation.thermal_coeff * std::sqrt(eps);
      ParticleEnsemble st = initial_state(r, cfg, thermal, seed);

      ObservableRecord ob0 =
          observables(st, r.sim, r.energy_reference);
      LimitTrajectory lim = integrate_xv(
          prof, cfg.external_field, cfg.simulation.lambda_drag, ob0.X_eps,
          ob0.V_eps, r.sim.t_final, r.sim.t_final / 1024.0);
      StrongSolutionSpec strong;
      if (with_mod) strong = rigid_transport_solution(lim, A, b);

      ModulatedEnergyOptions mopts;
      mopts.reference_cloud = &shared.base_cloud;
      if (cfg.kernel.perturbation.kind != PerturbationKind::none)
        mopts.kappa = std::min(0.99, kappa_min(r.sim.kernel));

      std::vector<double> times, h_tot, r_eps;
      double max_gap = 0.0, max_xe = 0.0, max_ve = 0.0;
      double h_first = 0.0, h_last = 0.0, h_max = 0.0;
      double bound_excess = -std::numeric_limits<double>::infinity();
      bool first_record = true;

      auto recs = run_loop(st, r, [&](const ParticleEnsemble& state,
                                      const ObservableRecord& ob) {
        Point X{}, V{};
        lim.state_at(ob.time, X, V);
        max_xe = std::max(max_xe, point_distance(ob.X_eps, X, dim));
        max_ve = std::max(max_ve, point_distance(ob.V_eps, V, dim));
        max_gap = std::max(max_gap,
                           ob.interaction_energy - r.energy_reference);
        if (!with_mod) return;
        ModulatedEnergyReport mod = modulated_energy(
            state, lim, strong, r.sim.kernel, r.energy_reference, eps, mopts);
        const double half =
            prof.bounding_radius() + 8.0 * mod.bandwidth +
            point_distance(ob.X_eps, X, dim) + 0.5;
        BoxGrid grid = make_centered_grid({X[0], X[1]}, half, 64);
        CoarseFields cf = coarse_grain(state, grid, mod.bandwidth);
        const double R = r_eps_from_fields(cf, strong, ob.time);
        times.push_back(ob.time);
        h_tot.push_back(mod.total_cg);
        r_eps.push_back(R);
        if (first_record) {
          h_first = mod.total_cg;
          first_record = false;
        }
        h_last = mod.total_cg;
        h_max = std::max(h_max, mod.total_cg);
        bound_excess = std::max(
            bound_excess, (mod.hms_lower_bound - mod.total_cg) /
                              std::max(std::abs(mod.total_cg), 1e-12));
        if (diag)
          diag->write_row({eps, static_cast<double>(seed), ob.time,
                           mod.kinetic_modulated, mod.energy_gap,
                           mod.com_position_term, mod.com_velocity_term,
                           mod.total, mod.total_cg, mod.hms_lower_bound,
                           mod.hms_sq, mod.frostman_term, R});
      });

      GronwallReport gw;
      if (with_mod) gw = gronwall_check(times, h_tot, r_eps);

      if (summary_csv)
        summary_csv->write_row({eps, static_cast<double>(seed), max_gap,
                                max_xe, max_ve, h_first, h_last, h_max,
                                gw.C_fit, gw.r_integral});
      json row;
      row["epsilon"] = eps;
      row["seed"] = seed;
      row["dt"] = r.sim.dt;
      row["n_steps"] = r.n_steps;
      row["records"] = recs.size();
      row["max_energy_gap"] = max_gap;
      row["max_X_error"] = max_xe;
      row["max_V_error"] = max_ve;
      if (with_mod) {
        row["H_initial"] = h_first;
        row["H_final"] = h_last;
        row["max_H"] = h_max;
        row["bound_excess_max"] = bound_excess;
        row["gronwall_C_fit"] = gw.C_fit;
        row["gronwall_satisfied"] = gw.satisfied;
        row["R_integral"] = gw.r_integral;
      }
      runs.push_back(row);

      if (si == 0) {
        agg_gap.push_back(max_gap);
        agg_xerr.push_back(max_xe);
        agg_verr.push_back(max_ve);
        if (with_mod) agg_hfinal.push_back(h_last);
      }
      say(opt, "sweep: eps=" + format_full(eps) + " seed=" +
                   std::to_string(seed) + " max_gap=" + format_full(max_gap) +
                   " max|X_eps-X|=" + format_full(max_xe));
    }
  }
  if (diag) diag->flush();
  if (summary_csv) summary_csv->flush();

  meta["runs"] = runs;
  meta["slope_energy_gap"] = loglog_slope(eps_list, agg_gap);
  meta["slope_X_error"] = loglog_slope(eps_list, agg_xerr);
  meta["gap_strictly_decreasing"] = strictly_decreasing(agg_gap);
  meta["X_error_strictly_decreasing"] = strictly_decreasing(agg_xerr);
  if (with_mod) {
    meta["slope_H_final"] = loglog_slope(eps_list, agg_hfinal);
    meta["H_final_strictly_decreasing"] = strictly_decreasing(agg_hfinal);
  }
  if (wants_format(cfg, "json"))
    write_json_file(join_path(dir, "sweep_summary.json"), meta);

  if (wants_format(cfg, "svg")) {
    PlotSeries pts;
    pts.label = "max energy gap";
    pts.scatter = true;
    pts.x = eps_list;
    pts.y = agg_gap;
    PlotSpec plot;
    plot.title = "energy gap against epsilon";
    plot.x_label = "epsilon";
    plot.y_label = "max energy gap";
    plot.log_x = true;
    plot.log_y = true;
    char ann[64];
    std::snprintf(ann, sizeof ann, "slope = %.3f",
                  meta["slope_energy_gap"].get<double>());
    plot.annotation = ann;
    plot.series = {pts};
    write_svg(join_path(dir, "sweep_gap.svg"), plot);
  }

  say(opt, "sweep: slope(max_gap)=" +
               format_full(meta["slope_energy_gap"].get<double>()) +
               " slope(X_err)=" +
               format_full(meta["slope_X_error"].get<double>()));
  return 0;
}

// ---- check ------------------------------------------------------------------

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

void kernels_suite(std::vector<CheckOutcome>& out) {
  {
    CheckOutcome c{"sigma_constant closed forms", false, ""};
    const double s31 = sigma_constant(3, 1.0);
    const double s25 = sigma_constant(2, 0.5);
    c.pass = std::abs(s31 - 1.0 / (4.0 * kPi)) < 1e-14 &&
             std::abs(s25 - 1.0 / (2.0 * kPi)) < 1e-14;
    c.detail = "sigma(3,1)=" + format_full(s31);
    out.push_back(c);
  }

  KernelSpec k;
  k.dim = 2;
  k.s = 0.75;
  k.alpha = 1.0;
  k.beta = 0.8;
  k.lambda = {1.0, 2.0, 1.0};
  k.perturbation.kind = PerturbationKind::gaussian;
  k.perturbation.c = -0.05;
  k.perturbation.sigma_w = 0.3;
  k.delta = 0.02;
  {
    CheckOutcome c{"kernel gradient antisymmetry", false, ""};
    Rng rng(11);
    double worst = 0.0;
    for (int t = 0; t < 24; ++t) {
      double x[2] = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
      double xm[2] = {-x[0], -x[1]};
      double gp[2], gm[2];
      grad_W(k, x, gp);
      grad_W(k, xm, gm);
      for (int j = 0; j < 2; ++j)
        worst = std::max(worst, std::abs(gp[j] + gm[j]));
    }
    c.pass = worst < 1e-12;
    c.detail = "max |grad W(x) + grad W(-x)| = " + format_full(worst);
    out.push_back(c);
  }
  {
    CheckOutcome c{"kernel gradient matches difference quotient", false, ""};
    Rng rng(12);
    double worst = 0.0;
    for (int t = 0; t < 12; ++t) {
      double x[2] = {rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5)};
      double g[2];
      grad_W(k, x, g);
      const double h = 1e-6;
      for (int j = 0; j < 2; ++j) {
        double xp[2] = {x[0], x[1]}, xm[2] = {x[0], x[1]};
        xp[j] += h;
        xm[j] -= h;
        const double fd = (eval_W(k, xp) - eval_W(k, xm)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - g[j]) /
                                    std::max(1.0, std::abs(g[j])));
      }
    }
    c.pass = worst < 1e-6;
    c.detail = "max relative deviation = " + format_full(worst);
    out.push_back(c);
  }
  {
    CheckOutcome c{"fourier symbol normalization", false, ""};
    const double v = Es_fourier(0.75, 2.0);
    c.pass = std::abs(v - std::pow(2.0, -1.5)) < 1e-14;
    c.detail = "Es_fourier(0.75, 2) = " + format_full(v);
    out.push_back(c);
  }
  {
    CheckOutcome c{"check_H2b threshold at kappa_min", false, ""};
    const double km = kappa_min(k);
    const bool at = check_H2b(k, std::min(km + 1e-9, 0.9999)).holds;
    const bool below =
        km > 1e-9 ? !check_H2b(k, km * (1.0 - 1e-2) - 1e-9).holds : true;
    c.pass = at && below && km >= 0.0 && km < 1.0;
    c.detail = "kappa_min = " + format_full(km);
    out.push_back(c);
  }
  {
    CheckOutcome c{"blob regularization finite at the origin", false, ""};
    const double origin[2] = {0.0, 0.0};
    const double v = eval_W(k, origin);
    c.pass = std::isfinite(v);
    c.detail = "W_delta(0) = " + format_full(v);
    out.push_back(c);
  }
}

void minimizers_suite(std::vector<CheckOutcome>& out) {
  KernelSpec disk;
  disk.dim = 2;
  disk.s = 1.0;
  disk.alpha = 1.0;
  disk.beta = 1.0;
  disk.lambda = {1.0, 1.0, 1.0};
  MinimizerProfile prof = explicit_radial_minimizer(disk, 1.0);
  {
    CheckOutcome c{"disk radius closed form", false, ""};
    c.pass = std::abs(prof.radius - 1.0 / std::sqrt(2.0 * kPi)) < 1e-12;
    c.detail = "R = " + format_full(prof.radius);
    out.push_back(c);
  }
  {
    CheckOutcome c{"radial frostman certificate", false, ""};
    ProbeGrid probe = default_probe_grid(prof, 120, 60, 32, 5);
    FrostmanReport rep = frostman_check(prof, disk, probe);
    c.pass = rep.certified;
    c.detail = "A0 = " + format_full(rep.A0) +
               ", interior dev = " + format_full(rep.max_interior_deviation);
    out.push_back(c);
  }
  {
    CheckOutcome c{"ellipsoid solver reduces to the radial shape", false, ""};
    KernelSpec iso = disk;
    iso.s = 0.75;
    MinimizerProfile rad = explicit_radial_minimizer(iso, 1.0);
    EllipsoidSolveStats stats{};
    MinimizerProfile ell = ellipsoid_shape_from_lambda(iso, 1.0, &stats);
    const double rel_gap =
        std::abs(ell.semi_axes[0] - ell.semi_axes[1]) / rad.radius;
    const double rel_rad = std::abs(ell.semi_axes[0] - rad.radius) / rad.radius;
    c.pass = rel_gap < 1e-8 && rel_rad < 1e-6 && stats.hessian_definite;
    c.detail = "a1 = " + format_full(ell.semi_axes[0]) +
               ", radial R = " + format_full(rad.radius);
    out.push_back(c);
  }
  {
    CheckOutcome c{"ellipse closed form at the endpoint", false, ""};
    KernelSpec an = disk;
    an.lambda = {1.0, 2.0, 1.0};
    MinimizerProfile ell = ellipsoid_shape_from_lambda(an, 1.0, nullptr);
    const double a1 = 1.0 / std::sqrt(5.0 * kPi);
    c.pass = std::abs(ell.semi_axes[0] - a1) < 1e-9 &&
             std::abs(ell.semi_axes[1] - 4.0 * a1) < 1e-8;
    c.detail = "a = (" + format_full(ell.semi_axes[0]) + ", " +
               format_full(ell.semi_axes[1]) + ")";
    out.push_back(c);
  }
  {
    CheckOutcome c{"one dimensional profile certificate", false, ""};
    Profile1dResult res = minimizer_1d_profile(0.75);
    Frostman1dReport rep = frostman_1d_check(res);
    c.pass = res.valid && rep.max_relative_deviation < 1e-4 &&
             std::abs(rep.mass_error) < 1e-9;
    c.detail = "V1 = " + format_full(res.V1) +
               ", deviation = " + format_full(rep.max_relative_deviation);
    out.push_back(c);
  }
  {
    CheckOutcome c{"endpoint validity of the one dimensional formula", false,
                   ""};
    Profile1dResult res = minimizer_1d_profile(0.4);
    c.pass = !res.valid && !res.warning.empty();
    c.detail = res.warning.empty() ? "no warning issued" : res.warning;
    out.push_back(c);
  }
  {
    CheckOutcome c{"tangential boundary fields stay bounded", false, ""};
    KernelSpec an = disk;
    an.s = 0.75;
    an.lambda = {1.0, 1.6, 1.0};
    MinimizerProfile ell = ellipsoid_shape_from_lambda(an, 1.0, nullptr);
    ConditionSurPhiReport rot =
        conditionsurphi_check(ell, an, BoundaryFieldKind::elliptic_rotation);
    ConditionSurPhiReport nrm =
        conditionsurphi_check(ell, an, BoundaryFieldKind::normal_control);
    c.pass = rot.stable && std::isfinite(rot.ratio_sup) &&
             nrm.ratio_sup > 10.0 * std::max(rot.ratio_sup, 1.0);
    c.detail = "rotation sup = " + format_full(rot.ratio_sup) +
               ", normal control sup = " + format_full(nrm.ratio_sup);
    out.push_back(c);
  }
}

void coercivity_suite(std::vector<CheckOutcome>& out) {
  KernelSpec k;
  k.dim = 2;
  k.s = 0.5;
  k.alpha = 1.0;
  k.beta = 0.7;
  k.lambda = {1.0, 1.3, 1.0};
  k.perturbation.kind = PerturbationKind::gaussian;
  k.perturbation.c = -0.04;
  k.perturbation.sigma_w = 0.35;
  const double mass = 1.0;
  const double km = kappa_min(k);
  const double kappa = km + 0.05 * (1.0 - km);

  KernelSpec shape = k;
  shape.perturbation.kind = PerturbationKind::none;
  MinimizerProfile ref = ellipsoid_shape_from_lambda(shape, mass, nullptr);
  const double half = 1.35 * std::max(ref.semi_axes[0], ref.semi_axes[1]) +
                      0.6;
  BoxGrid grid = make_centered_grid({0.0, 0.0}, half, 48);
  CoercivityReference cache =
      make_coercivity_reference(ref, Point{0.0, 0.0, 0.0}, k, grid, 1e-6);

  {
    CheckOutcome c{"kappa floor satisfies the symbol bound", false, ""};
    c.pass = check_H2b(k, kappa).holds;
    c.detail = "kappa = " + format_full(kappa);
    out.push_back(c);
  }
  {
    CheckOutcome c{"equality at the reference shape", false, ""};
    GridField rho = sample_field(grid, [&](double x, double y) {
      return ref.density(Point{x, y, 0.0});
    });
    double mtot = rho.integral();
    for (auto& v : rho.values) v *= mass / mtot;
    CoercivityReport rep = coercivity_check(rho, cache, k, kappa);
    // With rho equal to the reference the difference measure vanishes, so
    // the second bound is an equality; the mass-bearing bound keeps strictly
    // positive slack and only needs to hold.
    const double gap = std::abs(rep.lhs - rep.rhs);
    c.pass = gap < 1e-10 * std::max(1.0, std::abs(rep.lhs)) && rep.holds0;
    c.detail = "lhs - rhs = " + format_full(rep.lhs - rep.rhs);
    out.push_back(c);
  }
  {
    CheckOutcome c{"randomized coercivity trials", false, ""};
    Rng rng(2026);
    int failures = 0;
    double worst_slack = std::numeric_limits<double>::infinity();
    const int n_trials = 200;
    for (int t = 0; t < n_trials; ++t) {
      const int variant = t % 3;
      const double a1 = rng.uniform(0.05, 0.45);
      const double k1 = rng.uniform(1.0, 4.0);
      const double k2 = rng.uniform(1.0, 4.0);
      const double ph = rng.uniform(0.0, 2.0 * kPi);
      const double shift_x = rng.uniform(-0.2, 0.2);
      const double shift_y = rng.uniform(-0.2, 0.2);
      const double blob_sigma = rng.uniform(0.15, 0.4);
      GridField rho = sample_field(grid, [&](double x, double y) {
        if (variant == 0) {
          const double bump =
              1.0 + a1 * std::cos(k1 * x + ph) * std::cos(k2 * y - ph);
          return ref.density(Point{x, y, 0.0}) * std::max(0.0, bump);
        }
        if (variant == 1)
          return ref.density(Point{x - shift_x, y - shift_y, 0.0});
        const double blob = std::exp(-(x * x + y * y) /
                                     (2.0 * blob_sigma * blob_sigma));
        return 0.7 * ref.density(Point{x, y, 0.0}) + 0.3 * blob;
      });
      double mtot = rho.integral();
      if (!(mtot > 0.0)) {
        ++failures;
        continue;
      }
      for (auto& v : rho.values) v *= mass / mtot;
      CoercivityReport rep = coercivity_check(rho, cache, k, kappa);
      worst_slack = std::min(worst_slack, rep.lhs - rep.rhs);
      if (!rep.holds || !rep.holds0) ++failures;
    }
    c.pass = failures == 0;
    c.detail = std::to_string(n_trials - failures) + "/" +
               std::to_string(n_trials) +
               " trials, worst slack = " + format_full(worst_slack);
    out.push_back(c);
  }
}

void ode_suite(std::vector<CheckOutcome>& out) {
  KernelSpec disk;
  disk.dim = 2;
  disk.s = 1.0;
  disk.alpha = 1.0;
  disk.beta = 1.0;
  MinimizerProfile prof = explicit_radial_minimizer(disk, 1.0);
  const double lambda = 1.3;
  const Point X0{0.4, -0.3, 0.0};
  const Point V0{0.3, 0.1, 0.0};

  {
    CheckOutcome c{"free drag decay closed form", false, ""};
    ExternalFieldSpec field;
    LimitTrajectory lim =
        integrate_xv(prof, field, lambda, X0, V0, 1.0, 1.0 / 256.0);
    Point X{}, V{};
    lim.state_at(1.0, X, V);
    double worst = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double ve = V0[j] * std::exp(-lambda);
      const double xe = X0[j] + V0[j] * (1.0 - std::exp(-lambda)) / lambda;
      worst = std::max({worst, std::abs(V[j] - ve), std::abs(X[j] - xe)});
    }
    c.pass = worst < 1e-10;
    c.detail = "max deviation = " + format_full(worst);
    out.push_back(c);
  }
  {
    CheckOutcome c{"constant field relaxation closed form", false, ""};
    ExternalFieldSpec field;
    field.kind = FieldKind::constant;
    field.offset = {0.25, -0.15, 0.0};
    LimitTrajectory lim =
        integrate_xv(prof, field, lambda, X0, V0, 1.0, 1.0 / 256.0);
    Point X{}, V{};
    lim.state_at(1.0, X, V);
    double worst = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double bj = field.offset[j];
      const double ve = bj + (V0[j] - bj) * std::exp(-lambda);
      const double xe =
          X0[j] + bj + (V0[j] - bj) * (1.0 - std::exp(-lambda)) / lambda;
      worst = std::max({worst, std::abs(V[j] - ve), std::abs(X[j] - xe)});
    }
    c.pass = worst < 1e-10;
    c.detail = "max deviation = " + format_full(worst);
    out.push_back(c);
  }
  {
    CheckOutcome c{"fourth order step ratio", false, ""};
    ExternalFieldSpec field;
    field.kind = FieldKind::linear;
    field.matrix = {-0.3, 0.5, 0.0, -0.4, -0.2, 0.0, 0.0, 0.0, 0.0};
    field.offset = {0.2, -0.1, 0.0};
    // Exact solution through the matrix exponential of the affine system
    // (X, V, 1)' = M (X, V, 1) with g(X) = A X + b for a centered profile.
    SmallMatrix M(5);
    auto at = [&M](int i, int j) -> double& { return M.a[i * M.n + j]; };
    at(0, 2) = 1.0;
    at(1, 3) = 1.0;
    at(2, 0) = lambda * field.matrix[0];
    at(2, 1) = lambda * field.matrix[1];
    at(3, 0) = lambda * field.matrix[kMaxDim];
    at(3, 1) = lambda * field.matrix[kMaxDim + 1];
    at(2, 2) = -lambda;
    at(3, 3) = -lambda;
    at(2, 4) = lambda * field.offset[0];
    at(3, 4) = lambda * field.offset[1];
    SmallMatrix E = mat_exp(M);
    std::vector<double> z0{X0[0], X0[1], V0[0], V0[1], 1.0};
    std::vector<double> z = mat_vec(E, z0);

    auto error_at = [&](double dt) {
      LimitTrajectory lim = integrate_xv(prof, field, lambda, X0, V0, 1.0, dt);
      Point X{}, V{};
      lim.state_at(1.0, X, V);
      double e = 0.0;
      for (int j = 0; j < 2; ++j)
        e = std::max({e, std::abs(X[j] - z[j]), std::abs(V[j] - z[2 + j])});
      return e;
    };
    const double e1 = error_at(1.0 / 32.0);
    const double e2 = error_at(1.0 / 64.0);
    const double ratio = e1 / std::max(e2, 1e-300);
    c.pass = ratio > 14.0 && ratio < 18.0;
    c.detail = "error ratio under halving = " + format_full(ratio);
    out.push_back(c);
  }
}

void modulated_suite(std::vector<CheckOutcome>& out) {
  ExperimentConfig cfg;
  cfg.kernel.dim = 2;
  cfg.kernel.s = 1.0;
  cfg.kernel.alpha = 1.0;
  cfg.kernel.beta = 1.0;
  cfg.minimizer.mass = 1.0;
  cfg.minimizer.flow_steps = 200;
  cfg.simulation.n_particles = 400;
  cfg.simulation.epsilon = 0.08;
  cfg.simulation.lambda_drag = 1.0;
  cfg.simulation.t_final = 0.5;
  cfg.simulation.thermal_coeff = 0.2;
  cfg.simulation.relax_initial = true;
  cfg.simulation.X_init = {0.3, -0.2, 0.0};
  cfg.simulation.V_init = {0.2, 0.1, 0.0};
  cfg.external_field.kind = FieldKind::linear;
  cfg.external_field.matrix = {-0.3, 0.1, 0.0, 0.1, -0.2, 0.0,
                               0.0,  0.0, 0.0};
  cfg.external_field.offset = {0.4, -0.2, 0.0};

  const double eps = cfg.simulation.epsilon;
  PreparedRun r = prepare_run(cfg, eps, 3, nullptr, 0.0);
  const double thermal = cfg.simulation.thermal_coeff * std::sqrt(eps);
  ParticleEnsemble st = initial_state(r, cfg, thermal, 3);

  ObservableRecord ob0 = observables(st, r.sim, r.energy_reference);
  LimitTrajectory lim = integrate_xv(
      r.profile, cfg.external_field, cfg.simulation.lambda_drag, ob0.X_eps,
      ob0.V_eps, r.sim.t_final, r.sim.t_final / 1024.0);
  StrongSolutionSpec strong = rigid_transport_solution(
      lim, {-0.3, 0.1, 0.1, -0.2}, {0.4, -0.2});

  ModulatedEnergyOptions mopts;
  mopts.reference_cloud = &r.base_cloud;

  std::vector<double> times, h_tot, r_eps;
  double gap0 = 0.0, hms0 = 0.0, worst_bound_gap = 0.0;
  bool first = true;
  run_loop(st, r, [&](const ParticleEnsemble& state,
                      const ObservableRecord& ob) {
    ModulatedEnergyReport mod = modulated_energy(
        state, lim, strong, r.sim.kernel, r.energy_reference, eps, mopts);
    Point X{}, V{};
    lim.state_at(ob.time, X, V);
    BoxGrid grid = make_centered_grid(
        {X[0], X[1]}, r.profile.bounding_radius() + 8.0 * mod.bandwidth + 0.5,
        64);
    CoarseFields cf = coarse_grain(state, grid, mod.bandwidth);
    times.push_back(ob.time);
    h_tot.push_back(mod.total_cg);
    r_eps.push_back(r_eps_from_fields(cf, strong, ob.time));
    if (first) {
      gap0 = mod.energy_gap;
      hms0 = mod.hms_sq;
      first = false;
    }
    worst_bound_gap = std::max(
        worst_bound_gap, (mod.hms_lower_bound - mod.total_cg) /
                             std::max(std::abs(mod.total_cg), 1e-12));
  });

  {
    CheckOutcome c{"energy gap vanishes at the relaxed start", false, ""};
    c.pass = std::abs(gap0) < 1e-10;
    c.detail = "gap(0) = " + format_full(gap0);
    out.push_back(c);
  }
  {
    CheckOutcome c{"density distance vanishes at the relaxed start", false,
                   ""};
    c.pass = hms0 < 1e-18;
    c.detail = "hms_sq(0) = " + format_full(hms0);
    out.push_back(c);
  }
  {
    CheckOutcome c{"coarse-grained lower bound", false, ""};
    c.pass = worst_bound_gap < 1e-10;
    c.detail = "max relative excess = " + format_full(worst_bound_gap);
    out.push_back(c);
  }
  {
    CheckOutcome c{"gronwall certificate", false, ""};
    GronwallReport gw = gronwall_check(times, h_tot, r_eps);
    c.pass = gw.satisfied && std::isfinite(gw.C_fit) && gw.C_fit < 50.0;
    c.detail = "C_fit = " + format_full(gw.C_fit) +
               ", integral |R| = " + format_full(gw.r_integral);
    out.push_back(c);
  }
}

int check_body(const std::string& suite, const RunnerOptions& opt) {
  std::vector<CheckOutcome> outcomes;
  bool known = false;
  if (suite == "kernels" || suite == "all") {
    kernels_suite(outcomes);
    known = true;
  }
  if (suite == "minimizers" || suite == "all") {
    minimizers_suite(outcomes);
    known = true;
  }
  if (suite == "coercivity" || suite == "all") {
    coercivity_suite(outcomes);
    known = true;
  }
  if (suite == "ode" || suite == "all") {
    ode_suite(outcomes);
    known = true;
  }
  if (suite == "modulated" || suite == "all") {
    modulated_suite(outcomes);
    known = true;
  }
  if (!known)
    throw ConfigError("unknown check suite '" + suite +
                      "' (kernels, minimizers, coercivity, ode, modulated, "
                      "all)");
  int failures = 0;
  for (const auto& c : outcomes) {
    std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.c_str());
    if (!c.pass) ++failures;
  }
  std::printf("%d/%d checks passed\n",
              static_cast<int>(outcomes.size()) - failures,
              static_cast<int>(outcomes.size()));
  (void)opt;
  return failures == 0 ? 0 : 4;
}

// ---- plot -------------------------------------------------------------------

std::vector<double> numeric_column(const CsvTable& t, int col) {
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (const auto& row : t.rows) v.push_back(row[col]);
  return v;
}

int plot_body(const std::string& csv_path, const std::string& kind,
              const RunnerOptions& opt) {
  CsvTable table = read_csv(csv_path);
  const std::string dir = opt.out_dir.empty() ? "out" : opt.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + dir +
                      "': " + ec.message());

  PlotSpec plot;
  std::string out_name;
  if (kind == "trajectory") {
    const int te = table.column("Xeps1"), ye = table.column("Xeps2");
    const int tl = table.column("Xlim1"), yl = table.column("Xlim2");
    const int x1 = table.column("X1"), x2 = table.column("X2");
    if (te >= 0 && ye >= 0) {
      PlotSeries emp;
      emp.label = "particle center of mass";
      emp.x = numeric_column(table, te);
      emp.y = numeric_column(table, ye);
      plot.series.push_back(emp);
      if (tl >= 0 && yl >= 0) {
        PlotSeries limit;
        limit.label = "limiting trajectory";
        limit.color = "#c1452b";
        limit.x = numeric_column(table, tl);
        limit.y = numeric_column(table, yl);
        plot.series.push_back(limit);
      }
      plot.x_label = "x1";
      plot.y_label = "x2";
    } else if (x1 >= 0 && x2 >= 0) {
      PlotSeries emp;
      emp.label = "center of mass";
      emp.x = numeric_column(table, x1);
      emp.y = numeric_column(table, x2);
      plot.series.push_back(emp);
      plot.x_label = "x1";
      plot.y_label = "x2";
    } else {
      throw ConfigError(
          "trajectory plot needs columns Xeps1/Xeps2 or X1/X2 in " + csv_path);
    }
    plot.title = "center of mass trajectory";
    out_name = "trajectory.svg";
  } else if (kind == "slope") {
    const int ce = table.column("epsilon");
    if (ce < 0)
      throw ConfigError("slope plot needs an 'epsilon' column in " + csv_path);
    int cv = table.column("max_energy_gap");
    if (cv < 0)
      for (std::size_t j = 0; j < table.header.size(); ++j)
        if (static_cast<int>(j) != ce) {
          cv = static_cast<int>(j);
          break;
        }
    if (cv < 0) throw ConfigError("slope plot needs a value column");
    PlotSeries pts;
    pts.label = table.header[cv];
    pts.scatter = true;
    pts.x = numeric_column(table, ce);
    pts.y = numeric_column(table, cv);
    const double slope = loglog_slope(pts.x, pts.y);
    PlotSeries fit;
    fit.label = "power-law fit";
    fit.color = "#c1452b";
    if (std::isfinite(slope)) {
      double sx = 0.0, sy = 0.0;
      int n = 0;
      for (std::size_t i = 0; i < pts.x.size(); ++i)
        if (pts.x[i] > 0.0 && pts.y[i] > 0.0) {
          sx += std::log(pts.x[i]);
          sy += std::log(pts.y[i]);
          ++n;
        }
      const double intercept = (sy - slope * sx) / std::max(1, n);
      for (double xv : pts.x)
        if (xv > 0.0) {
          fit.x.push_back(xv);
          fit.y.push_back(std::exp(intercept + slope * std::log(xv)));
        }
    }
    plot.series = {pts};
    if (!fit.x.empty()) plot.series.push_back(fit);
    plot.title = std::string(table.header[cv]) + " against epsilon";
    plot.x_label = "epsilon";
    plot.y_label = table.header[cv];
    plot.log_x = true;
    plot.log_y = true;
    char ann[64];
    std::snprintf(ann, sizeof ann, "slope = %.3f", slope);
    plot.annotation = ann;
    out_name = "slope.svg";
  } else if (kind == "frostman") {
    const int cc = table.column("coordinate");
    const int cd = table.column("density");
    const int cp = table.column("potential");
    if (cc < 0 || cd < 0 || cp < 0)
      throw ConfigError(
          "frostman plot needs coordinate/density/potential columns in " +
          csv_path);
    const int ca = table.column("axis");
    PlotSeries dens, pot;
    dens.label = "density";
    pot.label = "potential";
    pot.color = "#c1452b";
    for (const auto& row : table.rows) {
      if (ca >= 0 && row[ca] != 0.0) continue;
      dens.x.push_back(row[cc]);
      dens.y.push_back(row[cd]);
      pot.x.push_back(row[cc]);
      pot.y.push_back(row[cp]);
    }
    plot.series = {dens, pot};
    plot.title = "profile density and potential";
    plot.x_label = "coordinate";
    plot.y_label = "value";
    out_name = "frostman.svg";
  } else {
    throw ConfigError("unknown plot kind '" + kind +
                      "' (trajectory, slope, frostman)");
  }

  const std::string path = join_path(dir, out_name);
  write_svg(path, plot);
  say(opt, "plot: wrote " + path);
  return 0;
}

}  // namespace

int cmd_minimize(const ExperimentConfig& cfg, const RunnerOptions& opt) {
  return run_guarded(&minimize_body, cfg, opt);
}

int cmd_simulate(const ExperimentConfig& cfg, const RunnerOptions& opt) {
  return run_guarded(&simulate_body, cfg, opt);
}

int cmd_sweep(const ExperimentConfig& cfg, const RunnerOptions& opt) {
  return run_guarded(&sweep_body, cfg, opt);
}

int cmd_check(const std::string& suite, const RunnerOptions& opt) {
  return translate_exceptions([&] { return check_body(suite, opt); });
}

int cmd_plot(const std::string& csv_path, const std::string& kind,
             const RunnerOptions& opt) {
  return translate_exceptions([&] { return plot_body(csv_path, kind, opt); });
}

int run_guarded(int (*body)(const ExperimentConfig&, const RunnerOptions&),
                const ExperimentConfig& cfg, const RunnerOptions& opt) {
  return translate_exceptions([&] { return body(cfg, opt); });
}

}  // namespace swarmlab
