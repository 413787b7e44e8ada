#include "npbe/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "npbe/constants.hpp"
#include "npbe/csv.hpp"
#include "npbe/error.hpp"
#include "npbe/error_bounds.hpp"
#include "npbe/radial_ode.hpp"
#include "npbe/smolyak.hpp"

namespace npbe::cli {

namespace fs = std::filesystem;

namespace {

std::vector<double> per_axis(const Config& cfg, const std::string& key, int dim, std::vector<double> fallback) {
  auto v = cfg.get_doubles(key, std::move(fallback));
  if (v.size() == 1) v.assign(dim, v[0]);
  if (v.size() != static_cast<std::size_t>(dim))
    throw InvalidArgument("config: '" + key + "' needs 1 or " + std::to_string(dim) + " entries");
  return v;
}

Nonlinearity nonlinearity_of(const Config& cfg) {
  const auto s = cfg.get_string("problem.nonlinearity", "sinh");
  if (s == "sinh") return Nonlinearity::Sinh;
  if (s == "series") return Nonlinearity::PowerSeries;
  throw InvalidArgument("config: problem.nonlinearity must be 'sinh' or 'series'");
}

FaceAveraging averaging_of(const Config& cfg) {
  const auto s = cfg.get_string("problem.averaging", "arithmetic");
  if (s == "arithmetic") return FaceAveraging::Arithmetic;
  if (s == "harmonic") return FaceAveraging::Harmonic;
  throw InvalidArgument("config: problem.averaging must be 'arithmetic' or 'harmonic'");
}

// Product of sin(pi (x - lo)/L) over the active axes, and the sum of (pi/L)^2.
double sine_bump(const Grid& g, const Point& x) {
  double v = 1.0;
  for (int a = 0; a < g.dim(); ++a) v *= std::sin(std::numbers::pi * (x[a] - g.lower(a)) / g.extent(a));
  return v;
}

double sine_eigenvalue(const Grid& g) {
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) s += std::pow(std::numbers::pi / g.extent(a), 2);
  return s;
}

Point center_of(const Grid& g) {
  Point c{};
  for (int a = 0; a < g.dim(); ++a) c[a] = 0.5 * (g.lower(a) + g.upper(a));
  return c;
}

struct Levels {
  int lo, hi;
};

Levels parse_levels(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw InvalidArgument("--levels expects A..B, got '" + text + "'");
  }
}

Metadata config_metadata(const std::string& command, const Config& cfg) {
  Metadata md{{"command", command}, {"config", cfg.source()}};
  md.emplace_back("modules", std::string("grid_core,picard,constants,smolyak,error_bounds,stochastic,radial_ode,cli ") +
                                 NPBE_VERSION);
  // The worker count never changes results, so it stays out of the record.
  for (const auto& [k, v] : cfg.entries())
    if (k != "study.jobs") md.emplace_back("cfg." + k, v);
  return md;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw InvalidArgument("cannot write '" + (dir / name).string() + "'");
  return os;
}

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<double> tol;
  std::string levels;
  std::optional<int> ref;
  std::optional<unsigned> jobs;
};

Config load_config(const Common& c) {
  if (c.config_path.empty()) return Config{};
  Config cfg = Config::load(c.config_path);
  if (c.tol) cfg.set("solver.tol", format_number(*c.tol));
  if (!c.levels.empty()) {
    const auto lv = parse_levels(c.levels);
    if (lv.hi < lv.lo) throw InvalidArgument("--levels: empty range");
    std::string s;
    for (int w = lv.lo; w <= lv.hi; ++w) s += (s.empty() ? "" : ",") + std::to_string(w);
    cfg.set("study.levels", s);
  }
  if (c.ref) cfg.set("study.reference", std::to_string(*c.ref));
  if (c.jobs) cfg.set("study.jobs", std::to_string(*c.jobs));
  return cfg;
}

int run_solve(const Common& c, std::ostream& out) {
  const Config cfg = load_config(c);
  const Grid grid = grid_from_config(cfg);
  const NpbeProblem problem = problem_from_config(cfg, grid);
  const auto res = picard_solve(problem, picard_from_config(cfg));

  auto os = open_output(c.out_dir, "solution.csv");
  Metadata md = config_metadata("solve", cfg);
  md.emplace_back("iterations", std::to_string(res.iterations));
  md.emplace_back("converged", res.converged ? "true" : "false");
  md.emplace_back("residual", format_number(res.residual));
  if (res.rho_obs) md.emplace_back("rho_obs", format_number(*res.rho_obs));
  write_metadata(os, md);
  write_field_csv(os, res.u);

  out << (res.converged ? "converged" : "not converged") << " after " << res.iterations << " Picard iteration"
      << (res.iterations == 1 ? "" : "s") << '\n';
  out << "residual = " << format_number(res.residual) << '\n';
  if (res.rho_obs) out << "rho_obs = " << format_number(*res.rho_obs) << '\n';
  out << "Q = " << format_number(qoi_spatial_mean(res.u)) << '\n';
  return res.converged ? kSuccess : kDomainError;
}

int run_constants(const Common& c, std::ostream& out) {
  const Config cfg = load_config(c);
  const Grid grid = grid_from_config(cfg);
  const NpbeProblem problem = problem_from_config(cfg, grid);
  ConstantsRequest rq;
  rq.geometry = geometry_of(grid);
  rq.bounds = coefficient_bounds_of(problem.eps(), problem.kappa_sq());
  rq.sobolev_p = cfg.get_double("constants.sobolev_p", 4.0);
  rq.grad_zeta = cfg.get_double("constants.grad_zeta", 1.0);
  rq.covering_n = cfg.get_int("constants.covering_n", 1);
  rq.f_norm = discrete_norm(problem.source(), NormKind::L2);
  rq.w_norm = discrete_norm(problem.lift(), NormKind::H2);
  if (cfg.has("constants.radius")) rq.radius = cfg.get_double("constants.radius");
  const auto report = build_constants_report(rq);

  write_key_value(out, report);
  auto os = open_output(c.out_dir, "constants.csv");
  write_metadata(os, config_metadata("constants", cfg));
  write_csv(os, report);
  return kSuccess;
}

int run_uq(const Common& c, std::ostream& out, std::ostream& err) {
  const Config cfg = load_config(c);
  const Grid grid = grid_from_config(cfg);
  const auto model = model_from_config(cfg, grid);
  const auto study = study_from_config(cfg);
  const auto rep = run_uq_study(study, *model);
  for (const auto& w : rep.warnings) err << "warning: " << w << '\n';

  Metadata md = config_metadata("uq", cfg);
  for (auto& kv : model->describe()) md.push_back(kv);
  auto os = open_output(c.out_dir, "study.csv");
  write_study_csv(os, rep, md);

  out << "w,eta,E_w,abs_err\n";
  for (const auto& r : rep.rows)
    out << r.level << ',' << r.eta << ',' << format_number(r.expectation) << ',' << format_number(r.abs_error)
        << '\n';
  out << "reference E = " << format_number(rep.reference_expectation) << " (w = " << rep.reference_level
      << ", eta = " << rep.reference_eta << ")\n";
  out << "fitted_rate = " << format_number(rep.fitted_rate) << '\n';
  return kSuccess;
}

int run_bound(const Common& c, std::ostream& out) {
  const Config cfg = load_config(c);
  const int dim = cfg.get_int("bound.dim", 2);
  std::optional<double> cs;
  if (cfg.has("bound.c_sigma")) cs = cfg.get_double("bound.c_sigma");
  const auto p = bound_constants(dim, cfg.get_double("bound.sigma_hat"), cfg.get_double("bound.m_tilde"), cs);
  const auto lv = cfg.get_doubles("study.levels", {1, 2, 3, 4, 5});
  std::vector<BoundRow> rows;
  for (double wd : lv) {
    const int w = static_cast<int>(wd);
    const double eta = static_cast<double>(build_sparse_grid(dim, w).size());
    rows.push_back({w, eta, predict_error(p, w, eta)});
  }
  auto os = open_output(c.out_dir, "bound.csv");
  Metadata md = config_metadata("bound", cfg);
  md.emplace_back("sigma", format_number(p.sigma));
  md.emplace_back("C2_tilde", format_number(p.c2_tilde));
  md.emplace_back("delta_star", format_number(p.delta_star));
  md.emplace_back("C1", format_number(p.c1));
  md.emplace_back("mu1", format_number(p.mu1));
  md.emplace_back("mu2", format_number(p.mu2));
  md.emplace_back("mu3", format_number(p.mu3));
  md.emplace_back("Q", format_number(p.q));
  write_metadata(os, md);
  write_bound_csv(os, rows);
  write_bound_csv(out, rows);
  return kSuccess;
}

RadialParams radial_from_config(const Config& cfg) {
  RadialParams p;
  p.a = cfg.get_double("ode.A", p.a);
  p.kappa_tilde = cfg.get_double("ode.kappa_tilde", p.kappa_tilde);
  p.lambda = cfg.get_double("ode.lambda", p.lambda);
  p.c = cfg.get_double("ode.c", p.c);
  p.eps_reg = cfg.get_double("ode.eps_reg", p.eps_reg);
  p.step = cfg.get_double("ode.step", p.step);
  p.r_max = cfg.get_double("ode.r_max", p.r_max);
  p.record_every = static_cast<std::size_t>(cfg.get_int("ode.record_every", 1));
  return p;
}

int run_ode(const Common& c, std::ostream& out) {
  const Config cfg = load_config(c);
  const RadialParams p = radial_from_config(cfg);
  const auto traj = integrate_regularized(p);
  const double target = cfg.get_string("ode.target", "zero") == "zero" ? 0.0 : boundary_target(p.kappa_tilde, p.lambda);
  const auto zeros = find_zeros(traj, target);
  const Metadata md = config_metadata("ode", cfg);
  {
    auto os = open_output(c.out_dir, "trajectory.csv");
    Metadata m = md;
    m.emplace_back("truncated", traj.truncated ? "true" : "false");
    m.emplace_back("max_h_increase", format_number(traj.max_h_increase));
    write_metadata(os, m);
    write_trajectory_csv(os, traj);
  }
  {
    auto os = open_output(c.out_dir, "zeros.csv");
    Metadata m = md;
    m.emplace_back("target", format_number(target));
    m.emplace_back("identically_at_target", zeros.identically_at_target ? "true" : "false");
    write_metadata(os, m);
    write_zeros_csv(os, zeros);
  }
  {
    auto os = open_output(c.out_dir, "phase_portrait.csv");
    write_metadata(os, md);
    const double span = cfg.get_double("ode.portrait_half_width", 3.0);
    write_phase_portrait_csv(os, p.kappa_tilde, p.lambda, -span, span, -span, span,
                             cfg.get_int("ode.portrait_points", 21));
  }
  out << "samples = " << traj.size() << (traj.truncated ? " (truncated)" : "") << '\n';
  out << "max H increase per step = " << format_number(traj.max_h_increase) << '\n';
  out << "zeros:";
  for (double z : zeros.zeros) out << ' ' << format_number(z);
  out << '\n';

  if (cfg.get_bool("ode.regularization", false)) {
    const auto eps = cfg.get_doubles("ode.eps_sequence", default_eps_sequence());
    const auto st = vanishing_regularization(p, eps, cfg.get_double("ode.delta", 0.1),
                                             cfg.get_double("ode.cauchy_tol", 1e-6));
    auto os = open_output(c.out_dir, "regularization.csv");
    write_metadata(os, md);
    os << "eps_k,eps_k1,sup_difference\n";
    for (std::size_t k = 0; k < st.report.differences.size(); ++k)
      os << format_number(eps[k]) << ',' << format_number(eps[k + 1]) << ',' << format_number(st.report.differences[k])
         << '\n';
    out << "cauchy = " << (st.report.cauchy ? "true" : "false") << '\n';
  }
  return kSuccess;
}

int run_bifurcate(const Common& c, std::ostream& out) {
  const Config cfg = load_config(c);
  ShootingOptions o;
  o.length = cfg.get_double("bifurcate.length", o.length);
  o.slope_lo = cfg.get_double("bifurcate.slope_lo", o.slope_lo);
  o.slope_hi = cfg.get_double("bifurcate.slope_hi", o.slope_hi);
  o.scan_points = cfg.get_int("bifurcate.scan_points", o.scan_points);
  o.steps = cfg.get_int("bifurcate.steps", o.steps);
  const auto etas = cfg.get_doubles("bifurcate.etas", {-0.2, -0.1, -0.05, -0.01, 0.01, 0.05, 0.1, 0.2, 0.5});

  auto os = open_output(c.out_dir, "bifurcation.csv");
  auto prof = open_output(c.out_dir, "profiles.csv");
  const Metadata md = config_metadata("bifurcate", cfg);
  write_metadata(os, md);
  write_metadata(prof, md);
  os << "eta,found,slope,sup_norm,l2_norm\n";
  prof << "eta,x,u\n";
  out << "eta,found,slope,sup_norm\n";
  for (double eta : etas) {
    const auto sol = shoot_scalar_npbe(eta, o);
    os << format_number(eta) << ',' << (sol ? 1 : 0) << ',';
    out << format_number(eta) << ',' << (sol ? "yes" : "no") << ',';
    if (sol) {
      os << format_number(sol->slope) << ',' << format_number(sol->sup_norm) << ',' << format_number(sol->l2_norm);
      out << format_number(sol->slope) << ',' << format_number(sol->sup_norm);
      for (std::size_t i = 0; i < sol->x.size(); ++i)
        prof << format_number(eta) << ',' << format_number(sol->x[i]) << ',' << format_number(sol->u[i]) << '\n';
    } else {
      os << ",,";
      out << ',';
    }
    os << '\n';
    out << '\n';
  }
  return kSuccess;
}

int run_gridinfo(const Common& c, std::ostream& out) {
  const Config cfg = load_config(c);
  const Grid g = grid_from_config(cfg);
  const auto eig = lambda1_lower(geometry_of(g));
  out << "dim = " << g.dim() << '\n';
  for (int a = 0; a < g.dim(); ++a)
    out << "axis" << a << " = [" << format_number(g.lower(a)) << ", " << format_number(g.upper(a)) << "], n = "
        << g.nodes(a) << ", h = " << format_number(g.spacing(a)) << '\n';
  out << "nodes = " << g.node_count() << '\n';
  out << "interior_nodes = " << g.interior_count() << '\n';
  out << "diameter = " << format_number(g.diameter()) << '\n';
  out << "volume = " << format_number(g.volume()) << '\n';
  out << "lambda1_lower = " << format_number(eig.lower) << '\n';
  if (eig.exact) out << "lambda1_exact = " << format_number(*eig.exact) << '\n';
  return kSuccess;
}

}  // namespace

Grid grid_from_config(const Config& cfg) {
  const int dim = cfg.get_int("grid.dim", 1);
  if (dim < 1 || dim > 3) throw InvalidArgument("config: grid.dim must be 1, 2 or 3");
  const auto lo = per_axis(cfg, "grid.lower", dim, {0.0});
  const auto hi = per_axis(cfg, "grid.upper", dim, {1.0});
  const auto nd = per_axis(cfg, "grid.nodes", dim, {17.0});
  std::vector<int> n(nd.begin(), nd.end());
  return build_grid(dim, lo, hi, n);
}

NpbeProblem problem_from_config(const Config& cfg, const Grid& grid) {
  const double eps = cfg.get_double("problem.eps", 1.0);
  const double k2 = cfg.get_double("problem.kappa_sq", 0.0);
  const double g = cfg.get_double("problem.boundary", 0.0);
  const std::string kind = cfg.get_string("problem.source", "constant");
  const double value = cfg.get_double("problem.source_value", 1.0);
  const auto nl = nonlinearity_of(cfg);

  ScalarField f;
  if (kind == "constant") {
    f = ScalarField(grid, value);
  } else if (kind == "manufactured") {
    // u* = amplitude * prod sin(pi (x - lo)/L); f = -eps Lap u* + kappa^2 sinh u*.
    const double amp = cfg.get_double("problem.amplitude", 0.1);
    const double lam = sine_eigenvalue(grid);
    f = ScalarField::from_function(grid, [&](const Point& x) {
      const double u = amp * sine_bump(grid, x);
      return eps * lam * u + k2 * std::sinh(u);
    });
  } else if (kind == "point") {
    // Gaussian of width 2h at the box center carrying charge source_value.
    const double w = 2.0 * grid.max_spacing();
    const Point c = center_of(grid);
    f = ScalarField::from_function(grid, [&](const Point& x) {
      double r2 = 0.0;
      for (int a = 0; a < grid.dim(); ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
      return std::exp(-0.5 * r2 / (w * w));
    });
    const double mass = integrate_field(f);
    for (double& v : f.values()) v *= value / mass;
  } else {
    throw InvalidArgument("config: problem.source must be constant, manufactured or point");
  }
  return NpbeProblem(ScalarField(grid, eps), ScalarField(grid, k2), std::move(f), ScalarField(grid, g), nl,
                     cfg.get_int("problem.series_order", 7), averaging_of(cfg));
}

PicardOptions picard_from_config(const Config& cfg) {
  PicardOptions o;
  o.tol = cfg.get_double("solver.tol", o.tol);
  o.max_iter = static_cast<std::size_t>(cfg.get_int("solver.max_iter", static_cast<int>(o.max_iter)));
  o.damping = cfg.get_double("solver.damping", o.damping);
  o.linear_tol = cfg.get_double("solver.linear_tol", o.linear_tol);
  if (!(o.tol > 0.0 && o.linear_tol > 0.0)) throw InvalidArgument("config: tolerances must be positive");
  return o;
}

std::unique_ptr<CoefficientModel> model_from_config(const Config& cfg, const Grid& grid) {
  const std::string type = cfg.get_string("model.type", "charge_shift");
  const int dim = grid.dim();
  auto point_of = [&](const std::vector<double>& v, std::size_t count, const std::string& key) {
    if (v.size() < count) throw InvalidArgument("config: '" + key + "' has too few entries");
    Point p{};
    for (int a = 0; a < dim; ++a) p[a] = v[a];
    return p;
  };

  if (type == "charge_shift") {
    ChargeShiftParams p;
    for (int k = 1; cfg.has("model.charge" + std::to_string(k)); ++k) {
      const std::string key = "model.charge" + std::to_string(k);
      const auto v = cfg.get_doubles(key);
      if (v.size() != static_cast<std::size_t>(dim) + 1)
        throw InvalidArgument("config: '" + key + "' expects " + std::to_string(dim) + " coordinates and a charge");
      p.charges.push_back({point_of(v, dim, key), v.back()});
    }
    const int n = cfg.get_int("model.variables");
    const auto amps = cfg.get_doubles("model.amplitudes");
    if (amps.size() < static_cast<std::size_t>(n)) throw InvalidArgument("config: model.amplitudes too short");
    for (int k = 1; k <= n; ++k) {
      const std::string key = "model.direction" + std::to_string(k);
      auto v = cfg.get_doubles(key);
      if (v.size() != static_cast<std::size_t>(dim))
        throw InvalidArgument("config: '" + key + "' expects " + std::to_string(dim) + " components");
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (!(norm > 0.0)) throw InvalidArgument("config: '" + key + "' is the zero vector");
      for (double& x : v) x /= norm;
      p.directions.push_back(point_of(v, dim, key));
      p.amplitudes.push_back(amps[k - 1]);
    }
    p.range = cfg.get_double("model.range", p.range);
    p.charge_scale = cfg.get_double("model.charge_scale", p.charge_scale);
    p.mollifier_width = cfg.get_double("model.mollifier_width", p.mollifier_width);
    p.interior_radius = cfg.get_double("model.interior_radius", p.interior_radius);
    p.interface_width = cfg.get_double("model.interface_width", p.interface_width);
    p.eps_interior = cfg.get_double("model.eps_interior", p.eps_interior);
    p.eps_exterior = cfg.get_double("model.eps_exterior", p.eps_exterior);
    p.kappa_sq_exterior = cfg.get_double("model.kappa_sq_exterior", p.kappa_sq_exterior);
    p.boundary_value = cfg.get_double("model.boundary_value", p.boundary_value);
    return std::make_unique<ChargeShiftModel>(grid, std::move(p));
  }

  if (type == "noise") {
    // Constant means; each mode is `variable, target, alpha, shape` with
    // shape 0 for a constant and 1 for the product sine bump.
    Realization mean{ScalarField(grid, cfg.get_double("model.eps", 1.0)),
                     ScalarField(grid, cfg.get_double("model.kappa_sq", 0.0)),
                     ScalarField(grid, cfg.get_double("model.f", 0.0)),
                     ScalarField(grid, cfg.get_double("model.g", 0.0))};
    const int n = cfg.get_int("model.variables");
    std::vector<NoiseMode> modes;
    for (int k = 1; cfg.has("model.mode" + std::to_string(k)); ++k) {
      const std::string key = "model.mode" + std::to_string(k);
      const auto v = cfg.get_doubles(key);
      if (v.size() != 4) throw InvalidArgument("config: '" + key + "' expects variable, target, alpha, shape");
      static const NoiseTarget targets[] = {NoiseTarget::Eps, NoiseTarget::KappaSq, NoiseTarget::Source,
                                            NoiseTarget::Boundary};
      const int t = static_cast<int>(v[1]);
      if (t < 0 || t > 3) throw InvalidArgument("config: '" + key + "' target must be 0..3 (eps, kappa_sq, f, g)");
      NoiseMode m;
      m.variable = static_cast<int>(v[0]) - 1;
      m.target = targets[t];
      m.alpha = v[2];
      m.phi = v[3] == 0.0 ? ScalarField(grid, 1.0)
                          : ScalarField::from_function(grid, [&](const Point& x) { return sine_bump(grid, x); });
      modes.push_back(std::move(m));
    }
    std::vector<std::pair<double, double>> ranges;
    if (cfg.has("model.range")) ranges.assign(n, {-cfg.get_double("model.range"), cfg.get_double("model.range")});
    auto model = std::make_unique<NoiseModel>(std::move(mean), std::move(modes), n, std::move(ranges));
    model->set_log_transform(NoiseTarget::Eps, cfg.get_bool("model.log_eps", false));
    model->set_log_transform(NoiseTarget::KappaSq, cfg.get_bool("model.log_kappa_sq", false));
    if (cfg.has("model.a_min")) model->set_a_min(cfg.get_double("model.a_min"));
    return model;
  }
  throw InvalidArgument("config: model.type must be charge_shift or noise");
}

UqStudyConfig study_from_config(const Config& cfg) {
  UqStudyConfig s;
  const auto lv = cfg.get_doubles("study.levels", {1, 2, 3, 4});
  s.levels.assign(lv.begin(), lv.end());
  const int top = *std::max_element(s.levels.begin(), s.levels.end());
  s.reference_level = cfg.get_int("study.reference", top + 1);
  s.jobs = static_cast<unsigned>(cfg.get_int("study.jobs", 1));
  s.nonlinearity = nonlinearity_of(cfg);
  s.series_order = cfg.get_int("problem.series_order", 7);
  s.averaging = averaging_of(cfg);
  s.picard = picard_from_config(cfg);
  if (cfg.has("study.sigma_hat")) s.sigma_hat = cfg.get_double("study.sigma_hat");
  if (cfg.has("study.m_tilde")) s.m_tilde = cfg.get_double("study.m_tilde");
  return s;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlinear Poisson-Boltzmann laboratory", "npbe"};
  app.set_version_flag("--version", std::string(NPBE_VERSION));
  app.require_subcommand(1, 1);

  Common common;
  struct Sub {
    const char* name;
    const char* help;
    bool config_required;
  };
  const Sub subs[] = {
      {"solve", "Picard solve of the nPBE; writes solution.csv", true},
      {"constants", "Well-posedness and analyticity constants", true},
      {"uq", "Sparse-grid collocation study; writes study.csv", true},
      {"bound", "Sparse-grid error bound per level; writes bound.csv", true},
      {"ode", "Radial nonlinear Bessel trajectory, zeros and phase portrait", false},
      {"bifurcate", "Shooting for nontrivial solutions of the scalar nPBE", false},
      {"gridinfo", "Print grid geometry", true},
  };
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    auto* opt = sc->add_option("--config", common.config_path, "Configuration file")->check(CLI::ExistingFile);
    if (s.config_required) opt->required();
    sc->add_option("--out", common.out_dir, "Output directory");
    sc->add_option("--tol", common.tol, "Picard tolerance")->check(CLI::PositiveNumber);
    if (std::string(s.name) == "uq" || std::string(s.name) == "bound")
      sc->add_option("--levels", common.levels, "Study levels A..B");
    if (std::string(s.name) == "uq") {
      sc->add_option("--ref", common.ref, "Reference level")->check(CLI::NonNegativeNumber);
      sc->add_option("--jobs", common.jobs, "Worker threads for node solves (0 = all cores)");
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << NPBE_VERSION << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "solve") return run_solve(common, out);
    if (cmd == "constants") return run_constants(common, out);
    if (cmd == "uq") return run_uq(common, out, err);
    if (cmd == "bound") return run_bound(common, out);
    if (cmd == "ode") return run_ode(common, out);
    if (cmd == "bifurcate") return run_bifurcate(common, out);
    return run_gridinfo(common, out);
  } catch (const std::exception& e) {
    err << "npbe " << cmd << ": " << e.what() << '\n';
    return kDomainError;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace npbe::cli
