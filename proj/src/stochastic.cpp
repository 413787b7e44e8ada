#include "npbe/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "npbe/constants.hpp"
#include "npbe/error.hpp"
#include "npbe/error_bounds.hpp"
#include "npbe/smolyak.hpp"

namespace npbe {

const char* to_string(NoiseTarget target) {
  switch (target) {
    case NoiseTarget::Eps: return "eps";
    case NoiseTarget::KappaSq: return "kappa_sq";
    case NoiseTarget::Source: return "f";
    case NoiseTarget::Boundary: return "g";
  }
  return "?";
}

namespace {

void check_y(std::span<const double> y, int dim, const char* who) {
  if (y.size() != static_cast<std::size_t>(dim))
    throw InvalidArgument(std::string(who) + ": expected " + std::to_string(dim) + " coordinates, got " +
                          std::to_string(y.size()));
  for (double v : y)
    if (!(v >= -1.0 && v <= 1.0)) throw InvalidArgument(std::string(who) + ": coordinate outside [-1, 1]");
}

std::string join(std::span<const double> v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + format_number(x);
  return s;
}

}  // namespace

NoiseModel::NoiseModel(Realization mean, std::vector<NoiseMode> modes, int dim,
                       std::vector<std::pair<double, double>> ranges)
    : mean_(std::move(mean)), modes_(std::move(modes)), dim_(dim), ranges_(std::move(ranges)) {
  if (dim_ < 1) throw InvalidArgument("NoiseModel: need at least one random variable");
  require_same_grid(mean_.eps, mean_.kappa_sq, "NoiseModel");
  require_same_grid(mean_.eps, mean_.f, "NoiseModel");
  require_same_grid(mean_.eps, mean_.g, "NoiseModel");
  for (const auto& m : modes_) {
    if (m.variable < 0 || m.variable >= dim_) throw InvalidArgument("NoiseModel: mode variable out of range");
    require_same_grid(mean_.eps, m.phi, "NoiseModel mode");
  }
  if (ranges_.empty()) ranges_.assign(dim_, {-1.0, 1.0});
  if (ranges_.size() != static_cast<std::size_t>(dim_))
    throw InvalidArgument("NoiseModel: one range per variable required");
  for (const auto& [lo, hi] : ranges_)
    if (!(hi > lo)) throw InvalidArgument("NoiseModel: empty variable range");
}

void NoiseModel::set_log_transform(NoiseTarget target, bool on) {
  if (target == NoiseTarget::Eps)
    log_eps_ = on;
  else if (target == NoiseTarget::KappaSq)
    log_kappa_ = on;
  else
    throw InvalidArgument("NoiseModel: the log transform applies to eps and kappa^2 only");
}

void NoiseModel::set_a_min(double a_min) {
  if (!(a_min > 0.0)) throw InvalidArgument("NoiseModel: a_min must be positive");
  a_min_ = a_min;
}

Realization NoiseModel::realize(std::span<const double> y) const {
  check_y(y, dim_, "NoiseModel::realize");
  Realization r = mean_;
  auto field_of = [&](NoiseTarget t) -> ScalarField& {
    switch (t) {
      case NoiseTarget::Eps: return r.eps;
      case NoiseTarget::KappaSq: return r.kappa_sq;
      case NoiseTarget::Source: return r.f;
      default: return r.g;
    }
  };
  for (const auto& m : modes_) {
    const auto [lo, hi] = ranges_[m.variable];
    const double phys = lo + 0.5 * (y[m.variable] + 1.0) * (hi - lo);
    if (phys == 0.0) continue;
    auto& f = field_of(m.target);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += m.alpha * m.phi[i] * phys;
  }
  if (log_eps_)
    for (double& v : r.eps.values()) v = a_min_ + std::exp(v);
  if (log_kappa_)
    for (double& v : r.kappa_sq.values()) v = std::exp(v);
  if (r.eps.min() <= 0.0)
    throw InvalidArgument("NoiseModel: realized eps is not positive at y = (" + join(y) +
                          "); a truncated expansion need not stay positive, enable the log transform");
  if (r.kappa_sq.min() < 0.0)
    throw InvalidArgument("NoiseModel: realized kappa^2 is negative at y = (" + join(y) + ")");
  return r;
}

Metadata NoiseModel::describe() const {
  Metadata md{{"model", "noise"}, {"variables", std::to_string(dim_)}, {"modes", std::to_string(modes_.size())}};
  for (std::size_t k = 0; k < modes_.size(); ++k)
    md.emplace_back("mode" + std::to_string(k), std::string("y") + std::to_string(modes_[k].variable + 1) + " -> " +
                                                   to_string(modes_[k].target) +
                                                   ", alpha=" + format_number(modes_[k].alpha));
  for (int n = 0; n < dim_; ++n)
    md.emplace_back("range_y" + std::to_string(n + 1),
                    format_number(ranges_[n].first) + "," + format_number(ranges_[n].second));
  md.emplace_back("log_transform_eps", log_eps_ ? "true" : "false");
  md.emplace_back("log_transform_kappa_sq", log_kappa_ ? "true" : "false");
  md.emplace_back("a_min", format_number(a_min_));
  return md;
}

ChargeShiftModel::ChargeShiftModel(Grid grid, ChargeShiftParams params) : grid_(std::move(grid)), params_(std::move(params)) {
  const auto& p = params_;
  if (p.charges.empty()) throw InvalidArgument("ChargeShiftModel: no charges");
  if (p.directions.empty()) throw InvalidArgument("ChargeShiftModel: need at least one shift direction");
  if (p.amplitudes.size() != p.directions.size())
    throw InvalidArgument("ChargeShiftModel: one amplitude per direction required");
  if (!(p.range > 0.0)) throw InvalidArgument("ChargeShiftModel: range must be positive");
  if (!(p.interior_radius >= 0.0)) throw InvalidArgument("ChargeShiftModel: interior radius must be >= 0");
  if (!(p.eps_interior > 0.0 && p.eps_exterior > 0.0)) throw InvalidArgument("ChargeShiftModel: eps must be positive");
  if (p.kappa_sq_exterior < 0.0) throw InvalidArgument("ChargeShiftModel: kappa^2 must be non-negative");

  const double h = grid_.max_spacing();
  width_ = p.mollifier_width > 0.0 ? p.mollifier_width : 2.0 * h;
  iface_ = p.interface_width == 0.0 ? 2.0 * h : std::max(0.0, p.interface_width);

  // The shift is linear in y, so the corners of [-1, 1]^N are the extremes.
  const int n = dim();
  std::vector<double> y(n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    for (int k = 0; k < n; ++k) y[k] = (mask >> k) & 1 ? 1.0 : -1.0;
    check_inside(shift(y));
  }
}

Point ChargeShiftModel::shift(std::span<const double> y) const {
  Point s{};
  for (std::size_t k = 0; k < params_.directions.size(); ++k) {
    const double amp = params_.amplitudes[k] * params_.range * y[k];
    for (int a = 0; a < 3; ++a) s[a] += amp * params_.directions[k][a];
  }
  return s;
}

void ChargeShiftModel::check_inside(const Point& s) const {
  const double reach = std::max(support_radius(), params_.interior_radius + 3.0 * iface_);
  for (const auto& c : params_.charges) {
    for (int a = 0; a < grid_.dim(); ++a) {
      const double x = c.center[a] + s[a];
      if (x - reach <= grid_.lower(a) || x + reach >= grid_.upper(a))
        throw InvalidArgument("ChargeShiftModel: shifted charge support leaves the domain along axis " +
                              std::to_string(a) + " (center " + format_number(x) + ", reach " +
                              format_number(reach) + ")");
    }
  }
}

ScalarField realize_charge_shift(const ChargeShiftModel& model, std::span<const double> y) {
  check_y(y, model.dim(), "realize_charge_shift");
  const Point s = model.shift(y);
  const Grid& g = model.grid();
  const double w2 = model.mollifier_width() * model.mollifier_width();
  ScalarField f(g);
  std::vector<double> bump(g.node_count());
  for (const auto& c : model.params().charges) {
    double mass = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const Point x = g.coords(i);
      double r2 = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        const double d = x[a] - c.center[a] - s[a];
        r2 += d * d;
      }
      bump[i] = std::exp(-0.5 * r2 / w2);
      mass += trapezoid_weight(g, i) * bump[i];
    }
    // Normalized on the grid itself, so the deposited charge is exact.
    const double scale = model.params().charge_scale * c.q / mass;
    for (std::size_t i = 0; i < g.node_count(); ++i) f[i] += scale * bump[i];
  }
  return f;
}

Realization ChargeShiftModel::realize(std::span<const double> y) const {
  check_y(y, dim(), "ChargeShiftModel::realize");
  const Point s = shift(y);
  check_inside(s);
  const auto& p = params_;
  Realization r{ScalarField(grid_), ScalarField(grid_), realize_charge_shift(*this, y),
                ScalarField(grid_, p.boundary_value)};
  for (std::size_t i = 0; i < grid_.node_count(); ++i) {
    const Point x = grid_.coords(i);
    double outside = 1.0;
    for (const auto& c : p.charges) {
      double r2 = 0.0;
      for (int a = 0; a < grid_.dim(); ++a) {
        const double d = x[a] - c.center[a] - s[a];
        r2 += d * d;
      }
      const double dist = std::sqrt(r2);
      const double in = iface_ > 0.0 ? 0.5 * (1.0 + std::tanh((p.interior_radius - dist) / iface_))
                                     : (dist < p.interior_radius ? 1.0 : 0.0);
      outside *= 1.0 - in;
    }
    const double chi = 1.0 - outside;
    r.eps[i] = p.eps_exterior + (p.eps_interior - p.eps_exterior) * chi;
    r.kappa_sq[i] = p.kappa_sq_exterior * outside;
  }
  return r;
}

Metadata ChargeShiftModel::describe() const {
  const auto& p = params_;
  Metadata md{{"model", "charge_shift"}, {"variables", std::to_string(dim())}};
  for (std::size_t k = 0; k < p.charges.size(); ++k) {
    const auto& c = p.charges[k];
    md.emplace_back("charge" + std::to_string(k), format_number(c.center[0]) + "," + format_number(c.center[1]) +
                                                     "," + format_number(c.center[2]) + " q=" + format_number(c.q));
  }
  for (std::size_t k = 0; k < p.directions.size(); ++k) {
    const auto& e = p.directions[k];
    md.emplace_back("direction" + std::to_string(k), format_number(e[0]) + "," + format_number(e[1]) + "," +
                                                        format_number(e[2]) + " alpha=" + format_number(p.amplitudes[k]));
  }
  md.emplace_back("range", "[-" + format_number(p.range) + "," + format_number(p.range) + "]");
  md.emplace_back("charge_scale", format_number(p.charge_scale));
  md.emplace_back("mollifier", "gaussian, width " + format_number(width_) + ", normalized on the grid");
  md.emplace_back("interior_radius", format_number(p.interior_radius));
  md.emplace_back("interface_width", iface_ > 0.0 ? format_number(iface_) : std::string("sharp"));
  md.emplace_back("eps_interior", format_number(p.eps_interior));
  md.emplace_back("eps_exterior", format_number(p.eps_exterior));
  md.emplace_back("kappa_sq_exterior", format_number(p.kappa_sq_exterior));
  md.emplace_back("boundary_value", format_number(p.boundary_value));
  return md;
}

Realization realize_coefficients(const CoefficientModel& model, std::span<const double> y) { return model.realize(y); }

double qoi_spatial_mean(const ScalarField& u) { return integrate_field(u); }

namespace {

// Solves the nPBE at each listed node with a fixed-size pool. Results land in
// per-node slots, so completion order never affects the output.
std::vector<double> solve_nodes(const UqStudyConfig& cfg, const CoefficientModel& model, const SparseGrid& grid,
                                const std::vector<std::size_t>& nodes) {
  std::vector<double> out(nodes.size());
  std::vector<std::exception_ptr> errors(nodes.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < nodes.size(); k = next++) {
      try {
        const auto y = grid.node(nodes[k]);
        auto r = model.realize(y);
        NpbeProblem problem(std::move(r.eps), std::move(r.kappa_sq), std::move(r.f), std::move(r.g),
                            cfg.nonlinearity, cfg.series_order, cfg.averaging);
        const auto res = picard_solve(problem, cfg.picard);
        if (!res.converged)
          throw ConvergenceError("Picard iteration did not converge in " + std::to_string(res.iterations) +
                                     " iterations",
                                 res.history.empty() ? 0.0 : res.history.back());
        out[k] = qoi_spatial_mean(res.u);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  unsigned jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, nodes.size())));
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!errors[k]) continue;
    const std::string where = "node (" + join(grid.node(nodes[k])) + ")";
    try {
      std::rethrow_exception(errors[k]);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " at " + where);
    } catch (const std::exception& e) {
      throw Error(std::string("solve failed at ") + where + ": " + e.what());
    }
  }
  return out;
}

double fitted_rate(const std::vector<UqLevelRow>& rows) {
  std::vector<double> xs, ys;
  for (const auto& r : rows)
    if (r.abs_error > 0.0 && r.eta > 0) {
      xs.push_back(std::log(static_cast<double>(r.eta)));
      ys.push_back(std::log(r.abs_error));
    }
  if (xs.size() < 2) return std::nan("");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? -sxy / sxx : std::nan("");
}

bool wellposed_at_mean(const CoefficientModel& model) {
  const std::vector<double> zero(model.dim(), 0.0);
  const auto r = model.realize(zero);
  const auto geo = geometry_of(model.grid());
  const auto b = coefficient_bounds_of(r.eps, r.kappa_sq);
  const double c_h = c_h_fourier(b, geo);
  const double c_s = c_s_bounds(4.0, geo).upper;
  const auto lift = harmonic_lift(model.grid(), r.g);
  const double y0 = compute_y0(c_h, c_d_upper(b, geo.dim), discrete_norm(r.f, NormKind::L2),
                               discrete_norm(lift, NormKind::H2));
  return schauder_interval({c_h, c_s, y0, b.kappa_inf_sq, geo.volume}).has_value();
}

}  // namespace

UqStudyReport run_uq_study(const UqStudyConfig& cfg, const CoefficientModel& model) {
  if (cfg.levels.empty()) throw InvalidArgument("run_uq_study: no study levels");
  for (int w : cfg.levels) {
    if (w < 0) throw InvalidArgument("run_uq_study: levels must be non-negative");
    if (w >= cfg.reference_level)
      throw InvalidArgument("run_uq_study: reference level must exceed every study level");
  }
  if (cfg.sigma_hat.has_value() != cfg.m_tilde.has_value())
    throw InvalidArgument("run_uq_study: sigma_hat and M_tilde must be given together");

  UqStudyReport rep;
  rep.dim = model.dim();
  rep.reference_level = cfg.reference_level;
  try {
    rep.wellposed_at_mean = wellposed_at_mean(model);
  } catch (const Error& e) {
    rep.warnings.push_back(std::string("well-posedness check at y = 0 failed: ") + e.what());
  }
  if (!rep.wellposed_at_mean && rep.warnings.empty())
    rep.warnings.push_back("existence condition does not hold at y = 0 (y0 > y0*); the study proceeds");

  std::vector<int> levels = cfg.levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Every study grid is nested in the reference grid; values are cached by
  // reference-grid position and each node is solved exactly once.
  const auto ref = build_sparse_grid(model.dim(), cfg.reference_level);
  std::vector<double> value(ref.size());
  std::vector<char> known(ref.size(), 0);

  auto evaluate = [&](const SparseGrid& g) {
    std::vector<std::size_t> fresh;
    std::vector<std::size_t> pos(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      pos[k] = ref.find(g.key(k));
      if (!known[pos[k]]) {
        fresh.push_back(pos[k]);
        known[pos[k]] = 1;
      }
    }
    const auto v = solve_nodes(cfg, model, ref, fresh);
    for (std::size_t k = 0; k < fresh.size(); ++k) value[fresh[k]] = v[k];
    std::vector<double> vals(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) vals[k] = value[pos[k]];
    rep.total_solves += fresh.size();
    return std::pair{integrate(g, vals), fresh.size()};
  };

  std::optional<BoundParams> bp;
  if (cfg.sigma_hat) bp = bound_constants(model.dim(), *cfg.sigma_hat, *cfg.m_tilde);

  for (int w : levels) {
    const auto g = build_sparse_grid(model.dim(), w);
    const auto [e, fresh] = evaluate(g);
    UqLevelRow row{w, g.size(), e, 0.0, fresh, std::nullopt};
    if (bp) row.predicted_bound = predict_error(*bp, w, static_cast<double>(g.size())).bound;
    rep.rows.push_back(row);
  }
  rep.reference_eta = ref.size();
  rep.reference_expectation = evaluate(ref).first;
  for (auto& r : rep.rows) r.abs_error = std::abs(r.expectation - rep.reference_expectation);
  rep.fitted_rate = fitted_rate(rep.rows);
  return rep;
}

void write_study_csv(std::ostream& os, const UqStudyReport& rep, const Metadata& metadata, bool with_timestamp) {
  Metadata md = metadata;
  md.emplace_back("variables", std::to_string(rep.dim));
  md.emplace_back("reference_level", std::to_string(rep.reference_level));
  md.emplace_back("reference_eta", std::to_string(rep.reference_eta));
  md.emplace_back("reference_expectation", format_number(rep.reference_expectation));
  md.emplace_back("total_solves", std::to_string(rep.total_solves));
  md.emplace_back("wellposed_at_mean", rep.wellposed_at_mean ? "true" : "false");
  for (const auto& w : rep.warnings) md.emplace_back("warning", w);
  write_metadata(os, md, with_timestamp);
  os << "w,eta,E_w,abs_err,fitted_rate,predicted_bound\n";
  for (const auto& r : rep.rows) {
    os << r.level << ',' << r.eta << ',' << format_number(r.expectation) << ',' << format_number(r.abs_error) << ','
       << format_number(rep.fitted_rate) << ',';
    if (r.predicted_bound) os << format_number(*r.predicted_bound);
    os << '\n';
  }
}

}  // namespace npbe
