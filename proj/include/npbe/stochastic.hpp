#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "npbe/csv.hpp"
#include "npbe/elliptic.hpp"
#include "npbe/grid.hpp"
#include "npbe/picard.hpp"

namespace npbe {

/// One draw of the PDE data.
struct Realization {
  ScalarField eps;
  ScalarField kappa_sq;
  ScalarField f;
  ScalarField g;
};

/// Maps internal coordinates y in [-1, 1]^N to PDE data on a fixed grid.
class CoefficientModel {
 public:
  virtual ~CoefficientModel() = default;
  virtual int dim() const = 0;
  virtual const Grid& grid() const = 0;
  virtual Realization realize(std::span<const double> y) const = 0;
  /// Settings recorded in output metadata.
  virtual Metadata describe() const = 0;
};

enum class NoiseTarget { Eps, KappaSq, Source, Boundary };

const char* to_string(NoiseTarget target);

/// alpha * phi(x) * Y_variable added to the mean of `target`.
struct NoiseMode {
  int variable = 0;
  NoiseTarget target = NoiseTarget::Eps;
  ScalarField phi;
  double alpha = 1.0;
};

/// Affine finite-dimensional noise, optionally through a log transform for
/// the positive coefficients: eps = a_min + exp(mean + sum ...), and
/// kappa^2 = exp(mean + sum ...).
class NoiseModel : public CoefficientModel {
 public:
  /// `ranges` holds one [lo, hi] pair per variable; empty means [-1, 1] each.
  NoiseModel(Realization mean, std::vector<NoiseMode> modes, int dim,
             std::vector<std::pair<double, double>> ranges = {});

  void set_log_transform(NoiseTarget target, bool on);
  void set_a_min(double a_min);

  int dim() const override { return dim_; }
  const Grid& grid() const override { return mean_.eps.grid(); }
  Realization realize(std::span<const double> y) const override;
  Metadata describe() const override;

 private:
  Realization mean_;
  std::vector<NoiseMode> modes_;
  int dim_;
  std::vector<std::pair<double, double>> ranges_;
  bool log_eps_ = false;
  bool log_kappa_ = false;
  double a_min_ = 1e-3;
};

struct Charge {
  Point center{};
  double q = 1.0;
};

/// Rigid random translation of a set of charges and of the ion-free region
/// around them: x_k(y) = x_k + sum_n alpha_n e_n Y_n.
struct ChargeShiftParams {
  std::vector<Charge> charges;
  std::vector<Point> directions;    ///< e_n, one per variable
  std::vector<double> amplitudes;   ///< alpha_n
  double range = 1.7320508075688772;  ///< Y_n uniform on [-range, range]
  double charge_scale = 1.0;        ///< multiplies every q_k
  double mollifier_width = 0.0;     ///< Gaussian standard deviation; 0 means 2h
  double interior_radius = 1.0;     ///< radius of the ball around each charge
  double interface_width = 0.0;     ///< tanh smoothing of the ball edge; 0 means 2h, < 0 sharp
  double eps_interior = 2.0;
  double eps_exterior = 2.0;
  double kappa_sq_exterior = 0.0;   ///< kappa^2 is zero inside
  double boundary_value = 0.0;
};

class ChargeShiftModel : public CoefficientModel {
 public:
  /// Throws InvalidArgument if some shifted charge support or ball can leave
  /// the box for a y in [-1, 1]^N.
  ChargeShiftModel(Grid grid, ChargeShiftParams params);

  int dim() const override { return static_cast<int>(params_.directions.size()); }
  const Grid& grid() const override { return grid_; }
  Realization realize(std::span<const double> y) const override;
  Metadata describe() const override;

  const ChargeShiftParams& params() const noexcept { return params_; }
  double mollifier_width() const noexcept { return width_; }
  double interface_width() const noexcept { return iface_; }
  /// Support radius of each deposited charge.
  double support_radius() const noexcept { return 4.0 * width_; }
  /// Physical displacement for internal coordinates y.
  Point shift(std::span<const double> y) const;

 private:
  void check_inside(const Point& shift) const;

  Grid grid_;
  ChargeShiftParams params_;
  double width_;
  double iface_;
};

Realization realize_coefficients(const CoefficientModel& model, std::span<const double> y);

/// Charge density only, for a charge-shift model.
ScalarField realize_charge_shift(const ChargeShiftModel& model, std::span<const double> y);

/// Q(u) = integral of u over the box.
double qoi_spatial_mean(const ScalarField& u);

struct UqStudyConfig {
  std::vector<int> levels{1, 2, 3, 4};
  int reference_level = 5;
  Nonlinearity nonlinearity = Nonlinearity::Sinh;
  int series_order = 7;
  PicardOptions picard{};
  FaceAveraging averaging = FaceAveraging::Arithmetic;
  /// Worker threads for the node solves; 0 uses the hardware concurrency.
  unsigned jobs = 1;
  /// When both are set, the predicted error bound is reported per level.
  std::optional<double> sigma_hat;
  std::optional<double> m_tilde;
};

struct UqLevelRow {
  int level;
  std::size_t eta;
  double expectation;
  double abs_error;
  std::size_t new_solves;
  std::optional<double> predicted_bound;
};

struct UqStudyReport {
  int dim = 0;
  std::vector<UqLevelRow> rows;
  int reference_level = 0;
  std::size_t reference_eta = 0;
  double reference_expectation = 0.0;
  std::size_t total_solves = 0;
  /// Minus the slope of log(abs_err) against log(eta); NaN if fewer than two
  /// nonzero errors.
  double fitted_rate = 0.0;
  /// Existence condition at y = 0 (advisory).
  bool wellposed_at_mean = false;
  std::vector<std::string> warnings;
};

/// Collocation study: solves the nPBE at every node of the reference grid
/// (each node once; coarser grids are nested) and reports E_w[Q] per level.
UqStudyReport run_uq_study(const UqStudyConfig& config, const CoefficientModel& model);

/// Columns w,eta,E_w,abs_err,fitted_rate,predicted_bound after `#` metadata.
void write_study_csv(std::ostream& os, const UqStudyReport& report, const Metadata& metadata,
                     bool with_timestamp = true);

}  // namespace npbe
