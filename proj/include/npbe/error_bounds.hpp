#pragma once

#include <optional>
#include <ostream>
#include <vector>

namespace npbe {

/// Constants of the isotropic Clenshaw-Curtis sparse-grid error estimate.
struct BoundParams {
  int dim;            ///< N
  double sigma_hat;   ///< polyellipse size
  double sigma;       ///< sigma_hat / 2
  double m_tilde;     ///< sup |nu| over the polyellipse
  double c_sigma;     ///< C(sigma) inside C_1
  double c2_tilde;
  double delta_star;
  double a;           ///< a(delta*, sigma)
  double c1;          ///< C_1(sigma, delta*, M~)
  double mu1;
  double mu2;
  double mu3;
  double q;           ///< Q(sigma, delta*, N, M~)
};

/// Evaluates every constant; `c_sigma` overrides the default C(sigma) = C~_2(sigma).
BoundParams bound_constants(int dim, double sigma_hat, double m_tilde,
                            std::optional<double> c_sigma = std::nullopt);

/// a(delta, sigma) for an arbitrary delta.
double bound_a(double delta, double sigma);

enum class BoundRegime { Subexponential, Algebraic };

const char* to_string(BoundRegime regime);

struct ErrorPrediction {
  BoundRegime regime;
  double bound;
};

/// True when w > N / log 2, where the sub-exponential estimate applies.
bool is_subexponential(int dim, int level);

/// L-infinity error bound for a level-w grid with eta nodes.
ErrorPrediction predict_error(const BoundParams& params, int level, double eta);

struct BoundRow {
  int level;
  double eta;
  ErrorPrediction prediction;
};

/// Header `w,eta,regime,bound`, then one row per entry.
void write_bound_csv(std::ostream& os, const std::vector<BoundRow>& rows);

}  // namespace npbe
