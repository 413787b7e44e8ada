#include "npbe/error_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "npbe/error.hpp"

namespace npbe {

namespace {

constexpr double kLog2 = std::numbers::ln2;
constexpr double kE = std::numbers::e;

double c2_tilde(double sigma) { return 1.0 + std::sqrt(std::numbers::pi / (2.0 * sigma)) / kLog2; }

}  // namespace

double bound_a(double delta, double sigma) {
  const double brace = 1.0 / (sigma * kLog2 * kLog2) + 1.0 / (kLog2 * std::sqrt(2.0 * sigma)) +
                       2.0 * c2_tilde(sigma);
  return std::exp(delta * sigma * brace);
}

BoundParams bound_constants(int dim, double sigma_hat, double m_tilde, std::optional<double> c_sigma) {
  if (dim < 1) throw InvalidArgument("bound_constants: N must be >= 1");
  if (!(sigma_hat > 0.0)) throw InvalidArgument("bound_constants: sigma_hat must be positive");
  if (!(m_tilde > 0.0)) throw InvalidArgument("bound_constants: M_tilde must be positive");
  if (c_sigma && !(*c_sigma > 0.0)) throw InvalidArgument("bound_constants: C(sigma) must be positive");

  BoundParams p{};
  p.dim = dim;
  p.sigma_hat = sigma_hat;
  p.sigma = 0.5 * sigma_hat;
  p.m_tilde = m_tilde;
  p.c2_tilde = c2_tilde(p.sigma);
  p.c_sigma = c_sigma.value_or(p.c2_tilde);
  p.delta_star = (kE * kLog2 - 1.0) / p.c2_tilde;
  p.a = bound_a(p.delta_star, p.sigma);
  p.c1 = 4.0 * m_tilde * p.c_sigma * p.a / (kE * p.delta_star * p.sigma);

  const double log2n = std::log(2.0 * dim);
  p.mu1 = p.sigma / (1.0 + log2n);
  p.mu2 = kLog2 / (dim * (1.0 + log2n));
  p.mu3 = p.sigma * p.delta_star * p.c2_tilde / (1.0 + 2.0 * log2n);

  const double tail = std::pow(std::max(1.0, p.c1), dim) / std::abs(1.0 - p.c1);
  p.q = p.c1 / std::exp(p.sigma * p.delta_star * p.c2_tilde) * tail;
  return p;
}

const char* to_string(BoundRegime regime) {
  return regime == BoundRegime::Subexponential ? "subexponential" : "algebraic";
}

bool is_subexponential(int dim, int level) { return level > dim / kLog2; }

ErrorPrediction predict_error(const BoundParams& p, int level, double eta) {
  if (level < 0) throw InvalidArgument("predict_error: level must be non-negative");
  if (!(eta >= 1.0)) throw InvalidArgument("predict_error: eta must be >= 1");
  if (p.c1 == 1.0) throw InvalidArgument("predict_error: C_1 == 1 makes the bound degenerate");

  if (is_subexponential(p.dim, level)) {
    const double rate = p.dim * p.sigma / std::pow(2.0, 1.0 / p.dim);
    return {BoundRegime::Subexponential, p.q * std::pow(eta, p.mu3) * std::exp(-rate * std::pow(eta, p.mu2))};
  }
  const double lead = p.c1 * std::pow(std::max(1.0, p.c1), p.dim) / std::abs(1.0 - p.c1);
  return {BoundRegime::Algebraic, lead * std::pow(eta, -p.mu1)};
}

void write_bound_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
  const auto old = os.precision(17);
  os << "w,eta,regime,bound\n";
  for (const auto& r : rows)
    os << r.level << ',' << r.eta << ',' << to_string(r.prediction.regime) << ',' << r.prediction.bound << '\n';
  os.precision(old);
}

}  // namespace npbe
