#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "npbe/config.hpp"
#include "npbe/picard.hpp"
#include "npbe/stochastic.hpp"

namespace npbe::cli {

/// [grid] dim, lower, upper, nodes (scalars or per-axis lists).
Grid grid_from_config(const Config& cfg);

/// [problem] eps, kappa_sq, source, boundary, nonlinearity, averaging.
NpbeProblem problem_from_config(const Config& cfg, const Grid& grid);

/// [solver] tol, max_iter, damping, linear_tol.
PicardOptions picard_from_config(const Config& cfg);

/// [model] type = charge_shift | noise.
std::unique_ptr<CoefficientModel> model_from_config(const Config& cfg, const Grid& grid);

/// [study] levels, reference, jobs, sigma_hat, m_tilde, plus [solver] and
/// [problem] nonlinearity/averaging.
UqStudyConfig study_from_config(const Config& cfg);

enum ExitCode : int { kSuccess = 0, kDomainError = 1, kUsageError = 2 };

/// Runs one command line (without the program name). Normal output goes to
/// `out`, diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// argv entry point.
int dispatch(int argc, const char* const* argv);

}  // namespace npbe::cli
