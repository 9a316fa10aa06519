#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "srbeam/convexify.hpp"
#include "srbeam/model.hpp"

namespace srbeam::sca {

struct AlgorithmConfig {
  double tolerance = 1e-6;           ///< displacement and rank threshold
  int counter_max = 30;
  double penalty_init_scale = 1e-3;  ///< times the initial true energy
  double penalty_growth = 10.0;
  double beta = 2.0;
  int approx_coeff = 4;              ///< exponential-chain depth (CQR)
  uint64_t seed = 0;                 ///< initialization retries and extraction
  double solver_tol = 1e-9;
  int solver_max_iter = 100;
  int reseed_attempts = 10;
};

struct IterationRecord {
  double surrogate_objective = 0;
  double true_energy = 0;
  double displacement = 0;
  double rank_residual_max = 0;
  double penalty = 0;
};

struct ConvergenceTrace {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  int approx_coeff = 0;
};

struct RunResult {
  SolutionReport report;
  ConvergenceTrace trace;
};

struct RunOptions {
  std::optional<Eigen::VectorXd> pin_tau;  ///< freeze slot durations
};

/// Outer successive-convexification loop over the quadratic-surrogate track.
RunResult run_sq(const NetworkInstance& instance, const ScheduleFrame& schedule,
                 const AlgorithmConfig& config = {}, const RunOptions& = {});

/// Outer loop over the conic-quadratic track (exponential chain of depth M).
RunResult run_cqr(const NetworkInstance& instance,
                  const ScheduleFrame& schedule,
                  const AlgorithmConfig& config = {}, const RunOptions& = {});

/// (Tr X - lambda_max) / Tr X; zero for a zero matrix.
double rank_residual(const MatC& X);

/// Minimal nonnegative multiplier that makes a candidate beam feasible for
/// the true constraints, or +inf when none exists.
using FeasibilityRescale = std::function<double(const VecC& candidate)>;

/// Rank-one beam from a covariance: the dominant eigenpair when the rank
/// residual is below rank_tol, otherwise Gaussian randomization rescaled
/// through the oracle; least-energy feasible candidate wins.
VecC extract_beamformer(const MatC& X, const FeasibilityRescale& oracle,
                        std::mt19937_64& rng, double rank_tol = 1e-6,
                        int draws = 100);

struct ComplexityEstimate {
  double kappa = 0;  ///< per-constraint dimension
  double size = 0;   ///< total problem data size
  double flops = 0;  ///< arithmetic operations to an eps-solution
};

ComplexityEstimate complexity_sq(int devices, int antennas, double eps);
ComplexityEstimate complexity_cqr(int devices, int antennas, int approx_coeff,
                                  double eps);

}  // namespace srbeam::sca
