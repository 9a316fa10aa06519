#pragma once

#include <Eigen/Dense>

#include "srbeam/conic/program.hpp"

namespace srbeam::conic {

enum class SolveStatus { optimal, infeasible, unbounded, max_iter };

const char* to_string(SolveStatus s);

struct SolveOptions {
  double tol = 1e-8;          ///< relative feasibility/gap target
  int max_iter = 100;
  double step_fraction = 0.99;
  bool equilibrate = true;
  bool self_check = false;    ///< verify Newton directions while iterating
};

struct ConicSolution {
  SolveStatus status = SolveStatus::max_iter;
  Eigen::VectorXd x;          ///< primal point in the original variables
  double objective = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double gap = 0;             ///< relative duality gap at exit
  int iterations = 0;
};

/// Primal-dual interior-point solve of the program over the self-dual
/// embedding. status == optimal guarantees cone feasibility and a certified
/// gap within the requested tolerance; numerical failure surfaces as
/// max_iter, never as a silently wrong answer.
ConicSolution solve(const Program& p, const SolveOptions& opts = {});

}  // namespace srbeam::conic
