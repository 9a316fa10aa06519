#pragma once

#include <string>
#include <vector>

#include "srbeam/conic/program.hpp"

namespace srbeam::conic {

/// Handles to the rows and auxiliaries created for one exponential chain.
struct ExpChain {
  std::vector<int> zeta_vars;   ///< M + 4 auxiliaries
  std::vector<int> soc_blocks;  ///< the M + 3 squaring cones
  std::vector<int> lin_blocks;  ///< affine combiner and the 1 + xi cap
};

/// Emits the second-order-cone chain that tightens "1 + xi >= exp(z)" with
/// approximation coefficient M: two seed quadratics in z, the squaring
/// cones, the affine combiner with constants 1/24 and 19/72, and the cap
/// against xi. Each "1 + a >= ||[1 - a, w]||" relation is one SOC row.
ExpChain append_exp_soc_chain(Program& p, const LinExpr& z, const LinExpr& xi,
                              int M, const std::string& tag = "expchain");

/// Value of the chain when every inequality is tight; the least xi + 1 the
/// chain admits for a given z. Used as the scalar reference for accuracy
/// checks against exp(z).
double exp_chain_tight(double z, int M);

}  // namespace srbeam::conic
