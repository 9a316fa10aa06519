#include <cmath>
#include <stdexcept>

#include "srbeam/sca.hpp"

// Closed-form interior-point operation counts for the two tracks. The
// per-constraint dimension kappa, the variable and constraint counts B and
// V, and the data-size expressions are specific to each formulation; the
// leading constant is fixed to one.

namespace srbeam::sca {

namespace {

void check(int devices, int antennas, double eps) {
  if (devices < 1 || antennas < 1)
    throw std::invalid_argument("complexity: counts must be >= 1");
  if (!(eps > 0)) throw std::invalid_argument("complexity: eps must be > 0");
}

}  // namespace

ComplexityEstimate complexity_sq(int devices, int antennas, double eps) {
  check(devices, antennas, eps);
  const double I = devices, N = antennas;
  const double B = 5, V = 8;
  ComplexityEstimate e;
  e.kappa = I * (2 * N * N + I + 1.5);
  const double k = e.kappa;
  e.size = (B + 1) * V * (k * (k + 1) / 2) + V + B + 3;
  e.flops = std::sqrt(1 + V * k) *
            (B * B * B + B * B * V * k * k + B * V * k * k * k) *
            std::log(e.size / eps);
  return e;
}

ComplexityEstimate complexity_cqr(int devices, int antennas, int approx_coeff,
                                  double eps) {
  check(devices, antennas, eps);
  if (approx_coeff < 1)
    throw std::invalid_argument("complexity: approx_coeff must be >= 1");
  const double I = devices, N = antennas, M = approx_coeff;
  const double B = 7, V = 13;
  ComplexityEstimate e;
  e.kappa = I * (3 * N * N + 0.5 * I * I + M + 7);
  const double k = e.kappa;
  e.size = (V + V * k) * (B + 1) + V + B + 3;
  e.flops = std::sqrt(V + 1) * B * (B * B + V + (V + 1) * k * k) *
            std::log(e.size / eps);
  return e;
}

}  // namespace srbeam::sca
