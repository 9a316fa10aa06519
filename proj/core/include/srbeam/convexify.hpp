#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "srbeam/conic/program.hpp"
#include "srbeam/model.hpp"

namespace srbeam::convexify {

using conic::Cone;
using conic::LinExpr;
using conic::Program;

/// Covariance sharing: one transmit covariance per device MTI run
/// (consecutive slots of one device share a beam) and one per pure
/// harvesting slot.
struct SlotGrouping {
  std::vector<int> group_of_slot;
  std::vector<std::vector<int>> slots_of_group;
  std::vector<int> owner_of_group;  ///< device index or -1

  static SlotGrouping from(const ScheduleFrame& schedule);
  int count() const { return static_cast<int>(slots_of_group.size()); }
};

/// Current expansion point of the successive convexification.
struct ExpansionPoint {
  std::vector<MatC> X;        ///< per group, Hermitian PSD
  Eigen::VectorXd tau;        ///< per slot, strictly positive
  Eigen::VectorXd gamma;      ///< per group, >= Tr(X)
  Eigen::MatrixXd phi;        ///< I x J, meaningful on harvesting pairs
  Eigen::VectorXd theta;      ///< per device; used by the SQ track only

  void validate(int device_count, int slot_count, int group_count) const;
};

struct SurrogateConfig {
  double penalty = 1e-3;       ///< rank-one penalty weight
  double penalty_growth = 10;  ///< escalation factor
  double beta = 2;             ///< trust bound of the rate quadratic domain
  int approx_coeff = 4;        ///< M of the exponential chain
  double prox_weight = 0;      ///< proximal damping of the iteration, >= 0
};

/// Variable indices of an assembled program.
struct VarLayout {
  int hdim = 0;                 ///< hvec length per covariance (N^2)
  std::vector<int> x_first;     ///< per group
  int tau_first = -1;           ///< J consecutive variables
  int gamma_first = -1;         ///< one per group
  int epi_first = -1;           ///< objective epigraph, one per slot
  Eigen::MatrixXi phi_var;      ///< I x J, -1 where absent
  std::vector<int> theta;       ///< SQ, -1 for silent devices
  std::vector<int> z, xi;       ///< CQR, -1 for silent devices
  int prox_var = -1;            ///< epigraph of the proximal term, if any
  Eigen::VectorXd epi_scale;    ///< per-slot balancing of the DC epigraph
};

struct Assembled {
  Program program;
  VarLayout layout;
  SlotGrouping groups;
  double kc_nats_scale = 0;  ///< K * ln2, for diagnostics
};

/// Surrogate of tau*gamma expanded at (tau_hat, gamma_hat): the convex square
/// kept, the concave square linearized. Majorizes the product everywhere and
/// is tight at the point.
double dc_surrogate(double tau_hat, double gamma_hat, double tau, double gamma);

/// [[9b, -b], [-b, 9b]] / (8 tau_hat); dominates the rate-gap Hessian on the
/// shrunken domain tau >= tau_hat / beta.
Eigen::Matrix2d hessian_upper_bound(double tau_hat, double beta);

/// Rate gap in nats: kc - tau*ln(1 + theta/tau) (the constraint is <= 0).
double rate_gap(double kc_nats, double theta, double tau);
Eigen::Vector2d rate_gap_gradient(double theta_hat, double tau_hat);

/// Quadratic upper surrogate of the rate gap used by the SQ track.
double sq_rate_surrogate(double kc_nats, double theta_hat, double tau_hat,
                         double beta, double theta, double tau);

/// K |g|^2 / sigma^2 * Tr(X H) * sum phi^2 (and the /tau variant).
double snr_product(double kg2_over_sigma, const MatC& X, const MatC& H,
                   double sum_phi2);

/// Optional variable pins: frozen slot durations (the TDMA baseline) and
/// frozen covariances (the feasibility-restoration re-solve).
struct AssemblePins {
  std::optional<Eigen::VectorXd> tau;
  std::optional<std::vector<MatC>> X;
};

Assembled assemble_sq(const NetworkInstance& instance,
                      const ScheduleFrame& schedule,
                      const ExpansionPoint& point, const SurrogateConfig& cfg,
                      const AssemblePins& pins = {});

Assembled assemble_cqr(const NetworkInstance& instance,
                       const ScheduleFrame& schedule,
                       const ExpansionPoint& point, const SurrogateConfig& cfg,
                       const AssemblePins& pins = {});

/// Full variable assignment representing the expansion point inside an
/// assembled program (auxiliaries set to their tight values). Used by the
/// tangency tests and the iteration audits.
Eigen::VectorXd pack_point(const Assembled& a, const NetworkInstance& instance,
                           const ScheduleFrame& schedule,
                           const ExpansionPoint& point);

}  // namespace srbeam::convexify
