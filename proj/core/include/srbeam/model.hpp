#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "srbeam/schedule.hpp"

namespace srbeam {

using Cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

/// Channels of one network realization: a complex downlink vector per
/// backscatter device and a complex scalar from each device to the receiver.
struct ChannelSet {
  std::vector<VecC> bs_to_device;        ///< h_i, one length-N vector per device
  std::vector<Cplx> device_to_receiver;  ///< g_i, one scalar per device

  /// Gram matrix h_i h_i^H (Hermitian PSD, rank one).
  MatC gram(int device) const;
};

/// Immutable problem data for one instance. All powers in watts, durations in
/// seconds, rates in bits/s/Hz.
struct NetworkInstance {
  int antenna_count = 1;    ///< N
  int device_count = 1;     ///< I
  int slot_count = 1;       ///< J (defaults to I in factory helpers)
  int spreading_factor = 1; ///< K, carrier symbols per device symbol
  double frame_length = 1;  ///< T
  std::vector<double> rate_targets;           ///< C_i
  std::vector<double> conversion_efficiency;  ///< eta_i in [0,1]
  std::vector<double> device_noise;           ///< sigma_i^2 (unused by the
                                              ///  receiver model, kept as data)
  double receiver_noise = 1;                  ///< sigma_UE^2
  double bs_power_budget = 1;                 ///< p_BS, informational
  ChannelSet channels;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

/// Final solution of one optimization run plus the audit quantities needed to
/// re-check it against the original constraints.
struct SolutionReport {
  double total_energy = 0;            ///< E_T, joules
  std::vector<VecC> beamformers;      ///< x_j per slot, entries in sqrt(W)
  Eigen::VectorXd durations;          ///< tau_j per slot
  Eigen::VectorXd rates;              ///< R_i per device
  Eigen::MatrixXd harvested;          ///< eps_ij (I x J); zero on MTI slots
  Eigen::VectorXd reflected_energy;   ///< p_i * tau, via sum of eps_ij
  Eigen::VectorXd rank_residuals;     ///< per slot, (Tr - lmax)/Tr of X_j
  std::vector<double> objective_trace;///< surrogate objective per iteration
  bool converged = false;
  int iterations = 0;
  double extraction_inflation = 0;    ///< relative energy added by extraction
};

// --- closed-form physics -----------------------------------------------

/// eta * tau * Tr(X H), in joules. Both matrices Hermitian PSD of equal
/// dimension; the tiny imaginary residue of the trace is discarded after a
/// 1e-12 relative check.
double harvested_energy(double eta, double tau, const MatC& X, const MatC& H);

/// K |g|^2 Tr(X_mti H) * harvested_sum / (tau_mti * sigma_ue2).
double snr_at_receiver(int K, Cplx g, const MatC& X_mti, const MatC& H,
                       double harvested_sum, double tau_mti, double sigma_ue2);

/// (tau_mti / K) * log2(1 + snr); zero when tau_mti is zero.
double achievable_rate(double tau_mti, int K, double snr);

/// sum_j tau_j Tr(X_j).
double total_energy(const Eigen::VectorXd& tau, const std::vector<MatC>& X);

// --- solution audit -----------------------------------------------------

struct ConstraintViolation {
  enum class Kind { rate, slot_nonneg, frame_budget, harvest_cap };
  Kind kind;
  int device = -1;  ///< -1 when not device-specific
  int slot = -1;    ///< -1 when not slot-specific
  double amount = 0;
  std::string describe() const;
};

struct AuditTolerances {
  double rate = 1e-6;       ///< absolute, bits/s/Hz
  double duration = 1e-9;   ///< absolute, seconds
  double harvest = 1e-8;    ///< relative on the harvest cap
};

/// Re-checks the reported solution against the true (non-surrogate) rate,
/// duration and harvest constraints. An empty result means feasible;
/// infeasibility is data, not an error.
std::vector<ConstraintViolation> validate_solution(
    const NetworkInstance& instance, const ScheduleFrame& schedule,
    const SolutionReport& report, const AuditTolerances& tol = {});

}  // namespace srbeam
