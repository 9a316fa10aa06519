#pragma once

// Shared builders for the test suites: small random instances and feasible
// expansion points constructed from first principles (kept independent of
// the library's own initialization so the tests can cross-check it).

#include <random>

#include "srbeam/convexify.hpp"
#include "srbeam/model.hpp"

namespace srbeam::testsupport {

inline VecC random_cvec(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> N(0, scale / std::sqrt(2.0));
  VecC v(n);
  for (int i = 0; i < n; ++i) v[i] = Cplx(N(rng), N(rng));
  return v;
}

/// Unit-scale instance: channels O(1), noise 1e-3, K = 10. Keeps solver
/// numerics mild so tests probe logic, not conditioning.
inline NetworkInstance make_instance(int N, int I, int J, uint64_t seed,
                                     double rate_target = 0.5) {
  NetworkInstance inst;
  inst.antenna_count = N;
  inst.device_count = I;
  inst.slot_count = J;
  inst.spreading_factor = 10;
  inst.frame_length = 10;
  inst.rate_targets.assign(I, rate_target);
  inst.conversion_efficiency.assign(I, 0.8);
  inst.device_noise.assign(I, 1e-3);
  inst.receiver_noise = 1e-3;
  inst.bs_power_budget = 1.0;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < I; ++i) {
    inst.channels.bs_to_device.push_back(random_cvec(N, rng));
    const VecC g = random_cvec(1, rng);
    inst.channels.device_to_receiver.push_back(g[0]);
  }
  return inst;
}

/// The scalar oracle instance: N = 1, I = 1, J = 2, h = g = 1, eta = 0.8,
/// sigma^2 = 1e-3, K = 10, C = 0.5, T = 10.
inline NetworkInstance scalar_instance() {
  NetworkInstance inst;
  inst.antenna_count = 1;
  inst.device_count = 1;
  inst.slot_count = 2;
  inst.spreading_factor = 10;
  inst.frame_length = 10;
  inst.rate_targets = {0.5};
  inst.conversion_efficiency = {0.8};
  inst.device_noise = {1e-3};
  inst.receiver_noise = 1e-3;
  inst.bs_power_budget = 1.0;
  inst.channels.bs_to_device = {VecC::Ones(1)};
  inst.channels.device_to_receiver = {Cplx(1, 0)};
  return inst;
}

/// Isotropic-covariance expansion point with equal slots, harvest at the cap
/// and theta at its product bound (tangent everywhere by construction).
inline convexify::ExpansionPoint make_point(const NetworkInstance& inst,
                                            const ScheduleFrame& sched,
                                            double power_scale = 1.0) {
  using convexify::SlotGrouping;
  const SlotGrouping groups = SlotGrouping::from(sched);
  convexify::ExpansionPoint pt;
  const int N = inst.antenna_count;
  const int I = inst.device_count;
  const int J = inst.slot_count;
  for (int g = 0; g < groups.count(); ++g)
    pt.X.push_back(power_scale * inst.bs_power_budget / N *
                   MatC::Identity(N, N));
  pt.tau = Eigen::VectorXd::Constant(J, inst.frame_length / J);
  pt.gamma.resize(groups.count());
  for (int g = 0; g < groups.count(); ++g)
    pt.gamma[g] = pt.X[g].trace().real();
  pt.phi = Eigen::MatrixXd::Zero(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      if (sched.role(i, j) == SlotRole::ehs)
        pt.phi(i, j) = std::sqrt(
            harvested_energy(inst.conversion_efficiency[i], pt.tau[j],
                             pt.X[groups.group_of_slot[j]],
                             inst.channels.gram(i)));
  pt.theta.resize(I);
  for (int i = 0; i < I; ++i) {
    if (sched.mti_slots(i).empty()) {
      pt.theta[i] = 0;
      continue;
    }
    const int g = groups.group_of_slot[sched.mti_slots(i).front()];
    double p2 = 0;
    for (int j = 0; j < J; ++j)
      if (sched.role(i, j) == SlotRole::ehs) p2 += pt.phi(i, j) * pt.phi(i, j);
    pt.theta[i] = convexify::snr_product(
        inst.spreading_factor *
            std::norm(inst.channels.device_to_receiver[i]) /
            inst.receiver_noise,
        pt.X[g], inst.channels.gram(i), p2);
  }
  return pt;
}

/// Round-robin schedule: one MTI slot per device, any leading slots are pure
/// harvesting.
inline ScheduleFrame round_robin(int I, int J) {
  std::vector<std::vector<int>> mti(I);
  for (int i = 0; i < I; ++i) mti[i] = {J - I + i};
  return ScheduleFrame(J, std::move(mti));
}

}  // namespace srbeam::testsupport
