#include "srbeam/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace srbeam {

MatC ChannelSet::gram(int device) const {
  const VecC& h = bs_to_device.at(device);
  return h * h.adjoint();
}

void NetworkInstance::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("NetworkInstance: " + what);
  };
  if (antenna_count < 1) fail("antenna_count < 1");
  if (device_count < 1) fail("device_count < 1");
  if (slot_count < 1) fail("slot_count < 1");
  if (spreading_factor < 1) fail("spreading_factor < 1");
  if (!(frame_length > 0)) fail("frame_length must be positive");
  if (!(receiver_noise > 0)) fail("receiver_noise must be positive");
  if (bs_power_budget < 0) fail("bs_power_budget negative");
  const std::size_t I = static_cast<std::size_t>(device_count);
  if (rate_targets.size() != I) fail("rate_targets size mismatch");
  if (conversion_efficiency.size() != I)
    fail("conversion_efficiency size mismatch");
  if (device_noise.size() != I) fail("device_noise size mismatch");
  if (channels.bs_to_device.size() != I || channels.device_to_receiver.size() != I)
    fail("channel count mismatch");
  for (int i = 0; i < device_count; ++i) {
    if (rate_targets[i] < 0) fail("negative rate target");
    if (conversion_efficiency[i] < 0 || conversion_efficiency[i] > 1)
      fail("conversion efficiency outside [0,1]");
    if (device_noise[i] < 0) fail("negative device noise");
    if (channels.bs_to_device[i].size() != antenna_count)
      fail("channel vector length mismatch");
  }
}

namespace {

void require_square_same(const MatC& X, const MatC& H) {
  if (X.rows() != X.cols() || H.rows() != H.cols() || X.rows() != H.rows())
    throw std::invalid_argument("matrix dimension mismatch");
}

double real_trace_product(const MatC& X, const MatC& H) {
  const Cplx t = (X * H).trace();
  const double scale = std::abs(t);
  if (scale > 0 && std::abs(t.imag()) > 1e-12 * scale)
    throw std::invalid_argument("trace product has a large imaginary part");
  return t.real();
}

}  // namespace

double harvested_energy(double eta, double tau, const MatC& X, const MatC& H) {
  if (tau < 0) throw std::invalid_argument("harvested_energy: negative tau");
  if (eta < 0 || eta > 1)
    throw std::invalid_argument("harvested_energy: eta outside [0,1]");
  require_square_same(X, H);
  return eta * tau * real_trace_product(X, H);
}

double snr_at_receiver(int K, Cplx g, const MatC& X_mti, const MatC& H,
                       double harvested_sum, double tau_mti, double sigma_ue2) {
  if (!(tau_mti > 0))
    throw std::invalid_argument("snr_at_receiver: tau_mti must be positive");
  if (!(sigma_ue2 > 0))
    throw std::invalid_argument("snr_at_receiver: sigma_ue2 must be positive");
  require_square_same(X_mti, H);
  return K * std::norm(g) * real_trace_product(X_mti, H) * harvested_sum /
         (tau_mti * sigma_ue2);
}

double achievable_rate(double tau_mti, int K, double snr) {
  if (tau_mti < 0) throw std::invalid_argument("achievable_rate: negative tau");
  if (snr < 0) throw std::invalid_argument("achievable_rate: negative snr");
  if (tau_mti == 0) return 0;
  return tau_mti / K * std::log2(1.0 + snr);
}

double total_energy(const Eigen::VectorXd& tau, const std::vector<MatC>& X) {
  if (static_cast<std::size_t>(tau.size()) != X.size())
    throw std::invalid_argument("total_energy: length mismatch");
  double e = 0;
  for (Eigen::Index j = 0; j < tau.size(); ++j) {
    if (tau[j] < 0) throw std::invalid_argument("total_energy: negative tau");
    e += tau[j] * X[j].trace().real();
  }
  return e;
}

std::string ConstraintViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::rate:
      os << "rate of device " << device << " short by " << amount;
      break;
    case Kind::slot_nonneg:
      os << "negative duration in slot " << slot << " (" << amount << ")";
      break;
    case Kind::frame_budget:
      os << "slot durations exceed the frame by " << amount;
      break;
    case Kind::harvest_cap:
      os << "harvest of device " << device << " in slot " << slot
         << " above its cap by " << amount;
      break;
  }
  return os.str();
}

std::vector<ConstraintViolation> validate_solution(
    const NetworkInstance& instance, const ScheduleFrame& schedule,
    const SolutionReport& report, const AuditTolerances& tol) {
  instance.validate();
  const int I = instance.device_count;
  const int J = instance.slot_count;
  std::vector<ConstraintViolation> out;

  for (int j = 0; j < J; ++j) {
    if (report.durations[j] < -tol.duration)
      out.push_back({ConstraintViolation::Kind::slot_nonneg, -1, j,
                     -report.durations[j]});
  }
  const double used = report.durations.sum();
  if (used > instance.frame_length + tol.duration)
    out.push_back({ConstraintViolation::Kind::frame_budget, -1, -1,
                   used - instance.frame_length});

  // harvest caps, Eq. (3)/(10d), with X_j = x_j x_j^H
  for (int i = 0; i < I; ++i) {
    const VecC& h = instance.channels.bs_to_device[i];
    for (int j = 0; j < J; ++j) {
      if (schedule.role(i, j) == SlotRole::mti) continue;
      const Cplx hx = h.adjoint() * report.beamformers[j];
      const double cap = instance.conversion_efficiency[i] *
                         std::max(report.durations[j], 0.0) * std::norm(hx);
      const double eps = report.harvested(i, j);
      if (eps > cap * (1 + tol.harvest) + 1e-15)
        out.push_back(
            {ConstraintViolation::Kind::harvest_cap, i, j, eps - cap});
    }
  }

  // rates via the true formulas, aggregated MTI interval per device
  for (int i = 0; i < I; ++i) {
    const auto& mti = schedule.mti_slots(i);
    double tau_m = 0;
    for (int j : mti) tau_m += std::max(report.durations[j], 0.0);
    double rate = 0;
    if (!mti.empty() && tau_m > 0) {
      double harvested_sum = 0;
      for (int j = 0; j < J; ++j)
        if (schedule.role(i, j) == SlotRole::ehs)
          harvested_sum += report.harvested(i, j);
      const VecC& h = instance.channels.bs_to_device[i];
      const Cplx hx = h.adjoint() * report.beamformers[mti.front()];
      const double snr = instance.spreading_factor *
                         std::norm(instance.channels.device_to_receiver[i]) *
                         std::norm(hx) * harvested_sum /
                         (tau_m * instance.receiver_noise);
      rate = achievable_rate(tau_m, instance.spreading_factor, snr);
    }
    if (rate < instance.rate_targets[i] - tol.rate)
      out.push_back({ConstraintViolation::Kind::rate, i, -1,
                     instance.rate_targets[i] - rate});
  }
  return out;
}

}  // namespace srbeam
