#include "srbeam/convexify.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srbeam/conic/expchain.hpp"
#include "srbeam/conic/hermitian.hpp"

namespace srbeam::convexify {

namespace {

constexpr double kLn2 = 0.6931471805599453;

using conic::hermitian_to_real_psd;
using conic::hmat;
using conic::hvec;
using conic::hvec_dim;
using conic::max_eigpair;
using conic::svec;

LinExpr trace_expr(int x_first, const MatC& H) {
  const Eigen::VectorXd w = hvec(H);
  LinExpr e;
  for (int k = 0; k < w.size(); ++k)
    if (w[k] != 0.0) e.add(x_first + k, w[k]);
  return e;
}

double real_trace(const MatC& X, const MatC& H) {
  return (X * H).trace().real();
}

struct Builder {
  const NetworkInstance& inst;
  const ScheduleFrame& sched;
  const ExpansionPoint& pt;
  const SurrogateConfig& cfg;
  Assembled out;

  int I, J, N, G;

  Builder(const NetworkInstance& instance, const ScheduleFrame& schedule,
          const ExpansionPoint& point, const SurrogateConfig& config)
      : inst(instance), sched(schedule), pt(point), cfg(config) {
    inst.validate();
    if (sched.slot_count() != inst.slot_count ||
        sched.device_count() != inst.device_count)
      throw std::invalid_argument("assemble: schedule does not match instance");
    out.groups = SlotGrouping::from(sched);
    I = inst.device_count;
    J = inst.slot_count;
    N = inst.antenna_count;
    G = out.groups.count();
    pt.validate(I, J, G);
    for (int i = 0; i < I; ++i)
      if (inst.rate_targets[i] > 0 && sched.mti_slots(i).empty())
        throw std::invalid_argument(
            "assemble: device with a positive target has no MTI slot");
    out.kc_nats_scale = inst.spreading_factor * kLn2;
  }

  bool active(int i) const { return inst.rate_targets[i] > 0; }
  double kc(int i) const {
    return inst.spreading_factor * inst.rate_targets[i] * kLn2;
  }
  double kg2sig(int i) const {
    return inst.spreading_factor *
           std::norm(inst.channels.device_to_receiver[i]) /
           inst.receiver_noise;
  }
  double mti_tau_hat(int i) const {
    double t = 0;
    for (int j : sched.mti_slots(i)) t += pt.tau[j];
    return t;
  }
  LinExpr mti_tau_expr(int i) const {
    LinExpr e;
    for (int j : sched.mti_slots(i)) e.add(out.layout.tau_first + j, 1.0);
    return e;
  }
  double sum_phi2_hat(int i) const {
    double s = 0;
    for (int j = 0; j < J; ++j)
      if (sched.role(i, j) == SlotRole::ehs) s += pt.phi(i, j) * pt.phi(i, j);
    return s;
  }
  int mti_group(int i) const {
    return out.groups.group_of_slot[sched.mti_slots(i).front()];
  }

  void layout_common(bool sq) {
    Program& p = out.program;
    VarLayout& L = out.layout;
    L.hdim = hvec_dim(N);
    for (int g = 0; g < G; ++g)
      L.x_first.push_back(p.add_vars(L.hdim, "X" + std::to_string(g) + "_"));
    L.tau_first = p.add_vars(J, "tau");
    L.gamma_first = p.add_vars(G, "gamma");
    L.epi_first = p.add_vars(J, "t");
    L.phi_var = Eigen::MatrixXi::Constant(I, J, -1);
    for (int i = 0; i < I; ++i) {
      if (!active(i)) continue;
      for (int j = 0; j < J; ++j)
        if (sched.role(i, j) == SlotRole::ehs)
          L.phi_var(i, j) =
              p.add_var("phi_" + std::to_string(i) + "_" + std::to_string(j));
    }
    L.theta.assign(I, -1);
    L.z.assign(I, -1);
    L.xi.assign(I, -1);
    for (int i = 0; i < I; ++i) {
      if (!active(i)) continue;
      if (sq) {
        L.theta[i] = p.add_var("theta" + std::to_string(i));
      } else {
        L.z[i] = p.add_var("zr" + std::to_string(i));
        L.xi[i] = p.add_var("xi" + std::to_string(i));
      }
    }
  }

  LinExpr x_trace(int g, const MatC& H) const {
    return trace_expr(out.layout.x_first[g], H);
  }

  void common_blocks(const AssemblePins& pins) {
    Program& p = out.program;
    const VarLayout& L = out.layout;
    const std::optional<Eigen::VectorXd>& pin_tau = pins.tau;

    // (17b): one PSD block per covariance through the real embedding
    for (int g = 0; g < G; ++g) {
      std::vector<LinExpr> rows(conic::svec_dim(2 * N));
      for (int k = 0; k < L.hdim; ++k) {
        Eigen::VectorXd basis = Eigen::VectorXd::Zero(L.hdim);
        basis[k] = 1.0;
        const Eigen::VectorXd col = svec(hermitian_to_real_psd(hmat(basis, N)));
        for (int r = 0; r < col.size(); ++r)
          if (col[r] != 0.0) rows[r].add(L.x_first[g] + k, col[r]);
      }
      p.add_block(Cone::psd, std::move(rows), "psd_g" + std::to_string(g),
                  2 * N);
    }

    // (10b) and the frame budget (10c)
    {
      std::vector<LinExpr> rows;
      for (int j = 0; j < J; ++j)
        rows.push_back(LinExpr::variable(L.tau_first + j));
      p.add_block(Cone::nonneg, std::move(rows), "tau_nn");
      LinExpr frame(inst.frame_length);
      for (int j = 0; j < J; ++j) frame.add(L.tau_first + j, -1.0);
      p.add_block(Cone::nonneg, {frame}, "frame");
    }
    if (pin_tau) {
      if (pin_tau->size() != J)
        throw std::invalid_argument("assemble: pinned tau length mismatch");
      std::vector<LinExpr> rows;
      for (int j = 0; j < J; ++j)
        rows.push_back(LinExpr::variable(L.tau_first + j) -
                       LinExpr((*pin_tau)[j]));
      p.add_block(Cone::zero, std::move(rows), "pin_tau");
    }
    if (pins.X) {
      if (static_cast<int>(pins.X->size()) != G)
        throw std::invalid_argument("assemble: pinned covariance count");
      std::vector<LinExpr> rows;
      for (int g = 0; g < G; ++g) {
        const Eigen::VectorXd hx = hvec((*pins.X)[g]);
        for (int k = 0; k < L.hdim; ++k)
          rows.push_back(LinExpr::variable(L.x_first[g] + k) - LinExpr(hx[k]));
      }
      p.add_block(Cone::zero, std::move(rows), "pin_x");
    }

    // (25): gamma_g >= Tr(X_g)
    for (int g = 0; g < G; ++g) {
      LinExpr e = LinExpr::variable(L.gamma_first + g);
      e -= x_trace(g, MatC::Identity(N, N));
      p.add_block(Cone::nonneg, {e}, "trace_g" + std::to_string(g));
    }

    // phi >= 0 keeps expansion points in the surrogate domain
    {
      std::vector<LinExpr> rows;
      for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
          if (L.phi_var(i, j) >= 0)
            rows.push_back(LinExpr::variable(L.phi_var(i, j)));
      if (!rows.empty()) p.add_block(Cone::nonneg, std::move(rows), "phi_nn");
    }

    // (24): harvest cones, one per active device and harvesting slot
    for (int i = 0; i < I; ++i) {
      if (!active(i)) continue;
      const MatC H = inst.channels.gram(i);
      for (int j = 0; j < J; ++j) {
        if (L.phi_var(i, j) < 0) continue;
        const int g = out.groups.group_of_slot[j];
        LinExpr m = inst.conversion_efficiency[i] * x_trace(g, H);
        LinExpr tau = LinExpr::variable(L.tau_first + j);
        p.add_block(Cone::soc,
                    {0.5 * (m + tau), LinExpr::variable(L.phi_var(i, j)),
                     0.5 * (m - tau)},
                    "harvest_i" + std::to_string(i) + "_j" + std::to_string(j));
      }
    }

    // objective epigraphs, one per slot. The product tau*gamma is split as
    // a difference of squares in balanced coordinates u = tau/a, w = a*gamma
    // with a^2 = tau_hat/gamma_hat: both squares expand at equal values, the
    // concave square's tangent correction vanishes, and what remains is
    // t_j >= (u + w)^2 / 4, the arithmetic-geometric majorizer of tau*gamma.
    // The unbalanced split stalls once tau and gamma live on different
    // scales (its majorization gap is (d tau - d gamma)^2 / 4).
    VarLayout& Lm = out.layout;
    Lm.epi_scale.resize(J);
    for (int j = 0; j < J; ++j) {
      const int g = out.groups.group_of_slot[j];
      const double a = std::sqrt(pt.tau[j] / std::max(pt.gamma[g], 1e-12));
      const double aj = std::clamp(a, 1e-9, 1e9);
      Lm.epi_scale[j] = aj;
      p.add_block(
          Cone::rsoc,
          {LinExpr::variable(L.epi_first + j), LinExpr(0.5),
           0.5 * ((1.0 / aj) * LinExpr::variable(L.tau_first + j) +
                  aj * LinExpr::variable(L.gamma_first + g))},
          "obj_epi_j" + std::to_string(j));
    }
  }

  // proximal epigraph: prox_var >= squared normalized deviation from the
  // expansion point; damps the iteration without moving its fixed points
  void prox_block() {
    Program& p = out.program;
    VarLayout& L = out.layout;
    L.prox_var = p.add_var("prox");
    std::vector<LinExpr> rows{LinExpr::variable(L.prox_var), LinExpr(0.5)};
    auto push = [&rows](const LinExpr& dev, double scale) {
      rows.push_back((1.0 / scale) * dev);
    };
    double sx = 1e-12;
    for (int g = 0; g < G; ++g) sx = std::max(sx, pt.X[g].norm());
    for (int g = 0; g < G; ++g) {
      const Eigen::VectorXd hx = hvec(pt.X[g]);
      for (int k = 0; k < L.hdim; ++k)
        push(LinExpr::variable(L.x_first[g] + k) - LinExpr(hx[k]), sx);
    }
    const double st = std::max(pt.tau.norm(), 1e-12);
    for (int j = 0; j < J; ++j)
      push(LinExpr::variable(L.tau_first + j) - LinExpr(pt.tau[j]), st);
    const double sg = std::max(pt.gamma.norm(), 1e-12);
    for (int g = 0; g < G; ++g)
      push(LinExpr::variable(L.gamma_first + g) - LinExpr(pt.gamma[g]), sg);
    const double sp = std::max(pt.phi.norm(), 1e-12);
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j)
        if (L.phi_var(i, j) >= 0)
          push(LinExpr::variable(L.phi_var(i, j)) - LinExpr(pt.phi(i, j)), sp);
    p.add_block(Cone::rsoc, std::move(rows), "prox");
  }

  LinExpr objective() const {
    const VarLayout& L = out.layout;
    LinExpr obj;
    if (L.prox_var >= 0) {
      double eref = 1e-12;
      for (int j = 0; j < J; ++j)
        eref += pt.tau[j] * pt.gamma[out.groups.group_of_slot[j]];
      obj.add(L.prox_var, cfg.prox_weight * eref);
    }
    for (int j = 0; j < J; ++j) obj += LinExpr::variable(L.epi_first + j);
    for (int g = 0; g < G; ++g) {
      const auto eig = max_eigpair(pt.X[g]);
      const MatC penalty_dir =
          MatC::Identity(N, N) - eig.second * eig.second.adjoint();
      obj += cfg.penalty * trace_expr(L.x_first[g], penalty_dir);
    }
    return obj;
  }

  void sq_blocks() {
    Program& p = out.program;
    const VarLayout& L = out.layout;
    for (int i = 0; i < I; ++i) {
      if (!active(i)) continue;
      const int g = mti_group(i);
      const MatC H = inst.channels.gram(i);
      const double c = kg2sig(i);
      const double that = mti_tau_hat(i);
      const double trXH = real_trace(pt.X[g], H);
      const double p2 = sum_phi2_hat(i);
      const double Fhat = c * trXH * p2;

      p.add_block(Cone::nonneg, {LinExpr::variable(L.theta[i])},
                  "theta_nn_i" + std::to_string(i));

      // first-order model of the product bound on theta
      LinExpr lin(Fhat);
      lin += (c * p2) * (x_trace(g, H) - LinExpr(trXH));
      for (int j = 0; j < J; ++j) {
        if (L.phi_var(i, j) < 0) continue;
        const double ph = pt.phi(i, j);
        lin += (c * trXH * 2.0 * ph) *
               (LinExpr::variable(L.phi_var(i, j)) - LinExpr(ph));
      }
      lin -= LinExpr::variable(L.theta[i]);
      p.add_block(Cone::nonneg, {lin}, "theta_lin_i" + std::to_string(i));

      // shrunken domain for the quadratic model
      p.add_block(Cone::nonneg, {mti_tau_expr(i) - LinExpr(that / cfg.beta)},
                  "domain_i" + std::to_string(i));

      // quadratic upper bound of the rate gap, lowered to a rotated cone
      const double theta_hat = pt.theta[i];
      const Eigen::Vector2d grad = rate_gap_gradient(theta_hat, that);
      const Eigen::Matrix2d Hs = hessian_upper_bound(that, cfg.beta);
      const Eigen::LLT<Eigen::Matrix2d> llt(Hs);
      const Eigen::Matrix2d Lt = llt.matrixL().transpose();

      LinExpr dtheta = LinExpr::variable(L.theta[i]) - LinExpr(theta_hat);
      LinExpr dtau = mti_tau_expr(i) - LinExpr(that);
      LinExpr r = LinExpr(-rate_gap(kc(i), theta_hat, that));
      r -= grad[0] * dtheta;
      r -= grad[1] * dtau;
      p.add_block(Cone::rsoc,
                  {r, LinExpr(0.5), Lt(0, 0) * dtheta + Lt(0, 1) * dtau,
                   Lt(1, 1) * dtau},
                  "rate_quad_i" + std::to_string(i));
    }
  }

  void cqr_blocks() {
    Program& p = out.program;
    const VarLayout& L = out.layout;
    for (int i = 0; i < I; ++i) {
      if (!active(i)) continue;
      const int g = mti_group(i);
      const MatC H = inst.channels.gram(i);
      const double c = kg2sig(i);
      const double that = mti_tau_hat(i);
      const double trXH = real_trace(pt.X[g], H);
      const double p2 = sum_phi2_hat(i);
      const double Ghat = c * trXH * p2 / that;

      p.add_block(Cone::nonneg, {LinExpr::variable(L.z[i])},
                  "z_nn_i" + std::to_string(i));

      // z tau_m >= K C as (z + tau_m) >= || [2 sqrt(KC), z - tau_m] ||
      LinExpr zv = LinExpr::variable(L.z[i]);
      LinExpr tm = mti_tau_expr(i);
      p.add_block(Cone::soc,
                  {zv + tm, LinExpr(2.0 * std::sqrt(kc(i))), zv - tm},
                  "rate_soc_i" + std::to_string(i));

      conic::append_exp_soc_chain(p, LinExpr::variable(L.z[i]),
                                  LinExpr::variable(L.xi[i]), cfg.approx_coeff,
                                  "chain_i" + std::to_string(i));

      // first-order model of the SNR quotient
      LinExpr lin(Ghat);
      lin += (c * p2 / that) * (x_trace(g, H) - LinExpr(trXH));
      lin -= (Ghat / that) * (tm - LinExpr(that));
      for (int j = 0; j < J; ++j) {
        if (L.phi_var(i, j) < 0) continue;
        const double ph = pt.phi(i, j);
        lin += (c * trXH * 2.0 * ph / that) *
               (LinExpr::variable(L.phi_var(i, j)) - LinExpr(ph));
      }
      lin -= LinExpr::variable(L.xi[i]);
      p.add_block(Cone::nonneg, {lin}, "xi_lin_i" + std::to_string(i));
    }
  }
};

}  // namespace

SlotGrouping SlotGrouping::from(const ScheduleFrame& schedule) {
  SlotGrouping g;
  const int J = schedule.slot_count();
  g.group_of_slot.assign(J, -1);
  std::vector<int> group_of_device(schedule.device_count(), -1);
  for (int j = 0; j < J; ++j) {
    const int owner = schedule.mti_owner(j);
    if (owner < 0) {
      g.group_of_slot[j] = static_cast<int>(g.slots_of_group.size());
      g.slots_of_group.push_back({j});
      g.owner_of_group.push_back(-1);
      continue;
    }
    if (group_of_device[owner] < 0) {
      group_of_device[owner] = static_cast<int>(g.slots_of_group.size());
      g.slots_of_group.push_back({});
      g.owner_of_group.push_back(owner);
    }
    g.group_of_slot[j] = group_of_device[owner];
    g.slots_of_group[group_of_device[owner]].push_back(j);
  }
  return g;
}

void ExpansionPoint::validate(int device_count, int slot_count,
                              int group_count) const {
  auto fail = [](const std::string& w) {
    throw std::invalid_argument("expansion point: " + w);
  };
  if (static_cast<int>(X.size()) != group_count) fail("covariance count");
  if (tau.size() != slot_count) fail("tau length");
  if (gamma.size() != group_count) fail("gamma length");
  if (phi.rows() != device_count || phi.cols() != slot_count)
    fail("phi shape");
  for (int j = 0; j < slot_count; ++j)
    if (!(tau[j] > 0)) fail("tau must be strictly positive");
  for (const MatC& Xg : X) {
    if ((Xg - Xg.adjoint()).norm() > 1e-9 * std::max(1.0, Xg.norm()))
      fail("covariance not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatC> es(Xg, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, Xg.norm()))
      fail("covariance not PSD");
  }
  if ((phi.array() < 0).any()) fail("phi must be nonnegative");
}

double dc_surrogate(double tau_hat, double gamma_hat, double tau,
                    double gamma) {
  const double d = tau_hat - gamma_hat;
  return 0.25 * (tau + gamma) * (tau + gamma) - 0.25 * d * d -
         0.5 * d * ((tau - gamma) - d);
}

Eigen::Matrix2d hessian_upper_bound(double tau_hat, double beta) {
  if (!(tau_hat > 0))
    throw std::invalid_argument("hessian_upper_bound: tau_hat must be > 0");
  if (!(beta >= 1))
    throw std::invalid_argument("hessian_upper_bound: beta must be >= 1");
  const double b = beta / (8.0 * tau_hat);
  Eigen::Matrix2d H;
  H << 9.0 * b, -b, -b, 9.0 * b;
  return H;
}

double rate_gap(double kc_nats, double theta, double tau) {
  return kc_nats - tau * std::log1p(theta / tau);
}

Eigen::Vector2d rate_gap_gradient(double theta_hat, double tau_hat) {
  Eigen::Vector2d g;
  g[0] = -tau_hat / (tau_hat + theta_hat);
  g[1] = -std::log1p(theta_hat / tau_hat) + theta_hat / (tau_hat + theta_hat);
  return g;
}

double sq_rate_surrogate(double kc_nats, double theta_hat, double tau_hat,
                         double beta, double theta, double tau) {
  const Eigen::Vector2d grad = rate_gap_gradient(theta_hat, tau_hat);
  const Eigen::Matrix2d Hs = hessian_upper_bound(tau_hat, beta);
  Eigen::Vector2d d(theta - theta_hat, tau - tau_hat);
  return rate_gap(kc_nats, theta_hat, tau_hat) + grad.dot(d) + d.dot(Hs * d);
}

double snr_product(double kg2_over_sigma, const MatC& X, const MatC& H,
                   double sum_phi2) {
  return kg2_over_sigma * real_trace(X, H) * sum_phi2;
}

Assembled assemble_sq(const NetworkInstance& instance,
                      const ScheduleFrame& schedule,
                      const ExpansionPoint& point, const SurrogateConfig& cfg,
                      const AssemblePins& pins) {
  Builder b(instance, schedule, point, cfg);
  b.layout_common(/*sq=*/true);
  b.common_blocks(pins);
  if (cfg.prox_weight > 0) b.prox_block();
  b.sq_blocks();
  b.out.program.set_objective(b.objective());
  return std::move(b.out);
}

Assembled assemble_cqr(const NetworkInstance& instance,
                       const ScheduleFrame& schedule,
                       const ExpansionPoint& point, const SurrogateConfig& cfg,
                       const AssemblePins& pins) {
  Builder b(instance, schedule, point, cfg);
  b.layout_common(/*sq=*/false);
  b.common_blocks(pins);
  if (cfg.prox_weight > 0) b.prox_block();
  b.cqr_blocks();
  b.out.program.set_objective(b.objective());
  return std::move(b.out);
}

Eigen::VectorXd pack_point(const Assembled& a, const NetworkInstance& instance,
                           const ScheduleFrame& schedule,
                           const ExpansionPoint& point) {
  const VarLayout& L = a.layout;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(a.program.var_count());
  const int I = instance.device_count;
  const int J = instance.slot_count;
  for (int g = 0; g < a.groups.count(); ++g)
    v.segment(L.x_first[g], L.hdim) = hvec(point.X[g]);
  for (int j = 0; j < J; ++j) v[L.tau_first + j] = point.tau[j];
  for (int g = 0; g < a.groups.count(); ++g)
    v[L.gamma_first + g] = point.gamma[g];
  for (int j = 0; j < J; ++j) {
    const int g = a.groups.group_of_slot[j];
    const double aj = L.epi_scale[j];
    const double s = point.tau[j] / aj + aj * point.gamma[g];
    v[L.epi_first + j] = 0.25 * s * s;
  }
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      if (L.phi_var(i, j) >= 0) v[L.phi_var(i, j)] = point.phi(i, j);

  for (int i = 0; i < I; ++i) {
    if (L.theta[i] >= 0) v[L.theta[i]] = point.theta[i];
    if (L.z[i] < 0) continue;
    const int g = a.groups.group_of_slot[schedule.mti_slots(i).front()];
    double tau_m = 0;
    for (int j : schedule.mti_slots(i)) tau_m += point.tau[j];
    double p2 = 0;
    for (int j = 0; j < J; ++j)
      if (schedule.role(i, j) == SlotRole::ehs)
        p2 += point.phi(i, j) * point.phi(i, j);
    const double c = instance.spreading_factor *
                     std::norm(instance.channels.device_to_receiver[i]) /
                     instance.receiver_noise;
    const double xi =
        snr_product(c, point.X[g], instance.channels.gram(i), p2) / tau_m;
    const double z = std::log1p(xi);
    v[L.xi[i]] = xi;
    v[L.z[i]] = z;

    // tight chain values at z
    int first = -1, count = 0;
    const std::string prefix = "chain_i" + std::to_string(i) + "_zeta";
    for (int var = 0; var < a.program.var_count(); ++var) {
      const std::string& name = a.program.var_name(var);
      if (name.compare(0, prefix.size(), prefix) == 0) {
        if (first < 0) first = var;
        ++count;
      }
    }
    if (first >= 0) {
      const int M = count - 4;
      const double pm = std::pow(2.0, -M);
      Eigen::VectorXd zeta(count);
      zeta[0] = (1 + pm * z) * (1 + pm * z);
      zeta[1] = (5.0 / 6.0 + 0.5 * pm * z) * (5.0 / 6.0 + 0.5 * pm * z);
      zeta[2] = zeta[0] * zeta[0];
      zeta[3] = zeta[1] + zeta[2] / 24.0 + 19.0 / 72.0;
      for (int k = 4; k < count; ++k) zeta[k] = zeta[k - 1] * zeta[k - 1];
      v.segment(first, count) = zeta;
    }
  }
  return v;
}

}  // namespace srbeam::convexify
