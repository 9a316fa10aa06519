#include "srbeam/sca.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "srbeam/conic/hermitian.hpp"
#include "srbeam/conic/solver.hpp"

namespace srbeam::sca {

namespace {

using convexify::Assembled;
using convexify::AssemblePins;
using convexify::ExpansionPoint;
using convexify::SlotGrouping;
using convexify::SurrogateConfig;
using conic::hvec;
using conic::hmat;

constexpr double kInf = std::numeric_limits<double>::infinity();

double kg2sig(const NetworkInstance& inst, int i) {
  return inst.spreading_factor *
         std::norm(inst.channels.device_to_receiver[i]) / inst.receiver_noise;
}

struct TrueState {
  // physical quantities of one iterate, all from the exact formulas
  Eigen::VectorXd rates;         // per device
  Eigen::MatrixXd harvested;     // I x J, at the cap
  double energy = 0;
};

// Harvest at its cap and the exact rates for covariance-valued beams.
TrueState evaluate_true(const NetworkInstance& inst,
                        const ScheduleFrame& sched, const SlotGrouping& groups,
                        const std::vector<MatC>& X,
                        const Eigen::VectorXd& tau) {
  const int I = inst.device_count, J = inst.slot_count;
  TrueState s;
  s.harvested = Eigen::MatrixXd::Zero(I, J);
  s.rates = Eigen::VectorXd::Zero(I);
  for (int i = 0; i < I; ++i) {
    const MatC H = inst.channels.gram(i);
    for (int j = 0; j < J; ++j)
      if (sched.role(i, j) == SlotRole::ehs)
        s.harvested(i, j) = harvested_energy(
            inst.conversion_efficiency[i], std::max(tau[j], 0.0),
            X[groups.group_of_slot[j]], H);
  }
  for (int i = 0; i < I; ++i) {
    const auto& mti = sched.mti_slots(i);
    if (mti.empty()) continue;
    double tau_m = 0;
    for (int j : mti) tau_m += std::max(tau[j], 0.0);
    if (tau_m <= 0) continue;
    const int g = groups.group_of_slot[mti.front()];
    const double snr = snr_at_receiver(
        inst.spreading_factor, inst.channels.device_to_receiver[i], X[g],
        inst.channels.gram(i), s.harvested.row(i).sum(), tau_m,
        inst.receiver_noise);
    s.rates[i] = achievable_rate(tau_m, inst.spreading_factor, snr);
  }
  for (int j = 0; j < J; ++j)
    s.energy +=
        std::max(tau[j], 0.0) * X[groups.group_of_slot[j]].trace().real();
  return s;
}

ExpansionPoint initial_point(const NetworkInstance& inst,
                             const ScheduleFrame& sched,
                             const SlotGrouping& groups, double power_scale,
                             const RunOptions& options) {
  const int I = inst.device_count, J = inst.slot_count,
            N = inst.antenna_count;
  ExpansionPoint pt;
  const double p0 = power_scale * std::max(inst.bs_power_budget, 1e-6) / N;
  for (int g = 0; g < groups.count(); ++g)
    pt.X.push_back(p0 * MatC::Identity(N, N));
  pt.tau = options.pin_tau ? *options.pin_tau
                           : Eigen::VectorXd::Constant(J, inst.frame_length / J);
  for (int j = 0; j < J; ++j) pt.tau[j] = std::max(pt.tau[j], 1e-9);
  pt.gamma.resize(groups.count());
  for (int g = 0; g < groups.count(); ++g)
    pt.gamma[g] = pt.X[g].trace().real();
  pt.phi = Eigen::MatrixXd::Zero(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      if (sched.role(i, j) == SlotRole::ehs)
        pt.phi(i, j) = std::sqrt(harvested_energy(
            inst.conversion_efficiency[i], pt.tau[j],
            pt.X[groups.group_of_slot[j]], inst.channels.gram(i)));
  pt.theta = Eigen::VectorXd::Zero(I);
  for (int i = 0; i < I; ++i) {
    const auto& mti = sched.mti_slots(i);
    if (mti.empty()) continue;
    const int g = groups.group_of_slot[mti.front()];
    double p2 = 0;
    for (int j = 0; j < J; ++j)
      if (sched.role(i, j) == SlotRole::ehs) p2 += pt.phi(i, j) * pt.phi(i, j);
    pt.theta[i] = convexify::snr_product(kg2sig(inst, i), pt.X[g],
                                         inst.channels.gram(i), p2);
  }
  return pt;
}

void refresh_point(const NetworkInstance& inst, const ScheduleFrame& sched,
                   const SlotGrouping& groups, ExpansionPoint& pt) {
  const int I = inst.device_count, J = inst.slot_count;
  for (int g = 0; g < groups.count(); ++g)
    pt.gamma[g] = pt.X[g].trace().real();
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      if (sched.role(i, j) == SlotRole::ehs)
        pt.phi(i, j) = std::sqrt(harvested_energy(
            inst.conversion_efficiency[i], pt.tau[j],
            pt.X[groups.group_of_slot[j]], inst.channels.gram(i)));
  for (int i = 0; i < I; ++i) {
    const auto& mti = sched.mti_slots(i);
    if (mti.empty()) continue;
    const int g = groups.group_of_slot[mti.front()];
    double p2 = 0;
    for (int j = 0; j < J; ++j)
      if (sched.role(i, j) == SlotRole::ehs) p2 += pt.phi(i, j) * pt.phi(i, j);
    pt.theta[i] = convexify::snr_product(kg2sig(inst, i), pt.X[g],
                                         inst.channels.gram(i), p2);
  }
}

bool point_rate_feasible(const NetworkInstance& inst,
                         const ScheduleFrame& sched, const SlotGrouping& groups,
                         const ExpansionPoint& pt, double margin) {
  const TrueState s = evaluate_true(inst, sched, groups, pt.X, pt.tau);
  for (int i = 0; i < inst.device_count; ++i)
    if (s.rates[i] < inst.rate_targets[i] * (1 + margin)) return false;
  return true;
}

ExpansionPoint unpack(const Assembled& a, const NetworkInstance& inst,
                      const Eigen::VectorXd& x, const ExpansionPoint& prev) {
  const auto& L = a.layout;
  const int I = inst.device_count, J = inst.slot_count,
            N = inst.antenna_count;
  ExpansionPoint pt;
  for (int g = 0; g < a.groups.count(); ++g) {
    MatC X = hmat(x.segment(L.x_first[g], L.hdim), N);
    // clamp the solver's tiny negative eigenvalues away
    Eigen::SelfAdjointEigenSolver<MatC> es(X);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    pt.X.push_back(es.eigenvectors() * ev.asDiagonal() *
                   es.eigenvectors().adjoint());
  }
  pt.tau.resize(J);
  for (int j = 0; j < J; ++j)
    pt.tau[j] = std::max(x[L.tau_first + j], 1e-12);
  pt.gamma.resize(a.groups.count());
  for (int g = 0; g < a.groups.count(); ++g) {
    pt.gamma[g] =
        std::max(x[L.gamma_first + g], pt.X[g].trace().real());
  }
  pt.phi = Eigen::MatrixXd::Zero(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      if (L.phi_var(i, j) >= 0)
        pt.phi(i, j) = std::max(x[L.phi_var(i, j)], 0.0);
  pt.theta = Eigen::VectorXd::Zero(I);
  for (int i = 0; i < I; ++i) {
    if (L.theta[i] >= 0)
      pt.theta[i] = std::max(x[L.theta[i]], 0.0);
    else
      pt.theta[i] = prev.theta.size() ? prev.theta[i] : 0.0;
  }
  return pt;
}

double displacement(const ExpansionPoint& a, const ExpansionPoint& b,
                    bool with_theta) {
  auto rel = [](double delta, double base) {
    return delta / std::max(1.0, base);
  };
  double dX = 0, nX = 0;
  for (std::size_t g = 0; g < a.X.size(); ++g) {
    dX += (a.X[g] - b.X[g]).squaredNorm();
    nX += b.X[g].squaredNorm();
  }
  double worst = rel(std::sqrt(dX), std::sqrt(nX));
  worst = std::max(worst, rel((a.tau - b.tau).norm(), b.tau.norm()));
  worst = std::max(worst, rel((a.gamma - b.gamma).norm(), b.gamma.norm()));
  worst = std::max(worst, rel((a.phi - b.phi).norm(), b.phi.norm()));
  if (with_theta)
    worst = std::max(worst, rel((a.theta - b.theta).norm(), b.theta.norm()));
  return worst;
}

SolutionReport zero_report(const NetworkInstance& inst,
                           const ScheduleFrame& sched,
                           const RunOptions& options) {
  SolutionReport rep;
  const int J = inst.slot_count;
  rep.total_energy = 0;
  rep.beamformers.assign(J, VecC::Zero(inst.antenna_count));
  rep.durations = options.pin_tau ? *options.pin_tau : Eigen::VectorXd::Zero(J);
  rep.rates = Eigen::VectorXd::Zero(inst.device_count);
  rep.harvested = Eigen::MatrixXd::Zero(inst.device_count, J);
  rep.reflected_energy = Eigen::VectorXd::Zero(inst.device_count);
  rep.rank_residuals = Eigen::VectorXd::Zero(J);
  rep.converged = true;
  rep.iterations = 1;
  (void)sched;
  return rep;
}

// Minimal power multiplier (on one group, or on all of them when group < 0)
// that restores every rate; rates are monotone in the factor, so doubling
// plus bisection applies.
double rescale_factor(const NetworkInstance& inst, const ScheduleFrame& sched,
                      const SlotGrouping& groups, const std::vector<MatC>& X,
                      const Eigen::VectorXd& tau, int group) {
  auto feasible = [&](double scale) {
    std::vector<MatC> Xs = X;
    if (group < 0)
      for (auto& Xg : Xs) Xg *= scale;
    else
      Xs[group] *= scale;
    const TrueState ts = evaluate_true(inst, sched, groups, Xs, tau);
    for (int i = 0; i < inst.device_count; ++i)
      if (ts.rates[i] < inst.rate_targets[i]) return false;
    return true;
  };
  if (feasible(1.0)) return 1.0;
  double hi = 1.0;
  for (int k = 0; k < 60 && !feasible(hi); ++k) hi *= 2.0;
  if (!feasible(hi)) return kInf;
  double lo = hi / 2.0;
  for (int k = 0; k < 80; ++k) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct LoopOutcome {
  ExpansionPoint point;
  ConvergenceTrace trace;
  double surrogate_objective = 0;
  int solves = 0;
  bool usable = false;
};

bool solution_usable(const conic::ConicSolution& sol) {
  if (sol.status == conic::SolveStatus::optimal) return true;
  if (sol.status == conic::SolveStatus::max_iter)
    return std::max({sol.primal_residual, sol.dual_residual, sol.gap}) <= 1e-6;
  return false;
}

LoopOutcome sca_loop(bool sq, const NetworkInstance& inst,
                     const ScheduleFrame& sched, const SlotGrouping& groups,
                     ExpansionPoint point, const AlgorithmConfig& cfg,
                     const RunOptions& options) {
  LoopOutcome out;
  out.trace.approx_coeff = sq ? 0 : cfg.approx_coeff;

  TrueState cur = evaluate_true(inst, sched, groups, point.X, point.tau);
  double ell = cfg.penalty_init_scale * std::max(cur.energy, 1e-12);

  conic::SolveOptions sopts;
  sopts.tol = cfg.solver_tol;
  sopts.max_iter = cfg.solver_max_iter;

  AssemblePins pins;
  pins.tau = options.pin_tau;

  // Safeguarded majorize-minimize: a candidate step is blended toward the
  // previous point by alpha, projected back onto the true feasible set, and
  // accepted only if the true energy does not increase. The proximal weight
  // rho and alpha shrink whenever the tangent models overshoot; both relax
  // on clean steps. Fixed points of the undamped scheme are unchanged.
  double alpha = 1.0;
  double rho = 0.0;
  int bad = 0;
  for (int iter = 0; iter < cfg.counter_max; ++iter) {
    out.solves = iter + 1;
    SurrogateConfig sc;
    sc.penalty = ell;
    sc.penalty_growth = cfg.penalty_growth;
    sc.beta = cfg.beta;
    sc.approx_coeff = cfg.approx_coeff;
    sc.prox_weight = rho;

    Assembled a = sq ? assemble_sq(inst, sched, point, sc, pins)
                     : assemble_cqr(inst, sched, point, sc, pins);
    const auto sol = conic::solve(a.program, sopts);
    if (!solution_usable(sol)) {
      if (++bad > 4) return out;
      rho = std::max(8.0 * rho, 0.1);
      alpha = std::max(0.25 * alpha, 0.02);
      continue;
    }

    ExpansionPoint next = unpack(a, inst, sol.x, point);
    if (alpha < 1.0) {
      for (std::size_t g = 0; g < next.X.size(); ++g)
        next.X[g] = point.X[g] + alpha * (next.X[g] - point.X[g]);
      next.tau = point.tau + alpha * (next.tau - point.tau);
      next.gamma = point.gamma + alpha * (next.gamma - point.gamma);
      next.phi = point.phi + alpha * (next.phi - point.phi);
      next.theta = point.theta + alpha * (next.theta - point.theta);
    }
    const double proj =
        rescale_factor(inst, sched, groups, next.X, next.tau, -1);
    if (!std::isfinite(proj)) {
      if (++bad > 4) return out;
      rho = std::max(8.0 * rho, 0.1);
      alpha = std::max(0.25 * alpha, 0.02);
      continue;
    }
    if (proj > 1.0)
      for (auto& X : next.X) X *= proj;
    refresh_point(inst, sched, groups, next);
    const TrueState ts = evaluate_true(inst, sched, groups, next.X, next.tau);

    const bool accept =
        ts.energy <= cur.energy * (1 + 1e-9) + 1e-15 || !out.usable;
    if (!accept) {
      if (++bad > 6) return out;
      alpha = std::max(0.25 * alpha, 0.02);
      rho = std::max(2.0 * rho, 0.02);
      continue;
    }
    bad = 0;

    const double disp = displacement(next, point, sq);
    double rank_worst = 0;
    for (const MatC& X : next.X)
      rank_worst = std::max(rank_worst, rank_residual(X));

    double surr = sol.objective;
    if (a.layout.prox_var >= 0)
      for (const auto& [v, coef] : a.program.objective().terms)
        if (v == a.layout.prox_var) surr -= coef * sol.x[v];
    out.trace.iterations.push_back({surr, ts.energy, disp, rank_worst, ell});
    out.surrogate_objective = surr;
    out.point = next;
    out.usable = true;

    if (proj > 1.0 + 1e-3)
      rho = std::min(std::max(2.0 * rho, 0.004), 1e4);
    else
      rho *= 0.25;
    alpha = std::min(1.0, 1.5 * alpha);

    if (disp < cfg.tolerance) {
      if (rank_worst <= cfg.tolerance) {
        out.trace.converged = true;
        return out;
      }
      ell *= cfg.penalty_growth;  // escalate and keep the expansion point
    } else {
      point = next;
      cur = ts;
    }
  }
  return out;
}

// Restoration: re-solve the conic-quadratic subproblem with the covariances
// frozen; with X fixed the snr quotient is jointly convex in (tau, phi), so
// its tangent bound is conservative and the re-solve lands inside the true
// feasible set.
bool restore_feasibility(const NetworkInstance& inst,
                         const ScheduleFrame& sched, const SlotGrouping& groups,
                         ExpansionPoint& point, const AlgorithmConfig& cfg,
                         const RunOptions& options) {
  SurrogateConfig sc;
  sc.penalty = 0.0 + 1e-9;
  sc.beta = cfg.beta;
  sc.approx_coeff = cfg.approx_coeff;
  AssemblePins pins;
  pins.tau = options.pin_tau;
  pins.X = point.X;
  conic::SolveOptions sopts;
  sopts.tol = cfg.solver_tol;
  sopts.max_iter = cfg.solver_max_iter;
  for (int pass = 0; pass < 3; ++pass) {
    Assembled a = assemble_cqr(inst, sched, point, sc, pins);
    const auto sol = conic::solve(a.program, sopts);
    if (!solution_usable(sol)) return false;
    point = unpack(a, inst, sol.x, point);
    const TrueState ts = evaluate_true(inst, sched, groups, point.X, point.tau);
    bool ok = true;
    for (int i = 0; i < inst.device_count; ++i)
      if (ts.rates[i] < inst.rate_targets[i] - 1e-9) ok = false;
    if (ok) return true;
  }
  return false;
}


SolutionReport build_report(const NetworkInstance& inst,
                            const ScheduleFrame& sched,
                            const SlotGrouping& groups,
                            const ExpansionPoint& point,
                            const ConvergenceTrace& trace,
                            const AlgorithmConfig& cfg) {
  const int I = inst.device_count, J = inst.slot_count;
  const double sdp_energy =
      evaluate_true(inst, sched, groups, point.X, point.tau).energy;

  std::mt19937_64 rng(cfg.seed ^ 0x5eedbeef);
  std::vector<VecC> beams(groups.count());
  for (int g = 0; g < groups.count(); ++g) {
    // beams extracted group by group against the exact constraints, the
    // not-yet-extracted groups still contributing through their covariances
    std::vector<MatC> Xmix = point.X;
    for (int h = 0; h < g; ++h) Xmix[h] = beams[h] * beams[h].adjoint();
    auto oracle = [&](const VecC& cand) -> double {
      std::vector<MatC> Xtry = Xmix;
      Xtry[g] = cand * cand.adjoint();
      const double s2 = rescale_factor(inst, sched, groups, Xtry, point.tau, g);
      return std::isfinite(s2) ? std::sqrt(std::max(1.0, s2)) : kInf;
    };
    beams[g] =
        extract_beamformer(point.X[g], oracle, rng, cfg.tolerance, 100);
  }

  std::vector<MatC> Xr(groups.count());
  for (int g = 0; g < groups.count(); ++g)
    Xr[g] = beams[g] * beams[g].adjoint();
  const double scale =
      rescale_factor(inst, sched, groups, Xr, point.tau, -1);
  if (scale < kInf && scale > 1.0) {
    const double s = std::sqrt(scale);
    for (auto& b : beams) b *= s;
    for (auto& X : Xr) X *= scale;
  }
  const TrueState ts = evaluate_true(inst, sched, groups, Xr, point.tau);

  SolutionReport rep;
  rep.total_energy = ts.energy;
  rep.durations = point.tau;
  rep.beamformers.resize(J);
  rep.rank_residuals.resize(J);
  for (int j = 0; j < J; ++j) {
    rep.beamformers[j] = beams[groups.group_of_slot[j]];
    rep.rank_residuals[j] = rank_residual(point.X[groups.group_of_slot[j]]);
  }
  rep.rates = ts.rates;
  rep.harvested = ts.harvested;
  rep.reflected_energy = Eigen::VectorXd::Zero(I);
  for (int i = 0; i < I; ++i)
    rep.reflected_energy[i] = ts.harvested.row(i).sum();
  rep.converged = trace.converged;
  rep.iterations = static_cast<int>(trace.iterations.size());
  rep.extraction_inflation =
      sdp_energy > 0 ? (ts.energy - sdp_energy) / sdp_energy : 0.0;
  for (const auto& it : trace.iterations)
    rep.objective_trace.push_back(it.surrogate_objective);
  return rep;
}

RunResult run(bool sq, const NetworkInstance& inst,
              const ScheduleFrame& sched, const AlgorithmConfig& cfg,
              const RunOptions& options) {
  inst.validate();
  if (sched.slot_count() != inst.slot_count ||
      sched.device_count() != inst.device_count)
    throw std::invalid_argument("run: schedule does not match instance");
  for (int i = 0; i < inst.device_count; ++i)
    if (inst.rate_targets[i] > 0 && sched.mti_slots(i).empty())
      throw std::invalid_argument("run: schedule misses an active device");

  const SlotGrouping groups = SlotGrouping::from(sched);

  bool any_target = false;
  for (double c : inst.rate_targets) any_target |= c > 0;
  if (!any_target) {
    // the zero solution is optimal outright
    RunResult rr;
    rr.report = zero_report(inst, sched, options);
    rr.trace.converged = true;
    rr.trace.approx_coeff = sq ? 0 : cfg.approx_coeff;
    rr.trace.iterations.push_back({0, 0, 0, 0, 0});
    return rr;
  }

  std::mt19937_64 rng(cfg.seed);
  for (int attempt = 0; attempt < cfg.reseed_attempts; ++attempt) {
    double scale = std::pow(4.0, attempt);
    if (attempt > 0) {
      std::uniform_real_distribution<double> U(0.75, 1.25);
      scale *= U(rng);
    }
    // grow the isotropic power until the start is rate feasible, then pull
    // it back near the boundary: oversized starts freeze the quadratic
    // track (its trust curvature scales with the snr variable)
    auto feasible_at = [&](double s) {
      return point_rate_feasible(
          inst, sched, groups, initial_point(inst, sched, groups, s, options),
          1e-9);
    };
    int grow = 0;
    while (!feasible_at(scale) && grow++ < 40) scale *= 4.0;
    if (!feasible_at(scale)) continue;
    double s_hi = scale, s_lo = scale;
    int shrink = 0;
    while (feasible_at(s_lo) && shrink++ < 60) {
      s_hi = s_lo;
      s_lo /= 4.0;
    }
    if (!feasible_at(s_lo))
      for (int k = 0; k < 50; ++k) {
        const double mid = std::sqrt(s_lo * s_hi);
        (feasible_at(mid) ? s_hi : s_lo) = mid;
      }
    scale = 1.3 * s_hi;
    ExpansionPoint pt = initial_point(inst, sched, groups, scale, options);
    if (!point_rate_feasible(inst, sched, groups, pt, 1e-9)) continue;
    LoopOutcome lo = sca_loop(sq, inst, sched, groups, pt, cfg, options);
    if (!lo.usable) continue;

    // audit the iterate against the true constraints before reporting
    const TrueState ts =
        evaluate_true(inst, sched, groups, lo.point.X, lo.point.tau);
    bool feasible = true;
    for (int i = 0; i < inst.device_count; ++i)
      if (ts.rates[i] < inst.rate_targets[i] - 1e-9) feasible = false;
    if (!feasible)
      restore_feasibility(inst, sched, groups, lo.point, cfg, options);

    RunResult rr;
    rr.trace = lo.trace;
    rr.report = build_report(inst, sched, groups, lo.point, lo.trace, cfg);
    return rr;
  }
  throw std::runtime_error(
      "run: no strictly feasible initial point after the configured attempts");
}

}  // namespace

double rank_residual(const MatC& X) {
  const double tr = X.trace().real();
  if (tr <= 0) return 0;
  Eigen::SelfAdjointEigenSolver<MatC> es(X, Eigen::EigenvaluesOnly);
  return (tr - es.eigenvalues().maxCoeff()) / tr;
}

VecC extract_beamformer(const MatC& X, const FeasibilityRescale& oracle,
                        std::mt19937_64& rng, double rank_tol, int draws) {
  const int n = static_cast<int>(X.rows());
  const double tr = X.trace().real();
  if (tr <= 0) return VecC::Zero(n);
  if (rank_residual(X) <= rank_tol) {
    const auto eig = conic::max_eigpair(X);
    return std::sqrt(std::max(eig.first, 0.0)) * eig.second;
  }
  // Gaussian randomization shaped by X
  Eigen::SelfAdjointEigenSolver<MatC> es(X);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const MatC shaper =
      es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
  std::normal_distribution<double> N(0, 1.0 / std::sqrt(2.0));
  double best_energy = kInf;
  VecC best;
  double closest_multiplier = kInf;
  for (int d = 0; d < draws; ++d) {
    VecC xi(n);
    for (int k = 0; k < n; ++k) xi[k] = Cplx(N(rng), N(rng));
    VecC cand = shaper * xi;
    if (cand.norm() < 1e-30) continue;
    cand *= std::sqrt(tr) / cand.norm();  // energy parity with Tr X
    const double s = oracle(cand);
    closest_multiplier = std::min(closest_multiplier, s);
    if (!std::isfinite(s)) continue;
    const double energy = (s * cand).squaredNorm();
    if (energy < best_energy) {
      best_energy = energy;
      best = s * cand;
    }
  }
  if (best.size() == 0)
    throw std::runtime_error(
        "extract_beamformer: no feasible candidate in " +
        std::to_string(draws) + " draws (closest multiplier " +
        std::to_string(closest_multiplier) + ")");
  // deterministic phase, as for the eigenpair route
  for (int k = 0; k < n; ++k)
    if (std::abs(best[k]) > 1e-12 * best.norm()) {
      best *= std::conj(best[k]) / std::abs(best[k]);
      break;
    }
  return best;
}

RunResult run_sq(const NetworkInstance& instance, const ScheduleFrame& schedule,
                 const AlgorithmConfig& config, const RunOptions& options) {
  return run(true, instance, schedule, config, options);
}

RunResult run_cqr(const NetworkInstance& instance,
                  const ScheduleFrame& schedule, const AlgorithmConfig& config,
                  const RunOptions& options) {
  return run(false, instance, schedule, config, options);
}

}  // namespace srbeam::sca
