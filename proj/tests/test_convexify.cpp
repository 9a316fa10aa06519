#include <cmath>
#include <random>

#include "doctest.h"
#include "srbeam/conic/hermitian.hpp"
#include "srbeam/convexify.hpp"
#include "support.hpp"

using namespace srbeam;
using namespace srbeam::convexify;
using srbeam::testsupport::make_instance;
using srbeam::testsupport::make_point;
using srbeam::testsupport::round_robin;
using srbeam::testsupport::scalar_instance;

namespace {

// Hessian of the rate gap kc - tau ln(1 + theta/tau), the reference the
// upper bound must dominate.
Eigen::Matrix2d rate_gap_hessian(double theta, double tau) {
  const double s = tau + theta;
  Eigen::Matrix2d H;
  H(0, 0) = tau / (s * s);
  H(0, 1) = H(1, 0) = -theta / (s * s);
  H(1, 1) = theta * theta / (tau * s * s);
  return H;
}

int find_block(const conic::Program& p, const std::string& prefix) {
  for (int b = 0; b < p.block_count(); ++b)
    if (p.blocks()[b].tag.compare(0, prefix.size(), prefix) == 0) return b;
  return -1;
}

}  // namespace

TEST_CASE("dc surrogate: tangency and hand values") {
  CHECK(dc_surrogate(2, 3, 2, 3) == doctest::Approx(6.0));
  CHECK(dc_surrogate(2, 3, 3, 3) == doctest::Approx(9.25));
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> U(0.0, 5.0);
  for (int rep = 0; rep < 10000; ++rep) {
    const double th = U(rng), gh = U(rng), t = U(rng), g = U(rng);
    const double s = dc_surrogate(th, gh, t, g);
    CHECK(s >= t * g - 1e-10);
  }
  for (int rep = 0; rep < 100; ++rep) {
    const double th = U(rng), gh = U(rng);
    CHECK(dc_surrogate(th, gh, th, gh) ==
          doctest::Approx(th * gh).epsilon(1e-12));
  }
}

TEST_CASE("hessian upper bound: paper substitution and spectrum") {
  const Eigen::Matrix2d H = hessian_upper_bound(1.0, 1.0);
  CHECK(H(0, 0) == doctest::Approx(1.125));
  CHECK(H(0, 1) == doctest::Approx(-0.125));
  CHECK(H(1, 1) == doctest::Approx(1.125));

  for (double beta : {1.0, 2.0, 4.0})
    for (double tau_hat : {0.1, 1.0, 10.0}) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(
          hessian_upper_bound(tau_hat, beta));
      CHECK(es.eigenvalues()[0] ==
            doctest::Approx(beta / tau_hat).epsilon(1e-12));
      CHECK(es.eigenvalues()[1] ==
            doctest::Approx(1.25 * beta / tau_hat).epsilon(1e-12));
    }
  CHECK_THROWS_AS(hessian_upper_bound(0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(hessian_upper_bound(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("hessian upper bound dominates the rate-gap hessian on the domain") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double beta : {1.0, 2.0, 4.0})
    for (double tau_hat : {0.1, 1.0, 10.0}) {
      const Eigen::Matrix2d Hs = hessian_upper_bound(tau_hat, beta);
      double worst = 0;
      for (int rep = 0; rep < 10000; ++rep) {
        // theta >= 0 unbounded above, tau >= tau_hat / beta
        const double theta = tau_hat * std::pow(10.0, 8.0 * U(rng) - 2.0);
        const double tau =
            tau_hat / beta * std::pow(10.0, 3.0 * U(rng));
        Eigen::Matrix2d D = Hs - rate_gap_hessian(theta, tau);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(D,
                                                          Eigen::EigenvaluesOnly);
        worst = std::min(worst, es.eigenvalues().minCoeff());
      }
      CHECK(worst >= -1e-12);
    }
}

TEST_CASE("rate gap gradient at the unit point") {
  const Eigen::Vector2d g = rate_gap_gradient(1.0, 1.0);
  CHECK(g[0] == doctest::Approx(-0.5));
  CHECK(g[1] == doctest::Approx(-std::log(2.0) + 0.5));
}

TEST_CASE("sq rate surrogate majorizes the gap on the shrunken domain") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double beta = 2.0;
  for (int inst = 0; inst < 5; ++inst) {
    const double tau_hat = 0.2 + 3.0 * U(rng);
    const double theta_hat = 0.1 + 5.0 * U(rng);
    const double kc = tau_hat * std::log1p(theta_hat / tau_hat);
    CHECK(sq_rate_surrogate(kc, theta_hat, tau_hat, beta, theta_hat, tau_hat) ==
          doctest::Approx(0.0).epsilon(1e-12));
    for (int rep = 0; rep < 2000; ++rep) {
      const double theta = theta_hat * std::pow(10.0, 2.0 * U(rng) - 1.0);
      const double tau = tau_hat / beta * std::pow(10.0, U(rng));
      const double sur = sq_rate_surrogate(kc, theta_hat, tau_hat, beta, theta, tau);
      CHECK(sur >= rate_gap(kc, theta, tau) - 1e-9);
    }
  }
}

TEST_CASE("harvest cone is equivalent to its product inequality") {
  NetworkInstance inst = scalar_instance();
  ScheduleFrame sched(2, {{1}});
  ExpansionPoint pt = make_point(inst, sched);
  Assembled a = assemble_cqr(inst, sched, pt, SurrogateConfig{});
  const int hb = find_block(a.program, "harvest_i0_j0");
  REQUIRE(hb >= 0);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  int boundary = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(a.program.var_count());
    const double p = U(rng), tau = U(rng), phi = U(rng);
    x[a.layout.x_first[0]] = p;  // scalar covariance
    x[a.layout.tau_first + 0] = tau;
    x[a.layout.phi_var(0, 0)] = phi;
    const bool in_cone =
        conic::cone_violation(conic::Cone::soc,
                              a.program.block_values(hb, x)) <= 1e-10;
    const bool product = phi * phi <= 0.8 * tau * p + 1e-10;
    CHECK(in_cone == product);
    if (std::abs(phi * phi - 0.8 * tau * p) < 1e-3) ++boundary;
  }
  (void)boundary;

  // spec boundary example: eta=1, tau=1, Tr(XH)=4, phi=2 sits on the cone
  Eigen::VectorXd vals(3);
  vals << 2.5, 2.0, 1.5;
  CHECK(conic::cone_violation(conic::Cone::soc, vals) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cqr rate cone is equivalent to z tau >= KC") {
  NetworkInstance inst = scalar_instance();
  ScheduleFrame sched(2, {{1}});
  ExpansionPoint pt = make_point(inst, sched);
  Assembled a = assemble_cqr(inst, sched, pt, SurrogateConfig{});
  const int rb = find_block(a.program, "rate_soc_i0");
  REQUIRE(rb >= 0);
  const double kc = 10 * 0.5 * std::log(2.0);

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> U(0.0, 6.0);
  for (int rep = 0; rep < 2000; ++rep) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(a.program.var_count());
    const double z = U(rng), tau = U(rng);
    x[a.layout.z[0]] = z;
    x[a.layout.tau_first + 1] = tau;
    const bool in_cone =
        conic::cone_violation(conic::Cone::soc,
                              a.program.block_values(rb, x)) <= 1e-10;
    const bool product = z * tau >= kc - 1e-10;
    CHECK(in_cone == product);
  }

  // boundary: z = tau = 2 with KC = 4 gives ||[4, 0]|| = z + tau
  Eigen::VectorXd vals(3);
  vals << 4.0, 4.0, 0.0;
  CHECK(conic::cone_violation(conic::Cone::soc, vals) == doctest::Approx(0.0));
}

TEST_CASE("sq assembly structure for the scalar layout") {
  NetworkInstance inst = scalar_instance();
  ScheduleFrame sched(2, {{1}});
  ExpansionPoint pt = make_point(inst, sched);
  Assembled a = assemble_sq(inst, sched, pt, SurrogateConfig{});

  CHECK(a.program.count_blocks_tagged("psd_g") == 2);  // one per slot group
  for (const auto& blk : a.program.blocks())
    if (blk.kind == conic::Cone::psd) CHECK(blk.psd_order == 2);  // PSD(2N), N=1
  CHECK(a.program.count_blocks_tagged("harvest_") == 1);
  CHECK(a.program.count_blocks_tagged("rate_quad_") == 1);
  CHECK(a.program.count_blocks_tagged("domain_") == 1);
  CHECK(a.program.count_blocks_tagged("theta_lin_") == 1);
}

TEST_CASE("cqr assembly structure: chain contributes its auxiliaries") {
  NetworkInstance inst = scalar_instance();
  ScheduleFrame sched(2, {{1}});
  ExpansionPoint pt = make_point(inst, sched);
  SurrogateConfig cfg;
  cfg.approx_coeff = 4;
  Assembled a = assemble_cqr(inst, sched, pt, cfg);

  int zeta_vars = 0;
  for (int v = 0; v < a.program.var_count(); ++v)
    if (a.program.var_name(v).find("_zeta") != std::string::npos) ++zeta_vars;
  CHECK(zeta_vars == 8);
  int chain_soc = 0, chain_lin = 0;
  for (const auto& blk : a.program.blocks()) {
    if (blk.tag.compare(0, 8, "chain_i0") == 0) {
      if (blk.kind == conic::Cone::soc) ++chain_soc;
      if (blk.kind == conic::Cone::nonneg) ++chain_lin;
    }
  }
  CHECK(chain_soc == 7);
  CHECK(chain_lin == 2);  // affine combiner and the 1 + xi cap
  CHECK(a.program.count_blocks_tagged("rate_soc_") == 1);
  CHECK(a.program.count_blocks_tagged("xi_lin_") == 1);
}

TEST_CASE("tangency of the emitted surrogates at the expansion point") {
  NetworkInstance inst = make_instance(3, 2, 3, 53);
  ScheduleFrame sched = round_robin(2, 3);
  ExpansionPoint pt = make_point(inst, sched);

  for (bool sq : {true, false}) {
    Assembled a = sq ? assemble_sq(inst, sched, pt, SurrogateConfig{})
                     : assemble_cqr(inst, sched, pt, SurrogateConfig{});
    Eigen::VectorXd x = pack_point(a, inst, sched, pt);

    // objective at the point: sum tau gamma plus the penalty residue
    double expect = 0;
    for (int j = 0; j < inst.slot_count; ++j)
      expect += pt.tau[j] * pt.gamma[a.groups.group_of_slot[j]];
    for (int g = 0; g < a.groups.count(); ++g)
      expect += SurrogateConfig{}.penalty *
                (pt.X[g].trace().real() - conic::max_eigpair(pt.X[g]).first);
    CHECK(a.program.objective_value(x) ==
          doctest::Approx(expect).epsilon(1e-10));

    // the linearized bounds are exact at the point
    for (int i = 0; i < inst.device_count; ++i) {
      const int lb = find_block(
          a.program, (sq ? "theta_lin_i" : "xi_lin_i") + std::to_string(i));
      REQUIRE(lb >= 0);
      CHECK(a.program.block_values(lb, x)[0] ==
            doctest::Approx(0.0).epsilon(1e-10));
    }

    // every block is satisfied at the packed point (the point is feasible
    // for its own surrogate program when theta sits at its bound)
    CHECK(a.program.max_violation(x) <= 1e-8);
  }
}

TEST_CASE("sq rate quadratic carried into the program matches the evaluator") {
  NetworkInstance inst = scalar_instance();
  ScheduleFrame sched(2, {{1}});
  ExpansionPoint pt = make_point(inst, sched, 2.0);
  SurrogateConfig cfg;
  Assembled a = assemble_sq(inst, sched, pt, cfg);
  const int rb = find_block(a.program, "rate_quad_i0");
  REQUIRE(rb >= 0);

  const double kc = 10 * 0.5 * std::log(2.0);
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd x = pack_point(a, inst, sched, pt);
    const double theta = pt.theta[0] * U(rng);
    const double tau = pt.tau[1] * U(rng);
    x[a.layout.theta[0]] = theta;
    x[a.layout.tau_first + 1] = tau;
    const Eigen::VectorXd rows = a.program.block_values(rb, x);
    // rows encode (r, 1/2, L'd): feasible iff the quadratic surrogate <= 0
    const double sur =
        sq_rate_surrogate(kc, pt.theta[0], pt.tau[1], cfg.beta, theta, tau);
    const double quad = rows.tail(rows.size() - 2).squaredNorm() - rows[0];
    CHECK(quad == doctest::Approx(sur).epsilon(1e-9));
  }
}

TEST_CASE("assembly rejects bad expansion points and schedules") {
  NetworkInstance inst = scalar_instance();
  ScheduleFrame sched(2, {{1}});
  ExpansionPoint pt = make_point(inst, sched);
  SUBCASE("zero tau") {
    pt.tau[0] = 0;
    CHECK_THROWS_AS(assemble_sq(inst, sched, pt, SurrogateConfig{}),
                    std::invalid_argument);
  }
  SUBCASE("negative phi") {
    pt.phi(0, 0) = -1;
    CHECK_THROWS_AS(assemble_cqr(inst, sched, pt, SurrogateConfig{}),
                    std::invalid_argument);
  }
  SUBCASE("device with target but no MTI slot") {
    ScheduleFrame empty(2, {{}});
    CHECK_THROWS_AS(assemble_sq(inst, empty, make_point(inst, empty),
                                SurrogateConfig{}),
                    std::invalid_argument);
  }
}
