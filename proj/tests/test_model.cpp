#include <random>

#include "doctest.h"
#include "srbeam/model.hpp"

using namespace srbeam;

namespace {

VecC random_cvec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  VecC v(n);
  for (int i = 0; i < n; ++i) v[i] = Cplx(N(rng), N(rng));
  return v;
}

NetworkInstance tiny_instance() {
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
  inst.channels.bs_to_device = {VecC::Ones(1)};
  inst.channels.device_to_receiver = {Cplx(1, 0)};
  return inst;
}

}  // namespace

TEST_CASE("harvested energy closed forms") {
  MatC I2 = MatC::Identity(2, 2);
  CHECK(harvested_energy(0.0, 1.0, I2, I2) == doctest::Approx(0.0));
  CHECK(harvested_energy(1.0, 1.0, I2, I2) == doctest::Approx(2.0));

  // eta tau |h^H x|^2 equals the trace form on rank-one arguments
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 4;
    VecC h = random_cvec(n, rng), x = random_cvec(n, rng);
    const double tau = 0.25 + rep * 0.1, eta = 0.8;
    const double direct = eta * tau * std::norm(Cplx(h.adjoint() * x));
    const double traced =
        harvested_energy(eta, tau, x * x.adjoint(), h * h.adjoint());
    CHECK(traced == doctest::Approx(direct).epsilon(1e-12));
  }

  CHECK_THROWS_AS(harvested_energy(0.5, -1.0, I2, I2), std::invalid_argument);
  CHECK_THROWS_AS(harvested_energy(0.5, 1.0, I2, MatC::Identity(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("snr and rate closed forms") {
  MatC I1 = MatC::Identity(1, 1);
  CHECK(snr_at_receiver(1, Cplx(1, 0), I1, I1, 0.0, 1.0, 1.0) ==
        doctest::Approx(0.0));
  CHECK(snr_at_receiver(1, Cplx(1, 0), I1, I1, 1.0, 1.0, 1.0) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(snr_at_receiver(1, Cplx(1, 0), I1, I1, 1.0, 0.0, 1.0),
                  std::invalid_argument);

  // scalar reduction: K |g|^2 |h|^2 p eps / (tau sigma^2)
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.1, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double p = U(rng), eps = U(rng), tau = U(rng), s2 = U(rng);
    const Cplx g(U(rng), U(rng)), h(U(rng), U(rng));
    MatC X = MatC::Constant(1, 1, p);
    MatC H = MatC::Constant(1, 1, std::norm(h));
    const double expect = 5 * std::norm(g) * std::norm(h) * p * eps / (tau * s2);
    CHECK(snr_at_receiver(5, g, X, H, eps, tau, s2) ==
          doctest::Approx(expect).epsilon(1e-12));
  }

  CHECK(achievable_rate(1.0, 1, 0.0) == doctest::Approx(0.0));
  CHECK(achievable_rate(7.0, 7, 1.0) == doctest::Approx(1.0));
  CHECK(achievable_rate(2.0, 100, 3.0) == doctest::Approx(0.04));
  CHECK(achievable_rate(0.0, 10, 5.0) == doctest::Approx(0.0));

  // monotone in snr and in tau
  std::uniform_real_distribution<double> Us(0.0, 50.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double t1 = U(rng), t2 = t1 + U(rng);
    const double s1 = Us(rng), s2b = s1 + Us(rng);
    CHECK(achievable_rate(t1, 10, s1) <= achievable_rate(t1, 10, s2b) + 1e-15);
    CHECK(achievable_rate(t1, 10, s1) <= achievable_rate(t2, 10, s1) + 1e-15);
  }
}

TEST_CASE("total energy") {
  std::vector<MatC> zeros{MatC::Zero(2, 2), MatC::Zero(2, 2)};
  Eigen::VectorXd tau(2);
  tau << 1, 2;
  CHECK(total_energy(tau, zeros) == doctest::Approx(0.0));

  std::vector<MatC> xs{3.0 * MatC::Identity(1, 1), 0.5 * MatC::Identity(1, 1)};
  CHECK(total_energy(tau, xs) == doctest::Approx(4.0));

  std::mt19937_64 rng(11);
  VecC x = random_cvec(3, rng);
  std::vector<MatC> r1{x * x.adjoint()};
  Eigen::VectorXd t1(1);
  t1 << 1.7;
  CHECK(total_energy(t1, r1) ==
        doctest::Approx(1.7 * x.squaredNorm()).epsilon(1e-12));

  CHECK_THROWS_AS(total_energy(t1, xs), std::invalid_argument);
}

TEST_CASE("trace identity property") {
  std::mt19937_64 rng(19);
  for (int n = 1; n <= 8; ++n) {
    VecC h = random_cvec(n, rng), x = random_cvec(n, rng);
    const double lhs = std::norm(Cplx(h.adjoint() * x));
    const double rhs = ((x * x.adjoint()) * (h * h.adjoint())).trace().real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("schedule invariants") {
  ScheduleFrame tsr(4, {{0}, {1, 2, 3}});
  CHECK(tsr.role(0, 0) == SlotRole::mti);
  CHECK(tsr.role(0, 1) == SlotRole::ehs);
  CHECK(tsr.role(1, 2) == SlotRole::mti);
  CHECK(tsr.mti_owner(3) == 1);
  CHECK_THROWS_AS(ScheduleFrame(4, {{0, 1}, {1}}), std::invalid_argument);
  CHECK_THROWS_AS(ScheduleFrame(4, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(ScheduleFrame(2, {{3}}), std::invalid_argument);
}

TEST_CASE("validate_solution flags the right constraints") {
  NetworkInstance inst = tiny_instance();
  ScheduleFrame sched(2, {{1}});

  SolutionReport rep;
  rep.beamformers = {VecC::Zero(1), VecC::Zero(1)};
  rep.durations = Eigen::VectorXd::Zero(2);
  rep.rates = Eigen::VectorXd::Zero(1);
  rep.harvested = Eigen::MatrixXd::Zero(1, 2);
  rep.reflected_energy = Eigen::VectorXd::Zero(1);
  rep.rank_residuals = Eigen::VectorXd::Zero(2);

  SUBCASE("zero target, zero powers is feasible") {
    inst.rate_targets = {0.0};
    CHECK(validate_solution(inst, sched, rep).empty());
  }

  SUBCASE("all-zero solution violates exactly the C>0 devices") {
    auto v = validate_solution(inst, sched, rep);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ConstraintViolation::Kind::rate);
    CHECK(v[0].device == 0);
  }

  SUBCASE("frame overrun reported") {
    inst.rate_targets = {0.0};
    rep.durations << 6, 5;  // sums to 11 > T = 10
    auto v = validate_solution(inst, sched, rep);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ConstraintViolation::Kind::frame_budget);
    CHECK(v[0].amount == doctest::Approx(1.0));
  }

  SUBCASE("harvest above its cap reported") {
    inst.rate_targets = {0.0};
    rep.durations << 5, 5;
    rep.harvested(0, 0) = 1.0;  // cap is zero with zero beams
    auto v = validate_solution(inst, sched, rep);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ConstraintViolation::Kind::harvest_cap);
  }

  SUBCASE("a genuinely feasible point passes") {
    rep.durations << 5, 5;
    rep.beamformers = {VecC::Ones(1), VecC::Ones(1)};
    rep.harvested(0, 0) = harvested_energy(0.8, 5.0, MatC::Identity(1, 1),
                                           inst.channels.gram(0));
    auto v = validate_solution(inst, sched, rep);
    CHECK(v.empty());
  }
}

TEST_CASE("instance validation") {
  NetworkInstance inst = tiny_instance();
  CHECK_NOTHROW(inst.validate());
  inst.conversion_efficiency = {1.5};
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  inst = tiny_instance();
  inst.rate_targets = {-0.1};
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  inst = tiny_instance();
  inst.slot_count = 0;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
}
