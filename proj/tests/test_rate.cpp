#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oransim/rate.hpp"
#include "test_support.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace oransim;
using oransim::testing::tiny_config;

namespace {

// Independent bisection inverse of Q, accurate to ~1e-13 in x.
double inverse_q_bisect(double p) {
  double lo = 0.0;
  double hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("q_function known values") {
  CHECK(q_function(0.0) == doctest::Approx(0.5));
  // Classic two-sided 5% point.
  CHECK(q_function(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-9));
  CHECK(q_function(3.0) == doctest::Approx(1.349898031630095e-3).epsilon(1e-9));
  // Monotone decreasing.
  CHECK(q_function(1.0) > q_function(2.0));
  CHECK(q_function(-1.0) == doctest::Approx(1.0 - q_function(1.0)));
}

TEST_CASE("inverse_q round trips against Q") {
  for (double p : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.25, 0.4999, 0.5}) {
    const double x = inverse_q(p);
    CHECK(std::abs(q_function(x) - p) <= 1e-9);
  }
  CHECK(inverse_q(0.5) == 0.0);
}

TEST_CASE("inverse_q agrees with the bisection oracle") {
  for (double p : {1e-6, 3e-6, 1e-4, 1e-3, 0.05, 0.3, 0.45}) {
    const double want = inverse_q_bisect(p);
    CHECK(inverse_q(p) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("inverse_q rejects arguments outside (0, 0.5]") {
  CHECK_THROWS_AS(inverse_q(0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_q(-0.1), std::domain_error);
  CHECK_THROWS_AS(inverse_q(0.6), std::domain_error);
}

TEST_CASE("finite blocklength penalty frozen value") {
  // Q^-1(1e-3) / sqrt(1e-3 * 180e3) = 3.0902323... / sqrt(180).
  const double psi = fbl_penalty(1e-3, 1e-3, 180e3);
  CHECK(std::abs(psi - 0.23033) < 1e-4);
  // Larger blocklength shrinks the penalty.
  CHECK(fbl_penalty(1e-3, 1e-3, 720e3) < psi);
  CHECK(fbl_penalty(1e-5, 1e-3, 180e3) > psi);
}

TEST_CASE("shannon rate basics") {
  // SNR = 1 -> exactly beta bits/s.
  CHECK(shannon_rb_rate(180e3, 1e-14, 1.0, 1e-14) == doctest::Approx(180e3));
  CHECK(shannon_rb_rate(180e3, 0.0, 1.0, 1e-14) == 0.0);
  // Monotone in power.
  CHECK(shannon_rb_rate(180e3, 2.0, 1e-12, 1e-14) >
        shannon_rb_rate(180e3, 1.0, 1e-12, 1e-14));
}

TEST_CASE("fbl rate is shannon minus the penalty, clamped at zero") {
  const double psi = fbl_penalty(1e-3, 1e-3, 720e3);
  const double beta = 720e3;
  const double shannon = shannon_rb_rate(beta, 1.0, 1e-12, 1e-14);
  const double fbl = fbl_rb_rate(beta, 1.0, 1e-12, 1e-14, psi);
  CHECK(fbl < shannon);
  CHECK(fbl == doctest::Approx(shannon - beta * psi * std::log2(M_E)));
  // A power too weak to cover the penalty carries nothing.
  CHECK(fbl_rb_rate(beta, 1e-18, 1e-12, 1e-14, psi) == 0.0);
}

TEST_CASE("rb assignment cells start idle and round trip owners") {
  const SystemConfig cfg = tiny_config();
  const RBGrid grid = build_rb_grid(cfg);
  RbAssignment pi(grid, cfg.num_rus, cfg.total_users());

  for (int s = 0; s < kNumSlices; ++s) {
    for (int f = 0; f < grid.num_rbs[s]; ++f) {
      for (int t = 0; t < grid.num_ttis[s]; ++t) {
        CHECK(pi.is_idle(s, f, t));
      }
    }
  }

  pi.assign(kSliceUrllc, 0, 1, 1, 1);
  CHECK_FALSE(pi.is_idle(kSliceUrllc, 0, 1));
  CHECK(pi.ru_of(kSliceUrllc, 0, 1) == 1);
  CHECK(pi.user_of(kSliceUrllc, 0, 1) == 1);
  CHECK(pi.choice(kSliceUrllc, 0, 1) == pi.encode(1, 1));
  pi.clear(kSliceUrllc, 0, 1);
  CHECK(pi.is_idle(kSliceUrllc, 0, 1));
}

TEST_CASE("window counting uses 1-based inclusive TTI windows") {
  SystemConfig cfg = tiny_config();
  cfg.urllc_numerology = {720e3, 0.25e-3};
  cfg.latency_budget_s = 0.5e-3;
  cfg.frame_duration_s = 1e-3;
  REQUIRE(validate_config(cfg).empty());
  const RBGrid grid = build_rb_grid(cfg);
  REQUIRE(grid.num_ttis[kSliceUrllc] == 4);

  RbAssignment pi(grid, cfg.num_rus, cfg.total_users());
  pi.assign(kSliceUrllc, 0, 0, 0, 1);  // TTI 1, inside a 2-TTI window
  pi.assign(kSliceUrllc, 0, 1, 0, 1);  // TTI 2, inside
  pi.assign(kSliceUrllc, 0, 2, 0, 1);  // TTI 3, outside
  CHECK(pi.count_user_rbs_in_window(kSliceUrllc, 1, 2) == 2);
  CHECK(pi.count_user_rbs_in_window(kSliceUrllc, 1, 4) == 3);
  CHECK(pi.count_user_rbs_in_window(kSliceUrllc, 1, 0) == 0);
  CHECK(pi.count_user_rbs(kSliceUrllc, 1) == 3);
  CHECK(pi.count_user_rbs(kSliceUrllc, 0) == 0);
}

TEST_CASE("update_queue follows the pinned recursion") {
  CHECK(update_queue(100.0, 50.0, 30.0) == 120.0);
  CHECK(update_queue(100.0, 0.0, 300.0) == 0.0);
  CHECK(update_queue(0.0, 0.0, 0.0) == 0.0);
  // Service beyond backlog clamps at zero rather than going negative.
  CHECK(update_queue(10.0, 5.0, 100.0) == 0.0);
  // Pinned order: (q + credited) - served, not q + (credited - served).
  const double q = 0.1;
  const double c = 0.2;
  const double s = 0.3;
  CHECK(update_queue(q, c, s) == std::max((q + c) - s, 0.0));
}

TEST_CASE("latency report covers scheduled, unscheduled and idle users") {
  SystemConfig cfg = tiny_config();
  cfg.urllc_users = 2;
  REQUIRE(validate_config(cfg).empty());
  const RBGrid grid = build_rb_grid(cfg);
  RbAssignment pi(grid, cfg.num_rus, cfg.total_users());

  // User 1 (urllc index 0) served at slice-1 TTI 1; user 2 has demand but
  // no RB anywhere.
  pi.assign(kSliceUrllc, 0, 0, 0, 1);
  std::vector<uint8_t> has_demand(cfg.total_users(), 0);
  has_demand[1] = 1;
  has_demand[2] = 1;

  const LatencyReport rep = worst_urllc_latency(pi, grid, cfg, has_demand);
  REQUIRE(rep.urllc.size() == 2);
  CHECK(rep.urllc[0].status == LatencyStatus::kScheduled);
  CHECK(rep.urllc[0].latency_s == doctest::Approx(1e-3));
  CHECK(rep.urllc[1].status == LatencyStatus::kUnscheduled);
  CHECK(rep.any_unscheduled());
  CHECK(rep.worst() == doctest::Approx(1e-3));
}

TEST_CASE("latency uses the last assigned TTI across both slices") {
  const SystemConfig cfg = tiny_config();
  const RBGrid grid = build_rb_grid(cfg);
  RbAssignment pi(grid, cfg.num_rus, cfg.total_users());

  pi.assign(kSliceUrllc, 0, 0, 0, 1);  // slice 1, TTI 1 -> 1 ms
  pi.assign(kSliceEmbb, 0, 1, 0, 1);   // slice 0, TTI 2 -> 2 ms
  std::vector<uint8_t> has_demand(cfg.total_users(), 1);
  const LatencyReport rep = worst_urllc_latency(pi, grid, cfg, has_demand);
  CHECK(rep.urllc[0].latency_s == doctest::Approx(2e-3));
}

TEST_CASE("fixed processing constants shift the reported latency") {
  SystemConfig cfg = tiny_config();
  cfg.latency_constants.cu_processing_s = 0.1e-3;
  cfg.latency_constants.fronthaul_s = 0.05e-3;
  const RBGrid grid = build_rb_grid(cfg);
  RbAssignment pi(grid, cfg.num_rus, cfg.total_users());
  pi.assign(kSliceUrllc, 0, 0, 0, 1);
  std::vector<uint8_t> has_demand(cfg.total_users(), 1);
  const LatencyReport rep = worst_urllc_latency(pi, grid, cfg, has_demand);
  CHECK(rep.urllc[0].latency_s == doctest::Approx(1e-3 + 0.15e-3));
}

TEST_CASE("worst latency skips rbs granted to users without traffic") {
  const SystemConfig cfg = tiny_config();
  const RBGrid grid = build_rb_grid(cfg);
  RbAssignment pi(grid, cfg.num_rus, cfg.total_users());

  // The uRLLC user holds an RB but has no demand: an empty queue delivers
  // nothing, so no latency sample is produced.
  pi.assign(kSliceUrllc, 0, 1, 0, 1);
  std::vector<uint8_t> has_demand(cfg.total_users(), 0);
  const LatencyReport rep = worst_urllc_latency(pi, grid, cfg, has_demand);
  CHECK(rep.urllc[0].status == LatencyStatus::kScheduled);
  CHECK_FALSE(rep.urllc[0].had_demand);
  CHECK(std::isnan(rep.worst()));
}

TEST_CASE("utility combines normalized queues and worst latency") {
  const std::vector<double> queues = {2000.0, 4000.0};
  const std::vector<double> lats = {0.4e-3, 0.9e-3};
  const double omega = 0.5;
  const double q0 = 20000.0;
  const double tau0 = 1e-3;
  const double got = utility(queues, lats, omega, q0, tau0);
  const double want = omega * (2000.0 / q0 + 4000.0 / q0) +
                      (1.0 - omega) * (0.9e-3 / tau0);
  CHECK(got == doctest::Approx(want));
  // No latency samples: only the queue term remains.
  CHECK(utility(queues, {}, omega, q0, tau0) ==
        doctest::Approx(omega * (6000.0 / q0)));
}
