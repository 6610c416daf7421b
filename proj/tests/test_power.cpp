#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oransim/power.hpp"
#include "oransim/rng.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace oransim;
using oransim::testing::tiny_config;

namespace {

constexpr double kNoise = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wf_objective(const std::vector<WaterfillRb>& rbs,
                    const std::vector<double>& power, double noise_w) {
  double acc = 0.0;
  for (size_t j = 0; j < rbs.size(); ++j) {
    const double bits =
        rbs[j].weight * std::log2(1.0 + power[j] * rbs[j].gain / noise_w);
    acc += std::min(bits, rbs[j].bits_cap);
  }
  return acc;
}

// Water-level grid oracle: sweep mu over a log grid, build the clamped
// closed-form allocation at each level, keep the best budget-feasible one.
// The all-at-bound allocation covers the non-binding-budget case.
double wf_grid_oracle(const std::vector<WaterfillRb>& rbs, double budget,
                      double noise_w, int points = 20000) {
  std::vector<double> ub(rbs.size(), 0.0);
  for (size_t j = 0; j < rbs.size(); ++j) {
    const WaterfillRb& rb = rbs[j];
    if (rb.gain <= 0.0 || rb.weight <= 0.0 || rb.power_cap <= 0.0 ||
        rb.bits_cap <= 0.0) {
      continue;
    }
    double cap = rb.power_cap;
    if (std::isfinite(rb.bits_cap)) {
      cap = std::min(cap, noise_w / rb.gain *
                              (std::exp2(rb.bits_cap / rb.weight) - 1.0));
    }
    ub[j] = cap;
  }

  double best = 0.0;
  std::vector<double> p(rbs.size(), 0.0);
  auto consider = [&](double mu) {
    double spent = 0.0;
    for (size_t j = 0; j < rbs.size(); ++j) {
      if (ub[j] <= 0.0) {
        p[j] = 0.0;
        continue;
      }
      const double raw =
          mu > 0.0
              ? rbs[j].weight / (std::log(2.0) * mu) - noise_w / rbs[j].gain
              : ub[j];
      p[j] = std::clamp(raw, 0.0, ub[j]);
      spent += p[j];
    }
    if (spent <= budget * (1.0 + 1e-12)) {
      best = std::max(best, wf_objective(rbs, p, noise_w));
    }
  };

  consider(0.0);  // budget slack, everything at its bound
  const double mu_lo = 1e-2;
  const double mu_hi = 1e18;
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    consider(mu_lo * std::pow(mu_hi / mu_lo, t));
  }
  return best;
}

}  // namespace

TEST_CASE("min_power_for_packet delivers exactly the packet when unclamped") {
  const double beta = 720e3;
  const double delta = 0.25e-3;
  const double z = 256.0;
  const double psi = fbl_penalty(1e-3, delta, beta);
  const double gain = 1e-12;
  // Weak enough channel that the required SNR dominates the floor.
  const double p = min_power_for_packet(z, beta, delta, gain, kNoise, 1.0, psi);
  const double rate = fbl_rb_rate(beta, p, gain, kNoise, psi);
  CHECK(rate * delta == doctest::Approx(z).epsilon(1e-9));
}

TEST_CASE("min_power_for_packet respects the snr floor") {
  const double beta = 720e3;
  const double delta = 0.25e-3;
  const double psi = fbl_penalty(1e-3, delta, beta);
  const double gain = 1e-7;  // excellent channel, tiny packet
  const double floor = 3.1622776601683795;
  const double p =
      min_power_for_packet(1.0, beta, delta, gain, kNoise, floor, psi);
  CHECK(p == doctest::Approx(kNoise / gain * floor));
  CHECK(p * gain / kNoise >= floor - 1e-12);
}

TEST_CASE("min_power_for_packet matches a bisection oracle") {
  Rng rng(808);
  const double beta = 720e3;
  const double delta = 0.25e-3;
  const double psi = fbl_penalty(1e-3, delta, beta);
  for (int trial = 0; trial < 200; ++trial) {
    const double gain = std::pow(10.0, rng.uniform(-13.0, -9.0));
    const double z = rng.uniform(64.0, 2048.0);
    const double floor = rng.uniform(1.0, 10.0);
    const double got =
        min_power_for_packet(z, beta, delta, gain, kNoise, floor, psi);

    // Bisect the smallest p such that the fbl rate carries z bits in delta.
    double lo = 0.0;
    double hi = 1e6;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (fbl_rb_rate(beta, mid, gain, kNoise, psi) * delta >= z) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const double want = std::max(hi, kNoise / gain * floor);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("waterfill on one rb spends the whole budget up to its cap") {
  std::vector<WaterfillRb> rbs(1);
  rbs[0] = {180.0, 1e-11, 10.0, kInf};
  const WaterfillResult res = solve_capped_waterfill(rbs, 2.0, kNoise);
  CHECK(res.power[0] == doctest::Approx(2.0));
  CHECK(res.objective_bits ==
        doctest::Approx(180.0 * std::log2(1.0 + 2.0 * 1e-11 / kNoise)));

  // Budget beyond the cap: stops at the cap, water level not binding.
  const WaterfillResult capped = solve_capped_waterfill(rbs, 50.0, kNoise);
  CHECK(capped.power[0] == doctest::Approx(10.0));
  CHECK(capped.water_level == 0.0);
}

TEST_CASE("waterfill equalizes marginals across uncapped rbs") {
  std::vector<WaterfillRb> rbs(3);
  rbs[0] = {180.0, 2e-12, 1e9, kInf};
  rbs[1] = {180.0, 8e-12, 1e9, kInf};
  rbs[2] = {180.0, 5e-13, 1e9, kInf};
  const WaterfillResult res = solve_capped_waterfill(rbs, 5.0, kNoise);
  CHECK(res.kkt_residual < 1e-6);
  CHECK(res.spent == doctest::Approx(5.0));
  // Equal weights: p_j + N0/g_j is the same constant for active RBs.
  const double l0 = res.power[0] + kNoise / rbs[0].gain;
  const double l1 = res.power[1] + kNoise / rbs[1].gain;
  CHECK(l0 == doctest::Approx(l1).epsilon(1e-9));
}

TEST_CASE("waterfill ignores degenerate rbs") {
  std::vector<WaterfillRb> rbs(3);
  rbs[0] = {180.0, 0.0, 10.0, kInf};    // zero gain
  rbs[1] = {0.0, 1e-12, 10.0, kInf};    // zero weight
  rbs[2] = {180.0, 1e-12, 10.0, 0.0};   // nothing to send
  const WaterfillResult res = solve_capped_waterfill(rbs, 5.0, kNoise);
  CHECK(res.power == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(res.objective_bits == 0.0);
}

TEST_CASE("waterfill matches the grid oracle on random instances") {
  Rng rng(31337);
  for (int trial = 0; trial < 150; ++trial) {
    const size_t n = 1 + rng.uniform_index(6);
    std::vector<WaterfillRb> rbs(n);
    for (auto& rb : rbs) {
      rb.weight = 180.0;
      rb.gain = std::pow(10.0, rng.uniform(-13.0, -9.5));
      rb.power_cap = rng.uniform(0.5, 40.0);
      rb.bits_cap =
          rng.uniform() < 0.3 ? kInf : rng.uniform(50.0, 4000.0);
    }
    const double budget = rng.uniform(0.2, 40.0);
    const WaterfillResult res = solve_capped_waterfill(rbs, budget, kNoise);

    double spent = 0.0;
    for (size_t j = 0; j < n; ++j) {
      CHECK(res.power[j] >= 0.0);
      CHECK(res.power[j] <= rbs[j].power_cap + 1e-9);
      spent += res.power[j];
    }
    CHECK(spent <= budget * (1.0 + 1e-9));
    // The reported objective must match what the powers actually earn.
    CHECK(res.objective_bits ==
          doctest::Approx(wf_objective(rbs, res.power, kNoise)));

    const double oracle = wf_grid_oracle(rbs, budget, kNoise);
    CHECK(res.objective_bits >=
          oracle - 1e-4 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("solve_power_tti gives urllc rbs their fixed minimum power") {
  SystemConfig cfg = tiny_config();
  const RBGrid grid = build_rb_grid(cfg);
  QueueState backlog(cfg.num_rus, cfg.total_users());
  backlog.at(0, 1) = 256.0;  // one packet pending for the uRLLC user

  std::vector<TtiRb> rbs(2);
  rbs[0] = {kSliceUrllc, 0, 0, 1, true, 1e-11};
  rbs[1] = {kSliceEmbb, 0, 0, 0, false, 1e-11};
  backlog.at(0, 0) = 5000.0;

  const std::vector<double> committed(cfg.num_rus, 0.0);
  const PowerSolveOutcome out =
      solve_power_tti(rbs, committed, backlog, cfg, grid);
  REQUIRE(out.feasible);

  const double psi = fbl_penalty(cfg.error_prob, grid.tti_duration_s[1],
                                 grid.rb_bandwidth_hz[1]);
  const double want = min_power_for_packet(
      cfg.urllc_packet_bits, grid.rb_bandwidth_hz[1], grid.tti_duration_s[1],
      1e-11, cfg.noise_power_w, cfg.urllc_snr_floor, psi);
  CHECK(out.rb_power[0] == doctest::Approx(want));
  // The eMBB RB got the leftover budget (its backlog cap may bind first).
  CHECK(out.rb_power[1] > 0.0);
  CHECK(out.rb_power[0] + out.rb_power[1] <= cfg.max_power_w + 1e-9);
}

TEST_CASE("urllc rbs beyond the backlog stay silent") {
  SystemConfig cfg = tiny_config();
  const RBGrid grid = build_rb_grid(cfg);
  QueueState backlog(cfg.num_rus, cfg.total_users());
  backlog.at(0, 1) = 256.0;  // one packet: the second RB has nothing left

  std::vector<TtiRb> rbs(2);
  rbs[0] = {kSliceUrllc, 0, 0, 1, true, 1e-11};
  rbs[1] = {kSliceUrllc, 0, 0, 1, true, 2e-11};
  const std::vector<double> committed(cfg.num_rus, 0.0);
  const PowerSolveOutcome out =
      solve_power_tti(rbs, committed, backlog, cfg, grid);
  CHECK(out.rb_power[0] > 0.0);
  CHECK(out.rb_power[1] == 0.0);
}

TEST_CASE("phase-a overrun marks the ru infeasible and silences it") {
  SystemConfig cfg = tiny_config();
  cfg.max_power_w = 1e-3;  // tiny budget
  const RBGrid grid = build_rb_grid(cfg);
  QueueState backlog(cfg.num_rus, cfg.total_users());
  backlog.at(0, 1) = 256.0;
  backlog.at(0, 0) = 5000.0;

  std::vector<TtiRb> rbs(2);
  rbs[0] = {kSliceUrllc, 0, 0, 1, true, 1e-13};  // terrible channel
  rbs[1] = {kSliceEmbb, 0, 0, 0, false, 1e-10};
  const std::vector<double> committed(cfg.num_rus, 0.0);
  const PowerSolveOutcome out =
      solve_power_tti(rbs, committed, backlog, cfg, grid);
  CHECK_FALSE(out.feasible);
  REQUIRE(out.infeasible_rus.size() == 1);
  CHECK(out.infeasible_rus[0] == 0);
  CHECK(out.rb_power[0] == 0.0);
  CHECK(out.rb_power[1] == 0.0);
}

TEST_CASE("committed power shrinks the phase-b budget") {
  SystemConfig cfg = tiny_config();
  const RBGrid grid = build_rb_grid(cfg);
  QueueState backlog(cfg.num_rus, cfg.total_users());
  backlog.at(0, 0) = 1e9;  // effectively uncapped

  std::vector<TtiRb> rbs(1);
  rbs[0] = {kSliceEmbb, 0, 0, 0, false, 1e-11};

  std::vector<double> committed(cfg.num_rus, 0.0);
  const PowerSolveOutcome free_run =
      solve_power_tti(rbs, committed, backlog, cfg, grid);
  committed[0] = 30.0;
  const PowerSolveOutcome tight =
      solve_power_tti(rbs, committed, backlog, cfg, grid);
  CHECK(free_run.rb_power[0] == doctest::Approx(cfg.max_power_w));
  CHECK(tight.rb_power[0] == doctest::Approx(cfg.max_power_w - 30.0));
}

TEST_CASE("committed power alone can make phase a infeasible") {
  SystemConfig cfg = tiny_config();
  const RBGrid grid = build_rb_grid(cfg);
  QueueState backlog(cfg.num_rus, cfg.total_users());
  backlog.at(0, 1) = 256.0;

  std::vector<TtiRb> rbs(1);
  rbs[0] = {kSliceUrllc, 0, 0, 1, true, 1e-11};
  std::vector<double> committed(cfg.num_rus, 0.0);
  committed[0] = cfg.max_power_w;  // coarse slice already spent everything
  const PowerSolveOutcome out =
      solve_power_tti(rbs, committed, backlog, cfg, grid);
  CHECK_FALSE(out.feasible);
  CHECK(out.rb_power[0] == 0.0);
}

TEST_CASE("frame feasibility flags shortfalls only with backlog left") {
  SystemConfig cfg = tiny_config();
  const int flows = cfg.num_rus * cfg.total_users();
  std::vector<double> demand(flows, 0.0);
  std::vector<double> served(flows, 0.0);
  QueueState end(cfg.num_rus, cfg.total_users());

  // Shortfall with backlog remaining: a violation.
  demand[0] = 100.0;
  served[0] = 99.0;
  end.at(0, 0) = 1.0;
  std::vector<Violation> v = frame_feasibility(served, demand, end, cfg);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::kDemand);
  CHECK(v[0].user == 0);
  CHECK(v[0].ru == 0);
  CHECK(v[0].shortfall == doctest::Approx(1.0));

  // Same shortfall but the queue drained: everything offered was carried.
  end.at(0, 0) = 0.0;
  v = frame_feasibility(served, demand, end, cfg);
  CHECK(v.empty());

  // Exact service never flags.
  served[0] = 100.0;
  end.at(0, 0) = 50.0;
  v = frame_feasibility(served, demand, end, cfg);
  CHECK(v.empty());
}

TEST_CASE("frame feasibility flags per-ru queue cap overruns") {
  SystemConfig cfg = tiny_config();
  const int flows = cfg.num_rus * cfg.total_users();
  const std::vector<double> zeros(flows, 0.0);
  QueueState end(cfg.num_rus, cfg.total_users());

  end.at(1, 0) = cfg.queue_cap_bits;  // exactly at the cap: fine
  std::vector<Violation> v = frame_feasibility(zeros, zeros, end, cfg);
  CHECK(v.empty());

  end.at(1, 1) = 1.0;  // now the RU total exceeds the cap
  v = frame_feasibility(zeros, zeros, end, cfg);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::kQueueCap);
  CHECK(v[0].ru == 1);
}
