#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oransim/slicing.hpp"
#include "oransim/rng.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace oransim;
using oransim::testing::tiny_config;

namespace {

// Independent largest-remainder apportionment used as the oracle.
std::vector<int> lr_oracle(const std::vector<uint64_t>& weights,
                           int capacity) {
  const size_t n = weights.size();
  std::vector<int> shares(n, 0);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total <= 0.0 || capacity <= 0) {
    return shares;
  }
  std::vector<double> remainders(n);
  int assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    const double exact =
        static_cast<double>(weights[i]) / total * capacity;
    shares[i] = static_cast<int>(std::floor(exact));
    remainders[i] = exact - shares[i];
    assigned += shares[i];
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainders[a] > remainders[b];  // stable: ties keep lower index
  });
  for (int k = 0; k < capacity - assigned; ++k) {
    ++shares[order[static_cast<size_t>(k)]];
  }
  return shares;
}

}  // namespace

TEST_CASE("urllc capacity is rbs times the floor window") {
  SystemConfig cfg = tiny_config();
  cfg.urllc_numerology = {720e3, 0.25e-3};
  cfg.latency_budget_s = 0.5e-3;
  cfg.frame_duration_s = 1e-3;
  cfg.bandwidth_hz = 3.6e6;
  cfg.alpha = 0.6;
  REQUIRE(validate_config(cfg).empty());
  const RBGrid grid = build_rb_grid(cfg);
  // F2 = 2, window = floor(0.5/0.25) = 2 -> Omega = 4.
  CHECK(urllc_capacity(grid) == 4);
}

TEST_CASE("per-user capacity splits proportionally with largest remainder") {
  CHECK(per_user_capacity({1, 1}, 4) == std::vector<int>{2, 2});
  CHECK(per_user_capacity({3, 1}, 4) == std::vector<int>{3, 1});
  // 5 * 2/3 = 3.33, 5 * 1/3 = 1.67 -> floor 3/1, leftover goes to the
  // larger remainder.
  CHECK(per_user_capacity({2, 1}, 5) == std::vector<int>{3, 2});
  // Equal remainders: the tie goes to the lower index.
  CHECK(per_user_capacity({1, 1}, 3) == std::vector<int>{2, 1});
  // All-zero arrivals yield all-zero shares.
  CHECK(per_user_capacity({0, 0, 0}, 6) == std::vector<int>{0, 0, 0});
  CHECK(per_user_capacity({5}, 7) == std::vector<int>{7});
}

TEST_CASE("per-user capacity matches the oracle on random inputs") {
  Rng rng(404);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(6));
    const int capacity = static_cast<int>(rng.uniform_index(40));
    std::vector<uint64_t> weights(n);
    for (auto& w : weights) {
      w = rng.uniform_index(20);
    }
    const std::vector<int> got = per_user_capacity(weights, capacity);
    const std::vector<int> want = lr_oracle(weights, capacity);
    REQUIRE(got == want);

    // Shares are nonnegative and exhaust the capacity when any weight is
    // positive.
    const uint64_t total =
        std::accumulate(weights.begin(), weights.end(), uint64_t{0});
    const int assigned = std::accumulate(got.begin(), got.end(), 0);
    if (total > 0) {
      CHECK(assigned == capacity);
    } else {
      CHECK(assigned == 0);
    }
  }
}

TEST_CASE("quota bundle worked example") {
  // 8 uRLLC-slice window cells, 9 eMBB users, one uRLLC user with 4 packets
  // inside its share: e_em = floor((80 - 4) / 9) = 8 on the published
  // geometry (F2 * T2 = 80).
  SystemConfig cfg;
  cfg.num_rus = 4;
  cfg.embb_users = 9;
  cfg.urllc_users = 1;
  cfg.bandwidth_hz = 10e6;
  cfg.alpha = 0.2;  // slice 1: 2 MHz - 180 kHz -> 2 RBs of 720 kHz
  cfg.urllc_numerology = {720e3, 0.25e-3};
  cfg.frame_duration_s = 0.01;  // 40 mini-slot TTIs -> F2*T2 = 80
  cfg.latency_budget_s = 0.5e-3;
  REQUIRE(validate_config(cfg).empty());
  const RBGrid grid = build_rb_grid(cfg);
  REQUIRE(grid.cells(kSliceUrllc) == 80);
  REQUIRE(grid.urllc_window_ttis == 2);

  const SliceQuotas q = quotas({4}, grid, cfg);
  CHECK(q.capacity == 4);  // 2 RBs * 2-TTI window
  CHECK(q.per_user == std::vector<int>{4});
  CHECK(q.urllc_overflow == std::vector<int>{0});  // lambda <= Omega_u
  CHECK(q.embb_leftover == 8);  // floor((80 - min(4, 4)) / 9)
}

TEST_CASE("urllc overflow uses the ceil of the excess over the divisor") {
  SystemConfig cfg = tiny_config();
  cfg.urllc_overflow_divisor = 2;
  const RBGrid grid = build_rb_grid(cfg);
  REQUIRE(urllc_capacity(grid) == 1);

  // 4 packets, window share 1 -> excess 3 -> ceil(3/2) = 2.
  const SliceQuotas q = quotas({4}, grid, cfg);
  CHECK(q.per_user == std::vector<int>{1});
  CHECK(q.urllc_overflow == std::vector<int>{2});

  // No excess -> no overflow.
  const SliceQuotas q0 = quotas({1}, grid, cfg);
  CHECK(q0.urllc_overflow == std::vector<int>{0});
}

TEST_CASE("quota properties hold over random inputs") {
  // e_ur = 0 whenever lambda <= Omega_u pointwise, and
  // e_em * U_em <= F2 * T2, on random geometries and arrivals.
  Rng rng(1234);
  for (int trial = 0; trial < 10000; ++trial) {
    SystemConfig cfg = tiny_config();
    cfg.embb_users = 1 + static_cast<int>(rng.uniform_index(12));
    cfg.urllc_users = 1 + static_cast<int>(rng.uniform_index(4));
    cfg.urllc_overflow_divisor = 1 + static_cast<int>(rng.uniform_index(4));

    RBGrid grid = build_rb_grid(cfg);
    // Random slice-1 geometry within bounds the formulas accept.
    grid.num_rbs[kSliceUrllc] = 1 + static_cast<int>(rng.uniform_index(4));
    grid.num_ttis[kSliceUrllc] = 1 + static_cast<int>(rng.uniform_index(40));
    grid.urllc_window_ttis = static_cast<int>(
        rng.uniform_index(static_cast<uint64_t>(grid.num_ttis[kSliceUrllc]) + 1));

    std::vector<uint64_t> packets(cfg.urllc_users);
    for (auto& p : packets) {
      p = rng.uniform_index(12);
    }

    const SliceQuotas q = quotas(packets, grid, cfg);
    REQUIRE(q.per_user.size() == packets.size());
    REQUIRE(q.urllc_overflow.size() == packets.size());

    int share_sum = 0;
    for (size_t i = 0; i < packets.size(); ++i) {
      CHECK(q.per_user[i] >= 0);
      share_sum += q.per_user[i];
      if (packets[i] <= static_cast<uint64_t>(q.per_user[i])) {
        CHECK(q.urllc_overflow[i] == 0);
      } else {
        const int excess =
            static_cast<int>(packets[i]) - q.per_user[i];
        const int want =
            (excess + cfg.urllc_overflow_divisor - 1) /
            cfg.urllc_overflow_divisor;
        CHECK(q.urllc_overflow[i] == want);
      }
    }
    CHECK(share_sum <= q.capacity);

    CHECK(q.embb_leftover >= 0);
    CHECK(q.embb_leftover * cfg.embb_users <=
          grid.num_rbs[kSliceUrllc] * grid.num_ttis[kSliceUrllc]);
  }
}
