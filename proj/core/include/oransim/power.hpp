#pragma once

#include <limits>
#include <vector>

#include "oransim/config.hpp"
#include "oransim/rate.hpp"
#include "oransim/violations.hpp"

namespace oransim {

// Smallest power that delivers `packet_bits` over one RB within one TTI
// under the short-packet rate model while honoring the SNR floor:
// p = (noise/gain) * max(snr_floor, 2^(Z/(beta*delta) + log2(e)*psi) - 1).
double min_power_for_packet(double packet_bits, double rb_bandwidth_hz,
                            double tti_s, double gain, double noise_w,
                            double snr_floor, double psi);

// One entry of the water-filling problem.
struct WaterfillRb {
  double weight = 0.0;     // bits per log2 unit (beta * delta of its slice)
  double gain = 0.0;
  double power_cap = 0.0;  // box upper bound (per-RB max power)
  double bits_cap = std::numeric_limits<double>::infinity();  // backlog cap
};

struct WaterfillResult {
  std::vector<double> power;
  double objective_bits = 0.0;  // sum of min(weight*log2(1+p g/N0), bits_cap)
  double water_level = 0.0;     // 0 when the budget is not binding
  double kkt_residual = 0.0;    // max relative stationarity violation
  double spent = 0.0;
};

// Exact maximizer of sum_j min(w_j*log2(1+p_j g_j/noise), c_j) subject to
// sum p_j <= budget, 0 <= p_j <= cap_j. Bits caps convert to power caps, and
// the common water level comes from a closed-form solve on the sorted
// marginal breakpoints; nothing here iterates to convergence.
WaterfillResult solve_capped_waterfill(const std::vector<WaterfillRb>& rbs,
                                       double budget, double noise_w);

// One RB active in the TTI being solved.
struct TtiRb {
  int slice = 0;
  int f = 0;
  int ru = 0;
  int user = 0;
  bool urllc_class = false;
  double gain = 0.0;
};

struct PowerSolveOutcome {
  bool feasible = true;
  std::vector<double> rb_power;    // parallel to the input RB list
  std::vector<int> infeasible_rus;  // RUs whose Phase-A sum overran
  double kkt_residual = 0.0;        // worst across per-RU Phase-B solves
};

// Two-phase per-TTI power allocation. Phase A gives every uRLLC-class RB
// with remaining backlog its fixed per-packet minimum power; if an RU's
// Phase-A total plus externally committed power exceeds the budget, that RU
// is marked infeasible and all its listed RBs stay silent this TTI. Phase B
// water-fills each feasible RU's remaining budget across its eMBB-class RBs
// with per-RB caps at the owning sub-flow's remaining backlog.
PowerSolveOutcome solve_power_tti(const std::vector<TtiRb>& rbs,
                                  const std::vector<double>& committed_ru_power,
                                  const QueueState& backlog,
                                  const SystemConfig& cfg,
                                  const RBGrid& grid);

// Frame-end feasibility: per-(ru,user) PHY served bits against the frame
// demand phi*lambda*Z (strict, no tolerance) and per-RU queue totals against
// the cap (non-strict at equality).
std::vector<Violation> frame_feasibility(
    const std::vector<double>& phy_bits_by_ru_user,
    const std::vector<double>& demand_bits_by_ru_user,
    const QueueState& end_queues, const SystemConfig& cfg);

}  // namespace oransim
