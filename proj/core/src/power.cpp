#include "oransim/power.hpp"

#include <algorithm>
#include <cmath>

namespace oransim {
namespace {

constexpr double kLog2E = 1.4426950408889634;
constexpr double kLn2 = 0.6931471805599453;

// Marginal objective gain of RB j at power p: w*g / (ln2 * (N0 + p*g)).
double marginal(double weight, double gain, double noise_w, double p) {
  return weight * gain / (kLn2 * (noise_w + p * gain));
}

}  // namespace

const char* violation_kind_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kUrllcQuota:
      return "urllc_quota";
    case ViolationKind::kEmbbLeftover:
      return "embb_leftover";
    case ViolationKind::kLatency:
      return "latency";
    case ViolationKind::kUnscheduled:
      return "unscheduled";
    case ViolationKind::kPowerInfeasible:
      return "power_infeasible";
    case ViolationKind::kDemand:
      return "demand";
    case ViolationKind::kQueueCap:
      return "queue_cap";
  }
  return "unknown";
}

std::string describe(const Violation& v) {
  std::string s = violation_kind_name(v.kind);
  if (v.user >= 0) {
    s += " user=" + std::to_string(v.user);
  }
  if (v.ru >= 0) {
    s += " ru=" + std::to_string(v.ru);
  }
  if (v.tti >= 0) {
    s += " tick=" + std::to_string(v.tti);
  }
  if (v.shortfall != 0.0) {
    s += " shortfall=" + std::to_string(v.shortfall);
  }
  return s;
}

double min_power_for_packet(double packet_bits, double rb_bandwidth_hz,
                            double tti_s, double gain, double noise_w,
                            double snr_floor, double psi) {
  const double required_snr =
      std::exp2(packet_bits / (rb_bandwidth_hz * tti_s) + kLog2E * psi) - 1.0;
  return noise_w / gain * std::max(snr_floor, required_snr);
}

WaterfillResult solve_capped_waterfill(const std::vector<WaterfillRb>& rbs,
                                       double budget, double noise_w) {
  const size_t n = rbs.size();
  WaterfillResult res;
  res.power.assign(n, 0.0);
  if (budget <= 0.0 || n == 0) {
    return res;
  }

  // Effective per-RB power bounds: the box cap tightened by the power at
  // which the bits cap is reached (serving past the backlog is worthless).
  std::vector<double> ub(n, 0.0);
  for (size_t j = 0; j < n; ++j) {
    const WaterfillRb& rb = rbs[j];
    if (rb.gain <= 0.0 || rb.weight <= 0.0 || rb.power_cap <= 0.0 ||
        rb.bits_cap <= 0.0) {
      continue;
    }
    double cap = rb.power_cap;
    if (std::isfinite(rb.bits_cap)) {
      const double p_at_cap =
          noise_w / rb.gain * (std::exp2(rb.bits_cap / rb.weight) - 1.0);
      cap = std::min(cap, p_at_cap);
    }
    ub[j] = cap;
  }

  // Breakpoint sweep on the water level. Events: an RB enters the active set
  // when the level drops to its zero-power marginal and freezes at its upper
  // bound when the level reaches its capped marginal.
  struct Event {
    double level;
    size_t rb;
    bool entry;
  };
  std::vector<Event> events;
  events.reserve(2 * n);
  for (size_t j = 0; j < n; ++j) {
    if (ub[j] <= 0.0) {
      continue;
    }
    events.push_back({marginal(rbs[j].weight, rbs[j].gain, noise_w, 0.0), j,
                      true});
    events.push_back(
        {marginal(rbs[j].weight, rbs[j].gain, noise_w, ub[j]), j, false});
  }
  if (events.empty()) {
    return res;
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.level != b.level) {
      return a.level > b.level;
    }
    return a.entry > b.entry;  // process entries first on exact ties
  });

  // Running sums over the active set A: W = sum w/ln2, N = sum N0/g, and C =
  // total power frozen at caps. Inside one interval the budget identity is
  // budget = W/mu - N + C, so mu solves in closed form.
  double sum_w = 0.0;
  double sum_n = 0.0;
  double capped_power = 0.0;
  double mu_star = 0.0;
  bool binding = false;
  double upper_level = std::numeric_limits<double>::infinity();

  auto try_interval = [&](double lo) {
    if (sum_w <= 0.0) {
      return false;
    }
    const double mu = sum_w / (budget - capped_power + sum_n);
    if (mu <= 0.0) {
      return false;
    }
    if (mu <= upper_level && mu >= lo) {
      mu_star = mu;
      return true;
    }
    return false;
  };

  size_t i = 0;
  while (i < events.size() && !binding) {
    const double level = events[i].level;
    // Close the interval above this breakpoint.
    if (try_interval(level)) {
      binding = true;
      break;
    }
    // Apply all events at this level, then continue downward.
    while (i < events.size() && events[i].level == level) {
      const Event& ev = events[i];
      const double w = rbs[ev.rb].weight / kLn2;
      const double nn = noise_w / rbs[ev.rb].gain;
      if (ev.entry) {
        sum_w += w;
        sum_n += nn;
      } else {
        sum_w -= w;
        sum_n -= nn;
        capped_power += ub[ev.rb];
      }
      ++i;
    }
    upper_level = level;
  }
  if (!binding) {
    // Interval below the last breakpoint: either the budget binds at some
    // mu < min breakpoint (impossible once every RB is capped, sum_w == 0)
    // or every RB sits at its bound with budget to spare.
    binding = try_interval(0.0);
  }

  double spent = 0.0;
  if (binding) {
    res.water_level = mu_star;
    for (size_t j = 0; j < n; ++j) {
      if (ub[j] <= 0.0) {
        continue;
      }
      const double unconstrained =
          rbs[j].weight / (kLn2 * mu_star) - noise_w / rbs[j].gain;
      res.power[j] = std::clamp(unconstrained, 0.0, ub[j]);
      spent += res.power[j];
    }
    // Guard against accumulated rounding pushing past the budget.
    if (spent > budget && spent > 0.0) {
      const double scale = budget / spent;
      for (double& p : res.power) {
        p *= scale;
      }
      spent = budget;
    }
  } else {
    for (size_t j = 0; j < n; ++j) {
      res.power[j] = ub[j] > 0.0 ? ub[j] : 0.0;
      spent += res.power[j];
    }
  }
  res.spent = spent;

  double kkt = 0.0;
  for (size_t j = 0; j < n; ++j) {
    if (ub[j] <= 0.0) {
      continue;
    }
    const double m =
        marginal(rbs[j].weight, rbs[j].gain, noise_w, res.power[j]);
    const double rate_bits =
        rbs[j].weight * std::log2(1.0 + res.power[j] * rbs[j].gain / noise_w);
    res.objective_bits += std::min(rate_bits, rbs[j].bits_cap);
    if (!binding) {
      continue;  // level 0; every complementary condition is slack
    }
    double viol = 0.0;
    if (res.power[j] <= 0.0) {
      viol = std::max(0.0, m - mu_star);  // should not want power
    } else if (res.power[j] >= ub[j]) {
      viol = std::max(0.0, mu_star - m);  // should be happy at its cap
    } else {
      viol = std::abs(m - mu_star);
    }
    kkt = std::max(kkt, viol / mu_star);
  }
  res.kkt_residual = kkt;
  return res;
}

PowerSolveOutcome solve_power_tti(const std::vector<TtiRb>& rbs,
                                  const std::vector<double>& committed_ru_power,
                                  const QueueState& backlog,
                                  const SystemConfig& cfg,
                                  const RBGrid& grid) {
  PowerSolveOutcome out;
  out.rb_power.assign(rbs.size(), 0.0);

  const double psi_urllc[kNumSlices] = {
      fbl_penalty(cfg.error_prob, grid.tti_duration_s[0],
                  grid.rb_bandwidth_hz[0]),
      fbl_penalty(cfg.error_prob, grid.tti_duration_s[1],
                  grid.rb_bandwidth_hz[1]),
  };

  for (int m = 0; m < cfg.num_rus; ++m) {
    // Phase A: fixed per-packet powers for uRLLC-class RBs that still have
    // backlog to move. Tracking the remaining bits keeps surplus RBs silent.
    std::vector<double> remaining(cfg.total_users());
    for (int u = 0; u < cfg.total_users(); ++u) {
      remaining[u] = backlog.at(m, u);
    }
    double phase_a = 0.0;
    std::vector<size_t> embb_idx;
    for (size_t j = 0; j < rbs.size(); ++j) {
      const TtiRb& rb = rbs[j];
      if (rb.ru != m) {
        continue;
      }
      if (!rb.urllc_class) {
        embb_idx.push_back(j);
        continue;
      }
      if (remaining[rb.user] <= 0.0 || rb.gain <= 0.0) {
        continue;
      }
      const double p = min_power_for_packet(
          cfg.urllc_packet_bits, grid.rb_bandwidth_hz[rb.slice],
          grid.tti_duration_s[rb.slice], rb.gain, cfg.noise_power_w,
          cfg.urllc_snr_floor, psi_urllc[rb.slice]);
      out.rb_power[j] = p;
      phase_a += p;
      const double rate = fbl_rb_rate(grid.rb_bandwidth_hz[rb.slice],
                                      out.rb_power[j], rb.gain,
                                      cfg.noise_power_w, psi_urllc[rb.slice]);
      remaining[rb.user] = std::max(
          0.0, remaining[rb.user] - rate * grid.tti_duration_s[rb.slice]);
    }

    const double committed =
        m < static_cast<int>(committed_ru_power.size())
            ? committed_ru_power[m]
            : 0.0;
    if (phase_a + committed > cfg.max_power_w) {
      out.feasible = false;
      out.infeasible_rus.push_back(m);
      // This RU stays silent for the RBs being decided now.
      for (size_t j = 0; j < rbs.size(); ++j) {
        if (rbs[j].ru == m) {
          out.rb_power[j] = 0.0;
        }
      }
      continue;
    }

    // Phase B: water-fill the leftover budget across eMBB-class RBs.
    const double budget = cfg.max_power_w - committed - phase_a;
    if (embb_idx.empty() || budget <= 0.0) {
      continue;
    }
    std::vector<WaterfillRb> wf(embb_idx.size());
    for (size_t k = 0; k < embb_idx.size(); ++k) {
      const TtiRb& rb = rbs[embb_idx[k]];
      wf[k].weight =
          grid.rb_bandwidth_hz[rb.slice] * grid.tti_duration_s[rb.slice];
      wf[k].gain = rb.gain;
      wf[k].power_cap = cfg.max_power_w;
      const double cap_bits = backlog.at(m, rb.user);
      wf[k].bits_cap = cap_bits > 0.0
                           ? cap_bits
                           : 0.0;  // nothing to send -> stay silent
    }
    WaterfillResult wres =
        solve_capped_waterfill(wf, budget, cfg.noise_power_w);
    for (size_t k = 0; k < embb_idx.size(); ++k) {
      out.rb_power[embb_idx[k]] = wres.power[k];
    }
    out.kkt_residual = std::max(out.kkt_residual, wres.kkt_residual);
  }
  return out;
}

std::vector<Violation> frame_feasibility(
    const std::vector<double>& phy_bits_by_ru_user,
    const std::vector<double>& demand_bits_by_ru_user,
    const QueueState& end_queues, const SystemConfig& cfg) {
  std::vector<Violation> violations;
  const int users = cfg.total_users();
  for (int m = 0; m < cfg.num_rus; ++m) {
    for (int u = 0; u < users; ++u) {
      const size_t idx = static_cast<size_t>(m) * users + u;
      const double demand = demand_bits_by_ru_user[idx];
      const double served = phy_bits_by_ru_user[idx];
      // A sub-flow that drained its queue met its guarantee: service is
      // backlog-capped, so an empty buffer means everything offered was
      // carried even if the rate target exceeded the traffic that arrived.
      if (end_queues.at(m, u) <= 1e-9) {
        continue;
      }
      // Relative slack keeps exact-service cases (capped waterfill hitting
      // the demand bound) from flagging on rounding noise.
      if (demand > 0.0 && demand - served > 1e-9 * std::max(1.0, demand)) {
        violations.push_back({ViolationKind::kDemand, u, m, -1,
                              demand - served});
      }
    }
    const double total = end_queues.ru_total(m);
    if (total - cfg.queue_cap_bits >
        1e-9 * std::max(1.0, cfg.queue_cap_bits)) {
      violations.push_back({ViolationKind::kQueueCap, -1, m, -1,
                            total - cfg.queue_cap_bits});
    }
  }
  return violations;
}

}  // namespace oransim
