#include "oransim/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "oransim/ddqn.hpp"
#include "oransim/power.hpp"
#include "oransim/rng.hpp"
#include "oransim/slicing.hpp"

namespace oransim {

const char* scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::kProposed:
      return "proposed";
    case SchemeId::kUniformPhi:
      return "uniform_phi";
    case SchemeId::kFixedNumerology:
      return "fixed_numerology";
    case SchemeId::kRelaxedUpperBound:
      return "relaxed_upper_bound";
    case SchemeId::kBruteForce:
      return "brute_force";
  }
  return "unknown";
}

std::optional<SchemeId> parse_scheme(std::string_view name) {
  for (SchemeId id : kAllSchemes) {
    if (name == scheme_name(id)) {
      return id;
    }
  }
  return std::nullopt;
}

SchemePlan plan_scheme(const SystemConfig& cfg, SchemeId id) {
  SchemePlan plan;
  plan.cfg = cfg;
  if (id == SchemeId::kUniformPhi) {
    plan.behavior.uniform_phi = true;
  }
  if (id == SchemeId::kFixedNumerology) {
    plan.cfg.urllc_numerology = plan.cfg.embb_numerology;
    plan.cfg.allow_zero_urllc_window = true;
  }
  return plan;
}

namespace {

// Projection onto {p >= 0, sum p <= budget}: clamp, then if the simplex cap
// binds, subtract the sorted-threshold shift (Euclidean projection).
void project_budget(std::vector<double>& p, double budget) {
  double sum = 0.0;
  for (double& x : p) {
    x = std::max(x, 0.0);
    sum += x;
  }
  if (sum <= budget) {
    return;
  }
  std::vector<double> sorted(p);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (size_t k = 0; k < sorted.size(); ++k) {
    cumsum += sorted[k];
    const double cand = (cumsum - budget) / static_cast<double>(k + 1);
    if (cand < sorted[k]) {
      theta = cand;
    } else {
      break;
    }
  }
  for (double& x : p) {
    x = std::max(x - theta, 0.0);
  }
}

double sum_rate(const std::vector<double>& w, const std::vector<double>& g,
                double noise_w, const std::vector<double>& p) {
  double acc = 0.0;
  for (size_t j = 0; j < p.size(); ++j) {
    acc += w[j] * std::log2(1.0 + p[j] * g[j] / noise_w);
  }
  return acc;
}

}  // namespace

PgResult pg_sum_rate(const std::vector<double>& weights,
                     const std::vector<double>& gains, double noise_w,
                     double budget, double tol, int max_iters) {
  const size_t n = weights.size();
  PgResult res;
  res.power.assign(n, 0.0);
  if (n == 0 || budget <= 0.0) {
    res.converged = true;
    return res;
  }
  // Start from the equal split; every iterate stays feasible.
  std::vector<double> p(n, budget / static_cast<double>(n));
  std::vector<double> grad(n, 0.0);
  std::vector<double> trial(n, 0.0);
  double fval = sum_rate(weights, gains, noise_w, p);
  constexpr double kLn2 = 0.6931471805599453;
  const double move_tol = tol * std::max(1.0, budget);

  int it = 0;
  while (it < max_iters && !res.converged) {
    ++it;
    for (size_t j = 0; j < n; ++j) {
      const double snr = p[j] * gains[j] / noise_w;
      grad[j] = weights[j] * (gains[j] / noise_w) / (kLn2 * (1.0 + snr));
    }
    double step = budget;
    bool accepted = false;
    for (int bt = 0; bt < 60 && !accepted; ++bt) {
      for (size_t j = 0; j < n; ++j) {
        trial[j] = p[j] + step * grad[j];
      }
      project_budget(trial, budget);
      double inner = 0.0;
      double move = 0.0;
      for (size_t j = 0; j < n; ++j) {
        const double d = trial[j] - p[j];
        inner += grad[j] * d;
        move += std::abs(d);
      }
      const double ftrial = sum_rate(weights, gains, noise_w, trial);
      if (ftrial >= fval + 1e-4 * inner) {
        p.swap(trial);
        fval = ftrial;
        accepted = true;
        res.converged = move <= move_tol;
      } else {
        step *= 0.5;
      }
    }
    // No acceptable step at any length means a stationary point.
    res.converged = res.converged || !accepted;
  }
  res.power = std::move(p);
  res.objective = fval;
  res.iterations = it;
  return res;
}

namespace {

// Exact per-tick eMBB capacity bound: every active cell handed to its best
// eMBB pair, one pooled budget of num_rus * max_power. PG per the relaxation
// recipe, cross-checked against the closed-form water-filling optimum; the
// larger of the two keeps the bound sound even if PG stops early.
struct TickCapacity {
  double bits = 0.0;
  bool converged = true;
  int iterations = 0;
};

TickCapacity relaxed_tick_capacity(const SystemConfig& cfg,
                                   const RBGrid& grid,
                                   const ChannelGains& gains, int tick) {
  TickCapacity cap;
  if (cfg.embb_users == 0) {
    return cap;
  }
  std::vector<double> weights;
  std::vector<double> cell_gain;
  for (int s = 0; s < kNumSlices; ++s) {
    const int t0 = tick / grid.ticks_per_tti[s];
    for (int f = 0; f < grid.num_rbs[s]; ++f) {
      double best = 0.0;
      for (int m = 0; m < cfg.num_rus; ++m) {
        for (int u = 0; u < cfg.embb_users; ++u) {
          best = std::max(best, gains.at(m, u, s, f, t0));
        }
      }
      weights.push_back(grid.rb_bandwidth_hz[s] * grid.tick_duration_s);
      cell_gain.push_back(best);
    }
  }
  if (weights.empty()) {
    return cap;
  }
  const double budget = cfg.num_rus * cfg.max_power_w;
  PgResult pg = pg_sum_rate(weights, cell_gain, cfg.noise_power_w, budget);
  cap.converged = pg.converged;
  cap.iterations = pg.iterations;

  std::vector<WaterfillRb> rbs(weights.size());
  for (size_t j = 0; j < weights.size(); ++j) {
    rbs[j].weight = weights[j];
    rbs[j].gain = cell_gain[j];
    rbs[j].power_cap = budget;
  }
  WaterfillResult wf =
      solve_capped_waterfill(rbs, budget, cfg.noise_power_w);
  cap.bits = std::max(pg.objective, wf.objective_bits);
  return cap;
}

double min_achievable_latency(const SystemConfig& cfg, const RBGrid& grid) {
  double delta = std::numeric_limits<double>::infinity();
  for (int s = 0; s < kNumSlices; ++s) {
    if (grid.num_rbs[s] > 0) {
      delta = std::min(delta, grid.tti_duration_s[s]);
    }
  }
  if (!std::isfinite(delta)) {
    delta = grid.tti_duration_s[kSliceUrllc];
  }
  return delta + cfg.latency_constants.total();
}

}  // namespace

RelaxedFrameBound relaxed_frame_bound(const SystemConfig& cfg,
                                      const RBGrid& grid,
                                      const ChannelGains& gains,
                                      const TrafficArrivals& arrivals) {
  RelaxedFrameBound bound;
  const int ticks = grid.ticks_per_frame;
  const bool credit_at_start = cfg.crediting == "frame_start";

  double total_embb_demand = 0.0;
  for (int u = 0; u < cfg.embb_users; ++u) {
    total_embb_demand += arrivals.bits(cfg, u);
  }
  bool urllc_demand = false;
  for (int u = cfg.embb_users; u < cfg.total_users(); ++u) {
    urllc_demand = urllc_demand || arrivals.packets[u] > 0;
  }

  double cum_capacity = 0.0;
  double backlog_integral = 0.0;
  for (int tick = 0; tick < ticks; ++tick) {
    TickCapacity cap = relaxed_tick_capacity(cfg, grid, gains, tick);
    bound.converged = bound.converged && cap.converged;
    bound.max_pg_iterations = std::max(bound.max_pg_iterations,
                                       cap.iterations);
    cum_capacity += cap.bits;
    const double credited =
        credit_at_start
            ? total_embb_demand
            : total_embb_demand * static_cast<double>(tick + 1) / ticks;
    backlog_integral += std::max(0.0, credited - cum_capacity);
  }

  bound.avg_queue_lb_bits = backlog_integral / std::max(1, ticks);
  bound.served_embb_bits_ub = std::min(total_embb_demand, cum_capacity);
  bound.latency_lb_s = urllc_demand ? min_achievable_latency(cfg, grid) : 0.0;

  const double q0 = cfg.resolved_ref_queue();
  const double tau0 = cfg.resolved_ref_latency();
  bound.utility_lb = cfg.omega * bound.avg_queue_lb_bits / q0 +
                     (1.0 - cfg.omega) * bound.latency_lb_s / tau0;
  bound.reward_ub =
      cfg.omega * bound.served_embb_bits_ub / cfg.resolved_ref_rate_bits() -
      (1.0 - cfg.omega) * bound.latency_lb_s / tau0;
  return bound;
}

MetricsSeries run_relaxed_upper_bound(const SystemConfig& cfg, uint64_t seed,
                                      int frames) {
  const RBGrid grid = build_rb_grid(cfg);
  Rng topo_rng(derive_seed(seed, "topology"));
  const Topology topo = sample_topology(cfg, topo_rng);
  Rng channel_rng(derive_seed(seed, "channel"));
  Rng arrival_rng(derive_seed(seed, "arrivals"));

  const int horizon = frames > 0 ? frames : cfg.eval_frames;
  MetricsSeries series;
  series.scheme = scheme_name(SchemeId::kRelaxedUpperBound);
  series.seed = seed;
  series.p_max_dbm = watts_to_dbm(cfg.max_power_w);
  series.frames.reserve(horizon);

  for (int t = 0; t < horizon; ++t) {
    // Same stream discipline as SimRun::begin_frame, so traces pair up.
    TrafficArrivals arrivals = sample_arrivals(cfg, arrival_rng);
    ChannelGains gains = sample_channel_gains(cfg, grid, topo, channel_rng);
    RelaxedFrameBound bound = relaxed_frame_bound(cfg, grid, gains, arrivals);

    FrameRecord rec;
    rec.frame = t;
    rec.embb_throughput_bps = bound.served_embb_bits_ub / cfg.frame_duration_s;
    rec.worst_urllc_latency_s = bound.latency_lb_s;
    rec.avg_queue_bits = bound.avg_queue_lb_bits;
    rec.reward = bound.reward_ub;
    rec.feasible = true;
    series.frames.push_back(rec);
  }
  return series;
}

double assignment_objective(const SystemConfig& cfg, const RBGrid& grid,
                            const ChannelGains& gains,
                            const TrafficArrivals& arrivals,
                            const RbAssignment& pi) {
  const int num_users = cfg.total_users();
  const FlowSplit phi = uniform_flow_split(cfg.num_rus, num_users);
  std::vector<double> demand_bits(static_cast<size_t>(cfg.num_rus) *
                                  num_users);
  for (int m = 0; m < cfg.num_rus; ++m) {
    for (int u = 0; u < num_users; ++u) {
      demand_bits[m * num_users + u] = phi.at(m, u) * arrivals.bits(cfg, u);
    }
  }
  const QueueState zero(cfg.num_rus, num_users);
  FramePhysicsResult phys =
      simulate_frame_physics(cfg, grid, gains, demand_bits, zero, pi);

  std::vector<uint8_t> has_demand(num_users, 0);
  for (int u = 0; u < num_users; ++u) {
    has_demand[u] = arrivals.packets[u] > 0 ? 1 : 0;
  }
  LatencyReport report = worst_urllc_latency(pi, grid, cfg, has_demand);
  std::vector<double> latencies;
  for (const UserLatency& ul : report.urllc) {
    if (ul.status == LatencyStatus::kScheduled) {
      latencies.push_back(ul.latency_s);
    }
  }
  std::vector<double> embb_queues(phys.avg_user_queue_bits.begin(),
                                  phys.avg_user_queue_bits.begin() +
                                      cfg.embb_users);
  return utility(embb_queues, latencies, cfg.omega, cfg.resolved_ref_queue(),
                 cfg.resolved_ref_latency());
}

BruteForceResult brute_force_optimum(const SystemConfig& cfg,
                                     const ChannelGains& gains,
                                     const TrafficArrivals& arrivals) {
  const RBGrid grid = build_rb_grid(cfg);
  const int num_users = cfg.total_users();
  const int cells = grid.total_cells();
  const uint64_t choices = 1 + static_cast<uint64_t>(cfg.num_rus) * num_users;
  constexpr uint64_t kMaxSpace = 10'000'000;

  uint64_t space = 1;
  for (int c = 0; c < cells; ++c) {
    if (space > kMaxSpace / choices + 1) {
      space = kMaxSpace + 1;
      break;
    }
    space *= choices;
  }
  if (space > kMaxSpace) {
    throw std::invalid_argument(
        "brute-force search space too large: " + std::to_string(choices) +
        "^" + std::to_string(cells) + " exceeds " +
        std::to_string(kMaxSpace));
  }

  std::vector<uint64_t> urllc_packets(arrivals.packets.begin() +
                                          cfg.embb_users,
                                      arrivals.packets.end());
  const SliceQuotas q = quotas(urllc_packets, grid, cfg);
  std::vector<uint8_t> has_demand(num_users, 0);
  for (int u = 0; u < num_users; ++u) {
    has_demand[u] = arrivals.packets[u] > 0 ? 1 : 0;
  }

  BruteForceResult best;
  best.pi = RbAssignment(grid, cfg.num_rus, num_users);
  best.objective = std::numeric_limits<double>::infinity();
  best.search_space = space;

  // Odometer over the concatenated cells (slice 0 then slice 1, each
  // f-major); incrementing the last digit first makes the enumeration
  // lexicographic, so keeping strict improvements realizes the tie-break.
  const int cells0 = grid.cells(0);
  std::vector<int32_t> digits(cells, RbAssignment::kIdle);
  RbAssignment pi(grid, cfg.num_rus, num_users);
  const int32_t max_digit = static_cast<int32_t>(choices) - 2;  // owners - 1

  for (uint64_t n = 0; n < space; ++n) {
    for (int c = 0; c < cells; ++c) {
      if (c < cells0) {
        pi.slice_cells(0)[c] = digits[c];
      } else {
        pi.slice_cells(1)[c - cells0] = digits[c];
      }
    }
    if (check_constraints(pi, q, has_demand, grid, cfg).empty()) {
      ++best.candidates_feasible;
      const double obj = assignment_objective(cfg, grid, gains, arrivals, pi);
      if (obj < best.objective) {
        best.objective = obj;
        best.pi = pi;
      }
    }
    // Advance the odometer (digits run -1 .. choices-2).
    for (int c = cells - 1; c >= 0; --c) {
      if (digits[c] < max_digit) {
        ++digits[c];
        break;
      }
      digits[c] = RbAssignment::kIdle;
    }
  }
  return best;
}

MetricsSeries run_brute_force(const SystemConfig& cfg, uint64_t seed,
                              int frames) {
  const RBGrid grid = build_rb_grid(cfg);
  Rng topo_rng(derive_seed(seed, "topology"));
  const Topology topo = sample_topology(cfg, topo_rng);
  Rng channel_rng(derive_seed(seed, "channel"));
  Rng arrival_rng(derive_seed(seed, "arrivals"));
  const int num_users = cfg.total_users();

  const int horizon = frames > 0 ? frames : cfg.eval_frames;
  MetricsSeries series;
  series.scheme = scheme_name(SchemeId::kBruteForce);
  series.seed = seed;
  series.p_max_dbm = watts_to_dbm(cfg.max_power_w);
  series.frames.reserve(horizon);

  for (int t = 0; t < horizon; ++t) {
    TrafficArrivals arrivals = sample_arrivals(cfg, arrival_rng);
    ChannelGains gains = sample_channel_gains(cfg, grid, topo, channel_rng);
    BruteForceResult opt = brute_force_optimum(cfg, gains, arrivals);

    // Fresh-frame convention matching the oracle's zero-queue scoring.
    std::vector<uint64_t> urllc_packets(arrivals.packets.begin() +
                                            cfg.embb_users,
                                        arrivals.packets.end());
    const SliceQuotas q = quotas(urllc_packets, grid, cfg);
    std::vector<uint8_t> has_demand(num_users, 0);
    for (int u = 0; u < num_users; ++u) {
      has_demand[u] = arrivals.packets[u] > 0 ? 1 : 0;
    }
    const QueueState zero(cfg.num_rus, num_users);
    const FlowSplit phi = uniform_flow_split(cfg.num_rus, num_users);
    FrameResult res = run_frame(cfg, grid, zero, phi, opt.pi, q, gains,
                                arrivals, has_demand);
    res.record.frame = t;
    series.frames.push_back(res.record);
  }
  return series;
}

SchemeRun run_scheme(const SystemConfig& cfg, SchemeId id, uint64_t seed,
                     int eval_frames) {
  SchemeRun out;
  switch (id) {
    case SchemeId::kProposed:
    case SchemeId::kUniformPhi:
    case SchemeId::kFixedNumerology: {
      SchemePlan plan = plan_scheme(cfg, id);
      TrainResult tr = train(plan.cfg, seed, plan.behavior);
      out.learning_curve = tr.learning_curve;
      out.series = evaluate(plan.cfg, seed, &tr.agents, plan.behavior,
                            eval_frames);
      out.series.scheme = scheme_name(id);
      break;
    }
    case SchemeId::kRelaxedUpperBound:
      out.series = run_relaxed_upper_bound(cfg, seed, eval_frames);
      break;
    case SchemeId::kBruteForce:
      out.series = run_brute_force(cfg, seed, eval_frames);
      break;
  }
  return out;
}

}  // namespace oransim
