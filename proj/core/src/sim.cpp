#include "oransim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "oransim/rng.hpp"

namespace oransim {

double MetricsSeries::mean_reward() const {
  if (frames.empty()) {
    return 0.0;
  }
  double acc = 0.0;
  for (const FrameRecord& r : frames) {
    acc += r.reward;
  }
  return acc / static_cast<double>(frames.size());
}

double MetricsSeries::credited_embb_throughput_bps() const {
  if (frames.empty()) {
    return 0.0;
  }
  double acc = 0.0;
  for (const FrameRecord& r : frames) {
    acc += r.feasible ? r.embb_throughput_bps : 0.0;
  }
  return acc / static_cast<double>(frames.size());
}

double MetricsSeries::raw_embb_throughput_bps() const {
  if (frames.empty()) {
    return 0.0;
  }
  double acc = 0.0;
  for (const FrameRecord& r : frames) {
    acc += r.embb_throughput_bps;
  }
  return acc / static_cast<double>(frames.size());
}

double MetricsSeries::feasible_fraction() const {
  if (frames.empty()) {
    return 0.0;
  }
  double acc = 0.0;
  for (const FrameRecord& r : frames) {
    acc += r.feasible ? 1.0 : 0.0;
  }
  return acc / static_cast<double>(frames.size());
}

double MetricsSeries::mean_avg_queue_bits() const {
  if (frames.empty()) {
    return 0.0;
  }
  double acc = 0.0;
  for (const FrameRecord& r : frames) {
    acc += r.avg_queue_bits;
  }
  return acc / static_cast<double>(frames.size());
}

namespace {

// Power/rate of one RB held for the duration of its TTI.
struct ActiveRb {
  int ru = 0;
  int user = 0;
  double power_w = 0.0;
  double rate_bps = 0.0;
};

}  // namespace

FramePhysicsResult simulate_frame_physics(
    const SystemConfig& cfg, const RBGrid& grid, const ChannelGains& gains,
    const std::vector<double>& demand_bits, const QueueState& start_queues,
    const RbAssignment& pi) {
  const int num_rus = cfg.num_rus;
  const int num_users = cfg.total_users();
  const int flows = num_rus * num_users;
  const int ticks = grid.ticks_per_frame;
  const bool credit_at_start = cfg.crediting == "frame_start";

  FramePhysicsResult out;
  out.phy_bits.assign(flows, 0.0);
  out.drained_bits.assign(flows, 0.0);
  out.avg_user_queue_bits.assign(num_users, 0.0);
  out.end_queues = start_queues;
  out.tick_log.assign(flows, SubflowTickLog{});
  for (SubflowTickLog& log : out.tick_log) {
    log.credited.reserve(ticks);
    log.service.reserve(ticks);
  }

  std::array<double, kNumSlices> psi{};
  for (int s = 0; s < kNumSlices; ++s) {
    psi[s] = fbl_penalty(cfg.error_prob, grid.tti_duration_s[s],
                         grid.rb_bandwidth_hz[s]);
  }

  QueueState& queues = out.end_queues;
  std::array<std::vector<ActiveRb>, kNumSlices> active;
  std::vector<double> credit(flows, 0.0);
  std::vector<double> service(flows, 0.0);
  std::vector<double> q_before(flows, 0.0);
  std::vector<double> committed(num_rus, 0.0);
  std::vector<TtiRb> tti_rbs;

  for (int tick = 0; tick < ticks; ++tick) {
    // Credit arrivals. The solver must see this tick's credit as backlog, so
    // queues are bumped before the power solve; the end-of-tick update then
    // reapplies the pinned max((q + c) - s, 0) recursion from q_before.
    for (int j = 0; j < flows; ++j) {
      if (credit_at_start) {
        credit[j] = tick == 0 ? demand_bits[j] : 0.0;
      } else {
        credit[j] = demand_bits[j] / static_cast<double>(ticks);
      }
      q_before[j] = queues.raw()[j];
      queues.raw()[j] = q_before[j] + credit[j];
    }

    // Power committed by slices whose TTI spans this tick boundary.
    std::fill(committed.begin(), committed.end(), 0.0);
    for (int s = 0; s < kNumSlices; ++s) {
      if (grid.tti_starts_at_tick(s, tick)) {
        continue;
      }
      for (const ActiveRb& rb : active[s]) {
        committed[rb.ru] += rb.power_w;
      }
    }

    // Fresh TTIs get a joint per-RU solve over both slices when aligned.
    tti_rbs.clear();
    bool any_start = false;
    for (int s = 0; s < kNumSlices; ++s) {
      if (!grid.tti_starts_at_tick(s, tick)) {
        continue;
      }
      any_start = true;
      const int t0 = tick / grid.ticks_per_tti[s];
      for (int f = 0; f < grid.num_rbs[s]; ++f) {
        if (pi.is_idle(s, f, t0)) {
          continue;
        }
        TtiRb rb;
        rb.slice = s;
        rb.f = f;
        rb.ru = pi.ru_of(s, f, t0);
        rb.user = pi.user_of(s, f, t0);
        rb.urllc_class = cfg.is_urllc_user(rb.user);
        rb.gain = gains.at(rb.ru, rb.user, s, f, t0);
        tti_rbs.push_back(rb);
      }
    }

    if (any_start) {
      PowerSolveOutcome solve =
          solve_power_tti(tti_rbs, committed, queues, cfg, grid);
      out.max_kkt_residual =
          std::max(out.max_kkt_residual, solve.kkt_residual);
      for (int m : solve.infeasible_rus) {
        Violation v;
        v.kind = ViolationKind::kPowerInfeasible;
        v.ru = m;
        v.tti = tick + 1;
        out.power_violations.push_back(v);
      }
      for (int s = 0; s < kNumSlices; ++s) {
        if (grid.tti_starts_at_tick(s, tick)) {
          active[s].clear();
        }
      }
      for (size_t i = 0; i < tti_rbs.size(); ++i) {
        const TtiRb& rb = tti_rbs[i];
        ActiveRb entry;
        entry.ru = rb.ru;
        entry.user = rb.user;
        entry.power_w = solve.rb_power[i];
        const double beta = grid.rb_bandwidth_hz[rb.slice];
        entry.rate_bps =
            rb.urllc_class
                ? fbl_rb_rate(beta, entry.power_w, rb.gain, cfg.noise_power_w,
                              psi[rb.slice])
                : shannon_rb_rate(beta, entry.power_w, rb.gain,
                                  cfg.noise_power_w);
        active[rb.slice].push_back(entry);
      }
    }

    // Serve every in-flight RB for one tick and run the queue recursion.
    std::fill(service.begin(), service.end(), 0.0);
    for (int s = 0; s < kNumSlices; ++s) {
      for (const ActiveRb& rb : active[s]) {
        service[rb.ru * num_users + rb.user] +=
            rb.rate_bps * grid.tick_duration_s;
      }
    }
    double total_q = 0.0;
    for (int j = 0; j < flows; ++j) {
      const double level = queues.raw()[j];  // q_before + credit
      const double next = update_queue(q_before[j], credit[j], service[j]);
      queues.raw()[j] = next;
      out.phy_bits[j] += service[j];
      const double drained = level - next;
      out.drained_bits[j] += drained;
      if (!cfg.is_urllc_user(j % num_users)) {
        out.drained_embb_bits += drained;
      }
      out.tick_log[j].credited.push_back(credit[j]);
      out.tick_log[j].service.push_back(service[j]);
      total_q += next;
    }
    out.avg_total_queue_bits += total_q;
    for (int u = 0; u < num_users; ++u) {
      out.avg_user_queue_bits[u] += queues.user_total(u, num_rus);
    }
  }

  const double inv_ticks = 1.0 / static_cast<double>(ticks);
  out.avg_total_queue_bits *= inv_ticks;
  for (double& q : out.avg_user_queue_bits) {
    q *= inv_ticks;
  }
  return out;
}

FrameResult run_frame(const SystemConfig& cfg, const RBGrid& grid,
                      const QueueState& start_queues, const FlowSplit& phi,
                      const RbAssignment& pi, const SliceQuotas& quotas,
                      const ChannelGains& gains,
                      const TrafficArrivals& arrivals,
                      const std::vector<uint8_t>& has_demand) {
  const int num_rus = cfg.num_rus;
  const int num_users = cfg.total_users();

  std::vector<double> demand_bits(static_cast<size_t>(num_rus) * num_users);
  for (int m = 0; m < num_rus; ++m) {
    for (int u = 0; u < num_users; ++u) {
      demand_bits[m * num_users + u] = phi.at(m, u) * arrivals.bits(cfg, u);
    }
  }

  FrameResult res;
  res.physics =
      simulate_frame_physics(cfg, grid, gains, demand_bits, start_queues, pi);

  res.violations = check_constraints(pi, quotas, has_demand, grid, cfg);
  res.violations.insert(res.violations.end(),
                        res.physics.power_violations.begin(),
                        res.physics.power_violations.end());
  std::vector<Violation> frame_end = frame_feasibility(
      res.physics.phy_bits, demand_bits, res.physics.end_queues, cfg);
  res.violations.insert(res.violations.end(), frame_end.begin(),
                        frame_end.end());

  res.latency = worst_urllc_latency(pi, grid, cfg, has_demand);
  res.reward = compute_reward(res.violations.size(),
                              res.physics.drained_embb_bits,
                              res.latency.worst(), cfg);

  res.record.embb_throughput_bps =
      res.physics.drained_embb_bits / cfg.frame_duration_s;
  res.record.worst_urllc_latency_s = res.latency.worst();
  res.record.avg_queue_bits = res.physics.avg_total_queue_bits;
  res.record.reward = res.reward;
  res.record.feasible = res.violations.empty();
  return res;
}

SimRun::SimRun(const SystemConfig& cfg, uint64_t master_seed,
               SchemeBehavior behavior)
    : cfg_(cfg),
      grid_(build_rb_grid(cfg)),
      behavior_(behavior),
      queues_(cfg.num_rus, cfg.total_users()),
      window_(cfg.num_rus, cfg.total_users(), cfg.flow_split_window),
      channel_rng_(derive_seed(master_seed, "channel")),
      arrival_rng_(derive_seed(master_seed, "arrivals")) {
  Rng topo_rng(derive_seed(master_seed, "topology"));
  topo_ = sample_topology(cfg_, topo_rng);
}

void SimRun::set_capture(RunTrace* trace) {
  capture_ = trace;
  if (capture_ != nullptr) {
    capture_->topology = topo_;
    capture_->arrivals.clear();
    capture_->gains.clear();
  }
}

void SimRun::reset_episode() {
  queues_ = QueueState(cfg_.num_rus, cfg_.total_users());
  window_.reset();
  prev_gains_.reset();
}

SimRun::FrameInputs SimRun::begin_frame() {
  FrameInputs in;
  if (replay_ != nullptr) {
    const size_t idx = static_cast<size_t>(global_frame_);
    if (idx >= replay_->arrivals.size() || idx >= replay_->gains.size()) {
      throw std::runtime_error("replay trace exhausted at frame " +
                               std::to_string(global_frame_));
    }
    in.arrivals = replay_->arrivals[idx];
    in.gains = replay_->gains[idx];
  } else {
    in.arrivals = sample_arrivals(cfg_, arrival_rng_);
    in.gains = sample_channel_gains(cfg_, grid_, topo_, channel_rng_);
  }
  if (capture_ != nullptr) {
    capture_->arrivals.push_back(in.arrivals);
    capture_->gains.push_back(in.gains);
  }

  std::vector<uint64_t> urllc_packets(
      in.arrivals.packets.begin() + cfg_.embb_users,
      in.arrivals.packets.end());
  in.quotas = quotas(urllc_packets, grid_, cfg_);

  in.phi = behavior_.uniform_phi
               ? uniform_flow_split(cfg_.num_rus, cfg_.total_users())
               : window_.estimate_flow_split();

  in.has_demand.assign(cfg_.total_users(), 0);
  for (int u = 0; u < cfg_.total_users(); ++u) {
    const bool demand = in.arrivals.packets[u] > 0 ||
                        queues_.user_total(u, cfg_.num_rus) > 0.0;
    in.has_demand[u] = demand ? 1 : 0;
  }
  return in;
}

FrameResult SimRun::finish_frame(const FrameInputs& in,
                                 const RbAssignment& pi) {
  FrameResult res = run_frame(cfg_, grid_, queues_, in.phi, pi, in.quotas,
                              in.gains, in.arrivals, in.has_demand);
  res.record.frame = global_frame_;

  queues_ = res.physics.end_queues;
  std::vector<double> rates(res.physics.phy_bits.size());
  for (size_t j = 0; j < rates.size(); ++j) {
    rates[j] = res.physics.phy_bits[j] / cfg_.frame_duration_s;
  }
  window_.push_observation(rates);
  prev_gains_ = std::make_unique<ChannelGains>(in.gains);
  ++global_frame_;
  return res;
}

TrainResult train(const SystemConfig& cfg, uint64_t seed,
                  SchemeBehavior behavior) {
  SimRun run(cfg, seed, behavior);
  const RBGrid& grid = run.grid();

  TrainResult result{
      {make_agent(0, cfg, grid, derive_seed(seed, "agent0")),
       make_agent(1, cfg, grid, derive_seed(seed, "agent1"))},
      {},
      {}};
  std::array<ReplayBuffer, 2> buffers{
      ReplayBuffer(static_cast<size_t>(cfg.replay_capacity)),
      ReplayBuffer(static_cast<size_t>(cfg.replay_capacity))};
  Rng explore_rng(derive_seed(seed, "explore"));
  std::array<Rng, 2> replay_rngs{Rng(derive_seed(seed, "replay0")),
                                 Rng(derive_seed(seed, "replay1"))};

  double eps = cfg.epsilon.start;
  result.learning_curve.reserve(cfg.epochs);
  result.epoch_feasible_fraction.reserve(cfg.epochs);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    run.reset_episode();
    bool have_prev = false;
    std::array<Eigen::VectorXd, 2> prev_states;
    std::array<Action, 2> prev_actions;
    double prev_reward = 0.0;

    double reward_sum = 0.0;
    int feasible_frames = 0;

    for (int t = 0; t < cfg.frames_per_episode; ++t) {
      SimRun::FrameInputs in = run.begin_frame();
      FrameObservables obs;
      obs.arrivals = &in.arrivals;
      obs.phi = &in.phi;
      obs.prev_queues = &run.queues();
      obs.prev_gains = run.prev_gains();
      obs.quotas = &in.quotas;

      std::array<Eigen::VectorXd, 2> states;
      for (int a = 0; a < 2; ++a) {
        states[a] = encode_state(result.agents[a].spec, obs, cfg, grid);
      }

      if (have_prev) {
        for (int a = 0; a < 2; ++a) {
          buffers[a].push(Experience{prev_states[a], prev_actions[a],
                                     prev_reward, states[a], false});
          train_step(result.agents[a], buffers[a], cfg, replay_rngs[a]);
        }
      }

      RbAssignment pi(grid, cfg.num_rus, cfg.total_users());
      std::array<Action, 2> actions;
      for (int a = 0; a < 2; ++a) {
        actions[a] =
            select_action(result.agents[a], states[a], eps, explore_rng);
        apply_action(actions[a], result.agents[a].spec, pi);
      }

      FrameResult res = run.finish_frame(in, pi);
      reward_sum += res.reward;
      feasible_frames += res.record.feasible ? 1 : 0;

      prev_states = std::move(states);
      prev_actions = std::move(actions);
      prev_reward = res.reward;
      have_prev = true;
    }

    if (have_prev) {
      for (int a = 0; a < 2; ++a) {
        buffers[a].push(Experience{prev_states[a], prev_actions[a],
                                   prev_reward, prev_states[a], true});
        train_step(result.agents[a], buffers[a], cfg, replay_rngs[a]);
      }
    }

    result.learning_curve.push_back(reward_sum / cfg.frames_per_episode);
    result.epoch_feasible_fraction.push_back(
        static_cast<double>(feasible_frames) / cfg.frames_per_episode);
    eps = std::max(cfg.epsilon.end, eps * cfg.epsilon.decay);
    for (AgentState& agent : result.agents) {
      agent.epsilon = eps;
    }
  }
  return result;
}

MetricsSeries evaluate(const SystemConfig& cfg, uint64_t seed,
                       const std::array<AgentState, 2>* agents,
                       SchemeBehavior behavior, int frames, RunTrace* capture,
                       const RunTrace* replay) {
  SimRun run(cfg, seed, behavior);
  if (replay != nullptr) {
    run.set_replay(replay);
  }
  if (capture != nullptr) {
    run.set_capture(capture);
  }
  const RBGrid& grid = run.grid();

  std::array<AgentState, 2> fresh{
      make_agent(0, cfg, grid, derive_seed(seed, "agent0")),
      make_agent(1, cfg, grid, derive_seed(seed, "agent1"))};
  const std::array<AgentState, 2>& policy = agents != nullptr ? *agents
                                                              : fresh;

  Rng greedy_rng(derive_seed(seed, "eval"));
  const int horizon = frames > 0 ? frames : cfg.eval_frames;

  MetricsSeries series;
  series.seed = seed;
  series.p_max_dbm = watts_to_dbm(cfg.max_power_w);
  series.frames.reserve(horizon);

  run.reset_episode();
  for (int t = 0; t < horizon; ++t) {
    SimRun::FrameInputs in = run.begin_frame();
    FrameObservables obs;
    obs.arrivals = &in.arrivals;
    obs.phi = &in.phi;
    obs.prev_queues = &run.queues();
    obs.prev_gains = run.prev_gains();
    obs.quotas = &in.quotas;

    RbAssignment pi(grid, cfg.num_rus, cfg.total_users());
    for (int a = 0; a < 2; ++a) {
      Eigen::VectorXd state = encode_state(policy[a].spec, obs, cfg, grid);
      Action action = select_action(policy[a], state, 0.0, greedy_rng);
      apply_action(action, policy[a].spec, pi);
    }

    FrameResult res = run.finish_frame(in, pi);
    series.frames.push_back(res.record);
  }
  return series;
}

}  // namespace oransim
