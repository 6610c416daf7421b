#include "oransim/ddqn.hpp"

#include <cmath>

namespace oransim {
namespace {

double lambda_scale(const SystemConfig& cfg, int u) {
  // Fixed headroom over the Poisson mean so the feature rarely clips.
  const double mean = cfg.arrival_rate(u);
  return mean + 5.0 * std::sqrt(mean) + 1.0;
}

double encode_gain(double linear_gain, const SystemConfig& cfg) {
  if (linear_gain <= 0.0) {
    return -1.0;
  }
  const double lg = std::log10(linear_gain);
  const double unit = (lg - cfg.gain_log10_min) /
                      (cfg.gain_log10_max - cfg.gain_log10_min);
  return std::clamp(2.0 * unit - 1.0, -1.0, 1.0);
}

}  // namespace

AgentSpec AgentSpec::make(int slice, const SystemConfig& cfg,
                          const RBGrid& grid) {
  AgentSpec spec;
  spec.slice = slice;
  spec.heads = grid.cells(slice);
  for (int u = 0; u < cfg.embb_users; ++u) {
    spec.users.push_back(u);
  }
  const bool urllc_fits =
      slice == kSliceUrllc ||
      static_cast<int>(std::floor(cfg.latency_budget_s /
                                      grid.tti_duration_s[kSliceEmbb] +
                                  1e-9)) >= 1;
  if (urllc_fits) {
    for (int i = 0; i < cfg.urllc_users; ++i) {
      spec.users.push_back(cfg.embb_users + i);
    }
  }
  spec.choices = 1 + cfg.num_rus * static_cast<int>(spec.users.size());
  const int mu = cfg.num_rus * cfg.total_users();
  const int quota_len =
      slice == kSliceEmbb ? cfg.urllc_users : cfg.embb_users;
  spec.state_dim = cfg.total_users()  // arrivals
                   + mu               // flow split
                   + mu               // previous queues
                   + mu * grid.num_rbs[slice]  // gain summary
                   + quota_len;
  return spec;
}

Eigen::VectorXd encode_state(const AgentSpec& spec,
                             const FrameObservables& obs,
                             const SystemConfig& cfg, const RBGrid& grid) {
  Eigen::VectorXd s(spec.state_dim);
  int k = 0;
  const int users = cfg.total_users();

  for (int u = 0; u < users; ++u) {
    s[k++] = std::min(
        1.0, static_cast<double>(obs.arrivals->packets[u]) /
                 lambda_scale(cfg, u));
  }
  for (int m = 0; m < cfg.num_rus; ++m) {
    for (int u = 0; u < users; ++u) {
      s[k++] = obs.phi->at(m, u);
    }
  }
  for (int m = 0; m < cfg.num_rus; ++m) {
    for (int u = 0; u < users; ++u) {
      s[k++] = std::min(1.0, obs.prev_queues->at(m, u) / cfg.queue_cap_bits);
    }
  }
  for (int m = 0; m < cfg.num_rus; ++m) {
    for (int u = 0; u < users; ++u) {
      for (int f = 0; f < grid.num_rbs[spec.slice]; ++f) {
        const double g = obs.prev_gains
                             ? obs.prev_gains->tti_mean(m, u, spec.slice, f)
                             : 0.0;
        s[k++] = encode_gain(g, cfg);
      }
    }
  }
  const double quota_norm = std::max(1, grid.cells(kSliceUrllc));
  if (spec.slice == kSliceEmbb) {
    for (int i = 0; i < cfg.urllc_users; ++i) {
      s[k++] = obs.quotas->urllc_overflow[i] / quota_norm;
    }
  } else {
    for (int i = 0; i < cfg.embb_users; ++i) {
      s[k++] = obs.quotas->embb_leftover / quota_norm;
    }
  }
  return s;
}

AgentState make_agent(int slice, const SystemConfig& cfg, const RBGrid& grid,
                      uint64_t seed) {
  AgentState agent;
  agent.spec = AgentSpec::make(slice, cfg, grid);
  agent.online = Mlp(agent.spec.state_dim, cfg.hidden_layers,
                     cfg.hidden_units, agent.spec.heads * agent.spec.choices);
  Rng rng(seed);
  agent.online.init_he(rng);
  agent.target = agent.online;
  agent.adam.match(agent.online);
  agent.epsilon = cfg.epsilon.start;
  return agent;
}

Action select_action(const AgentState& agent, const Eigen::VectorXd& state,
                     double epsilon, Rng& rng) {
  const AgentSpec& spec = agent.spec;
  Action action(spec.heads);
  const Eigen::MatrixXd q =
      agent.online.forward(state.transpose());  // 1 x heads*choices
  for (int h = 0; h < spec.heads; ++h) {
    // One exploration coin per head: the rest of the action stays greedy, so
    // the reward difference is attributable to the perturbed heads.
    if (epsilon > 0.0 && rng.uniform() < epsilon) {
      action[h] = static_cast<int32_t>(rng.uniform_index(spec.choices));
      continue;
    }
    int best = 0;
    double best_q = q(0, h * spec.choices);
    for (int c = 1; c < spec.choices; ++c) {
      const double v = q(0, h * spec.choices + c);
      if (v > best_q) {
        best_q = v;
        best = c;
      }
    }
    action[h] = best;
  }
  return action;
}

void apply_action(const Action& action, const AgentSpec& spec,
                  RbAssignment& pi) {
  // Choice 0 is idle; choice 1 + (m * K + k) hands the cell to RU m and the
  // k-th serviceable user, re-encoded against the assignment's full user
  // numbering.
  const int k_users = static_cast<int>(spec.users.size());
  for (int h = 0; h < spec.heads; ++h) {
    const int32_t c = action[h];
    if (c == 0) {
      pi.slice_cells(spec.slice)[h] = RbAssignment::kIdle;
      continue;
    }
    const int m = (c - 1) / k_users;
    const int u = spec.users[(c - 1) % k_users];
    pi.slice_cells(spec.slice)[h] = pi.encode(m, u);
  }
}

std::vector<Violation> check_constraints(const RbAssignment& pi,
                                         const SliceQuotas& quotas,
                                         const std::vector<uint8_t>& has_demand,
                                         const RBGrid& grid,
                                         const SystemConfig& cfg) {
  std::vector<Violation> violations;

  // uRLLC overflow quota inside the eMBB slice's ceil window.
  for (int i = 0; i < cfg.urllc_users; ++i) {
    const int u = cfg.embb_users + i;
    if (!has_demand[u] || quotas.urllc_overflow[i] <= 0) {
      continue;
    }
    const int got = pi.count_user_rbs_in_window(kSliceEmbb, u,
                                                grid.overflow_window_ttis);
    if (got < quotas.urllc_overflow[i]) {
      violations.push_back({ViolationKind::kUrllcQuota, u, -1, -1,
                            static_cast<double>(quotas.urllc_overflow[i] -
                                                got)});
    }
  }

  // eMBB leftover quota anywhere on the uRLLC slice.
  for (int u = 0; u < cfg.embb_users; ++u) {
    if (!has_demand[u] || quotas.embb_leftover <= 0) {
      continue;
    }
    const int got = pi.count_user_rbs(kSliceUrllc, u);
    if (got < quotas.embb_leftover) {
      violations.push_back({ViolationKind::kEmbbLeftover, u, -1, -1,
                            static_cast<double>(quotas.embb_leftover - got)});
    }
  }

  // Latency budget, including unscheduled demand.
  const LatencyReport report =
      worst_urllc_latency(pi, grid, cfg, has_demand);
  for (int i = 0; i < cfg.urllc_users; ++i) {
    const int u = cfg.embb_users + i;
    const UserLatency& ul = report.urllc[i];
    if (ul.status == LatencyStatus::kUnscheduled) {
      violations.push_back({ViolationKind::kUnscheduled, u, -1, -1, 0.0});
    } else if (ul.status == LatencyStatus::kScheduled && has_demand[u] &&
               ul.latency_s > cfg.latency_budget_s) {
      // A late completion only violates the budget when the user actually
      // had something to deliver this frame.
      violations.push_back({ViolationKind::kLatency, u, -1, -1,
                            ul.latency_s - cfg.latency_budget_s});
    }
  }
  return violations;
}

Eigen::VectorXd ddqn_target(double reward, double discount,
                            const Eigen::MatrixXd& q_next_online,
                            const Eigen::MatrixXd& q_next_target,
                            bool terminal) {
  const Eigen::Index heads = q_next_online.rows();
  Eigen::VectorXd y(heads);
  if (terminal) {
    y.setConstant(reward);
    return y;
  }
  for (Eigen::Index h = 0; h < heads; ++h) {
    Eigen::Index best;
    q_next_online.row(h).maxCoeff(&best);
    y[h] = reward + discount * q_next_target(h, best);
  }
  return y;
}

double compute_reward(size_t violation_count, double drained_embb_bits,
                      double worst_latency_s, const SystemConfig& cfg) {
  if (violation_count > 0) {
    return cfg.penalty_value * static_cast<double>(violation_count);
  }
  const double rate_term =
      drained_embb_bits / cfg.resolved_ref_rate_bits();
  const double latency_term =
      (std::isnan(worst_latency_s) ? 0.0 : worst_latency_s) /
      cfg.resolved_ref_latency();
  return cfg.omega * rate_term - (1.0 - cfg.omega) * latency_term;
}

void ReplayBuffer::push(Experience e) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(e));
    return;
  }
  data_[write_] = std::move(e);
  write_ = (write_ + 1) % capacity_;
}

std::vector<size_t> ReplayBuffer::sample_indices(size_t batch,
                                                 Rng& rng) const {
  std::vector<size_t> idx(batch);
  for (size_t i = 0; i < batch; ++i) {
    idx[i] = rng.uniform_index(data_.size());
  }
  return idx;
}

std::optional<double> train_step(AgentState& agent, const ReplayBuffer& buffer,
                                 const SystemConfig& cfg, Rng& rng) {
  const size_t batch = static_cast<size_t>(cfg.batch_size);
  if (buffer.size() < batch) {
    return std::nullopt;
  }
  const AgentSpec& spec = agent.spec;
  const std::vector<size_t> idx = buffer.sample_indices(batch, rng);

  Eigen::MatrixXd x(batch, spec.state_dim);
  Eigen::MatrixXd xn(batch, spec.state_dim);
  for (size_t b = 0; b < batch; ++b) {
    x.row(b) = buffer.at(idx[b]).state.transpose();
    xn.row(b) = buffer.at(idx[b]).next_state.transpose();
  }

  const Eigen::MatrixXd qn_online = agent.online.forward(xn);
  const Eigen::MatrixXd qn_target = agent.target.forward(xn);

  Mlp::Tape tape;
  const Eigen::MatrixXd q = agent.online.forward(x, tape);

  Eigen::MatrixXd dout = Eigen::MatrixXd::Zero(batch, q.cols());
  double loss = 0.0;
  const double norm = 1.0 / (static_cast<double>(batch) * spec.heads);
  for (size_t b = 0; b < batch; ++b) {
    const Experience& e = buffer.at(idx[b]);
    for (int h = 0; h < spec.heads; ++h) {
      double y = e.reward;
      if (!e.terminal) {
        int best = 0;
        double best_q = qn_online(b, h * spec.choices);
        for (int c = 1; c < spec.choices; ++c) {
          const double v = qn_online(b, h * spec.choices + c);
          if (v > best_q) {
            best_q = v;
            best = c;
          }
        }
        y += cfg.discount * qn_target(b, h * spec.choices + best);
      }
      const int col = h * spec.choices + e.action[h];
      const double resid = q(b, col) - y;
      loss += resid * resid * norm;
      dout(b, col) = 2.0 * resid * norm;
    }
  }

  const Mlp::Gradients grads = agent.online.backward(tape, dout);
  adam_step(agent.online, grads, agent.adam, cfg.learning_rate, 0.9, 0.999,
            1e-8);
  ++agent.train_steps;

  if (cfg.target_update == "soft") {
    soft_update(agent.target, agent.online, cfg.soft_update_coeff);
  } else if (agent.train_steps % cfg.target_update_period == 0) {
    agent.target = agent.online;
  }
  return loss;
}

}  // namespace oransim
