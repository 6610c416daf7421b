#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "oransim/channel.hpp"
#include "oransim/config.hpp"
#include "oransim/flow_split.hpp"
#include "oransim/mlp.hpp"
#include "oransim/rate.hpp"
#include "oransim/slicing.hpp"
#include "oransim/violations.hpp"

namespace oransim {

// One agent owns one slice's grid. Its action factorizes into one categorical
// head per (rb, tti) cell; each head picks idle or an (ru, user) owner, so a
// decoded assignment can never double-book a cell.
struct AgentSpec {
  int slice = 0;
  int state_dim = 0;
  int heads = 0;
  int choices = 0;  // 1 + num_rus * users.size()

  // Serviceable users on this slice, in decode order. eMBB users appear on
  // both slices (leftover capacity on the uRLLC slice is theirs to claim);
  // uRLLC users appear on the eMBB slice only when its latency window
  // floor(D_ur / delta_1) is nonempty, since otherwise no placement there
  // can ever be part of a violation-free frame.
  std::vector<int32_t> users;

  static AgentSpec make(int slice, const SystemConfig& cfg,
                        const RBGrid& grid);
};

// Everything the agents observe at a frame boundary. `prev_gains` may be
// null on the first frame of an episode (the summary encodes as all-floor).
struct FrameObservables {
  const TrafficArrivals* arrivals = nullptr;
  const FlowSplit* phi = nullptr;
  const QueueState* prev_queues = nullptr;
  const ChannelGains* prev_gains = nullptr;
  const SliceQuotas* quotas = nullptr;
};

// Fixed normalization: arrivals against a config-derived scale, queues
// against the cap, gains log10-mapped onto [-1, 1], quotas against the
// uRLLC-slice cell count.
Eigen::VectorXd encode_state(const AgentSpec& spec,
                             const FrameObservables& obs,
                             const SystemConfig& cfg, const RBGrid& grid);

using Action = std::vector<int32_t>;  // per-head choice indices

struct AgentState {
  AgentSpec spec;
  Mlp online;
  Mlp target;
  AdamState adam;
  int64_t train_steps = 0;
  double epsilon = 1.0;
};

AgentState make_agent(int slice, const SystemConfig& cfg, const RBGrid& grid,
                      uint64_t seed);

// Epsilon-greedy with an independent exploration coin per head: each head
// either draws uniformly or takes its own argmax.
Action select_action(const AgentState& agent, const Eigen::VectorXd& state,
                     double epsilon, Rng& rng);

// Writes one agent's decoded choices into its slice of the assignment.
void apply_action(const Action& action, const AgentSpec& spec,
                  RbAssignment& pi);

// Pre-power constraint check on a decoded joint assignment: uRLLC overflow
// quotas inside the eMBB-slice window, eMBB leftover quotas on the uRLLC
// slice, and the latency budget (including unscheduled demand). Quotas bind
// only for users with demand this frame.
std::vector<Violation> check_constraints(const RbAssignment& pi,
                                         const SliceQuotas& quotas,
                                         const std::vector<uint8_t>& has_demand,
                                         const RBGrid& grid,
                                         const SystemConfig& cfg);

// Per-head regression targets: y_h = r + gamma * Q_target(s', argmax_c
// Q_online(s')[h][c]), or just r on terminal transitions. The Q matrices
// are heads x choices.
Eigen::VectorXd ddqn_target(double reward, double discount,
                            const Eigen::MatrixXd& q_next_online,
                            const Eigen::MatrixXd& q_next_target,
                            bool terminal);

// Scalar shared by both agents: accumulated penalties when anything was
// violated or infeasible, otherwise the weighted throughput/latency form.
double compute_reward(size_t violation_count, double drained_embb_bits,
                      double worst_latency_s, const SystemConfig& cfg);

struct Experience {
  Eigen::VectorXd state;
  Action action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  ReplayBuffer() = default;
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(Experience e);
  size_t size() const { return data_.size(); }
  size_t capacity() const { return capacity_; }
  const Experience& at(size_t i) const { return data_[i]; }

  // Uniform with replacement.
  std::vector<size_t> sample_indices(size_t batch, Rng& rng) const;

 private:
  size_t capacity_ = 0;
  size_t write_ = 0;
  std::vector<Experience> data_;
};

// One optimization step on a uniformly sampled minibatch (no-op before the
// buffer holds a full batch). Returns the minibatch loss when a step ran.
// Applies the configured target update (soft every step, or hard every
// target_update_period steps).
std::optional<double> train_step(AgentState& agent, const ReplayBuffer& buffer,
                                 const SystemConfig& cfg, Rng& rng);

}  // namespace oransim
