#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oransim/channel.hpp"
#include "oransim/config.hpp"
#include "oransim/ddqn.hpp"
#include "oransim/flow_split.hpp"
#include "oransim/power.hpp"
#include "oransim/rate.hpp"
#include "oransim/slicing.hpp"
#include "oransim/violations.hpp"

namespace oransim {

// One metrics row, mirroring the CSV schema.
struct FrameRecord {
  int64_t frame = 0;
  double embb_throughput_bps = 0.0;     // drained eMBB bits over the frame
  double worst_urllc_latency_s = 0.0;   // NaN when nothing was scheduled
  double avg_queue_bits = 0.0;          // time-average of the total backlog
  double reward = 0.0;
  bool feasible = true;                 // no violations of any kind
};

struct MetricsSeries {
  std::string scheme;
  uint64_t seed = 0;
  double p_max_dbm = 0.0;
  std::vector<FrameRecord> frames;

  double mean_reward() const;
  // Throughput credited only on feasible frames (infeasible frames count as
  // zero), the figure used for scheme comparisons.
  double credited_embb_throughput_bps() const;
  double raw_embb_throughput_bps() const;
  double feasible_fraction() const;
  double mean_avg_queue_bits() const;
};

// Per-tick service/credit log for one sub-flow, enough to replay the queue
// recursion bit-exactly.
struct SubflowTickLog {
  std::vector<double> credited;  // bits added at each tick
  std::vector<double> service;   // PHY bits the allocation could move
};

struct FramePhysicsResult {
  std::vector<double> phy_bits;           // per (ru, user), rate * time
  std::vector<double> drained_bits;       // per (ru, user), queue outflow
  double drained_embb_bits = 0.0;
  std::vector<double> avg_user_queue_bits;  // per user, time-avg over ticks
  double avg_total_queue_bits = 0.0;
  double max_kkt_residual = 0.0;
  QueueState end_queues;
  std::vector<Violation> power_violations;
  std::vector<SubflowTickLog> tick_log;  // per (ru, user)
};

// Runs the mixed-clock physics of one frame: arrivals credited per the
// configured mode, per-TTI power solves on each slice's own clock (with
// mid-TTI commitments of the coarser slice held as spent budget), service
// applied on the fine clock. Pure: the caller owns the queue state.
FramePhysicsResult simulate_frame_physics(const SystemConfig& cfg,
                                          const RBGrid& grid,
                                          const ChannelGains& gains,
                                          const std::vector<double>& demand_bits,
                                          const QueueState& start_queues,
                                          const RbAssignment& pi);

struct FrameResult {
  FramePhysicsResult physics;
  std::vector<Violation> violations;  // action + power + frame-end merged
  LatencyReport latency;
  double reward = 0.0;
  FrameRecord record;
};

// Full frame evaluation: physics plus the constraint/reward bookkeeping.
FrameResult run_frame(const SystemConfig& cfg, const RBGrid& grid,
                      const QueueState& start_queues, const FlowSplit& phi,
                      const RbAssignment& pi, const SliceQuotas& quotas,
                      const ChannelGains& gains,
                      const TrafficArrivals& arrivals,
                      const std::vector<uint8_t>& has_demand);

// Captured (or replayed) per-frame randomness.
struct RunTrace {
  Topology topology;
  std::vector<TrafficArrivals> arrivals;
  std::vector<ChannelGains> gains;
};

struct SchemeBehavior {
  bool uniform_phi = false;
};

// Stateful driver owning topology, queues, the flow-split window and the
// derived RNG streams. Schemes share traces for a given master seed because
// every stream is derived from (seed, fixed tag).
class SimRun {
 public:
  SimRun(const SystemConfig& cfg, uint64_t master_seed,
         SchemeBehavior behavior = {});

  struct FrameInputs {
    TrafficArrivals arrivals;
    ChannelGains gains;
    SliceQuotas quotas;
    FlowSplit phi;
    std::vector<uint8_t> has_demand;
  };

  void reset_episode();
  FrameInputs begin_frame();
  // Commits the frame: updates queues, feeds the flow-split window, stores
  // the gains for the next state encoding, advances the frame counter.
  FrameResult finish_frame(const FrameInputs& in, const RbAssignment& pi);

  const SystemConfig& config() const { return cfg_; }
  const RBGrid& grid() const { return grid_; }
  const Topology& topology() const { return topo_; }
  const QueueState& queues() const { return queues_; }
  const ChannelGains* prev_gains() const { return prev_gains_.get(); }
  int64_t global_frame() const { return global_frame_; }

  // Replay support: when set, arrivals/gains come from the trace instead of
  // the streams. Capture stores what each frame consumed.
  void set_replay(const RunTrace* trace) { replay_ = trace; }
  void set_capture(RunTrace* trace);

 private:
  SystemConfig cfg_;
  RBGrid grid_;
  SchemeBehavior behavior_;
  Topology topo_;
  QueueState queues_;
  RateWindow window_;
  std::unique_ptr<ChannelGains> prev_gains_;
  Rng channel_rng_;
  Rng arrival_rng_;
  int64_t global_frame_ = 0;
  const RunTrace* replay_ = nullptr;
  RunTrace* capture_ = nullptr;
};

struct TrainResult {
  std::array<AgentState, 2> agents;
  std::vector<double> learning_curve;  // per-epoch mean reward
  std::vector<double> epoch_feasible_fraction;
};

TrainResult train(const SystemConfig& cfg, uint64_t seed,
                  SchemeBehavior behavior = {});

// Greedy rollout of trained agents over eval_frames frames (one episode).
// Passing null agents evaluates untrained (freshly initialized) ones.
MetricsSeries evaluate(const SystemConfig& cfg, uint64_t seed,
                       const std::array<AgentState, 2>* agents,
                       SchemeBehavior behavior = {}, int frames = 0,
                       RunTrace* capture = nullptr,
                       const RunTrace* replay = nullptr);

}  // namespace oransim
