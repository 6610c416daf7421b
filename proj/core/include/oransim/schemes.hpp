#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "oransim/channel.hpp"
#include "oransim/config.hpp"
#include "oransim/rate.hpp"
#include "oransim/sim.hpp"

namespace oransim {

enum class SchemeId {
  kProposed,
  kUniformPhi,
  kFixedNumerology,
  kRelaxedUpperBound,
  kBruteForce,
};

inline constexpr SchemeId kAllSchemes[] = {
    SchemeId::kProposed, SchemeId::kUniformPhi, SchemeId::kFixedNumerology,
    SchemeId::kRelaxedUpperBound, SchemeId::kBruteForce};

const char* scheme_name(SchemeId id);
std::optional<SchemeId> parse_scheme(std::string_view name);

// Scheme-specific config/behavior overrides. Fixed-numerology forces the
// uRLLC slice onto the eMBB numerology and unlocks the zero-window rule the
// override would otherwise trip.
struct SchemePlan {
  SystemConfig cfg;
  SchemeBehavior behavior;
};
SchemePlan plan_scheme(const SystemConfig& cfg, SchemeId id);

// Projected-gradient maximization of sum_j weight_j*log2(1 + p_j*gain_j/noise)
// over {p >= 0, sum p <= budget}, Armijo backtracking, stopping when the
// iterate moves less than `tol` (L1) or after `max_iters`.
struct PgResult {
  std::vector<double> power;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};
PgResult pg_sum_rate(const std::vector<double>& weights,
                     const std::vector<double>& gains, double noise_w,
                     double budget, double tol = 1e-6, int max_iters = 500);

// Per-frame relaxation bound. The assignment variables are eliminated in
// closed form (every cell goes fully to its best eMBB pair), quota and
// demand constraints are dropped, and each tick's power block is solved as
// a convex program (projected gradient cross-checked against the exact
// water-filling optimum; the larger value is kept so the relaxation stays a
// true bound). Yields a lower bound on the minimization objective and an
// upper bound on served eMBB bits for any feasible integral assignment on
// the same frame, regardless of flow split.
struct RelaxedFrameBound {
  double utility_lb = 0.0;          // lower bound on the Eq.-style utility
  double served_embb_bits_ub = 0.0;  // upper bound on drainable eMBB bits
  double latency_lb_s = 0.0;         // min achievable worst uRLLC latency
  double avg_queue_lb_bits = 0.0;    // lower bound on time-avg total backlog
  double reward_ub = 0.0;            // upper bound on the non-penalty reward
  bool converged = true;             // all per-tick PG solves converged
  int max_pg_iterations = 0;
};
RelaxedFrameBound relaxed_frame_bound(const SystemConfig& cfg,
                                      const RBGrid& grid,
                                      const ChannelGains& gains,
                                      const TrafficArrivals& arrivals);

MetricsSeries run_relaxed_upper_bound(const SystemConfig& cfg, uint64_t seed,
                                      int frames = 0);

// Minimization objective of one frame started from empty queues under the
// uniform flow split: omega-weighted normalized time-average eMBB queues
// plus worst normalized scheduled uRLLC latency. This is the score the
// brute-force oracle minimizes.
double assignment_objective(const SystemConfig& cfg, const RBGrid& grid,
                            const ChannelGains& gains,
                            const TrafficArrivals& arrivals,
                            const RbAssignment& pi);

struct BruteForceResult {
  RbAssignment pi;
  double objective = 0.0;
  uint64_t search_space = 0;
  uint64_t candidates_feasible = 0;
};

// Exhaustive minimization over every joint assignment passing the quota and
// latency checks, ties broken toward the lexicographically smallest encoded
// assignment. Throws std::invalid_argument (with the computed size) when the
// space exceeds 1e7 candidates. With no feasible candidate the objective is
// +infinity and pi is all-idle.
BruteForceResult brute_force_optimum(const SystemConfig& cfg,
                                     const ChannelGains& gains,
                                     const TrafficArrivals& arrivals);

MetricsSeries run_brute_force(const SystemConfig& cfg, uint64_t seed,
                              int frames = 0);

struct SchemeRun {
  MetricsSeries series;
  std::vector<double> learning_curve;  // empty for non-learned schemes
};

// One scheme end to end on one seed: learned schemes train then roll out
// greedily; the bound and oracle schemes compute their per-frame values on
// the identical trace.
SchemeRun run_scheme(const SystemConfig& cfg, SchemeId id, uint64_t seed,
                     int eval_frames = 0);

}  // namespace oransim
