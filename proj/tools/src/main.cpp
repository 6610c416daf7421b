// Command-line front end: train / evaluate / sweep / oracle / replay.
// Every run emits CSV metrics plus a JSON manifest tying the output to the
// exact (config, seeds, scheme, code version) that produced it.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oransim/io.hpp"
#include "oransim/schemes.hpp"
#include "oransim/sim.hpp"

namespace fs = std::filesystem;
using namespace oransim;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<uint64_t> seeds{1};
  std::string scheme = "proposed";
  std::string out_dir = ".";
  int epochs = 0;  // 0 keeps the config value
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_scheme = true) {
  cmd->add_option("--config", args.config_path, "config file (JSON)")
      ->required();
  cmd->add_option("--seed", args.seeds, "seed list (repeatable)");
  if (with_scheme) {
    cmd->add_option("--scheme", args.scheme,
                    "proposed | uniform_phi | fixed_numerology | "
                    "relaxed_upper_bound | brute_force");
  }
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--epochs", args.epochs, "override training epochs");
}

SystemConfig load_with_overrides(const CommonArgs& args) {
  SystemConfig cfg = load_config(args.config_path);
  if (args.epochs > 0) {
    cfg.epochs = args.epochs;
  }
  return cfg;
}

SchemeId parse_scheme_or_throw(const std::string& name) {
  std::optional<SchemeId> id = parse_scheme(name);
  if (!id) {
    throw std::runtime_error("unknown scheme: " + name);
  }
  return *id;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out_dir);
  return (fs::path(args.out_dir) / name).string();
}

RunManifest start_manifest(const CommonArgs& args) {
  RunManifest m;
  m.config_path = args.config_path;
  m.config_hash = hash_file(args.config_path);
  m.seeds = args.seeds;
  m.scheme = args.scheme;
  m.code_version = code_version();
  m.started_utc = now_utc_iso8601();
  return m;
}

void finish_manifest(RunManifest& m, const CommonArgs& args,
                     const std::string& name) {
  m.finished_utc = now_utc_iso8601();
  const std::string path = out_path(args, name);
  write_manifest(m, path);
  std::printf("manifest: %s\n", path.c_str());
}

void write_learning_curve(const std::vector<double>& curve,
                          const std::vector<double>& feasible,
                          const std::string& path) {
  std::string text = "epoch,mean_reward,feasible_fraction\n";
  for (size_t e = 0; e < curve.size(); ++e) {
    text += std::to_string(e) + "," + format_double(curve[e]) + "," +
            format_double(e < feasible.size() ? feasible[e] : 0.0) + "\n";
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << text;
}

int cmd_train(const CommonArgs& args, const std::string& checkpoint) {
  const SystemConfig cfg = load_with_overrides(args);
  const SchemeId id = parse_scheme_or_throw(args.scheme);
  if (id != SchemeId::kProposed && id != SchemeId::kUniformPhi &&
      id != SchemeId::kFixedNumerology) {
    throw std::runtime_error("scheme '" + args.scheme + "' has no training");
  }
  const SchemePlan plan = plan_scheme(cfg, id);
  RunManifest manifest = start_manifest(args);

  std::vector<MetricsSeries> all;
  for (uint64_t seed : args.seeds) {
    TrainResult tr = train(plan.cfg, seed, plan.behavior);
    const std::string curve_name = "learning_curve_" + args.scheme + "_seed" +
                                   std::to_string(seed) + ".csv";
    write_learning_curve(tr.learning_curve, tr.epoch_feasible_fraction,
                         out_path(args, curve_name));
    manifest.outputs.push_back(curve_name);

    if (!checkpoint.empty()) {
      std::string ckpt = checkpoint;
      if (args.seeds.size() > 1) {
        ckpt += "_seed" + std::to_string(seed);
      }
      save_checkpoint(tr.agents, ckpt);
      manifest.outputs.push_back(ckpt);
      std::printf("checkpoint: %s\n", ckpt.c_str());
    }

    MetricsSeries series =
        evaluate(plan.cfg, seed, &tr.agents, plan.behavior);
    series.scheme = args.scheme;
    std::printf("seed %llu: mean reward %.4f, credited eMBB %.3e bit/s, "
                "feasible %.2f\n",
                static_cast<unsigned long long>(seed), series.mean_reward(),
                series.credited_embb_throughput_bps(),
                series.feasible_fraction());
    all.push_back(std::move(series));
  }
  const std::string metrics_name = "metrics_" + args.scheme + ".csv";
  write_metrics(all, out_path(args, metrics_name));
  manifest.outputs.push_back(metrics_name);
  finish_manifest(manifest, args, "manifest_train.json");
  return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& checkpoint,
                 int frames, bool dump_traces) {
  const SystemConfig cfg = load_with_overrides(args);
  const SchemeId id = parse_scheme_or_throw(args.scheme);
  const SchemePlan plan = plan_scheme(cfg, id);
  RunManifest manifest = start_manifest(args);

  std::optional<std::array<AgentState, 2>> agents;
  if (!checkpoint.empty()) {
    agents = load_checkpoint(checkpoint);
    ensure_checkpoint_matches(*agents, plan.cfg, build_rb_grid(plan.cfg));
  }

  std::vector<MetricsSeries> all;
  for (uint64_t seed : args.seeds) {
    MetricsSeries series;
    if (id == SchemeId::kRelaxedUpperBound) {
      series = run_relaxed_upper_bound(plan.cfg, seed, frames);
    } else if (id == SchemeId::kBruteForce) {
      series = run_brute_force(plan.cfg, seed, frames);
    } else {
      RunTrace trace;
      series = evaluate(plan.cfg, seed, agents ? &*agents : nullptr,
                        plan.behavior, frames,
                        dump_traces ? &trace : nullptr);
      series.scheme = args.scheme;
      if (dump_traces) {
        const std::string trace_name = "trace_" + args.scheme + "_seed" +
                                       std::to_string(seed) + ".txt";
        dump_trace(trace, out_path(args, trace_name));
        manifest.outputs.push_back(trace_name);
      }
    }
    std::printf("seed %llu: mean reward %.4f, credited eMBB %.3e bit/s, "
                "feasible %.2f\n",
                static_cast<unsigned long long>(seed), series.mean_reward(),
                series.credited_embb_throughput_bps(),
                series.feasible_fraction());
    all.push_back(std::move(series));
  }
  const std::string metrics_name = "metrics_" + args.scheme + "_eval.csv";
  write_metrics(all, out_path(args, metrics_name));
  manifest.outputs.push_back(metrics_name);
  finish_manifest(manifest, args, "manifest_evaluate.json");
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::vector<double>& dbm_points) {
  const SystemConfig base = load_with_overrides(args);
  const SchemeId id = parse_scheme_or_throw(args.scheme);
  RunManifest manifest = start_manifest(args);

  std::vector<MetricsSeries> all;
  for (double dbm : dbm_points) {
    SystemConfig cfg = base;
    cfg.max_power_w = dbm_to_watts(dbm);
    for (uint64_t seed : args.seeds) {
      SchemeRun res = run_scheme(cfg, id, seed);
      std::printf("P_max %5.1f dBm, seed %llu: credited eMBB %.3e bit/s, "
                  "avg queue %.3e bits, feasible %.2f\n",
                  dbm, static_cast<unsigned long long>(seed),
                  res.series.credited_embb_throughput_bps(),
                  res.series.mean_avg_queue_bits(),
                  res.series.feasible_fraction());
      all.push_back(std::move(res.series));
    }
  }
  const std::string metrics_name = "sweep_" + args.scheme + ".csv";
  write_metrics(all, out_path(args, metrics_name));
  manifest.outputs.push_back(metrics_name);
  finish_manifest(manifest, args, "manifest_sweep.json");
  return 0;
}

int cmd_oracle(const CommonArgs& args, int frames) {
  const SystemConfig cfg = load_with_overrides(args);
  RunManifest manifest = start_manifest(args);

  std::vector<MetricsSeries> all;
  for (uint64_t seed : args.seeds) {
    const RBGrid grid = build_rb_grid(cfg);
    Rng topo_rng(derive_seed(seed, "topology"));
    const Topology topo = sample_topology(cfg, topo_rng);
    Rng channel_rng(derive_seed(seed, "channel"));
    Rng arrival_rng(derive_seed(seed, "arrivals"));
    const int horizon = frames > 0 ? frames : cfg.eval_frames;

    int ordered = 0;
    for (int t = 0; t < horizon; ++t) {
      TrafficArrivals arrivals = sample_arrivals(cfg, arrival_rng);
      ChannelGains gains = sample_channel_gains(cfg, grid, topo, channel_rng);
      BruteForceResult bf = brute_force_optimum(cfg, gains, arrivals);
      RelaxedFrameBound rb = relaxed_frame_bound(cfg, grid, gains, arrivals);
      const bool ok = rb.utility_lb <= bf.objective + 1e-9;
      ordered += ok ? 1 : 0;
      std::printf("seed %llu frame %d: relaxed %.6f %s brute force %.6f "
                  "(feasible candidates %llu of %llu)\n",
                  static_cast<unsigned long long>(seed), t, rb.utility_lb,
                  ok ? "<=" : ">", bf.objective,
                  static_cast<unsigned long long>(bf.candidates_feasible),
                  static_cast<unsigned long long>(bf.search_space));
    }
    std::printf("seed %llu: ordering held on %d/%d frames\n",
                static_cast<unsigned long long>(seed), ordered, horizon);

    MetricsSeries bound = run_relaxed_upper_bound(cfg, seed, horizon);
    MetricsSeries oracle = run_brute_force(cfg, seed, horizon);
    all.push_back(std::move(bound));
    all.push_back(std::move(oracle));
  }
  const std::string metrics_name = "oracle.csv";
  write_metrics(all, out_path(args, metrics_name));
  manifest.outputs.push_back(metrics_name);
  finish_manifest(manifest, args, "manifest_oracle.json");
  return 0;
}

int cmd_replay(const CommonArgs& args, const std::string& trace_path,
               const std::string& checkpoint, int frames) {
  const SystemConfig cfg = load_with_overrides(args);
  const SchemeId id = parse_scheme_or_throw(args.scheme);
  const SchemePlan plan = plan_scheme(cfg, id);
  RunManifest manifest = start_manifest(args);

  const RunTrace trace = load_trace(trace_path);
  std::optional<std::array<AgentState, 2>> agents;
  if (!checkpoint.empty()) {
    agents = load_checkpoint(checkpoint);
    ensure_checkpoint_matches(*agents, plan.cfg, build_rb_grid(plan.cfg));
  }
  const int horizon =
      frames > 0 ? frames : static_cast<int>(trace.arrivals.size());

  std::vector<MetricsSeries> runs;
  for (int pass = 0; pass < 2; ++pass) {
    MetricsSeries series =
        evaluate(plan.cfg, args.seeds.front(), agents ? &*agents : nullptr,
                 plan.behavior, horizon, nullptr, &trace);
    series.scheme = args.scheme;
    runs.push_back(std::move(series));
  }
  const bool identical =
      metrics_to_csv({runs[0]}) == metrics_to_csv({runs[1]});
  std::printf("replay determinism: %s\n",
              identical ? "bit-identical" : "MISMATCH");

  const std::string metrics_name = "replay_" + args.scheme + ".csv";
  write_metrics({runs[0]}, out_path(args, metrics_name));
  manifest.outputs.push_back(metrics_name);
  finish_manifest(manifest, args, "manifest_replay.json");
  return identical ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-slice ORAN downlink traffic-steering simulator"};
  app.require_subcommand(1);

  CommonArgs train_args;
  std::string train_checkpoint;
  CLI::App* train_cmd = app.add_subcommand("train", "train agents");
  add_common(train_cmd, train_args);
  train_cmd->add_option("--checkpoint", train_checkpoint,
                        "write agent checkpoint here");

  CommonArgs eval_args;
  std::string eval_checkpoint;
  int eval_frames = 0;
  bool eval_dump_traces = false;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "greedy rollout");
  add_common(eval_cmd, eval_args);
  eval_cmd->add_option("--checkpoint", eval_checkpoint,
                       "load agents from checkpoint");
  eval_cmd->add_option("--frames", eval_frames, "evaluation frames");
  eval_cmd->add_flag("--dump-traces", eval_dump_traces,
                     "dump consumed traces for replay");

  CommonArgs sweep_args;
  std::vector<double> sweep_dbm{10, 16, 22, 28, 34, 40, 46};
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "power-budget sweep (train per point)");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--dbm", sweep_dbm, "P_max points in dBm");

  CommonArgs oracle_args;
  int oracle_frames = 0;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "brute-force vs relaxed bound on tiny instances");
  add_common(oracle_cmd, oracle_args, /*with_scheme=*/false);
  oracle_cmd->add_option("--frames", oracle_frames, "frames per seed");

  CommonArgs replay_args;
  std::string replay_trace;
  std::string replay_checkpoint;
  int replay_frames = 0;
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "re-run from a dumped trace");
  add_common(replay_cmd, replay_args);
  replay_cmd->add_option("--trace", replay_trace, "trace file")->required();
  replay_cmd->add_option("--checkpoint", replay_checkpoint,
                         "load agents from checkpoint");
  replay_cmd->add_option("--frames", replay_frames, "frames to replay");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      return cmd_train(train_args, train_checkpoint);
    }
    if (eval_cmd->parsed()) {
      return cmd_evaluate(eval_args, eval_checkpoint, eval_frames,
                          eval_dump_traces);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_args, sweep_dbm);
    }
    if (oracle_cmd->parsed()) {
      return cmd_oracle(oracle_args, oracle_frames);
    }
    if (replay_cmd->parsed()) {
      return cmd_replay(replay_args, replay_trace, replay_checkpoint,
                        replay_frames);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
