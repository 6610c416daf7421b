#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "oransim/config.hpp"
#include "oransim/ddqn.hpp"
#include "oransim/sim.hpp"

namespace oransim {

// Library version string (matches the CMake project version).
const char* code_version();

// Shortest decimal that round-trips the exact double (std::to_chars).
std::string format_double(double v);
// Inverse of format_double; throws std::runtime_error on malformed input.
double parse_double(const std::string& text);

// Strict JSON config loader: unknown keys are errors (reported with their
// dotted path), every top-level section must be present, omitted leaves keep
// their defaults. The loaded config is passed through validate_config and
// all violations are reported together.
SystemConfig load_config(const std::string& path);
SystemConfig parse_config_text(const std::string& text,
                               const std::string& origin = "<string>");

// CSV metrics: header frame,scheme,seed,p_max_dbm,embb_throughput_bps,
// worst_urllc_latency_s,avg_queue_bits,reward,feasible; floats as shortest
// round-trippable decimals, feasible as 0/1.
void write_metrics(const std::vector<MetricsSeries>& series,
                   const std::string& path);
std::string metrics_to_csv(const std::vector<MetricsSeries>& series);
// Parses rows back, grouping consecutive rows with the same (scheme, seed,
// p_max_dbm) into one series.
std::vector<MetricsSeries> read_metrics(const std::string& path);

// Binary checkpoint of both agents (magic + version header, little-endian
// f64 parameter blocks for online/target nets and Adam moments). Loading a
// truncated or mismatched file throws with a description.
void save_checkpoint(const std::array<AgentState, 2>& agents,
                     const std::string& path);
std::array<AgentState, 2> load_checkpoint(const std::string& path);
// Throws when the checkpointed shapes cannot drive this config's grid.
void ensure_checkpoint_matches(const std::array<AgentState, 2>& agents,
                               const SystemConfig& cfg, const RBGrid& grid);

// Columnar text trace (topology, per-frame arrivals and gains) written with
// round-trippable floats so a replay reproduces runs bit-exactly.
void dump_trace(const RunTrace& trace, const std::string& path);
RunTrace load_trace(const std::string& path);

struct RunManifest {
  std::string config_path;
  std::string config_hash;  // FNV-1a 64 over the config file bytes, hex
  std::vector<uint64_t> seeds;
  std::string scheme;
  std::string code_version;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::string> outputs;
};

uint64_t fnv1a64(const void* data, size_t size);
std::string hash_file(const std::string& path);
std::string now_utc_iso8601();
void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace oransim
