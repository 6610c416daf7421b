#include "oransim/io.hpp"

#include <charconv>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace oransim {

using nlohmann::json;

const char* code_version() { return "0.1.0"; }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::runtime_error("malformed number: '" + text + "'");
  }
  return v;
}

namespace {

[[noreturn]] void config_error(const std::string& origin,
                               const std::string& what) {
  throw std::runtime_error("config " + origin + ": " + what);
}

// Wraps one JSON object; getters consume keys, finish() rejects leftovers.
class StrictObject {
 public:
  StrictObject(const json& obj, std::string prefix, const std::string& origin)
      : obj_(obj), prefix_(std::move(prefix)), origin_(origin) {
    if (!obj_.is_object()) {
      config_error(origin_, "'" + prefix_ + "' must be an object");
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      return;
    }
    seen_.insert(key);
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      config_error(origin_, "'" + path(key) + "' has the wrong type");
    }
  }

  const json* child(const char* key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      return nullptr;
    }
    seen_.insert(key);
    return &*it;
  }

  void finish() {
    for (const auto& item : obj_.items()) {
      if (seen_.find(item.key()) == seen_.end()) {
        config_error(origin_, "unknown key '" + path(item.key()) + "'");
      }
    }
  }

 private:
  std::string path(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  const json& obj_;
  std::string prefix_;
  const std::string& origin_;
  std::set<std::string> seen_;
};

void read_numerology(const json* node, const std::string& prefix,
                     const std::string& origin, NumerologyConfig& out) {
  if (node == nullptr) {
    return;
  }
  StrictObject o(*node, prefix, origin);
  o.read("rb_bandwidth_hz", out.rb_bandwidth_hz);
  o.read("tti_duration_s", out.tti_duration_s);
  o.finish();
}

}  // namespace

SystemConfig parse_config_text(const std::string& text,
                               const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(origin, std::string("parse error: ") + e.what());
  }
  if (!root.is_object()) {
    config_error(origin, "top level must be an object");
  }

  static const char* kSections[] = {
      "network", "spectrum", "frame",    "traffic",  "phy",      "qos",
      "slicing", "flow_split", "reward", "learning", "training",
      "state_norm"};
  for (const char* section : kSections) {
    if (!root.contains(section)) {
      config_error(origin,
                   std::string("missing required section '") + section + "'");
    }
  }

  SystemConfig cfg;
  StrictObject top(root, "", origin);

  {
    StrictObject o(*top.child("network"), "network", origin);
    o.read("num_rus", cfg.num_rus);
    o.read("embb_users", cfg.embb_users);
    o.read("urllc_users", cfg.urllc_users);
    o.read("cell_radius_m", cfg.cell_radius_m);
    o.finish();
  }
  {
    StrictObject o(*top.child("spectrum"), "spectrum", origin);
    o.read("bandwidth_hz", cfg.bandwidth_hz);
    o.read("alpha", cfg.alpha);
    o.read("guard_band_hz", cfg.guard_band_hz);
    read_numerology(o.child("embb"), "spectrum.embb", origin,
                    cfg.embb_numerology);
    read_numerology(o.child("urllc"), "spectrum.urllc", origin,
                    cfg.urllc_numerology);
    o.finish();
  }
  {
    StrictObject o(*top.child("frame"), "frame", origin);
    o.read("duration_s", cfg.frame_duration_s);
    o.finish();
  }
  {
    StrictObject o(*top.child("traffic"), "traffic", origin);
    o.read("embb_packet_bits", cfg.embb_packet_bits);
    o.read("urllc_packet_bits", cfg.urllc_packet_bits);
    o.read("embb_arrival_rate", cfg.embb_arrival_rate);
    o.read("urllc_arrival_rate", cfg.urllc_arrival_rate);
    o.read("crediting", cfg.crediting);
    o.read("required_embb_rate_bps", cfg.required_embb_rate_bps);
    o.finish();
  }
  {
    StrictObject o(*top.child("phy"), "phy", origin);
    o.read("noise_power_w", cfg.noise_power_w);
    o.read("max_power_w", cfg.max_power_w);
    o.read("urllc_snr_floor", cfg.urllc_snr_floor);
    o.read("error_prob", cfg.error_prob);
    o.read("fading_block", cfg.fading_block);
    o.read("min_distance_m", cfg.min_distance_m);
    o.finish();
  }
  {
    StrictObject o(*top.child("qos"), "qos", origin);
    o.read("latency_budget_s", cfg.latency_budget_s);
    o.read("queue_cap_bits", cfg.queue_cap_bits);
    if (const json* lc = o.child("latency_constants")) {
      StrictObject c(*lc, "qos.latency_constants", origin);
      c.read("cu_processing_s", cfg.latency_constants.cu_processing_s);
      c.read("du_processing_s", cfg.latency_constants.du_processing_s);
      c.read("ru_processing_s", cfg.latency_constants.ru_processing_s);
      c.read("midhaul_s", cfg.latency_constants.midhaul_s);
      c.read("fronthaul_s", cfg.latency_constants.fronthaul_s);
      c.finish();
    }
    o.finish();
  }
  {
    StrictObject o(*top.child("slicing"), "slicing", origin);
    o.read("urllc_overflow_divisor", cfg.urllc_overflow_divisor);
    o.read("allow_zero_urllc_window", cfg.allow_zero_urllc_window);
    o.finish();
  }
  {
    StrictObject o(*top.child("flow_split"), "flow_split", origin);
    o.read("window_frames", cfg.flow_split_window);
    o.finish();
  }
  {
    StrictObject o(*top.child("reward"), "reward", origin);
    o.read("omega", cfg.omega);
    o.read("ref_queue_bits", cfg.ref_queue_bits);
    o.read("ref_latency_s", cfg.ref_latency_s);
    o.read("ref_rate_bits", cfg.ref_rate_bits);
    o.read("penalty_value", cfg.penalty_value);
    o.finish();
  }
  {
    StrictObject o(*top.child("learning"), "learning", origin);
    o.read("discount", cfg.discount);
    o.read("target_update", cfg.target_update);
    o.read("target_update_period", cfg.target_update_period);
    o.read("soft_update_coeff", cfg.soft_update_coeff);
    o.read("replay_capacity", cfg.replay_capacity);
    o.read("batch_size", cfg.batch_size);
    if (const json* eps = o.child("epsilon")) {
      StrictObject e(*eps, "learning.epsilon", origin);
      e.read("start", cfg.epsilon.start);
      e.read("end", cfg.epsilon.end);
      e.read("decay", cfg.epsilon.decay);
      e.finish();
    }
    o.read("hidden_layers", cfg.hidden_layers);
    o.read("hidden_units", cfg.hidden_units);
    o.read("learning_rate", cfg.learning_rate);
    o.finish();
  }
  {
    StrictObject o(*top.child("training"), "training", origin);
    o.read("epochs", cfg.epochs);
    o.read("frames_per_episode", cfg.frames_per_episode);
    o.read("eval_frames", cfg.eval_frames);
    o.finish();
  }
  {
    StrictObject o(*top.child("state_norm"), "state_norm", origin);
    o.read("gain_log10_min", cfg.gain_log10_min);
    o.read("gain_log10_max", cfg.gain_log10_max);
    o.finish();
  }
  top.finish();

  std::vector<ConfigError> errs = validate_config(cfg);
  if (!errs.empty()) {
    std::string msg = "invalid config:";
    for (const ConfigError& e : errs) {
      msg += "\n  " + e.path + ": " + e.message;
    }
    config_error(origin, msg);
  }
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string metrics_to_csv(const std::vector<MetricsSeries>& series) {
  std::string out =
      "frame,scheme,seed,p_max_dbm,embb_throughput_bps,"
      "worst_urllc_latency_s,avg_queue_bits,reward,feasible\n";
  for (const MetricsSeries& s : series) {
    for (const FrameRecord& r : s.frames) {
      out += std::to_string(r.frame);
      out += ',';
      out += s.scheme;
      out += ',';
      out += std::to_string(s.seed);
      out += ',';
      out += format_double(s.p_max_dbm);
      out += ',';
      out += format_double(r.embb_throughput_bps);
      out += ',';
      out += format_double(r.worst_urllc_latency_s);
      out += ',';
      out += format_double(r.avg_queue_bits);
      out += ',';
      out += format_double(r.reward);
      out += ',';
      out += r.feasible ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

void write_metrics(const std::vector<MetricsSeries>& series,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open metrics file for write: " + path);
  }
  out << metrics_to_csv(series);
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::vector<MetricsSeries> read_metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open metrics file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty metrics file: " + path);
  }
  std::vector<MetricsSeries> series;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 9) {
      throw std::runtime_error("bad metrics row: '" + line + "'");
    }
    FrameRecord r;
    r.frame = std::stoll(f[0]);
    const std::string& scheme = f[1];
    const uint64_t seed = std::stoull(f[2]);
    const double p_max_dbm = parse_double(f[3]);
    r.embb_throughput_bps = parse_double(f[4]);
    r.worst_urllc_latency_s = parse_double(f[5]);
    r.avg_queue_bits = parse_double(f[6]);
    r.reward = parse_double(f[7]);
    r.feasible = f[8] == "1";

    const bool same = !series.empty() && series.back().scheme == scheme &&
                      series.back().seed == seed &&
                      series.back().p_max_dbm == p_max_dbm;
    if (!same) {
      MetricsSeries s;
      s.scheme = scheme;
      s.seed = seed;
      s.p_max_dbm = p_max_dbm;
      series.push_back(std::move(s));
    }
    series.back().frames.push_back(r);
  }
  return series;
}

namespace {

constexpr char kCheckpointMagic[8] = {'O', 'R', 'S', 'I', 'M', 'C', 'K', 'P'};
constexpr uint32_t kCheckpointVersion = 2;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) {
    throw std::runtime_error(std::string("checkpoint truncated reading ") +
                             what);
  }
  return v;
}

void write_block(std::ofstream& out, const std::vector<double>& data) {
  write_pod<uint64_t>(out, data.size());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

std::vector<double> read_block(std::ifstream& in, const char* what) {
  const uint64_t n = read_pod<uint64_t>(in, what);
  std::vector<double> data(n);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) {
    throw std::runtime_error(std::string("checkpoint truncated reading ") +
                             what);
  }
  return data;
}

struct NetShape {
  uint32_t input_dim = 0;
  uint32_t hidden_layers = 0;
  uint32_t hidden_units = 0;
  uint32_t output_dim = 0;
};

NetShape shape_of(const Mlp& net) {
  NetShape s;
  s.input_dim = static_cast<uint32_t>(net.input_dim());
  s.output_dim = static_cast<uint32_t>(net.output_dim());
  s.hidden_layers = static_cast<uint32_t>(net.num_layers() - 1);
  s.hidden_units = s.hidden_layers > 0
                       ? static_cast<uint32_t>(net.weights()[0].cols())
                       : 0;
  return s;
}

}  // namespace

void save_checkpoint(const std::array<AgentState, 2>& agents,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open checkpoint for write: " + path);
  }
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_pod(out, kCheckpointVersion);
  write_pod<uint32_t>(out, 2);

  std::vector<double> flat;
  for (const AgentState& a : agents) {
    write_pod<int32_t>(out, a.spec.slice);
    write_pod<int32_t>(out, a.spec.state_dim);
    write_pod<int32_t>(out, a.spec.heads);
    write_pod<int32_t>(out, a.spec.choices);
    write_pod<uint32_t>(out, static_cast<uint32_t>(a.spec.users.size()));
    for (int32_t u : a.spec.users) {
      write_pod<int32_t>(out, u);
    }
    const NetShape shape = shape_of(a.online);
    write_pod(out, shape.input_dim);
    write_pod(out, shape.hidden_layers);
    write_pod(out, shape.hidden_units);
    write_pod(out, shape.output_dim);
    write_pod<int64_t>(out, a.train_steps);
    write_pod<double>(out, a.epsilon);
    write_pod<int64_t>(out, a.adam.step);

    flat.clear();
    a.online.flatten_to(flat);
    write_block(out, flat);
    flat.clear();
    a.target.flatten_to(flat);
    write_block(out, flat);
    flat.clear();
    a.adam.flatten_to(flat);
    write_block(out, flat);
  }
  if (!out) {
    throw std::runtime_error("checkpoint write failed: " + path);
  }
}

std::array<AgentState, 2> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint: " + path);
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  const uint32_t version = read_pod<uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version));
  }
  const uint32_t count = read_pod<uint32_t>(in, "agent count");
  if (count != 2) {
    throw std::runtime_error("expected 2 agents, found " +
                             std::to_string(count));
  }

  std::array<AgentState, 2> agents;
  for (AgentState& a : agents) {
    a.spec.slice = read_pod<int32_t>(in, "slice");
    a.spec.state_dim = read_pod<int32_t>(in, "state_dim");
    a.spec.heads = read_pod<int32_t>(in, "heads");
    a.spec.choices = read_pod<int32_t>(in, "choices");
    const uint32_t num_serviceable = read_pod<uint32_t>(in, "user count");
    a.spec.users.resize(num_serviceable);
    for (uint32_t i = 0; i < num_serviceable; ++i) {
      a.spec.users[i] = read_pod<int32_t>(in, "serviceable user");
    }
    NetShape shape;
    shape.input_dim = read_pod<uint32_t>(in, "input_dim");
    shape.hidden_layers = read_pod<uint32_t>(in, "hidden_layers");
    shape.hidden_units = read_pod<uint32_t>(in, "hidden_units");
    shape.output_dim = read_pod<uint32_t>(in, "output_dim");
    a.train_steps = read_pod<int64_t>(in, "train_steps");
    a.epsilon = read_pod<double>(in, "epsilon");
    const int64_t adam_steps = read_pod<int64_t>(in, "adam step");

    a.online = Mlp(static_cast<int>(shape.input_dim),
                   static_cast<int>(shape.hidden_layers),
                   static_cast<int>(shape.hidden_units),
                   static_cast<int>(shape.output_dim));
    a.target = a.online;
    a.adam.match(a.online);
    a.adam.step = adam_steps;

    std::vector<double> flat = read_block(in, "online parameters");
    if (flat.size() != a.online.parameter_count()) {
      throw std::runtime_error(
          "online parameter block holds " + std::to_string(flat.size()) +
          " doubles, network needs " +
          std::to_string(a.online.parameter_count()));
    }
    a.online.unflatten_from(flat.data(), flat.size());
    flat = read_block(in, "target parameters");
    if (flat.size() != a.target.parameter_count()) {
      throw std::runtime_error(
          "target parameter block holds " + std::to_string(flat.size()) +
          " doubles, network needs " +
          std::to_string(a.target.parameter_count()));
    }
    a.target.unflatten_from(flat.data(), flat.size());
    flat = read_block(in, "adam moments");
    if (flat.size() != 2 * a.online.parameter_count()) {
      throw std::runtime_error(
          "adam moment block holds " + std::to_string(flat.size()) +
          " doubles, expected " +
          std::to_string(2 * a.online.parameter_count()));
    }
    a.adam.unflatten_from(flat.data(), flat.size());
  }
  return agents;
}

void ensure_checkpoint_matches(const std::array<AgentState, 2>& agents,
                               const SystemConfig& cfg, const RBGrid& grid) {
  for (int i = 0; i < 2; ++i) {
    const AgentSpec want = AgentSpec::make(i, cfg, grid);
    const AgentSpec& got = agents[i].spec;
    if (want.heads != got.heads || want.choices != got.choices ||
        want.state_dim != got.state_dim || want.users != got.users) {
      throw std::runtime_error(
          "checkpoint shape mismatch for agent " + std::to_string(i) +
          ": heads " + std::to_string(got.heads) + " vs " +
          std::to_string(want.heads) + ", choices " +
          std::to_string(got.choices) + " vs " + std::to_string(want.choices) +
          ", state_dim " + std::to_string(got.state_dim) + " vs " +
          std::to_string(want.state_dim));
    }
  }
}

namespace {

void write_doubles_line(std::ofstream& out, const std::vector<double>& v) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) {
      out << ' ';
    }
    out << format_double(v[i]);
  }
  out << '\n';
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    out.push_back(tok);
  }
  return out;
}

std::string next_line(std::ifstream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(std::string("trace truncated at ") + what);
  }
  return line;
}

}  // namespace

void dump_trace(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open trace for write: " + path);
  }
  out << "oransim-trace 1\n";
  out << "grid";
  for (int s = 0; s < kNumSlices; ++s) {
    const int rbs = trace.gains.empty() ? 0 : trace.gains[0].rbs()[s];
    const int ttis = trace.gains.empty() ? 0 : trace.gains[0].ttis()[s];
    out << ' ' << rbs << ' ' << ttis;
  }
  out << '\n';
  out << "rus " << trace.topology.num_rus() << '\n';
  for (const Point2D& p : trace.topology.rus) {
    out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
  }
  out << "users " << trace.topology.num_users() << '\n';
  for (const Point2D& p : trace.topology.users) {
    out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
  }
  out << "dist\n";
  for (const std::vector<double>& row : trace.topology.distance) {
    write_doubles_line(out, row);
  }
  out << "frames " << trace.arrivals.size() << '\n';
  for (size_t k = 0; k < trace.arrivals.size(); ++k) {
    out << "frame " << k << '\n';
    out << "arrivals";
    for (uint64_t p : trace.arrivals[k].packets) {
      out << ' ' << p;
    }
    out << '\n';
    for (int s = 0; s < kNumSlices; ++s) {
      const std::vector<double>& data = trace.gains[k].slice_data(s);
      out << "gains" << s << ' ' << data.size() << '\n';
      write_doubles_line(out, data);
    }
  }
  if (!out) {
    throw std::runtime_error("trace write failed: " + path);
  }
}

RunTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open trace: " + path);
  }
  RunTrace trace;
  if (next_line(in, "header") != "oransim-trace 1") {
    throw std::runtime_error("not a trace file (bad header): " + path);
  }

  std::vector<std::string> tok = split_ws(next_line(in, "grid"));
  if (tok.size() != 5 || tok[0] != "grid") {
    throw std::runtime_error("trace: expected 'grid F0 T0 F1 T1'");
  }
  RBGrid dims;
  dims.num_rbs = {std::stoi(tok[1]), std::stoi(tok[3])};
  dims.num_ttis = {std::stoi(tok[2]), std::stoi(tok[4])};

  tok = split_ws(next_line(in, "rus"));
  if (tok.size() != 2 || tok[0] != "rus") {
    throw std::runtime_error("trace: expected 'rus <n>'");
  }
  const int num_rus = std::stoi(tok[1]);
  for (int m = 0; m < num_rus; ++m) {
    tok = split_ws(next_line(in, "ru coordinates"));
    if (tok.size() != 2) {
      throw std::runtime_error("trace: bad RU coordinate line");
    }
    trace.topology.rus.push_back({parse_double(tok[0]), parse_double(tok[1])});
  }

  tok = split_ws(next_line(in, "users"));
  if (tok.size() != 2 || tok[0] != "users") {
    throw std::runtime_error("trace: expected 'users <n>'");
  }
  const int num_users = std::stoi(tok[1]);
  for (int u = 0; u < num_users; ++u) {
    tok = split_ws(next_line(in, "user coordinates"));
    if (tok.size() != 2) {
      throw std::runtime_error("trace: bad user coordinate line");
    }
    trace.topology.users.push_back(
        {parse_double(tok[0]), parse_double(tok[1])});
  }

  if (next_line(in, "dist") != "dist") {
    throw std::runtime_error("trace: expected 'dist'");
  }
  trace.topology.distance.assign(num_rus, std::vector<double>(num_users));
  for (int m = 0; m < num_rus; ++m) {
    tok = split_ws(next_line(in, "distance row"));
    if (static_cast<int>(tok.size()) != num_users) {
      throw std::runtime_error("trace: bad distance row width");
    }
    for (int u = 0; u < num_users; ++u) {
      trace.topology.distance[m][u] = parse_double(tok[u]);
    }
  }

  tok = split_ws(next_line(in, "frames"));
  if (tok.size() != 2 || tok[0] != "frames") {
    throw std::runtime_error("trace: expected 'frames <n>'");
  }
  const long frames = std::stol(tok[1]);
  for (long k = 0; k < frames; ++k) {
    tok = split_ws(next_line(in, "frame marker"));
    if (tok.size() != 2 || tok[0] != "frame" || std::stol(tok[1]) != k) {
      throw std::runtime_error("trace: bad frame marker at frame " +
                               std::to_string(k));
    }
    tok = split_ws(next_line(in, "arrivals"));
    if (tok.empty() || tok[0] != "arrivals" ||
        static_cast<int>(tok.size()) != num_users + 1) {
      throw std::runtime_error("trace: bad arrivals line at frame " +
                               std::to_string(k));
    }
    TrafficArrivals arr;
    for (int u = 0; u < num_users; ++u) {
      arr.packets.push_back(std::stoull(tok[u + 1]));
    }
    trace.arrivals.push_back(std::move(arr));

    ChannelGains gains(num_rus, num_users, dims);
    for (int s = 0; s < kNumSlices; ++s) {
      tok = split_ws(next_line(in, "gains header"));
      if (tok.size() != 2 || tok[0] != "gains" + std::to_string(s)) {
        throw std::runtime_error("trace: bad gains header at frame " +
                                 std::to_string(k));
      }
      const size_t len = std::stoull(tok[1]);
      if (len != gains.slice_data(s).size()) {
        throw std::runtime_error("trace: gains size does not match grid at "
                                 "frame " +
                                 std::to_string(k));
      }
      tok = split_ws(next_line(in, "gains values"));
      if (tok.size() != len) {
        throw std::runtime_error("trace: gains length mismatch at frame " +
                                 std::to_string(k));
      }
      for (size_t i = 0; i < len; ++i) {
        gains.slice_data(s)[i] = parse_double(tok[i]);
      }
    }
    trace.gains.push_back(std::move(gains));
  }
  return trace;
}

uint64_t fnv1a64(const void* data, size_t size) {
  const unsigned char* bytes = static_cast<const unsigned char*>(data);
  uint64_t hash = 1469598103934665603ULL;
  for (size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file for hashing: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  const uint64_t h = fnv1a64(bytes.data(), bytes.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string now_utc_iso8601() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return std::string(buf);
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  json j;
  j["config_path"] = manifest.config_path;
  j["config_hash"] = manifest.config_hash;
  j["seeds"] = manifest.seeds;
  j["scheme"] = manifest.scheme;
  j["code_version"] = manifest.code_version;
  j["started_utc"] = manifest.started_utc;
  j["finished_utc"] = manifest.finished_utc;
  j["outputs"] = manifest.outputs;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open manifest for write: " + path);
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("manifest write failed: " + path);
  }
}

}  // namespace oransim
