#include "mctcp/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mctcp/error.hpp"

namespace mctcp::config {

namespace {

using engine::SimConfig;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw InvalidParameter("expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::int64_t to_int(std::string_view v) {
  std::int64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw InvalidParameter("expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t to_uint(std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw InvalidParameter("expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidParameter("expected true or false, got '" + std::string(v) + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Key {
  const char* name;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

// Scaled floating-point field: the file holds value / scale.
template <class F>
Key real(const char* name, double scale, F field) {
  return {name,
          [=](SimConfig& c, std::string_view v) { field(c) = to_double(v) * scale; },
          [=](const SimConfig& c) {
            return fmt(field(const_cast<SimConfig&>(c)) / scale);
          }};
}

template <class F>
Key integer(const char* name, F field) {
  return {name,
          [=](SimConfig& c, std::string_view v) {
            field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(to_int(v));
          },
          [=](const SimConfig& c) { return std::to_string(field(const_cast<SimConfig&>(c))); }};
}

template <class F>
Key text(const char* name, F field) {
  return {name, [=](SimConfig& c, std::string_view v) { field(c) = std::string(v); },
          [=](const SimConfig& c) { return field(const_cast<SimConfig&>(c)); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      real("dt_us", 1e-6, [](SimConfig& c) -> double& { return c.medium.timestep_s; }),
      real("temperature_k", 1.0, [](SimConfig& c) -> double& { return c.medium.temperature_k; }),
      real("restitution", 1.0, [](SimConfig& c) -> double& { return c.restitution; }),
      real("viscosity_pa_s", 1.0,
           [](SimConfig& c) -> double& { return c.medium.viscosity_pa_s; }),
      real("alpha", 1.0, [](SimConfig& c) -> double& { return c.rx.growth_order; }),
      real("beta", 1.0, [](SimConfig& c) -> double& { return c.rx.tolerance; }),
      real("symbol_time_s", 1.0, [](SimConfig& c) -> double& { return c.codec.symbol_time_s; }),
      real("r_rx_um", 1e-6, [](SimConfig& c) -> double& { return c.rx_geometry.node_radius_m; }),
      real("r_tx_um", 1e-6, [](SimConfig& c) -> double& { return c.tx_geometry.node_radius_m; }),
      integer("receptors_rx", [](SimConfig& c) -> int& { return c.rx_geometry.receptor_count; }),
      integer("receptors_tx", [](SimConfig& c) -> int& { return c.tx_geometry.receptor_count; }),
      real("r_c_rx_nm", 1e-9, [](SimConfig& c) -> double& { return c.r_species.molecule_radius_m; }),
      real("r_c_tx_nm", 1e-9, [](SimConfig& c) -> double& { return c.s_species.molecule_radius_m; }),
      real("r_r_rx_nm", 1e-9,
           [](SimConfig& c) -> double& { return c.rx_geometry.receptor_radius_m; }),
      real("r_r_tx_nm", 1e-9,
           [](SimConfig& c) -> double& { return c.tx_geometry.receptor_radius_m; }),
      Key{"t_traff_us",
          [](SimConfig& c, std::string_view v) {
            c.rx_geometry.trafficking_time_s = c.tx_geometry.trafficking_time_s =
                to_double(v) * 1e-6;
          },
          [](const SimConfig& c) { return fmt(c.rx_geometry.trafficking_time_s / 1e-6); }},
      integer("zeta_s", [](SimConfig& c) -> std::int64_t& { return c.codec.detection_threshold; }),
      real("delta_t_ms", 1e-3, [](SimConfig& c) -> double& { return c.tx.emission_interval_s; }),
      real("timeout_rx_s", 1.0, [](SimConfig& c) -> double& { return c.rx.attempt_timeout_s; }),
      integer("zeta_halve", [](SimConfig& c) -> std::int64_t& { return c.rx.halve_threshold; }),
      integer("zeta_stop", [](SimConfig& c) -> std::int64_t& { return c.rx.stop_target; }),
      text("codeword_start", [](SimConfig& c) -> std::string& { return c.codec.start; }),
      text("codeword_halve", [](SimConfig& c) -> std::string& { return c.codec.halve; }),
      text("codeword_stop", [](SimConfig& c) -> std::string& { return c.codec.stop; }),
      real("d_um", 1e-6, [](SimConfig& c) -> double& { return c.distance_m; }),
      integer("b0_rx", [](SimConfig& c) -> std::int64_t& { return c.rx.initial_burst; }),
      integer("b0_tx", [](SimConfig& c) -> std::int64_t& { return c.tx.initial_burst; }),
      integer("zeta_rtt", [](SimConfig& c) -> std::int64_t& { return c.rx.rtt_threshold; }),
      real("t_w_s", 1.0, [](SimConfig& c) -> double& { return c.rx.control_period_s; }),
      integer("c_tx_max", [](SimConfig& c) -> std::int64_t& { return c.tx.max_total; }),
      integer("c_a_max", [](SimConfig& c) -> int& { return c.rx.max_attempts; }),
      integer("sync_divisor", [](SimConfig& c) -> int& { return c.codec.sync_sample_divisor; }),
      real("gamma_c1", 1.0, [](SimConfig& c) -> double& { return c.fit.c1; }),
      real("gamma_c2", 1.0, [](SimConfig& c) -> double& { return c.fit.c2; }),
      Key{"channel",
          [](SimConfig& c, std::string_view v) { c.channel_mode = engine::channel_mode_from_string(v); },
          [](const SimConfig& c) { return std::string(engine::to_string(c.channel_mode)); }},
      text("channel_stats", [](SimConfig& c) -> std::string& { return c.channel_stats; }),
      real("p_capture_tx", 1.0, [](SimConfig& c) -> double& { return c.p_capture_tx; }),
      real("p_capture_rx", 1.0, [](SimConfig& c) -> double& { return c.p_capture_rx; }),
      real("cull_factor", 1.0, [](SimConfig& c) -> double& { return c.cull_factor; }),
      Key{"seed", [](SimConfig& c, std::string_view v) { c.seed = to_uint(v); },
          [](const SimConfig& c) { return std::to_string(c.seed); }},
      real("max_sim_time_s", 1.0, [](SimConfig& c) -> double& { return c.max_sim_time_s; }),
      real("tick_ms", 1e-3, [](SimConfig& c) -> double& { return c.tick_s; }),
      real("drain_s", 1.0, [](SimConfig& c) -> double& { return c.drain_s; }),
      real("stimulus_s", 1.0, [](SimConfig& c) -> double& { return c.stimulus_time_s; }),
      Key{"tx_present", [](SimConfig& c, std::string_view v) { c.tx_present = to_bool(v); },
          [](const SimConfig& c) { return std::string(c.tx_present ? "true" : "false"); }},
  };
  return table;
}

const Key* find_key(std::string_view name) {
  for (const auto& k : keys()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

}  // namespace

SimConfig parse_config(std::string_view text, SimConfig c) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto prefix = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(prefix + "expected key = value, got '" + std::string(line) + "'");
    }
    const auto name = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const Key* key = find_key(name);
    if (!key) throw ConfigError(prefix + "unknown key '" + std::string(name) + "'");
    if (!seen.insert(std::string(name)).second) {
      throw ConfigError(prefix + "key '" + std::string(name) + "' given twice");
    }
    if (value.empty()) throw ConfigError(prefix + "missing value for '" + std::string(name) + "'");
    try {
      key->set(c, value);
    } catch (const Error& e) {
      throw ConfigError(prefix + std::string(name) + ": " + e.what());
    }
  }
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const SimConfig& c) {
  std::string out;
  for (const auto& k : keys()) {
    out += k.name;
    out += " = ";
    out += k.get(c);
    out += '\n';
  }
  return out;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.emplace_back(k.name);
  return out;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find(',', pos), text.size());
    const auto item = trim(text.substr(pos, end - pos));
    if (item.empty()) throw ConfigError("empty entry in number list '" + std::string(text) + "'");
    out.push_back(to_double(item));
    pos = end + 1;
  }
  return out;
}

}  // namespace mctcp::config
