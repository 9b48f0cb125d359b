#include "dpathsim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "dpathsim/reference_models.hpp"
#include "dpathsim/trace_io.hpp"

namespace dpathsim {

std::string_view to_string(Platform p) { return p == Platform::kVoi ? "VOI" : "BOI"; }

std::string_view to_string(ArrivalProcess a) { return a == ArrivalProcess::kCbr ? "cbr" : "poisson"; }

namespace {

[[noreturn]] void bad_key(std::string_view key, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, "key '" + std::string(key) + "': " + why);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    bad_key(key, "cannot parse '" + std::string(value) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) bad_key(key, "value must be finite");
  }
  return out;
}

std::vector<std::uint32_t> parse_sizes(std::string_view key, std::string_view value) {
  if (value.starts_with("variable:")) value.remove_prefix(9);
  std::vector<std::uint32_t> sizes;
  while (!value.empty()) {
    const auto comma = value.find(',');
    sizes.push_back(parse_number<std::uint32_t>(key, trim(value.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  if (sizes.empty()) bad_key(key, "no packet size given");
  return sizes;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(ram_gb > 0)) bad_key("ram_gb", "must be positive");
  if (cpu_cores < 1) bad_key("cpu_cores", "must be positive");
  if (packet_sizes.empty()) bad_key("packet_size_bytes", "no packet size given");
  for (auto s : packet_sizes) {
    if (s < 1) bad_key("packet_size_bytes", "sizes must be at least 1 byte");
  }
  if (!(rate_lo_bps > 0) || !(rate_hi_bps > 0)) {
    throw Error(ErrorCode::kInvalidRate, "data rate must be positive");
  }
  if (rate_lo_bps > rate_hi_bps) bad_key("data_rate_bps_lo", "exceeds data_rate_bps_hi");
  if (packet_count < 1) bad_key("packet_count", "must be at least 1");
  if (cache_capacity < 1) bad_key("cache_capacity", "must be at least 1");
  if (flow_count < 1) bad_key("flow_count", "must be at least 1");
  if (model_source.empty()) bad_key("model_source", "missing");
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig c;
  std::set<std::string, std::less<>> seen;
  bool fixed_rate = false;
  bool ranged_lo = false;
  bool ranged_hi = false;

  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.emplace(key).second) bad_key(key, "given more than once");

    if (key == "platform") {
      if (value == "VOI" || value == "voi") {
        c.platform = Platform::kVoi;
      } else if (value == "BOI" || value == "boi") {
        c.platform = Platform::kBoi;
      } else {
        bad_key(key, "expected VOI or BOI");
      }
    } else if (key == "ram_gb") {
      c.ram_gb = parse_number<double>(key, value);
    } else if (key == "cpu_cores") {
      c.cpu_cores = parse_number<int>(key, value);
    } else if (key == "packet_size_bytes") {
      c.packet_sizes = parse_sizes(key, value);
    } else if (key == "data_rate_bps") {
      c.rate_lo_bps = c.rate_hi_bps = parse_number<double>(key, value);
      fixed_rate = true;
    } else if (key == "data_rate_bps_lo") {
      c.rate_lo_bps = parse_number<double>(key, value);
      ranged_lo = true;
    } else if (key == "data_rate_bps_hi") {
      c.rate_hi_bps = parse_number<double>(key, value);
      ranged_hi = true;
    } else if (key == "packet_count") {
      c.packet_count = parse_number<std::uint64_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "model_source") {
      c.model_source = std::string(value);
    } else if (key == "cache_capacity") {
      c.cache_capacity = parse_number<std::size_t>(key, value);
    } else if (key == "flow_count") {
      c.flow_count = parse_number<std::uint32_t>(key, value);
    } else if (key == "arrival_process") {
      if (value == "cbr") {
        c.arrival_process = ArrivalProcess::kCbr;
      } else if (value == "poisson") {
        c.arrival_process = ArrivalProcess::kPoisson;
      } else {
        bad_key(key, "expected cbr or poisson");
      }
    } else {
      bad_key(key, "unknown key");
    }
  }

  if (fixed_rate && (ranged_lo || ranged_hi)) {
    bad_key("data_rate_bps", "cannot be combined with data_rate_bps_lo/hi");
  }
  if (ranged_lo != ranged_hi) bad_key(ranged_lo ? "data_rate_bps_hi" : "data_rate_bps_lo", "missing");
  c.validate();
  return c;
}

std::string format_config(const ScenarioConfig& c) {
  std::string out;
  auto put = [&out](std::string_view k, const std::string& v) {
    out.append(k).append("=").append(v).append("\n");
  };
  put("platform", std::string(to_string(c.platform)));
  put("ram_gb", shortest(c.ram_gb));
  put("cpu_cores", std::to_string(c.cpu_cores));
  std::string sizes = c.variable_size() ? "variable:" : "";
  for (std::size_t i = 0; i < c.packet_sizes.size(); ++i) {
    if (i) sizes += ",";
    sizes += std::to_string(c.packet_sizes[i]);
  }
  put("packet_size_bytes", sizes);
  if (c.fixed_rate()) {
    put("data_rate_bps", shortest(c.rate_lo_bps));
  } else {
    put("data_rate_bps_lo", shortest(c.rate_lo_bps));
    put("data_rate_bps_hi", shortest(c.rate_hi_bps));
  }
  put("packet_count", std::to_string(c.packet_count));
  put("seed", std::to_string(c.seed));
  put("model_source", c.model_source);
  put("cache_capacity", std::to_string(c.cache_capacity));
  put("flow_count", std::to_string(c.flow_count));
  put("arrival_process", std::string(to_string(c.arrival_process)));
  return out;
}

std::vector<PacketArrival> generate_arrivals(const ScenarioConfig& c, Rng& rng) {
  if (!(c.rate_lo_bps > 0) || !(c.rate_hi_bps > 0) || !std::isfinite(c.rate_hi_bps)) {
    throw Error(ErrorCode::kInvalidRate, "data rate must be positive");
  }
  c.validate();

  std::vector<PacketArrival> out;
  out.reserve(c.packet_count);
  double t = 0;
  for (std::uint64_t i = 0; i < c.packet_count; ++i) {
    PacketArrival p;
    p.id = i;
    p.arrival_us = t;
    p.size_bytes = c.variable_size() ? c.packet_sizes[rng.below(c.packet_sizes.size())] : c.packet_sizes[0];
    const auto flow = c.flow_count == 1 ? 0U : static_cast<std::uint32_t>(rng.below(c.flow_count));
    p.key = FlowKey{flow + 1, 0, c.variable_size() ? 0U : c.packet_sizes[0]};

    const double rate =
        c.fixed_rate() ? c.rate_lo_bps : c.rate_lo_bps + (c.rate_hi_bps - c.rate_lo_bps) * rng.uniform_open_closed();
    double gap = static_cast<double>(p.size_bytes) * 8e6 / rate;
    if (c.arrival_process == ArrivalProcess::kPoisson) {
      double u = rng.uniform_open_closed();
      while (u == 1.0) u = rng.uniform_open_closed();
      gap *= -std::log(u);
    }
    out.push_back(p);
    t += gap;
  }
  return out;
}

StageDelayModel resolve_model(std::string_view source, const std::filesystem::path& base_dir) {
  if (source.starts_with("point:")) {
    auto rest = source.substr(6);
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      const auto field = trim(rest.substr(0, comma));
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v[i]);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty() ||
          (i < 3 && comma == std::string_view::npos) || (i == 3 && comma != std::string_view::npos)) {
        throw Error(ErrorCode::kUnknownModel, "point model '" + std::string(source) + "' needs four delays");
      }
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    try {
      return StageDelayModel::point_masses(v[0], v[1], v[2], v[3]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kUnknownModel, "point model '" + std::string(source) + "': " + e.what());
    }
  }
  if (const ReferenceModel* ref = find_reference_model(source)) return ref->model;

  std::filesystem::path path(source);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  std::error_code ec;
  if (source.empty() || !std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kUnknownModel, "no bundled model or file named '" + std::string(source) + "'");
  }
  return load_model(read_file(path));
}

SimulationReport make_report(ScenarioConfig config, std::vector<PacketRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyTrace, "simulation produced no packets");
  std::array<std::vector<double>, 4> stage_values;
  std::vector<double> totals;
  totals.reserve(records.size());
  for (auto& v : stage_values) v.reserve(records.size());
  std::uint64_t hits = 0;
  for (const auto& r : records) {
    for (Stage s : kStages) stage_values[static_cast<std::size_t>(s)].push_back(r.stage(s));
    totals.push_back(r.total_us);
    hits += r.cache_hit ? 1 : 0;
  }

  std::array<EmpiricalDistribution, 4> dists{build_ecdf(stage_values[0]), build_ecdf(stage_values[1]),
                                             build_ecdf(stage_values[2]), build_ecdf(stage_values[3])};
  auto total = build_ecdf(totals);
  std::array<DistributionSummary, 4> summaries{summarize(dists[0]), summarize(dists[1]), summarize(dists[2]),
                                               summarize(dists[3])};
  const auto total_summary = summarize(total);
  const std::uint64_t misses = records.size() - hits;
  return SimulationReport{std::move(config), std::move(records), std::move(dists), std::move(total),
                          summaries,         total_summary,      hits,             misses};
}

SimulationReport run_simulation(const ScenarioConfig& config, const ModelResolver& resolver) {
  config.validate();
  const StageDelayModel model = resolver(config.model_source);

  Rng arrival_rng(config.seed, 1);
  Rng service_rng(config.seed, 2);
  const auto arrivals = generate_arrivals(config, arrival_rng);

  Datapath datapath(model, FlowCache(config.cache_capacity));
  std::vector<PacketRecord> records;
  records.reserve(arrivals.size());
  for (const auto& a : arrivals) records.push_back(datapath.process_packet(a, service_rng));
  return make_report(config, std::move(records));
}

SimulationReport run_simulation(const ScenarioConfig& config) {
  return run_simulation(config, [](std::string_view src) { return resolve_model(src); });
}

namespace {

MetricComparison compare_one(std::string metric, const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto sa = summarize(a);
  const auto sb = summarize(b);
  return MetricComparison{std::move(metric), ks_distance(a, b),
                          SummaryDelta{sb.min - sa.min, sb.max - sa.max, sb.mean - sa.mean, sb.median - sa.median,
                                       sb.p95 - sa.p95, sb.p99 - sa.p99}};
}

}  // namespace

std::vector<MetricComparison> compare_scenarios(const SimulationReport& a, const SimulationReport& b) {
  std::vector<MetricComparison> rows;
  for (Stage s : kStages) rows.push_back(compare_one(std::string(stage_name(s)), a.stage(s), b.stage(s)));
  rows.push_back(compare_one("total", a.total_dist, b.total_dist));
  return rows;
}

}  // namespace dpathsim
