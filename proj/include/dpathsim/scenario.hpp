#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dpathsim/datapath.hpp"
#include "dpathsim/empirical_distribution.hpp"
#include "dpathsim/rng.hpp"

namespace dpathsim {

enum class Platform { kVoi, kBoi };  // virtual machine vs. baremetal install
enum class ArrivalProcess { kCbr, kPoisson };

std::string_view to_string(Platform p);
std::string_view to_string(ArrivalProcess a);

struct ScenarioConfig {
  Platform platform = Platform::kVoi;
  double ram_gb = 1.0;
  int cpu_cores = 1;
  // One entry for a fixed size; several for "variable", drawn uniformly per packet.
  std::vector<std::uint32_t> packet_sizes{576};
  double rate_lo_bps = 750'000;
  double rate_hi_bps = 750'000;
  std::uint64_t packet_count = 10'000;
  std::uint64_t seed = 1;
  std::string model_source;
  std::size_t cache_capacity = FlowCache::kDefaultCapacity;
  std::uint32_t flow_count = 1;
  ArrivalProcess arrival_process = ArrivalProcess::kCbr;

  bool variable_size() const { return packet_sizes.size() > 1; }
  bool fixed_rate() const { return rate_lo_bps == rate_hi_bps; }

  // Throws invalid-config (or invalid-rate) naming the offending key.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

// Flat key=value text. Unknown or duplicate keys, and values that do not
// parse, throw invalid-config with the key in the message.
ScenarioConfig parse_config(std::string_view text);
std::string format_config(const ScenarioConfig& config);

// Constant bit rate by default: the gap after a packet is its size in bits
// divided by the rate, with the rate redrawn uniformly per packet when a
// range is configured. The first packet arrives at t = 0.
std::vector<PacketArrival> generate_arrivals(const ScenarioConfig& config, Rng& rng);

// Resolves model_source: a bundled reference model name, "point:c,l,u,s"
// for four point masses, or a path to a saved model (relative paths are
// taken from `base_dir`). Throws unknown-model.
StageDelayModel resolve_model(std::string_view source, const std::filesystem::path& base_dir = {});

using ModelResolver = std::function<StageDelayModel(std::string_view)>;

struct SimulationReport {
  ScenarioConfig config;
  std::vector<PacketRecord> records;
  std::array<EmpiricalDistribution, 4> stage_dists;
  EmpiricalDistribution total_dist;
  std::array<DistributionSummary, 4> stage_summaries;
  DistributionSummary total_summary;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;

  const EmpiricalDistribution& stage(Stage s) const { return stage_dists[static_cast<std::size_t>(s)]; }
  const DistributionSummary& summary(Stage s) const { return stage_summaries[static_cast<std::size_t>(s)]; }

  bool operator==(const SimulationReport&) const = default;
};

// Derives every distribution and count from the raw records.
SimulationReport make_report(ScenarioConfig config, std::vector<PacketRecord> records);

SimulationReport run_simulation(const ScenarioConfig& config, const ModelResolver& resolver);
SimulationReport run_simulation(const ScenarioConfig& config);

struct SummaryDelta {
  double min = 0;
  double max = 0;
  double mean = 0;
  double median = 0;
  double p95 = 0;
  double p99 = 0;
};

struct MetricComparison {
  std::string metric;  // stage name or "total"
  double ks = 0;
  SummaryDelta delta;  // b - a
};

// Rows in stage order followed by "total".
std::vector<MetricComparison> compare_scenarios(const SimulationReport& a, const SimulationReport& b);

}  // namespace dpathsim
