#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dpathsim/empirical_distribution.hpp"
#include "dpathsim/error.hpp"
#include "dpathsim/rng.hpp"

namespace dpathsim {

// Surrogate for the 5-tuple a flow rule matches on.
struct FlowKey {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint32_t size_class = 0;

  auto operator<=>(const FlowKey&) const = default;
};

std::string to_string(const FlowKey& key);

struct FlowKeyHash {
  std::size_t operator()(const FlowKey& k) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(k.src) << 32) ^ k.dst;
    h = mix_seed(h ^ (static_cast<std::uint64_t>(k.size_class) << 17));
    return static_cast<std::size_t>(h);
  }
};

struct FlowStats {
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  double last_used_us = 0;

  bool operator==(const FlowStats&) const = default;
};

class CacheFullError : public Error {
 public:
  explicit CacheFullError(const FlowKey& key)
      : Error(ErrorCode::kCacheFull, "no room to install flow " + to_string(key)), key_(key) {}
  const FlowKey& key() const noexcept { return key_; }

 private:
  FlowKey key_;
};

// Kernel flow table: installed keys with per-entry statistics, evicting the
// least recently used entry when full. Recency is refreshed by install and
// update_stats; lookup is a pure membership query.
class FlowCache {
 public:
  static constexpr std::size_t kDefaultCapacity = 8192;

  explicit FlowCache(std::size_t capacity = kDefaultCapacity, bool evict_when_full = true);

  bool lookup(const FlowKey& key) const { return index_.contains(key); }

  // Throws already-installed, or cache-full when eviction is disabled.
  // Returns the evicted key, if any.
  std::optional<FlowKey> install(const FlowKey& key);

  // Throws missing-flow.
  void update_stats(const FlowKey& key, std::uint64_t bytes, double now_us);

  std::optional<FlowStats> stats(const FlowKey& key) const;

  std::size_t size() const { return index_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t evictions() const { return evictions_; }
  // Packets counted by entries that have since been evicted.
  std::uint64_t evicted_packets() const { return evicted_packets_; }
  std::uint64_t installed_packets() const;

  // Most recently used first.
  std::vector<FlowKey> keys_by_recency() const;

 private:
  struct Entry {
    FlowKey key;
    FlowStats stats;
  };
  using List = std::list<Entry>;

  std::size_t capacity_;
  bool evict_when_full_;
  List order_;
  std::unordered_map<FlowKey, List::iterator, FlowKeyHash> index_;
  std::uint64_t evictions_ = 0;
  std::uint64_t evicted_packets_ = 0;
};

enum class Stage : std::uint8_t { kCpuCounters = 0, kLookup = 1, kUpcall = 2, kStatsUpdate = 3 };

inline constexpr std::array<Stage, 4> kStages = {Stage::kCpuCounters, Stage::kLookup, Stage::kUpcall,
                                                 Stage::kStatsUpdate};

// "cpu_counters", "lookup", "upcall", "stats_update".
std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

// One ECDF per datapath stage.
class StageDelayModel {
 public:
  StageDelayModel(EmpiricalDistribution cpu_counters, EmpiricalDistribution lookup,
                  EmpiricalDistribution upcall, EmpiricalDistribution stats_update)
      : stages_{std::move(cpu_counters), std::move(lookup), std::move(upcall), std::move(stats_update)} {}

  static StageDelayModel point_masses(double cpu_counters, double lookup, double upcall,
                                      double stats_update);

  const EmpiricalDistribution& operator[](Stage s) const { return stages_[static_cast<std::size_t>(s)]; }

  bool operator==(const StageDelayModel&) const = default;

 private:
  std::array<EmpiricalDistribution, 4> stages_;
};

struct PacketArrival {
  std::uint64_t id = 0;
  double arrival_us = 0;
  FlowKey key;
  std::uint32_t size_bytes = 0;

  bool operator==(const PacketArrival&) const = default;
};

struct PacketRecord {
  std::uint64_t id = 0;
  double arrival_us = 0;
  FlowKey key;
  std::uint32_t size_bytes = 0;
  bool cache_hit = false;
  double cpu_counters_us = 0;
  double lookup_us = 0;
  double upcall_us = 0;
  double stats_update_us = 0;
  double total_us = 0;
  double queue_wait_us = 0;
  double departure_us = 0;

  double stage(Stage s) const;

  bool operator==(const PacketRecord&) const = default;
};

// Sum in the fixed order cpu, lookup, upcall, stats.
inline double stage_sum(const PacketRecord& r) {
  return r.cpu_counters_us + r.lookup_us + r.upcall_us + r.stats_update_us;
}

// Single-server kernel datapath. Packets are served in call order; a packet
// arriving while the previous one is in service waits, and the wait is kept
// out of total_us.
class Datapath {
 public:
  Datapath(const StageDelayModel& model, FlowCache cache);

  PacketRecord process_packet(const PacketArrival& packet, Rng& rng);

  const FlowCache& cache() const { return cache_; }
  std::uint64_t processed() const { return processed_; }

 private:
  const StageDelayModel* model_;
  FlowCache cache_;
  double busy_until_us_ = 0;
  std::uint64_t processed_ = 0;
};

}  // namespace dpathsim
