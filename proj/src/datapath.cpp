#include "dpathsim/datapath.hpp"

#include <algorithm>
#include <cmath>

namespace dpathsim {

std::string to_string(const FlowKey& key) {
  return std::to_string(key.src) + "->" + std::to_string(key.dst) + "/" + std::to_string(key.size_class);
}

FlowCache::FlowCache(std::size_t capacity, bool evict_when_full)
    : capacity_(capacity), evict_when_full_(evict_when_full) {
  if (capacity_ == 0) throw Error(ErrorCode::kInvalidConfig, "flow cache capacity must be positive");
  index_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

std::optional<FlowKey> FlowCache::install(const FlowKey& key) {
  if (lookup(key)) throw Error(ErrorCode::kAlreadyInstalled, "flow " + to_string(key));
  std::optional<FlowKey> evicted;
  if (index_.size() >= capacity_) {
    if (!evict_when_full_) throw CacheFullError(key);
    const Entry& victim = order_.back();
    evicted = victim.key;
    evicted_packets_ += victim.stats.packets;
    ++evictions_;
    index_.erase(victim.key);
    order_.pop_back();
  }
  order_.push_front(Entry{key, FlowStats{}});
  index_.emplace(key, order_.begin());
  return evicted;
}

void FlowCache::update_stats(const FlowKey& key, std::uint64_t bytes, double now_us) {
  const auto it = index_.find(key);
  if (it == index_.end()) throw Error(ErrorCode::kMissingFlow, "flow " + to_string(key));
  FlowStats& s = it->second->stats;
  ++s.packets;
  s.bytes += bytes;
  s.last_used_us = now_us;
  order_.splice(order_.begin(), order_, it->second);
}

std::optional<FlowStats> FlowCache::stats(const FlowKey& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second->stats;
}

std::uint64_t FlowCache::installed_packets() const {
  std::uint64_t total = 0;
  for (const auto& e : order_) total += e.stats.packets;
  return total;
}

std::vector<FlowKey> FlowCache::keys_by_recency() const {
  std::vector<FlowKey> keys;
  keys.reserve(order_.size());
  for (const auto& e : order_) keys.push_back(e.key);
  return keys;
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kCpuCounters: return "cpu_counters";
    case Stage::kLookup: return "lookup";
    case Stage::kUpcall: return "upcall";
    case Stage::kStatsUpdate: return "stats_update";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : kStages) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

StageDelayModel StageDelayModel::point_masses(double cpu_counters, double lookup, double upcall,
                                              double stats_update) {
  return StageDelayModel(EmpiricalDistribution::point_mass(cpu_counters),
                         EmpiricalDistribution::point_mass(lookup),
                         EmpiricalDistribution::point_mass(upcall),
                         EmpiricalDistribution::point_mass(stats_update));
}

double PacketRecord::stage(Stage s) const {
  switch (s) {
    case Stage::kCpuCounters: return cpu_counters_us;
    case Stage::kLookup: return lookup_us;
    case Stage::kUpcall: return upcall_us;
    case Stage::kStatsUpdate: return stats_update_us;
  }
  return 0;
}

Datapath::Datapath(const StageDelayModel& model, FlowCache cache) : model_(&model), cache_(std::move(cache)) {}

PacketRecord Datapath::process_packet(const PacketArrival& packet, Rng& rng) {
  if (!std::isfinite(packet.arrival_us) || packet.arrival_us < 0) {
    throw Error(ErrorCode::kInvalidArrival, "packet " + std::to_string(packet.id) + " has a bad arrival time");
  }
  const StageDelayModel& m = *model_;
  PacketRecord r;
  r.id = packet.id;
  r.arrival_us = packet.arrival_us;
  r.key = packet.key;
  r.size_bytes = packet.size_bytes;

  const double start = std::max(packet.arrival_us, busy_until_us_);
  r.queue_wait_us = start - packet.arrival_us;

  r.cpu_counters_us = m[Stage::kCpuCounters].sample(rng);
  r.lookup_us = m[Stage::kLookup].sample(rng);
  r.cache_hit = cache_.lookup(packet.key);
  if (!r.cache_hit) {
    r.upcall_us = m[Stage::kUpcall].sample(rng);
    cache_.install(packet.key);
  }
  r.stats_update_us = m[Stage::kStatsUpdate].sample(rng);
  r.total_us = stage_sum(r);
  r.departure_us = start + r.total_us;
  cache_.update_stats(packet.key, packet.size_bytes, r.departure_us);

  busy_until_us_ = r.departure_us;
  ++processed_;
  return r;
}

}  // namespace dpathsim
