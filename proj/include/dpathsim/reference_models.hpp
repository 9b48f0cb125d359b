#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dpathsim/datapath.hpp"
#include "dpathsim/scenario.hpp"

namespace dpathsim {

// A synthetic calibration dataset for one cell of the experiment matrix
// (platform x RAM x packet size x data rate). The measured traces these
// stand in for are not public; the datasets are generated to respect every
// scalar bound reported for the measurements:
//   - VOI total delay: median <= 25 us, max <= 40 us
//   - BOI total delay: max <= 10 us
//   - stage means: cpu_counters > lookup > max(upcall, stats_update)
//   - each BOI stage has a lower variance than the same VOI stage
struct ReferenceModel {
  std::string name;
  std::string description;
  Platform platform = Platform::kVoi;
  double ram_gb = 1.0;
  int cpu_cores = 1;
  std::vector<std::uint32_t> packet_sizes;
  double rate_lo_bps = 0;
  double rate_hi_bps = 0;
  StageDelayModel model;

  // Scenario that replays this cell against its own model.
  ScenarioConfig scenario(std::uint64_t packet_count = 10'000, std::uint64_t seed = 1) const;
};

inline constexpr std::size_t kReferenceSamplesPerStage = 10'000;

// Deterministic: every call produces identical datasets.
std::vector<ReferenceModel> build_reference_models();

// Built once and cached.
const std::vector<ReferenceModel>& reference_models();
const ReferenceModel* find_reference_model(std::string_view name);

}  // namespace dpathsim
