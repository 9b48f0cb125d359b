#include "dpathsim/reference_models.hpp"

#include <algorithm>

namespace dpathsim {

namespace {

// Support bounds of one stage before cell scaling, in microseconds.
struct StageShape {
  double lo;
  double hi;
};

struct PlatformShape {
  StageShape cpu_counters;
  StageShape lookup;
  StageShape upcall;
  StageShape stats_update;
  // Fraction of samples pushed into the top 15% of the range, standing
  // in for scheduler-induced stalls.
  double stall_fraction;
};

// Upper bounds sum to 36 us (VOI) and 9.5 us (BOI) before scaling; the
// largest cell scale (1.10 VOI, 1.05 BOI) keeps them under 40 and 10.
constexpr PlatformShape kVoiShape{{6.0, 20.5}, {2.5, 8.0}, {1.0, 2.5}, {1.5, 5.0}, 0.10};
constexpr PlatformShape kBoiShape{{2.0, 4.7}, {1.0, 2.5}, {0.5, 0.9}, {0.5, 1.4}, 0.05};

std::uint64_t name_seed(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Right-skewed draw on [lo, hi] built from multiplications only, so the
// generated datasets are bit-identical on every IEEE-754 platform.
double draw(const StageShape& shape, double scale, double stall_fraction, Rng& rng) {
  double s;
  if (stall_fraction > 0 && rng.uniform_closed_open() < stall_fraction) {
    s = 0.85 + 0.15 * rng.uniform_closed_open();
  } else {
    const double m =
        (rng.uniform_closed_open() + rng.uniform_closed_open() + rng.uniform_closed_open()) / 3.0;
    s = m * m;
  }
  return round_to_ns(scale * (shape.lo + (shape.hi - shape.lo) * s));
}

EmpiricalDistribution synth_stage(const StageShape& shape, double scale, double stall_fraction, Rng& rng) {
  std::vector<double> v(kReferenceSamplesPerStage);
  for (auto& x : v) x = draw(shape, scale, stall_fraction, rng);
  return build_ecdf(v);
}

struct Cell {
  const char* name;
  const char* description;
  Platform platform;
  double ram_gb;
  int cpu_cores;
  std::vector<std::uint32_t> sizes;
  double rate_lo;
  double rate_hi;
  // Delay multiplier: lower data rates and larger packets run slower, more
  // RAM is marginally faster.
  double scale;
};

std::vector<Cell> cells() {
  constexpr double kKbps = 1000.0;
  const Platform V = Platform::kVoi;
  const Platform B = Platform::kBoi;
  return {
      {"voi-ram-0.5gb", "VOI variable RAM: 0.5 GB, 56 B, 10-15 Kb/s", V, 0.5, 1, {56}, 10 * kKbps, 15 * kKbps, 1.10},
      {"voi-ram-1.0gb", "VOI variable RAM: 1.0 GB, 56 B, 10-15 Kb/s", V, 1.0, 1, {56}, 10 * kKbps, 15 * kKbps, 1.08},
      {"voi-ram-1.5gb", "VOI variable RAM: 1.5 GB, 56 B, 10-15 Kb/s", V, 1.5, 1, {56}, 10 * kKbps, 15 * kKbps, 1.06},
      {"voi-ram-2.0gb", "VOI variable RAM: 2.0 GB, 56 B, 10-15 Kb/s", V, 2.0, 1, {56}, 10 * kKbps, 15 * kKbps, 1.04},
      {"voi-rate-250kbps", "VOI variable data rate: 1.0 GB, 576 B, 250 Kb/s", V, 1.0, 1, {576}, 250 * kKbps,
       250 * kKbps, 1.08},
      {"voi-rate-500kbps", "VOI variable data rate: 1.0 GB, 576 B, 500 Kb/s", V, 1.0, 1, {576}, 500 * kKbps,
       500 * kKbps, 1.02},
      {"voi-rate-750kbps", "VOI variable data rate: 1.0 GB, 576 B, 750 Kb/s", V, 1.0, 1, {576}, 750 * kKbps,
       750 * kKbps, 0.96},
      {"voi-size-56b", "VOI variable packet size: 1.0 GB, 56 B, 750 Kb/s", V, 1.0, 1, {56}, 750 * kKbps, 750 * kKbps,
       0.93},
      {"voi-size-576b", "VOI variable packet size: 1.0 GB, 576 B, 750 Kb/s", V, 1.0, 1, {576}, 750 * kKbps,
       750 * kKbps, 0.96},
      {"voi-size-1500b", "VOI variable packet size: 1.0 GB, 1500 B, 750 Kb/s", V, 1.0, 1, {1500}, 750 * kKbps,
       750 * kKbps, 1.00},
      {"boi-rate-250kbps", "BOI variable data rate: 8.0 GB, 576 B, 250 Kb/s", B, 8.0, 4, {576}, 250 * kKbps,
       250 * kKbps, 1.05},
      {"boi-rate-500kbps", "BOI variable data rate: 8.0 GB, 576 B, 500 Kb/s", B, 8.0, 4, {576}, 500 * kKbps,
       500 * kKbps, 1.00},
      {"boi-rate-750kbps", "BOI variable data rate: 8.0 GB, 576 B, 750 Kb/s", B, 8.0, 4, {576}, 750 * kKbps,
       750 * kKbps, 0.96},
      {"boi-size-56b", "BOI variable packet size: 8.0 GB, 56 B, 750 Kb/s", B, 8.0, 4, {56}, 750 * kKbps, 750 * kKbps,
       0.93},
      {"boi-size-576b", "BOI variable packet size: 8.0 GB, 576 B, 750 Kb/s", B, 8.0, 4, {576}, 750 * kKbps,
       750 * kKbps, 0.96},
      {"boi-size-1500b", "BOI variable packet size: 8.0 GB, 1500 B, 750 Kb/s", B, 8.0, 4, {1500}, 750 * kKbps,
       750 * kKbps, 1.00},
  };
}

}  // namespace

ScenarioConfig ReferenceModel::scenario(std::uint64_t packet_count, std::uint64_t seed) const {
  ScenarioConfig c;
  c.platform = platform;
  c.ram_gb = ram_gb;
  c.cpu_cores = cpu_cores;
  c.packet_sizes = packet_sizes;
  c.rate_lo_bps = rate_lo_bps;
  c.rate_hi_bps = rate_hi_bps;
  c.packet_count = packet_count;
  c.seed = seed;
  c.model_source = name;
  return c;
}

std::vector<ReferenceModel> build_reference_models() {
  std::vector<ReferenceModel> out;
  for (const auto& cell : cells()) {
    const PlatformShape& shape = cell.platform == Platform::kVoi ? kVoiShape : kBoiShape;
    Rng rng(name_seed(cell.name));
    auto cpu = synth_stage(shape.cpu_counters, cell.scale, shape.stall_fraction, rng);
    auto lookup = synth_stage(shape.lookup, cell.scale, shape.stall_fraction, rng);
    auto upcall = synth_stage(shape.upcall, cell.scale, shape.stall_fraction, rng);
    auto stats = synth_stage(shape.stats_update, cell.scale, shape.stall_fraction, rng);
    out.push_back(ReferenceModel{cell.name, cell.description, cell.platform, cell.ram_gb, cell.cpu_cores, cell.sizes,
                                 cell.rate_lo, cell.rate_hi,
                                 StageDelayModel(std::move(cpu), std::move(lookup), std::move(upcall),
                                                 std::move(stats))});
  }
  return out;
}

const std::vector<ReferenceModel>& reference_models() {
  static const std::vector<ReferenceModel> models = build_reference_models();
  return models;
}

const ReferenceModel* find_reference_model(std::string_view name) {
  const auto& models = reference_models();
  const auto it = std::find_if(models.begin(), models.end(), [&](const auto& m) { return m.name == name; });
  return it == models.end() ? nullptr : &*it;
}

}  // namespace dpathsim
