#include <set>

#include "doctest.h"
#include "dpathsim/reference_models.hpp"
#include "dpathsim/trace_io.hpp"

using namespace dpathsim;

namespace {

const ReferenceModel& counterpart(const ReferenceModel& voi) {
  // voi-rate-250kbps <-> boi-rate-250kbps, etc.
  const auto* boi = find_reference_model("boi" + voi.name.substr(3));
  REQUIRE(boi != nullptr);
  return *boi;
}

}  // namespace

TEST_CASE("bundled models cover both platforms and have unique names") {
  const auto& models = reference_models();
  std::set<std::string> names;
  int voi = 0, boi = 0;
  for (const auto& m : models) {
    CHECK(names.insert(m.name).second);
    (m.platform == Platform::kVoi ? voi : boi)++;
    for (Stage s : kStages) {
      CHECK(m.model[s].n_samples() == kReferenceSamplesPerStage);
      CHECK(m.model[s].min() >= 0);
    }
  }
  CHECK(voi == 10);
  CHECK(boi == 6);
  CHECK(find_reference_model("voi-ram-0.5gb") != nullptr);
  CHECK(find_reference_model("nope") == nullptr);
}

TEST_CASE("generation is deterministic") { CHECK(build_reference_models().front().model == reference_models().front().model); }

TEST_CASE("VOI total delay bounds") {
  for (const auto& m : reference_models()) {
    if (m.platform != Platform::kVoi) continue;
    CAPTURE(m.name);
    // Worst case any packet can see: every stage at its maximum.
    double worst = 0;
    for (Stage s : kStages) worst += m.model[s].max();
    CHECK(worst <= 40.0);

    const auto r = run_simulation(m.scenario());
    CHECK(r.total_summary.median <= 25.0);
    CHECK(r.total_summary.max <= 40.0);
  }
}

TEST_CASE("BOI total delay bound") {
  for (const auto& m : reference_models()) {
    if (m.platform != Platform::kBoi) continue;
    CAPTURE(m.name);
    double worst = 0;
    for (Stage s : kStages) worst += m.model[s].max();
    CHECK(worst <= 10.0);
    CHECK(run_simulation(m.scenario()).total_summary.max <= 10.0);
  }
}

TEST_CASE("cpu counters dominate, lookup second") {
  for (const auto& m : reference_models()) {
    CAPTURE(m.name);
    const double cpu = m.model[Stage::kCpuCounters].mean();
    const double lookup = m.model[Stage::kLookup].mean();
    CHECK(cpu > lookup);
    CHECK(lookup > m.model[Stage::kUpcall].mean());
    CHECK(lookup > m.model[Stage::kStatsUpdate].mean());
  }
}

TEST_CASE("baremetal stages are more stable than virtual ones") {
  for (const auto& voi : reference_models()) {
    if (voi.platform != Platform::kVoi || voi.name.starts_with("voi-ram")) continue;
    const auto& boi = counterpart(voi);
    CAPTURE(voi.name);
    for (Stage s : kStages) CHECK(boi.model[s].variance() < voi.model[s].variance());
  }
}

TEST_CASE("lower data rates and larger packets are slower") {
  auto mean_total = [](const char* name) { return run_simulation(find_reference_model(name)->scenario()).total_summary.mean; };
  CHECK(mean_total("voi-rate-250kbps") > mean_total("voi-rate-750kbps"));
  CHECK(mean_total("voi-size-1500b") > mean_total("voi-size-56b"));
  CHECK(mean_total("boi-rate-250kbps") > mean_total("boi-rate-750kbps"));
  // RAM only nudges the delay.
  const double small = mean_total("voi-ram-0.5gb");
  const double large = mean_total("voi-ram-2.0gb");
  CHECK(large < small);
  CHECK(small - large < 0.1 * small);
}

TEST_CASE("bundled models round-trip through the model file format") {
  for (const auto& m : reference_models()) {
    CHECK(load_model(save_model(m.model, m.name)) == m.model);
  }
}
