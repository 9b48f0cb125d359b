#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "dpathsim/reference_models.hpp"
#include "dpathsim/scenario.hpp"

using namespace dpathsim;

namespace {

ScenarioConfig cbr(std::uint32_t size, double rate_bps, std::uint64_t packets = 100) {
  ScenarioConfig c;
  c.packet_sizes = {size};
  c.rate_lo_bps = c.rate_hi_bps = rate_bps;
  c.packet_count = packets;
  c.model_source = "point:4,3,5,2";
  return c;
}

std::string error_text(auto&& fn, ErrorCode expected) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.code() == expected);
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

}  // namespace

TEST_CASE("CBR inter-arrival times") {
  Rng rng(1);
  const auto a = generate_arrivals(cbr(576, 750'000, 10), rng);
  REQUIRE(a.size() == 10);
  CHECK(a[0].arrival_us == 0);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].arrival_us - a[i - 1].arrival_us == 6144.0);

  const auto b = generate_arrivals(cbr(56, 10'000, 3), rng);
  CHECK(b[1].arrival_us == 44'800.0);
  CHECK(b[2].arrival_us == 89'600.0);
}

TEST_CASE("rate range arrivals follow the seeded oracle") {
  ScenarioConfig c = cbr(56, 10'000, 1000);
  c.rate_hi_bps = 15'000;
  Rng rng(1);
  const auto a = generate_arrivals(c, rng);

  // Regenerate the gaps directly from the same stream.
  Rng oracle(1);
  double t = 0;
  std::vector<double> oracle_gaps;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].arrival_us == t);
    oracle_gaps.push_back(56.0 * 8e6 / (10'000 + 5'000 * oracle.uniform_open_closed()));
    t += oracle_gaps.back();
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double gap = a[i].arrival_us - a[i - 1].arrival_us;
    CHECK(gap >= 29'866.6);
    CHECK(gap <= 44'800.0);
  }
  const double mean = a.back().arrival_us / 999.0;
  const double oracle_mean = std::accumulate(oracle_gaps.begin(), oracle_gaps.end() - 1, 0.0) / 999.0;
  CHECK(std::abs(mean - oracle_mean) <= 0.02 * oracle_mean);
}

TEST_CASE("variable packet sizes draw from the listed set") {
  ScenarioConfig c = cbr(56, 750'000, 3000);
  c.packet_sizes = {56, 576, 1500};
  Rng rng(3);
  const auto a = generate_arrivals(c, rng);
  std::array<int, 3> seen{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto it = std::find(c.packet_sizes.begin(), c.packet_sizes.end(), a[i].size_bytes);
    REQUIRE(it != c.packet_sizes.end());
    ++seen[static_cast<std::size_t>(it - c.packet_sizes.begin())];
    CHECK(a[i].key == FlowKey{1, 0, 0});
    if (i > 0) {
      CHECK(a[i].arrival_us > a[i - 1].arrival_us);
      CHECK(a[i].arrival_us - a[i - 1].arrival_us == doctest::Approx(a[i - 1].size_bytes * 8e6 / 750'000));
    }
  }
  for (int s : seen) CHECK(s > 900);
}

TEST_CASE("poisson arrivals keep the configured mean rate") {
  ScenarioConfig c = cbr(576, 750'000, 20'000);
  c.arrival_process = ArrivalProcess::kPoisson;
  Rng rng(12);
  const auto a = generate_arrivals(c, rng);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].arrival_us > a[i - 1].arrival_us);
  const double mean_gap = a.back().arrival_us / static_cast<double>(a.size() - 1);
  CHECK(mean_gap == doctest::Approx(6144.0).epsilon(0.03));
}

TEST_CASE("invalid rates are rejected") {
  Rng rng(1);
  error_text([&] { generate_arrivals(cbr(56, 0, 10), rng); }, ErrorCode::kInvalidRate);
  error_text([&] { generate_arrivals(cbr(56, -5, 10), rng); }, ErrorCode::kInvalidRate);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# VOI variable RAM\n"
      "platform = VOI\n"
      "ram_gb=0.5\n"
      "cpu_cores=1\n"
      "packet_size_bytes=56\n"
      "data_rate_bps_lo=10000\n"
      "data_rate_bps_hi=15000\n"
      "packet_count=2500\n"
      "seed=77\n"
      "model_source=voi-ram-0.5gb\n"
      "cache_capacity=128\n");
  CHECK(c.platform == Platform::kVoi);
  CHECK(c.ram_gb == 0.5);
  CHECK(c.packet_sizes == std::vector<std::uint32_t>{56});
  CHECK(c.rate_lo_bps == 10'000);
  CHECK(c.rate_hi_bps == 15'000);
  CHECK(c.packet_count == 2500);
  CHECK(c.seed == 77);
  CHECK(c.model_source == "voi-ram-0.5gb");
  CHECK(c.cache_capacity == 128);
  CHECK(parse_config(format_config(c)) == c);

  const auto v = parse_config("packet_size_bytes=variable:56,576,1500\ndata_rate_bps=750000\nmodel_source=x\n");
  CHECK(v.packet_sizes == std::vector<std::uint32_t>{56, 576, 1500});
  CHECK(v.variable_size());
  CHECK(parse_config(format_config(v)) == v);
}

TEST_CASE("config errors name the offending key") {
  CHECK(error_text([] { parse_config("model_source=x\nspeed=3\n"); }, ErrorCode::kInvalidConfig).find("speed") !=
        std::string::npos);
  CHECK(error_text([] { parse_config("model_source=x\nram_gb=lots\n"); }, ErrorCode::kInvalidConfig)
            .find("ram_gb") != std::string::npos);
  CHECK(error_text([] { parse_config("model_source=x\nseed=1\nseed=2\n"); }, ErrorCode::kInvalidConfig)
            .find("seed") != std::string::npos);
  CHECK(error_text([] { parse_config("model_source=x\ndata_rate_bps_lo=10\n"); }, ErrorCode::kInvalidConfig)
            .find("data_rate_bps_hi") != std::string::npos);
  CHECK(error_text([] { parse_config("model_source=x\ndata_rate_bps_lo=20\ndata_rate_bps_hi=10\n"); },
                   ErrorCode::kInvalidConfig)
            .find("data_rate_bps_lo") != std::string::npos);
  CHECK(error_text([] { parse_config("model_source=x\npacket_count=0\n"); }, ErrorCode::kInvalidConfig)
            .find("packet_count") != std::string::npos);
  CHECK(error_text([] { parse_config("platform=VOI\n"); }, ErrorCode::kInvalidConfig).find("model_source") !=
        std::string::npos);
  error_text([] { parse_config("model_source=x\ndata_rate_bps=0\n"); }, ErrorCode::kInvalidRate);
  error_text([] { parse_config("just words\n"); }, ErrorCode::kInvalidConfig);
}

TEST_CASE("model source resolution") {
  CHECK(resolve_model("point:4,3,5,2") == StageDelayModel::point_masses(4, 3, 5, 2));
  CHECK(resolve_model("voi-rate-750kbps") == find_reference_model("voi-rate-750kbps")->model);
  error_text([] { resolve_model("no-such-model"); }, ErrorCode::kUnknownModel);
  error_text([] { resolve_model("point:1,2,3"); }, ErrorCode::kUnknownModel);
  error_text([] { resolve_model("point:1,2,3,-4"); }, ErrorCode::kUnknownModel);
  error_text([] { resolve_model(""); }, ErrorCode::kUnknownModel);
}

TEST_CASE("point-mass run has two total-delay atoms") {
  const auto r = run_simulation(cbr(576, 750'000, 100));
  const auto& t = r.total_dist;
  REQUIRE(t.size() == 2);
  CHECK(t.support()[0] == 9);
  CHECK(t.support()[1] == 14);
  CHECK(t.count_at(0) == 99);
  CHECK(t.count_at(1) == 1);
  CHECK(t.cum_prob()[0] == 0.99);
  CHECK(r.hits == 99);
  CHECK(r.misses == 1);
}

TEST_CASE("runs are deterministic per seed") {
  auto c = find_reference_model("voi-size-576b")->scenario(5000, 42);
  c.flow_count = 20;
  c.cache_capacity = 8;
  CHECK(run_simulation(c) == run_simulation(c));
  auto d = c;
  d.seed = 43;
  CHECK_FALSE(run_simulation(d).records == run_simulation(c).records);
}

TEST_CASE("report distributions are re-derivable from the records") {
  auto c = find_reference_model("boi-rate-500kbps")->scenario(3000, 5);
  c.flow_count = 50;
  c.cache_capacity = 16;
  const auto r = run_simulation(c);
  CHECK(make_report(r.config, r.records) == r);
  CHECK(r.hits + r.misses == c.packet_count);
  for (Stage s : kStages) {
    std::vector<double> v;
    for (const auto& rec : r.records) v.push_back(rec.stage(s));
    CHECK(build_ecdf(v) == r.stage(s));
    CHECK(summarize(r.stage(s)) == r.summary(s));
  }
}

TEST_CASE("single-flow workload misses once regardless of length") {
  for (std::uint64_t n : {1ULL, 7ULL, 4000ULL}) {
    const auto r = run_simulation(find_reference_model("voi-ram-1.0gb")->scenario(n, n));
    CHECK(r.misses == 1);
  }
}

TEST_CASE("unknown model source fails the run") {
  auto c = cbr(56, 10'000);
  c.model_source = "missing.model";
  error_text([&] { run_simulation(c); }, ErrorCode::kUnknownModel);
}

TEST_CASE("compare_scenarios") {
  const auto a = run_simulation(find_reference_model("voi-rate-250kbps")->scenario());
  const auto self = compare_scenarios(a, a);
  REQUIRE(self.size() == 5);
  CHECK(self.back().metric == "total");
  for (const auto& row : self) {
    CHECK(row.ks == 0.0);
    CHECK(row.delta.min == 0.0);
    CHECK(row.delta.max == 0.0);
    CHECK(row.delta.mean == 0.0);
    CHECK(row.delta.median == 0.0);
    CHECK(row.delta.p95 == 0.0);
    CHECK(row.delta.p99 == 0.0);
  }

  const auto b = run_simulation(find_reference_model("boi-rate-250kbps")->scenario());
  const auto ab = compare_scenarios(a, b);
  const auto ba = compare_scenarios(b, a);
  for (std::size_t i = 0; i < ab.size(); ++i) {
    CHECK(ab[i].ks == ba[i].ks);
    CHECK(ab[i].delta.max == -ba[i].delta.max);
  }
  const auto& total = ab.back();
  CHECK(b.total_summary.max <= 10.0);
  CHECK(a.total_summary.max <= 40.0);
  CHECK(total.delta.max == b.total_summary.max - a.total_summary.max);
  // About -30 us: a 40 us ceiling brought down to 10 us.
  CHECK(std::abs(total.delta.max + 30.0) <= 5.0);
  CHECK(total.ks == 1.0);
}

TEST_CASE("same model, different seeds: total-delay KS within sampling noise") {
  auto c = find_reference_model("voi-size-576b")->scenario(100'000, 1);
  auto d = c;
  d.seed = 2;
  const auto ra = run_simulation(c);
  const auto rb = run_simulation(d);
  CHECK(compare_scenarios(ra, rb).back().ks < 0.02);
}
