#include <string>

#include "doctest.h"
#include "dpathsim/reference_models.hpp"
#include "dpathsim/trace_io.hpp"
#include "test_support.hpp"

using namespace dpathsim;
using dpathsim::testing::random_trace;

namespace {

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an error");
  return Error(ErrorCode::kIo, "unreachable");
}

TraceFile random_trace_file(Rng& rng) {
  TraceFile t;
  std::int64_t index = static_cast<std::int64_t>(rng.below(5)) - 2;
  for (double d : random_trace(rng, 300)) {
    index += 1 + static_cast<std::int64_t>(rng.below(3));
    t.rows.push_back({index, d});
  }
  if (rng.below(2)) t.stage = "lookup";
  if (rng.below(2)) t.platform = "VOI";
  if (rng.below(2)) t.scenario = "variable packet size";
  return t;
}

}  // namespace

TEST_CASE("parse_trace examples") {
  const auto t = parse_trace("1 12.5\n2 13.0\n");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.delays() == std::vector<double>{12.5, 13.0});

  const auto c = parse_trace("# comment\n\n1 9\n");
  REQUIRE(c.rows.size() == 1);
  CHECK(c.rows[0] == TraceRow{1, 9.0});

  const auto tabs = parse_trace("# stage: upcall\n# platform: BOI\r\n  3\t 1.23456 \r\n4 0\n");
  CHECK(tabs.stage == "upcall");
  CHECK(tabs.platform == "BOI");
  CHECK(tabs.delays() == std::vector<double>{1.235, 0.0});
}

TEST_CASE("parse_trace errors") {
  auto e = error_of([] { parse_trace("1 2\n2 abc\n"); });
  CHECK(e.code() == ErrorCode::kParseError);
  CHECK(std::string(e.what()).find("line 2") != std::string::npos);

  CHECK(error_of([] { parse_trace("1 2\n7\n"); }).code() == ErrorCode::kMalformedRow);
  CHECK(error_of([] { parse_trace("1 2 3\n"); }).code() == ErrorCode::kMalformedRow);
  CHECK(error_of([] { parse_trace("# only comments\n\n"); }).code() == ErrorCode::kEmptyTrace);
  CHECK(error_of([] { parse_trace(""); }).code() == ErrorCode::kEmptyTrace);
  CHECK(error_of([] { parse_trace("1 -3\n"); }).code() == ErrorCode::kInvalidSample);
  CHECK(error_of([] { parse_trace("1 nan\n"); }).code() == ErrorCode::kInvalidSample);
  CHECK(error_of([] { parse_trace("1.5 3\n"); }).code() == ErrorCode::kParseError);
  CHECK(error_of([] { parse_trace("2 3\n2 4\n"); }).code() == ErrorCode::kParseError);
}

TEST_CASE("trace export round-trips") {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const auto t = random_trace_file(rng);
    CHECK(parse_trace(export_trace(t)) == t);
  }
}

TEST_CASE("ECDF CSV format") {
  CHECK(export_ecdf_csv(EmpiricalDistribution::point_mass(5)) == "value_us,cum_prob\n5.000,1.000000000000\n");
  CHECK(export_ecdf_csv(build_ecdf(std::vector<double>{10, 10, 20, 30})) ==
        "value_us,cum_prob\n10.000,0.500000000000\n20.000,0.750000000000\n30.000,1.000000000000\n");
}

TEST_CASE("ECDF CSV parse-back reproduces the distribution") {
  const auto d = build_ecdf(std::vector<double>{10, 10, 20, 30});
  CHECK(parse_ecdf_csv(export_ecdf_csv(d)) == d);

  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const auto dist = build_ecdf(random_trace(rng, 1000));
    const auto back = parse_ecdf_csv(export_ecdf_csv(dist));
    CHECK(back.same_steps(dist));
    CHECK(dist.n_samples() % back.n_samples() == 0);
  }

  const auto& ref = find_reference_model("voi-rate-250kbps")->model[Stage::kCpuCounters];
  CHECK(parse_ecdf_csv(export_ecdf_csv(ref)) == ref);

  // N = 100000 still recovers exactly.
  std::vector<double> many(100'000);
  for (auto& x : many) x = static_cast<double>(rng.below(30'000)) / 1000.0;
  const auto big = build_ecdf(many);
  CHECK(parse_ecdf_csv(export_ecdf_csv(big)) == big);
}

TEST_CASE("ECDF CSV errors") {
  CHECK(error_of([] { parse_ecdf_csv("value,p\n1,1\n"); }).code() == ErrorCode::kParseError);
  CHECK(error_of([] { parse_ecdf_csv("value_us,cum_prob\n"); }).code() == ErrorCode::kEmptyTrace);
  CHECK(error_of([] { parse_ecdf_csv("value_us,cum_prob\n1.000,0.5\n"); }).code() == ErrorCode::kParseError);
  CHECK(error_of([] { parse_ecdf_csv("value_us,cum_prob\n2.000,0.5\n1.000,1.0\n"); }).code() ==
        ErrorCode::kParseError);
  CHECK(error_of([] { parse_ecdf_csv("value_us,cum_prob\n1.000\n"); }).code() == ErrorCode::kMalformedRow);
}

TEST_CASE("model files round-trip") {
  const auto pm = StageDelayModel::point_masses(4, 3, 5, 2);
  CHECK(load_model(save_model(pm)) == pm);

  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const StageDelayModel m(build_ecdf(random_trace(rng, 400)), build_ecdf(random_trace(rng, 400)),
                            build_ecdf(random_trace(rng, 400)), build_ecdf(random_trace(rng, 400)));
    CHECK(load_model(save_model(m, "random")) == m);
  }
}

TEST_CASE("model file errors") {
  const auto text = save_model(StageDelayModel::point_masses(4, 3, 5, 2));

  // Cut inside the last section.
  const auto truncated = text.substr(0, text.rfind("[end]"));
  const auto e = error_of([&] { load_model(truncated); });
  CHECK(e.code() == ErrorCode::kIncompleteModel);
  CHECK(std::string(e.what()).find("stats_update") != std::string::npos);

  // Drop the lookup section entirely.
  const auto b = text.find("[stage lookup]");
  const auto en = text.find("[end]\n", b) + 6;
  const auto missing = text.substr(0, b) + text.substr(en);
  const auto m = error_of([&] { load_model(missing); });
  CHECK(m.code() == ErrorCode::kIncompleteModel);
  CHECK(std::string(m.what()).find("lookup") != std::string::npos);

  const auto dup = text + text.substr(b, en - b);
  CHECK(error_of([&] { load_model(dup); }).code() == ErrorCode::kDuplicateStage);

  CHECK(error_of([] { load_model(""); }).code() == ErrorCode::kIncompleteModel);
  CHECK(error_of([] { load_model("[stage bogus]\n"); }).code() == ErrorCode::kParseError);
}

TEST_CASE("records CSV carries everything compare needs") {
  auto c = find_reference_model("voi-size-576b")->scenario(2000, 3);
  c.flow_count = 40;
  c.cache_capacity = 10;
  const auto r = run_simulation(c);
  const auto back = parse_records_csv(export_records_csv(r.records));
  REQUIRE(back.size() == r.records.size());
  const auto rebuilt = make_report(c, back);
  for (Stage s : kStages) CHECK(rebuilt.stage(s) == r.stage(s));
  CHECK(rebuilt.total_dist == r.total_dist);
  CHECK(rebuilt.hits == r.hits);
}

TEST_CASE("parsers only ever fail with structured errors") {
  Rng rng(2024);
  const std::string alphabet = "0123456789 .,-+#\n\t\reEnaif[]_=:stagelookupvalue_uscum_probn_samples";
  int failures = 0;
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const auto len = rng.below(120);
    for (std::uint64_t j = 0; j < len; ++j) {
      s += rng.below(4) == 0 ? static_cast<char>(rng.below(256)) : alphabet[rng.below(alphabet.size())];
    }
    // Seed some inputs with valid prefixes so the deeper paths get hit.
    if (i % 3 == 1) s = "value_us,cum_prob\n" + s;
    if (i % 3 == 2) s = "[stage cpu_counters]\nn_samples=2\nvalue_us,count\n" + s;
    for (auto parse : {+[](std::string_view t) { parse_trace(t); }, +[](std::string_view t) { parse_ecdf_csv(t); },
                       +[](std::string_view t) { load_model(t); }, +[](std::string_view t) { parse_records_csv(t); },
                       +[](std::string_view t) { parse_config(t); }}) {
      try {
        parse(s);
      } catch (const Error&) {
        ++failures;
      }
    }
  }
  CHECK(failures > 0);
}
