#include "dpathsim/trace_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

namespace dpathsim {

namespace {

constexpr std::string_view kEcdfHeader = "value_us,cum_prob";
constexpr std::string_view kModelMagic = "# dpathsim stage delay model v1";
constexpr std::string_view kRecordsHeader =
    "packet_id,arrival_us,src,dst,size_class,size_bytes,cache_hit,cpu_counters_us,lookup_us,upcall_us,"
    "stats_update_us,total_us,queue_wait_us,departure_us";
constexpr std::string_view kComparisonHeader =
    "metric,ks_distance,delta_min_us,delta_max_us,delta_mean_us,delta_median_us,delta_p95_us,delta_p99_us";

// Probabilities carry 12 decimals; exported values carry 3.
constexpr double kProbScale = 1e12;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits on '\n', tolerating a trailing newline and CRLF endings.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : rest_(text) {}

  bool next(std::string_view& line) {
    if (rest_.empty()) return false;
    const auto nl = rest_.find('\n');
    line = rest_.substr(0, nl);
    rest_ = nl == std::string_view::npos ? std::string_view{} : rest_.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++number_;
    return true;
  }

  std::size_t number() const { return number_; }

 private:
  std::string_view rest_;
  std::size_t number_ = 0;
};

[[noreturn]] void fail_at(ErrorCode code, std::size_t line, const std::string& what) {
  throw Error(code, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
std::optional<T> to_number(std::string_view s) {
  T out{};
  if (s.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return out;
}

template <typename T>
T number_at(std::string_view s, std::size_t line, std::string_view what) {
  const auto v = to_number<T>(s);
  if (!v) fail_at(ErrorCode::kParseError, line, std::string(what) + " '" + std::string(s) + "' is not numeric");
  return *v;
}

double delay_at(std::string_view s, std::size_t line) {
  const double raw = number_at<double>(s, line, "delay");
  if (!std::isfinite(raw) || raw < 0) {
    fail_at(ErrorCode::kInvalidSample, line, "delay '" + std::string(s) + "' is not a finite non-negative value");
  }
  return round_to_ns(raw);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto p = s.find(sep);
    out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // No "-0.000" for values that round to zero.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string us(double v) { return fixed(v, 3); }

// Best rational approximation num/den of k / 1e12 with den <= max_den.
std::pair<std::int64_t, std::int64_t> limit_denominator(std::int64_t k, std::int64_t max_den) {
  constexpr std::int64_t kDen = 1'000'000'000'000;
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  std::int64_t n = k, d = kDen;
  for (;;) {
    const std::int64_t a = n / d;
    const std::int64_t q2 = q0 + a * q1;
    if (q2 > max_den) break;
    const std::int64_t p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const std::int64_t r = n - a * d;
    n = d;
    d = r;
    if (d == 0) return {p1, q1};
  }
  const std::int64_t t = (max_den - q0) / q1;
  const std::int64_t bp = p0 + t * p1, bq = q0 + t * q1;
  // |num/den - k/1e12| scaled by 1e12; the numerators are exact in int64.
  const auto dist = [&](std::int64_t num, std::int64_t den) {
    return std::abs(static_cast<long double>(num * kDen - k * den)) / static_cast<long double>(den);
  };
  return dist(p1, q1) <= dist(bp, bq) ? std::pair{p1, q1} : std::pair{bp, bq};
}

// Smallest N (with integer cumulative counts) reproducing every printed
// probability to its 12-decimal rounding, or nullopt.
std::optional<std::vector<std::uint64_t>> recover_counts(const std::vector<std::int64_t>& scaled) {
  // Fractions with denominators up to 7e5 are more than 1e-12 apart, so the
  // 12-decimal rounding identifies them uniquely. Keeping N under the same
  // bound also keeps k * N inside int64.
  constexpr std::int64_t kMaxDen = 700'000;
  constexpr std::int64_t kMaxN = kMaxDen;
  std::int64_t n = 1;
  for (auto k : scaled) {
    const auto [num, den] = limit_denominator(k, kMaxDen);
    (void)num;
    n = std::lcm(n, den);
    if (n > kMaxN) return std::nullopt;
  }
  std::vector<std::uint64_t> cum;
  cum.reserve(scaled.size());
  for (auto k : scaled) {
    // c = round(k * n / 1e12), then require |c/n - k/1e12| <= 0.5e-12.
    const std::int64_t prod = k * n;
    const std::int64_t c = (prod + 500'000'000'000) / 1'000'000'000'000;
    const std::int64_t err = c * 1'000'000'000'000 - prod;
    if (std::abs(err) * 2 > n) return std::nullopt;
    if (c <= 0 || (!cum.empty() && static_cast<std::uint64_t>(c) <= cum.back())) return std::nullopt;
    cum.push_back(static_cast<std::uint64_t>(c));
  }
  if (cum.back() != static_cast<std::uint64_t>(n)) return std::nullopt;
  return cum;
}

std::vector<std::uint64_t> diff(const std::vector<std::uint64_t>& cum) {
  std::vector<std::uint64_t> out(cum.size());
  std::adjacent_difference(cum.begin(), cum.end(), out.begin());
  return out;
}

}  // namespace

std::vector<double> TraceFile::delays() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.delay_us);
  return out;
}

TraceFile parse_trace(std::string_view text) {
  TraceFile t;
  LineReader lines(text);
  std::string_view raw;
  while (lines.next(raw)) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) continue;
      const auto key = trim(body.substr(0, colon));
      const auto value = std::string(trim(body.substr(colon + 1)));
      if (key == "stage") t.stage = value;
      else if (key == "platform") t.platform = value;
      else if (key == "scenario") t.scenario = value;
      continue;
    }
    const auto cols = split_ws(line);
    if (cols.size() != 2) {
      fail_at(ErrorCode::kMalformedRow, lines.number(),
              "expected 2 columns (index, delay), found " + std::to_string(cols.size()));
    }
    TraceRow row;
    row.index = number_at<std::int64_t>(cols[0], lines.number(), "sample index");
    row.delay_us = delay_at(cols[1], lines.number());
    if (!t.rows.empty() && row.index <= t.rows.back().index) {
      fail_at(ErrorCode::kParseError, lines.number(), "sample index does not increase");
    }
    t.rows.push_back(row);
  }
  if (t.rows.empty()) throw Error(ErrorCode::kEmptyTrace, "trace has no data rows");
  return t;
}

std::string export_trace(const TraceFile& t) {
  std::string out;
  if (!t.stage.empty()) out += "# stage: " + t.stage + "\n";
  if (!t.platform.empty()) out += "# platform: " + t.platform + "\n";
  if (!t.scenario.empty()) out += "# scenario: " + t.scenario + "\n";
  for (const auto& r : t.rows) {
    out += std::to_string(r.index);
    out += ' ';
    out += us(r.delay_us);
    out += '\n';
  }
  return out;
}

std::string export_ecdf_csv(const EmpiricalDistribution& dist) {
  std::string out(kEcdfHeader);
  out += '\n';
  const auto s = dist.support();
  const auto p = dist.cum_prob();
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += us(s[i]);
    out += ',';
    out += fixed(p[i], 12);
    out += '\n';
  }
  return out;
}

EmpiricalDistribution parse_ecdf_csv(std::string_view text) {
  LineReader lines(text);
  std::string_view line;
  if (!lines.next(line) || trim(line) != kEcdfHeader) {
    throw Error(ErrorCode::kParseError, "line 1: expected header '" + std::string(kEcdfHeader) + "'");
  }
  std::vector<double> support;
  std::vector<std::int64_t> scaled;
  while (lines.next(line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 2) fail_at(ErrorCode::kMalformedRow, lines.number(), "expected value_us,cum_prob");
    const double v = delay_at(trim(cols[0]), lines.number());
    const double p = number_at<double>(trim(cols[1]), lines.number(), "probability");
    if (!(p > 0 && p <= 1)) fail_at(ErrorCode::kParseError, lines.number(), "probability outside (0, 1]");
    if (!support.empty() && !(v > support.back())) {
      fail_at(ErrorCode::kParseError, lines.number(), "values not strictly increasing");
    }
    const auto k = static_cast<std::int64_t>(std::llround(p * kProbScale));
    if (!scaled.empty() && k <= scaled.back()) {
      fail_at(ErrorCode::kParseError, lines.number(), "probabilities not strictly increasing");
    }
    support.push_back(v);
    scaled.push_back(k);
  }
  if (support.empty()) throw Error(ErrorCode::kEmptyTrace, "ECDF has no rows");
  if (scaled.back() != static_cast<std::int64_t>(kProbScale)) {
    throw Error(ErrorCode::kParseError, "final cumulative probability is not 1");
  }
  if (auto cum = recover_counts(scaled)) return EmpiricalDistribution::from_counts(std::move(support), diff(*cum));
  // Too many samples to recover N exactly: keep the printed resolution.
  std::vector<std::uint64_t> cum(scaled.begin(), scaled.end());
  return EmpiricalDistribution::from_counts(std::move(support), diff(cum));
}

std::string save_model(const StageDelayModel& model, std::string_view name) {
  std::string out(kModelMagic);
  out += '\n';
  if (!name.empty()) out += "# name: " + std::string(name) + "\n";
  for (Stage s : kStages) {
    const auto& d = model[s];
    out += "[stage ";
    out += stage_name(s);
    out += "]\nn_samples=" + std::to_string(d.n_samples()) + "\nvalue_us,count\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
      out += us(d.support()[i]);
      out += ',';
      out += std::to_string(d.count_at(i));
      out += '\n';
    }
    out += "[end]\n";
  }
  return out;
}

StageDelayModel load_model(std::string_view text) {
  struct Section {
    std::vector<double> support;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_samples = 0;
    bool complete = false;
  };
  std::array<std::optional<Section>, 4> sections;
  Section* open = nullptr;
  bool header_seen = false;

  LineReader lines(text);
  std::string_view line;
  while (lines.next(line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("[stage ") && line.ends_with("]")) {
      const auto name = trim(line.substr(7, line.size() - 8));
      const auto stage = parse_stage(name);
      if (!stage) fail_at(ErrorCode::kParseError, lines.number(), "unknown stage '" + std::string(name) + "'");
      if (open) fail_at(ErrorCode::kParseError, lines.number(), "previous stage section not closed");
      auto& slot = sections[static_cast<std::size_t>(*stage)];
      if (slot) throw Error(ErrorCode::kDuplicateStage, "stage '" + std::string(name) + "' appears twice");
      open = &slot.emplace();
      header_seen = false;
      continue;
    }
    if (!open) fail_at(ErrorCode::kParseError, lines.number(), "content outside a stage section");
    Section& sec = *open;
    if (line == "[end]") {
      if (sec.support.empty()) fail_at(ErrorCode::kParseError, lines.number(), "stage has no rows");
      const auto total = std::accumulate(sec.counts.begin(), sec.counts.end(), std::uint64_t{0});
      if (total != sec.n_samples) fail_at(ErrorCode::kParseError, lines.number(), "counts do not sum to n_samples");
      sec.complete = true;
      open = nullptr;
    } else if (line.starts_with("n_samples=")) {
      sec.n_samples = number_at<std::uint64_t>(line.substr(10), lines.number(), "n_samples");
    } else if (line == "value_us,count") {
      header_seen = true;
    } else {
      if (!header_seen) fail_at(ErrorCode::kParseError, lines.number(), "missing 'value_us,count' header");
      const auto cols = split(line, ',');
      if (cols.size() != 2) fail_at(ErrorCode::kMalformedRow, lines.number(), "expected value_us,count");
      const double v = delay_at(trim(cols[0]), lines.number());
      const auto c = number_at<std::uint64_t>(trim(cols[1]), lines.number(), "count");
      if (c == 0) fail_at(ErrorCode::kParseError, lines.number(), "zero count");
      if (!sec.support.empty() && !(v > sec.support.back())) {
        fail_at(ErrorCode::kParseError, lines.number(), "values not strictly increasing");
      }
      sec.support.push_back(v);
      sec.counts.push_back(c);
    }
  }
  for (Stage s : kStages) {
    const auto& sec = sections[static_cast<std::size_t>(s)];
    if (!sec || !sec->complete) {
      throw Error(ErrorCode::kIncompleteModel, "missing stage '" + std::string(stage_name(s)) + "'");
    }
  }
  auto dist = [&](Stage s) {
    auto& sec = *sections[static_cast<std::size_t>(s)];
    return EmpiricalDistribution::from_counts(std::move(sec.support), sec.counts);
  };
  return StageDelayModel(dist(Stage::kCpuCounters), dist(Stage::kLookup), dist(Stage::kUpcall),
                         dist(Stage::kStatsUpdate));
}

std::string export_records_csv(std::span<const PacketRecord> records) {
  std::string out(kRecordsHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.id) + "," + us(r.arrival_us) + "," + std::to_string(r.key.src) + "," +
           std::to_string(r.key.dst) + "," + std::to_string(r.key.size_class) + "," + std::to_string(r.size_bytes) +
           "," + (r.cache_hit ? "1" : "0") + "," + us(r.cpu_counters_us) + "," + us(r.lookup_us) + "," +
           us(r.upcall_us) + "," + us(r.stats_update_us) + "," + us(r.total_us) + "," + us(r.queue_wait_us) + "," +
           us(r.departure_us) + "\n";
  }
  return out;
}

std::vector<PacketRecord> parse_records_csv(std::string_view text) {
  LineReader lines(text);
  std::string_view line;
  if (!lines.next(line) || trim(line) != kRecordsHeader) {
    throw Error(ErrorCode::kParseError, "line 1: not a packet records file");
  }
  std::vector<PacketRecord> out;
  while (lines.next(line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != 14) fail_at(ErrorCode::kMalformedRow, lines.number(), "expected 14 columns");
    const auto n = lines.number();
    PacketRecord r;
    r.id = number_at<std::uint64_t>(c[0], n, "packet_id");
    r.arrival_us = number_at<double>(c[1], n, "arrival_us");
    r.key.src = number_at<std::uint32_t>(c[2], n, "src");
    r.key.dst = number_at<std::uint32_t>(c[3], n, "dst");
    r.key.size_class = number_at<std::uint32_t>(c[4], n, "size_class");
    r.size_bytes = number_at<std::uint32_t>(c[5], n, "size_bytes");
    const auto hit = number_at<int>(c[6], n, "cache_hit");
    if (hit != 0 && hit != 1) fail_at(ErrorCode::kParseError, n, "cache_hit must be 0 or 1");
    r.cache_hit = hit == 1;
    r.cpu_counters_us = delay_at(c[7], n);
    r.lookup_us = delay_at(c[8], n);
    r.upcall_us = delay_at(c[9], n);
    r.stats_update_us = delay_at(c[10], n);
    r.total_us = delay_at(c[11], n);
    r.queue_wait_us = delay_at(c[12], n);
    r.departure_us = number_at<double>(c[13], n, "departure_us");
    out.push_back(r);
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyTrace, "records file has no rows");
  return out;
}

std::string export_comparison_csv(std::span<const MetricComparison> rows) {
  std::string out(kComparisonHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.metric + "," + fixed(r.ks, 12) + "," + us(r.delta.min) + "," + us(r.delta.max) + "," +
           us(r.delta.mean) + "," + us(r.delta.median) + "," + us(r.delta.p95) + "," + us(r.delta.p99) + "\n";
  }
  return out;
}

std::string format_summary_line(std::string_view label, const DistributionSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-13s n=%llu min=%.3f median=%.3f mean=%.3f p95=%.3f p99=%.3f max=%.3f",
                std::string(label).c_str(), static_cast<unsigned long long>(s.n), s.min, s.median, s.mean, s.p95,
                s.p99, s.max);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot create '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace dpathsim
