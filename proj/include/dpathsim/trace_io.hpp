#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpathsim/datapath.hpp"
#include "dpathsim/empirical_distribution.hpp"
#include "dpathsim/scenario.hpp"

namespace dpathsim {

struct TraceRow {
  std::int64_t index = 0;
  double delay_us = 0;

  bool operator==(const TraceRow&) const = default;
};

// One stage's delay series: two whitespace-separated columns (sample index,
// delay in us). Metadata rides in "# key: value" comment lines.
struct TraceFile {
  std::vector<TraceRow> rows;
  std::string stage;
  std::string platform;
  std::string scenario;

  std::vector<double> delays() const;

  bool operator==(const TraceFile&) const = default;
};

// Skips blank lines and '#' comments; rounds delays to ns on ingestion.
// Errors: parse-error / invalid-sample (with line number), malformed-row,
// empty-trace. Never throws anything but dpathsim::Error.
TraceFile parse_trace(std::string_view text);
std::string export_trace(const TraceFile& trace);

// "value_us,cum_prob" header, 3-decimal values, 12-decimal probabilities.
std::string export_ecdf_csv(const EmpiricalDistribution& dist);
// Inverse of export_ecdf_csv. The sample count is recovered as the smallest
// N consistent with every printed probability, which reproduces the exact
// step function for any N up to ~7e5.
EmpiricalDistribution parse_ecdf_csv(std::string_view text);

// Four labelled count tables in one text container.
std::string save_model(const StageDelayModel& model, std::string_view name = {});
// Errors: incomplete-model naming the first missing stage, duplicate-stage,
// parse-error.
StageDelayModel load_model(std::string_view text);

std::string export_records_csv(std::span<const PacketRecord> records);
std::vector<PacketRecord> parse_records_csv(std::string_view text);

std::string export_comparison_csv(std::span<const MetricComparison> rows);

std::string format_summary_line(std::string_view label, const DistributionSummary& s);

std::string read_file(const std::filesystem::path& path);
// Writes via a sibling temporary and rename, so readers never see a partial file.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace dpathsim
