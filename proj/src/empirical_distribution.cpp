#include "dpathsim/empirical_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpathsim/error.hpp"

namespace dpathsim {

double round_to_ns(double delay_us) {
  return std::round(delay_us * kDelayResolutionPerUs) / kDelayResolutionPerUs;
}

double ingest_delay(double delay_us, std::size_t index) {
  if (!std::isfinite(delay_us) || delay_us < 0) {
    throw Error(ErrorCode::kInvalidSample,
                "sample " + std::to_string(index) + " is not a finite non-negative delay");
  }
  return round_to_ns(delay_us);
}

namespace {

std::vector<double> ingest_sorted(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyTrace, "no samples");
  std::vector<double> values;
  values.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) values.push_back(ingest_delay(samples[i], i));
  std::sort(values.begin(), values.end());
  return values;
}

// Run-length encodes a sorted sequence.
void count_runs(const std::vector<double>& sorted, std::vector<double>& support,
                std::vector<std::uint64_t>& counts) {
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    support.push_back(sorted[i]);
    counts.push_back(j - i);
    i = j;
  }
}

}  // namespace

std::vector<RelativeFrequency> relative_frequencies(std::span<const double> samples) {
  const auto sorted = ingest_sorted(samples);
  std::vector<double> support;
  std::vector<std::uint64_t> counts;
  count_runs(sorted, support, counts);

  const auto n = static_cast<double>(sorted.size());
  std::vector<RelativeFrequency> out;
  out.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    out.push_back({support[i], counts[i], static_cast<double>(counts[i]) / n});
  }
  return out;
}

EmpiricalDistribution EmpiricalDistribution::from_counts(std::vector<double> support,
                                                         std::span<const std::uint64_t> counts) {
  if (support.empty()) throw Error(ErrorCode::kEmptyTrace, "distribution has no support");
  if (support.size() != counts.size()) {
    throw Error(ErrorCode::kInvalidSample, "support and count lengths differ");
  }
  EmpiricalDistribution d;
  d.cum_count_.reserve(counts.size());
  std::uint64_t running = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i]) || support[i] < 0) {
      throw Error(ErrorCode::kInvalidSample,
                  "support value " + std::to_string(i) + " is not a finite non-negative delay");
    }
    if (i > 0 && !(support[i] > support[i - 1])) {
      throw Error(ErrorCode::kInvalidSample, "support not strictly increasing at " + std::to_string(i));
    }
    if (counts[i] == 0) {
      throw Error(ErrorCode::kInvalidSample, "zero count at support value " + std::to_string(i));
    }
    running += counts[i];
    d.cum_count_.push_back(running);
  }
  // Each cumulative probability is one correctly rounded division of exact
  // integer counts, so the last entry is exactly 1 and no drift accumulates.
  const auto n = static_cast<double>(running);
  d.cum_prob_.reserve(counts.size());
  for (auto c : d.cum_count_) d.cum_prob_.push_back(static_cast<double>(c) / n);
  d.support_ = std::move(support);
  return d;
}

EmpiricalDistribution EmpiricalDistribution::point_mass(double value_us) {
  const std::uint64_t one = 1;
  return from_counts({ingest_delay(value_us, 0)}, std::span(&one, 1));
}

double EmpiricalDistribution::cdf(double x) const {
  if (std::isnan(x)) throw Error(ErrorCode::kInvalidQuery, "ECDF queried at NaN");
  const auto it = std::upper_bound(support_.begin(), support_.end(), x);
  if (it == support_.begin()) return 0.0;
  return cum_prob_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double EmpiricalDistribution::quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidProbability, "probability " + std::to_string(p) + " outside (0, 1]");
  }
  const auto it = std::lower_bound(cum_prob_.begin(), cum_prob_.end(), p);
  return support_[static_cast<std::size_t>(it - cum_prob_.begin())];
}

double EmpiricalDistribution::mean() const {
  double weighted = 0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    weighted += support_[i] * static_cast<double>(count_at(i));
  }
  return std::clamp(weighted / static_cast<double>(n_samples()), min(), max());
}

double EmpiricalDistribution::variance() const {
  const double mu = mean();
  double acc = 0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const double d = support_[i] - mu;
    acc += d * d * static_cast<double>(count_at(i));
  }
  return acc / static_cast<double>(n_samples());
}

EmpiricalDistribution build_ecdf(std::span<const double> samples) {
  const auto sorted = ingest_sorted(samples);
  std::vector<double> support;
  std::vector<std::uint64_t> counts;
  count_runs(sorted, support, counts);
  return EmpiricalDistribution::from_counts(std::move(support), counts);
}

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto sa = a.support();
  const auto sb = b.support();
  const auto pa = a.cum_prob();
  const auto pb = b.cum_prob();
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0;
  double fb = 0;
  double sup = 0;
  // Both step functions only change at support points; walk the merged
  // support and compare right-limits.
  while (i < sa.size() || j < sb.size()) {
    const double x = (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
    if (i < sa.size() && sa[i] == x) fa = pa[i++];
    if (j < sb.size() && sb[j] == x) fb = pb[j++];
    sup = std::max(sup, std::abs(fa - fb));
  }
  return sup;
}

DistributionSummary summarize(const EmpiricalDistribution& dist) {
  DistributionSummary s;
  s.min = dist.min();
  s.max = dist.max();
  s.mean = dist.mean();
  s.median = dist.quantile(0.5);
  s.p95 = dist.quantile(0.95);
  s.p99 = dist.quantile(0.99);
  s.n = dist.n_samples();
  return s;
}

}  // namespace dpathsim
