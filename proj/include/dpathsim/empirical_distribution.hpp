#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpathsim/rng.hpp"

namespace dpathsim {

// Delay values are binned at nanosecond resolution (3 decimals of a
// microsecond) so distinct-value counting is reproducible.
inline constexpr double kDelayResolutionPerUs = 1000.0;

double round_to_ns(double delay_us);

// Validates a raw delay and returns it rounded to the ns grid. Throws
// invalid-sample naming `index` for negative, NaN or infinite values.
double ingest_delay(double delay_us, std::size_t index);

struct RelativeFrequency {
  double value_us;
  std::uint64_t count;
  double frequency;  // count / N

  bool operator==(const RelativeFrequency&) const = default;
};

// Distinct values in increasing order with their relative frequencies.
std::vector<RelativeFrequency> relative_frequencies(std::span<const double> samples);

struct DistributionSummary {
  double min = 0;
  double max = 0;
  double mean = 0;
  double median = 0;
  double p95 = 0;
  double p99 = 0;
  std::uint64_t n = 0;

  bool operator==(const DistributionSummary&) const = default;
};

// Right-continuous step ECDF. Immutable once built; safe to share between
// threads as long as each sampling thread owns its Rng.
class EmpiricalDistribution {
 public:
  // `support` strictly increasing and non-negative; `counts` positive, one
  // per support value.
  static EmpiricalDistribution from_counts(std::vector<double> support,
                                           std::span<const std::uint64_t> counts);

  static EmpiricalDistribution point_mass(double value_us);

  std::span<const double> support() const { return support_; }
  std::span<const double> cum_prob() const { return cum_prob_; }
  std::span<const std::uint64_t> cum_count() const { return cum_count_; }
  std::uint64_t n_samples() const { return cum_count_.back(); }
  std::size_t size() const { return support_.size(); }
  std::uint64_t count_at(std::size_t i) const {
    return i == 0 ? cum_count_[0] : cum_count_[i] - cum_count_[i - 1];
  }
  double min() const { return support_.front(); }
  double max() const { return support_.back(); }

  // Fraction of samples <= x. Throws invalid-query for NaN.
  double cdf(double x) const;

  // Smallest support value v with cdf(v) >= p, p in (0, 1].
  double quantile(double p) const;

  double sample(Rng& rng) const { return quantile(rng.uniform_open_closed()); }

  double mean() const;
  double variance() const;

  // Same step function; n_samples may differ by a common factor.
  bool same_steps(const EmpiricalDistribution& other) const {
    return support_ == other.support_ && cum_prob_ == other.cum_prob_;
  }

  bool operator==(const EmpiricalDistribution&) const = default;

 private:
  EmpiricalDistribution() = default;

  std::vector<double> support_;
  std::vector<std::uint64_t> cum_count_;
  std::vector<double> cum_prob_;
};

EmpiricalDistribution build_ecdf(std::span<const double> samples);

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

DistributionSummary summarize(const EmpiricalDistribution& dist);

}  // namespace dpathsim
