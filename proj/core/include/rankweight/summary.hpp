#ifndef RANKWEIGHT_SUMMARY_HPP
#define RANKWEIGHT_SUMMARY_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rankweight/aggregation.hpp"
#include "rankweight/reporting.hpp"
#include "rankweight/weighting.hpp"

namespace rankweight {

// World-level figures for one dataset.
struct TrafficSummary {
  UniverseSize m;
  WeightScheme scheme = WeightScheme::kHarmonic;
  std::size_t k = 0;
  std::size_t countries = 0;
  double w_at = 0.0;
  double harmonic = 0.0;     // H_m
  double p_at = 0.0;         // percent
  double count_share = 0.0;  // 100 k / m, percent
  double ratio = 0.0;        // p_at / count_share; 0 when k == 0
};

TrafficSummary summarize(std::span<const UniversityRecord> records, UniverseSize m,
                         WeightScheme scheme = WeightScheme::kHarmonic);

// The over-representation ratio as computed from rounded intermediates:
// P_at to one decimal over the count share to three decimals.
struct RoundedRatioChain {
  double p_at = 0.0;
  double count_share = 0.0;
  double ratio = 0.0;
};

RoundedRatioChain rounded_ratio_chain(double p_at, double count_share);

// Reference chain quoted for the 2014 dataset of 21,485 academic sites: a
// 0.5 % traffic share over a 0.073 % site share.  21,485 / 30,000,000 is
// 0.0716 %, so the chain is reported as a labelled alternative only.
inline constexpr double kReferenceTrafficShare = 0.5;
inline constexpr double kReferenceCountShare = 0.073;

// Footnotes explaining the exact ratio and its rounded alternatives.
std::vector<std::string> over_representation_notes(const TrafficSummary& summary);

// Metric / Value table, precisions W_at 7, H_m 4, P_at 5, count share 4,
// ratio 2.
ReportTable summary_table(const TrafficSummary& summary);

}  // namespace rankweight

#endif  // RANKWEIGHT_SUMMARY_HPP
