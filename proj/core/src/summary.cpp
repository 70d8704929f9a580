#include "rankweight/summary.hpp"

#include <cmath>
#include <set>

namespace rankweight {

TrafficSummary summarize(std::span<const UniversityRecord> records, UniverseSize m,
                         WeightScheme scheme) {
  std::vector<double> weights;
  weights.reserve(records.size());
  std::set<CountryCode> countries;
  for (const auto& r : records) {
    weights.push_back(record_weight(r, m, scheme));
    countries.insert(r.country);
  }
  const AcademicWeight w = academic_weight(weights);

  TrafficSummary s;
  s.m = m;
  s.scheme = scheme;
  s.k = w.k;
  s.countries = countries.size();
  s.w_at = w.w_at;
  s.harmonic = harmonic_number(m);
  s.p_at = w.w_at / s.harmonic * 100.0;
  s.count_share = 100.0 * static_cast<double>(w.k) / static_cast<double>(m.value());
  s.ratio = w.k == 0 ? 0.0 : over_representation_ratio(s.p_at, w.k, m);
  return s;
}

RoundedRatioChain rounded_ratio_chain(double p_at, double count_share) {
  RoundedRatioChain chain;
  chain.p_at = std::stod(format_fixed(p_at, 1));
  chain.count_share = std::stod(format_fixed(count_share, 3));
  chain.ratio = chain.count_share > 0.0 ? chain.p_at / chain.count_share : 0.0;
  return chain;
}

std::vector<std::string> over_representation_notes(const TrafficSummary& s) {
  std::vector<std::string> notes;
  notes.push_back("over-representation ratio (exact) = P_at / (100 k / m) = " +
                  format_fixed(s.p_at, 5) + " / " + format_fixed(s.count_share, 6) +
                  " = " + format_fixed(s.ratio, 2));
  const auto chain = rounded_ratio_chain(s.p_at, s.count_share);
  notes.push_back("rounded-intermediate alternative = " + format_fixed(chain.p_at, 1) +
                  " / " + format_fixed(chain.count_share, 3) + " = " +
                  format_fixed(chain.ratio, 2));
  notes.push_back("reference chain, 2014 dataset = " +
                  format_fixed(kReferenceTrafficShare, 1) + " / " +
                  format_fixed(kReferenceCountShare, 3) + " = " +
                  format_fixed(kReferenceTrafficShare / kReferenceCountShare, 2) +
                  " (its 0.073 % site share is not 21485 / 30000000 = 0.0716 %)");
  return notes;
}

ReportTable summary_table(const TrafficSummary& s) {
  ReportTable table;
  table.title = "Academic traffic summary";
  table.columns = {"Metric", "Value"};
  table.add_row({std::string("scheme"), std::string(to_string(s.scheme))});
  table.add_row({std::string("m"), static_cast<std::int64_t>(s.m.value())});
  table.add_row({std::string("k"), static_cast<std::int64_t>(s.k)});
  table.add_row({std::string("countries"), static_cast<std::int64_t>(s.countries)});
  table.add_row({std::string("W_at"), Decimal{s.w_at, 7}});
  table.add_row({std::string("H_m"), Decimal{s.harmonic, 4}});
  table.add_row({std::string("P_at (%)"), Decimal{s.p_at, 5}});
  table.add_row({std::string("count share (%)"), Decimal{s.count_share, 4}});
  table.add_row({std::string("ratio"), Decimal{s.ratio, 2}});
  if (s.k > 0) table.notes = over_representation_notes(s);
  return table;
}

}  // namespace rankweight
