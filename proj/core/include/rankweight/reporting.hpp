#ifndef RANKWEIGHT_REPORTING_HPP
#define RANKWEIGHT_REPORTING_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rankweight/aggregation.hpp"

namespace rankweight {

// Fixed-point text with `precision` decimals, rounding half away from zero
// on the shortest round-trip decimal form of `value` (so 10.165 -> "10.17").
std::string format_fixed(double value, int precision);

// Shortest round-trip decimal form.
std::string format_shortest(double value);

// Print precisions of the published tables.
inline constexpr int kCountryWeightDecimals = 8;
inline constexpr int kAverageDecimals = 2;  // applied to A_wc * 1e6
inline constexpr int kSiteWeightDecimals = 6;
inline constexpr double kAverageScale = 1e6;

struct Decimal {
  double value = 0.0;
  int precision = 0;
};

using Cell = std::variant<std::string, std::int64_t, Decimal>;

std::string cell_text(const Cell& cell);

struct ReportTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;

  // Throws ParameterError when the row width differs from the column count.
  void add_row(std::vector<Cell> row);
};

enum class TableStyle {
  kUniversityCount,
  kCountryWeight,
  kCountryAverage,
  kTopUniversities,
};

enum class TableFormat { kCsv, kJson, kMarkdown };

std::optional<TableFormat> parse_table_format(std::string_view text);

ReportTable country_table(const CountryRanking& ranking, TableStyle style);
ReportTable university_table(std::span<const RankedUniversity> universities);

// CSV: RFC-4180, LF endings, notes omitted.  JSON: {title, columns, rows
// [, notes]}.  Markdown: title line, pipe table, notes as trailing lines.
std::string render_table(const ReportTable& table, TableFormat format);

std::string emit_table(const CountryRanking& ranking, TableStyle style,
                       TableFormat format);
std::string emit_table(std::span<const RankedUniversity> universities,
                       TableFormat format);

// Canonical dataset CSV: header, rows sorted by (country, name), integer
// ranks, empty field for unranked records.
std::string emit_dataset(std::span<const UniversityRecord> records);

// --- choropleth ------------------------------------------------------------

enum class ChoroplethMetric { kCount, kWeight, kAverage };

std::string_view to_string(ChoroplethMetric metric);
std::optional<ChoroplethMetric> parse_choropleth_metric(std::string_view text);

struct Bucket {
  double lower = 0.0;  // inclusive
  std::string color;   // #rrggbb
};

struct ChoroplethSpec {
  ChoroplethMetric metric = ChoroplethMetric::kWeight;
  std::vector<Bucket> buckets;
  std::map<CountryCode, std::size_t> assignments;
};

struct QuantileBuckets {
  std::size_t q = 5;
};

struct FixedBuckets {
  std::vector<double> bounds;  // strictly increasing lower bounds
};

using BucketStrategy = std::variant<QuantileBuckets, FixedBuckets>;

// `n` colors on a sequential light-to-dark ramp.
std::vector<std::string> color_ramp(std::size_t n);

std::map<CountryCode, double> metric_values(
    std::span<const CountryAggregate> aggs, ChoroplethMetric metric);

// Quantile: countries sorted by value are cut into q near-equal groups; tied
// values share the lowest group any of them reaches, and empty groups are
// dropped.  Fixed: each value goes to the last bound not above it (values
// below the first bound go to bucket 0).
// Throws ParameterError for q < 2, non-increasing bounds or empty input.
ChoroplethSpec bucketize(const std::map<CountryCode, double>& values,
                         const BucketStrategy& strategy,
                         ChoroplethMetric metric = ChoroplethMetric::kWeight);

// Pre-projected world outline: one SVG path per alpha-2 code.
class MapGeometry {
 public:
  struct Region {
    std::string code;
    std::string path;
  };

  // Throws ResourceError when the document has no viewBox or no paths.
  static MapGeometry parse(std::string_view svg);
  // Throws ResourceError when the file is missing or corrupt.
  static MapGeometry load(const std::filesystem::path& path);

  const std::string& view_box() const { return view_box_; }
  const std::vector<Region>& regions() const { return regions_; }
  bool contains(std::string_view code) const;

 private:
  std::string view_box_;
  std::vector<Region> regions_;
};

// $RANKWEIGHT_GEOMETRY when set, otherwise the bundled outline.
std::filesystem::path default_geometry_path();

struct ChoroplethOutput {
  std::string svg;
  std::vector<CountryCode> unmapped;  // assigned but absent from the geometry
};

ChoroplethOutput emit_choropleth_svg(const ChoroplethSpec& spec,
                                     const MapGeometry& geometry);

// Machine-readable form of a spec: {metric, buckets: [{lower, color}],
// assignments: {code: bucket}}.
std::string choropleth_spec_json(const ChoroplethSpec& spec);

}  // namespace rankweight

#endif  // RANKWEIGHT_REPORTING_HPP
