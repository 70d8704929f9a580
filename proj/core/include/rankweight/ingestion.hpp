#ifndef RANKWEIGHT_INGESTION_HPP
#define RANKWEIGHT_INGESTION_HPP

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rankweight/aggregation.hpp"
#include "rankweight/weighting.hpp"

namespace rankweight {

// Dataset CSV columns, in order.
inline constexpr std::string_view kDatasetHeader = "name,country_code,global_rank";

struct DatasetRow {
  std::size_t line = 0;
  std::string name;
  std::string country;
  std::string rank_field;
};

struct LineError {
  std::size_t line = 0;
  std::string reason;
};

struct ParsedDataset {
  std::vector<DatasetRow> rows;
  std::vector<LineError> errors;
};

// Throws FormatError when the header is missing or has the wrong columns.
// Blank lines are skipped; every other malformed line lands in `errors`.
ParsedDataset parse_dataset(std::istream& in);

struct Rejection {
  std::size_t line = 0;
  std::string reason;
};

struct NormalizedRow {
  UniversityRecord record;
  bool defaulted_rank = false;
};

// Trims the name, uppercases the country and applies the default-rank rule
// (empty rank field -> rank m).  Out-of-range ranks are rejected, never
// clamped.
std::variant<NormalizedRow, Rejection> normalize_row(const DatasetRow& row,
                                                     UniverseSize m);

struct DedupeResult {
  std::vector<UniversityRecord> records;
  std::size_t deduplicated = 0;
};

// Collapses records sharing (name, country) into the first occurrence,
// keeping the best (smallest) rank.  Unranked counts as worse than any rank.
DedupeResult dedupe(std::span<const UniversityRecord> records);

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t defaulted_rank = 0;  // accepted records whose rank was defaulted
  std::vector<LineError> rejected;
  std::size_t deduplicated = 0;

  std::size_t total_rows() const {
    return accepted + rejected.size() + deduplicated;
  }
};

struct IngestResult {
  std::vector<UniversityRecord> records;
  IngestReport report;
};

// parse -> normalize -> dedupe.
IngestResult ingest(std::istream& in, UniverseSize m);
// Throws std::system_error (I/O) when the file cannot be opened.
IngestResult ingest_file(const std::filesystem::path& path, UniverseSize m);

// Published per-country totals, CSV header `country_code,universities,weight`.
// Throws FormatError naming the first bad line.
std::vector<CountryAggregate> read_aggregates(std::istream& in);

// --- ranking providers -----------------------------------------------------

using Timestamp = std::chrono::sys_seconds;

struct RankingProviderResponse {
  std::string site;
  std::optional<Rank> rank;
  Timestamp retrieved_at;
};

class RankingProvider {
 public:
  virtual ~RankingProvider() = default;
  virtual std::string name() const = 0;
  // Absent sites yield nullopt; failures throw ProviderError.
  virtual std::optional<Rank> lookup(const std::string& site) = 0;
  virtual Timestamp now() const;
};

// Reads a `site,global_rank` CSV table.
class FixtureRankingProvider : public RankingProvider {
 public:
  using Clock = std::function<Timestamp()>;

  explicit FixtureRankingProvider(std::filesystem::path path,
                                  Clock clock = nullptr);

  std::string name() const override;
  std::optional<Rank> lookup(const std::string& site) override;
  Timestamp now() const override;

 private:
  void load();

  std::filesystem::path path_;
  Clock clock_;
  std::optional<std::map<std::string, Rank, std::less<>>> table_;
};

// One response per site, in request order.
std::vector<RankingProviderResponse> fetch_ranks(
    std::span<const std::string> sites, RankingProvider& provider);

}  // namespace rankweight

#endif  // RANKWEIGHT_INGESTION_HPP
