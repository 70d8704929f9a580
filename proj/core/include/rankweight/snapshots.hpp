#ifndef RANKWEIGHT_SNAPSHOTS_HPP
#define RANKWEIGHT_SNAPSHOTS_HPP

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankweight/aggregation.hpp"
#include "rankweight/ingestion.hpp"
#include "rankweight/reporting.hpp"
#include "rankweight/weighting.hpp"

namespace rankweight {

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view text);

// Immutable capture of a dataset.  The id is the SHA-256 (hex) of the
// canonical dataset CSV followed by the universe size and scheme; the
// capture time is metadata and does not enter the id.
struct Snapshot {
  std::string id;
  Timestamp taken_at;
  std::vector<UniversityRecord> records;  // canonical order, all ranked
  UniverseSize m;
  WeightScheme scheme = WeightScheme::kHarmonic;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

// Resolves unranked records to rank m and sorts into canonical order.
// Throws DomainError for ranks above m and ParameterError for duplicate
// (name, country) keys.
Snapshot make_snapshot(std::vector<UniversityRecord> records, UniverseSize m,
                       WeightScheme scheme, Timestamp taken_at);

std::string snapshot_id(std::span<const UniversityRecord> canonical_records,
                        UniverseSize m, WeightScheme scheme);

// Directory of `<id>.csv` + `<id>.meta` pairs with an `index` file.
// Writers hold an exclusive lock on `<dir>/.lock`, readers a shared one.
class SnapshotStore {
 public:
  struct Entry {
    std::string id;
    Timestamp taken_at;
  };

  explicit SnapshotStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  // Idempotent: an id already present is left untouched.
  // Throws StorageError on I/O failure.
  std::string save(const Snapshot& snapshot) const;

  // Throws NotFoundError for unknown ids and IntegrityError when the stored
  // payload no longer hashes to its id.
  Snapshot load(std::string_view id) const;

  std::vector<Entry> list() const;

 private:
  std::filesystem::path dir_;
};

enum class DeltaStatus { kImproved, kWorsened, kUnchanged, kAdded, kRemoved };

std::string_view to_string(DeltaStatus status);

struct RankDelta {
  std::string name;
  CountryCode country;
  std::optional<Rank> old_rank;
  std::optional<Rank> new_rank;
  std::optional<double> old_weight;
  std::optional<double> new_weight;
  DeltaStatus status = DeltaStatus::kUnchanged;
};

struct DiffSummary {
  std::size_t improved = 0;
  std::size_t worsened = 0;
  std::size_t unchanged = 0;
  std::size_t added = 0;
  std::size_t removed = 0;
  double old_w_at = 0.0;
  double new_w_at = 0.0;
  double delta_w_at = 0.0;
  double delta_p_at = 0.0;
};

struct SnapshotDiff {
  std::vector<RankDelta> deltas;  // ordered by (country, name)
  DiffSummary summary;
};

// Throws ComparabilityError when m or scheme differ.
SnapshotDiff diff_snapshots(const Snapshot& old_snapshot,
                            const Snapshot& new_snapshot);

ReportTable diff_table(const SnapshotDiff& diff);

}  // namespace rankweight

#endif  // RANKWEIGHT_SNAPSHOTS_HPP
