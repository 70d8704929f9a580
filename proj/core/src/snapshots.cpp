#include "rankweight/snapshots.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rankweight/errors.hpp"

namespace rankweight {

namespace fs = std::filesystem;

std::string format_timestamp(Timestamp t) {
  const std::time_t secs = t.time_since_epoch().count();
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  std::tm tm{};
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ", &tm.tm_year, &tm.tm_mon,
                  &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec) != 6) {
    return std::nullopt;
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const std::time_t secs = timegm(&tm);
  const Timestamp out{std::chrono::seconds(secs)};
  if (format_timestamp(out) != text) return std::nullopt;  // e.g. Feb 30
  return out;
}

namespace {

std::string canonical_payload(std::span<const UniversityRecord> records,
                              UniverseSize m, WeightScheme scheme) {
  std::string payload = emit_dataset(records);
  payload += "m=" + std::to_string(m.value()) + "\n";
  payload += "scheme=" + std::string(to_string(scheme)) + "\n";
  return payload;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw StorageError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

bool canonical_less(const UniversityRecord& a, const UniversityRecord& b) {
  if (a.country != b.country) return a.country < b.country;
  return a.name < b.name;
}

bool valid_id(std::string_view id) {
  return id.size() == 64 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

// flock(2) on <dir>/.lock for the lifetime of the object.
class StoreLock {
 public:
  StoreLock(const fs::path& dir, bool exclusive) {
    const auto path = dir / ".lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0 && !exclusive) fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) {
      if (exclusive) throw StorageError("cannot open lock file " + path.string());
      return;  // read-only store without a lock file
    }
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw StorageError("cannot lock " + path.string());
    }
  }
  ~StoreLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

void write_atomically(const fs::path& target, const std::string& content) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw StorageError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw StorageError("cannot rename into " + target.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("no such snapshot file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::map<std::string, std::string> parse_meta(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace

std::string snapshot_id(std::span<const UniversityRecord> canonical_records,
                        UniverseSize m, WeightScheme scheme) {
  return sha256_hex(canonical_payload(canonical_records, m, scheme));
}

Snapshot make_snapshot(std::vector<UniversityRecord> records, UniverseSize m,
                       WeightScheme scheme, Timestamp taken_at) {
  for (auto& r : records) {
    r.rank = effective_rank(r, m);
    if (r.rank->value() > m.value()) {
      throw DomainError("record '" + r.name + "' has rank " +
                        std::to_string(r.rank->value()) + " above m");
    }
  }
  std::sort(records.begin(), records.end(), canonical_less);
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].name == records[i - 1].name &&
        records[i].country == records[i - 1].country) {
      throw ParameterError("duplicate record '" + records[i].name + "' (" +
                           std::string(records[i].country.str()) + ") in snapshot");
    }
  }
  Snapshot s;
  s.id = snapshot_id(records, m, scheme);
  s.taken_at = taken_at;
  s.records = std::move(records);
  s.m = m;
  s.scheme = scheme;
  return s;
}

SnapshotStore::SnapshotStore(fs::path dir) : dir_(std::move(dir)) {}

std::string SnapshotStore::save(const Snapshot& snapshot) const {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw StorageError("cannot create snapshot store " + dir_.string() +
                       (ec ? ": " + ec.message() : ""));
  }
  StoreLock lock(dir_, true);

  const auto data_path = dir_ / (snapshot.id + ".csv");
  if (fs::exists(data_path, ec)) return snapshot.id;

  write_atomically(data_path, emit_dataset(snapshot.records));
  std::string meta;
  meta += "id=" + snapshot.id + "\n";
  meta += "taken_at=" + format_timestamp(snapshot.taken_at) + "\n";
  meta += "m=" + std::to_string(snapshot.m.value()) + "\n";
  meta += "scheme=" + std::string(to_string(snapshot.scheme)) + "\n";
  write_atomically(dir_ / (snapshot.id + ".meta"), meta);

  std::ofstream index(dir_ / "index", std::ios::app);
  index << snapshot.id << ' ' << format_timestamp(snapshot.taken_at) << '\n';
  if (!index) throw StorageError("cannot append to " + (dir_ / "index").string());
  return snapshot.id;
}

Snapshot SnapshotStore::load(std::string_view id) const {
  if (!valid_id(id)) throw NotFoundError("not a snapshot id: '" + std::string(id) + "'");
  if (!fs::is_directory(dir_)) throw NotFoundError("no snapshot store at " + dir_.string());
  StoreLock lock(dir_, false);

  const std::string sid(id);
  const auto meta = parse_meta(read_file(dir_ / (sid + ".meta")));
  const std::string payload = read_file(dir_ / (sid + ".csv"));

  const auto field = [&](const char* key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) throw IntegrityError("snapshot " + sid + ": metadata lacks " + key);
    return it->second;
  };
  if (field("id") != sid) throw IntegrityError("snapshot " + sid + ": metadata id mismatch");
  const auto taken_at = parse_timestamp(field("taken_at"));
  const auto scheme = parse_weight_scheme(field("scheme"));
  std::uint64_t m_value = 0;
  try {
    std::size_t used = 0;
    m_value = std::stoull(field("m"), &used);
    if (used != field("m").size()) m_value = 0;
  } catch (const std::exception&) {
    m_value = 0;
  }
  if (!taken_at || !scheme || m_value == 0) {
    throw IntegrityError("snapshot " + sid + ": malformed metadata");
  }
  const UniverseSize m(m_value);

  std::istringstream in(payload);
  IngestResult ingested;
  try {
    ingested = ingest(in, m);
  } catch (const FormatError& e) {
    throw IntegrityError("snapshot " + sid + ": " + e.what());
  }
  if (!ingested.report.rejected.empty() || ingested.report.deduplicated != 0) {
    throw IntegrityError("snapshot " + sid + ": payload has invalid rows");
  }

  Snapshot s = make_snapshot(std::move(ingested.records), m, *scheme, *taken_at);
  if (s.id != sid) throw IntegrityError("snapshot " + sid + ": content hash mismatch");
  return s;
}

std::vector<SnapshotStore::Entry> SnapshotStore::list() const {
  std::vector<Entry> out;
  if (!fs::is_directory(dir_)) return out;
  StoreLock lock(dir_, false);
  std::ifstream in(dir_ / "index");
  std::set<std::string> seen;
  for (std::string line; std::getline(in, line);) {
    std::istringstream fields(line);
    std::string id, when;
    if (!(fields >> id >> when)) continue;
    const auto t = parse_timestamp(when);
    if (!t || !valid_id(id) || !seen.insert(id).second) continue;
    out.push_back({id, *t});
  }
  return out;
}

std::string_view to_string(DeltaStatus status) {
  switch (status) {
    case DeltaStatus::kImproved:
      return "IMPROVED";
    case DeltaStatus::kWorsened:
      return "WORSENED";
    case DeltaStatus::kUnchanged:
      return "UNCHANGED";
    case DeltaStatus::kAdded:
      return "ADDED";
    case DeltaStatus::kRemoved:
      return "REMOVED";
  }
  return "UNCHANGED";
}

SnapshotDiff diff_snapshots(const Snapshot& old_snapshot, const Snapshot& new_snapshot) {
  if (old_snapshot.m != new_snapshot.m) {
    throw ComparabilityError("snapshots use different universe sizes (" +
                             std::to_string(old_snapshot.m.value()) + " vs " +
                             std::to_string(new_snapshot.m.value()) + ")");
  }
  if (old_snapshot.scheme != new_snapshot.scheme) {
    throw ComparabilityError("snapshots use different weight schemes");
  }
  const UniverseSize m = old_snapshot.m;
  const WeightScheme scheme = old_snapshot.scheme;

  SnapshotDiff diff;
  CompensatedSum old_sum;
  CompensatedSum new_sum;

  // Both record lists are in canonical order: merge them.
  const auto& a = old_snapshot.records;
  const auto& b = new_snapshot.records;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    RankDelta d{{}, CountryCode("XX"), {}, {}, {}, {}, DeltaStatus::kUnchanged};
    const bool take_old = j == b.size() || (i < a.size() && !canonical_less(b[j], a[i]));
    const bool take_new = i == a.size() || (j < b.size() && !canonical_less(a[i], b[j]));
    if (take_old) {
      const auto& r = a[i++];
      d.name = r.name;
      d.country = r.country;
      d.old_rank = effective_rank(r, m);
      d.old_weight = site_weight(*d.old_rank, m, scheme);
      old_sum.add(*d.old_weight);
    }
    if (take_new) {
      const auto& r = b[j++];
      d.name = r.name;
      d.country = r.country;
      d.new_rank = effective_rank(r, m);
      d.new_weight = site_weight(*d.new_rank, m, scheme);
      new_sum.add(*d.new_weight);
    }

    auto& s = diff.summary;
    if (!d.old_rank) {
      d.status = DeltaStatus::kAdded;
      ++s.added;
    } else if (!d.new_rank) {
      d.status = DeltaStatus::kRemoved;
      ++s.removed;
    } else if (*d.new_rank < *d.old_rank) {
      d.status = DeltaStatus::kImproved;
      ++s.improved;
    } else if (*d.old_rank < *d.new_rank) {
      d.status = DeltaStatus::kWorsened;
      ++s.worsened;
    } else {
      d.status = DeltaStatus::kUnchanged;
      ++s.unchanged;
    }
    diff.deltas.push_back(std::move(d));
  }

  const double h = harmonic_number(m);
  auto& s = diff.summary;
  s.old_w_at = old_sum.value();
  s.new_w_at = new_sum.value();
  s.delta_w_at = s.new_w_at - s.old_w_at;
  s.delta_p_at = s.new_w_at / h * 100.0 - s.old_w_at / h * 100.0;
  return diff;
}

ReportTable diff_table(const SnapshotDiff& diff) {
  ReportTable table;
  table.title = "Rank changes between snapshots";
  table.columns = {"Code", "University Name", "Old Rank", "New Rank",
                   "Old W_u", "New W_u", "Status"};
  const auto rank_cell = [](const std::optional<Rank>& r) -> Cell {
    if (!r) return std::string();
    return static_cast<std::int64_t>(r->value());
  };
  const auto weight_cell = [](const std::optional<double>& w) -> Cell {
    if (!w) return std::string();
    return Decimal{*w, kSiteWeightDecimals};
  };
  for (const auto& d : diff.deltas) {
    table.add_row({std::string(d.country.str()), d.name, rank_cell(d.old_rank),
                   rank_cell(d.new_rank), weight_cell(d.old_weight),
                   weight_cell(d.new_weight), std::string(to_string(d.status))});
  }
  const auto& s = diff.summary;
  table.notes.push_back("improved=" + std::to_string(s.improved) +
                        " worsened=" + std::to_string(s.worsened) +
                        " unchanged=" + std::to_string(s.unchanged) +
                        " added=" + std::to_string(s.added) +
                        " removed=" + std::to_string(s.removed));
  table.notes.push_back("delta W_at=" + format_shortest(s.delta_w_at) +
                        " delta P_at=" + format_shortest(s.delta_p_at) + "%");
  return table;
}

}  // namespace rankweight
