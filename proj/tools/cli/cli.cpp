#include "cli.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <system_error>

#include "CLI11.hpp"
#include "rankweight/aggregation.hpp"
#include "rankweight/errors.hpp"
#include "rankweight/ingestion.hpp"
#include "rankweight/reporting.hpp"
#include "rankweight/simulation.hpp"
#include "rankweight/snapshots.hpp"
#include "rankweight/summary.hpp"
#include "rankweight/weighting.hpp"

namespace rankweight::cli {
namespace {

// Raised for unreadable inputs and unwritable outputs (exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t m = UniverseSize::kDefault;
  std::string scheme = "harmonic";
  std::string out_path;
};

struct Options {
  Common common;

  std::string in_path;
  std::string aggregates_path;
  std::string format;

  // ingest
  bool strict = false;

  // compute
  bool detail = false;

  // rank-countries / top-universities
  std::string by = "weight";
  std::optional<std::size_t> min_universities;
  std::size_t top = 0;

  // choropleth
  std::string metric = "weight";
  std::size_t buckets = 5;
  std::vector<double> bounds;
  std::string geometry_path;
  std::string spec_out;

  // snapshot
  std::string store;
  std::string taken_at;
  std::string old_id;
  std::string new_id;

  // simulate
  std::uint64_t sim_m = 1000;
  std::vector<double> exponents{1.0};
  double fraction = 0.01;
  std::string selection = "top";
  std::uint64_t seed = 0;
};

class Context {
 public:
  Context(const Options& opts, std::ostream& out, std::ostream& err)
      : opts_(opts), out_(out), err_(err) {}

  std::ostream& err() { return err_; }

  void write(const std::string& text) const {
    if (opts_.common.out_path.empty()) {
      out_ << text;
      return;
    }
    std::ofstream file(opts_.common.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + opts_.common.out_path);
    file << text;
    if (!file.flush()) throw IoError("write failed for " + opts_.common.out_path);
  }

  UniverseSize m() const { return UniverseSize(opts_.common.m); }

  WeightScheme scheme() const {
    const auto s = parse_weight_scheme(opts_.common.scheme);
    if (!s) throw ParameterError("unknown scheme '" + opts_.common.scheme + "'");
    return *s;
  }

  TableFormat table_format(TableFormat fallback) const {
    if (opts_.format.empty()) return fallback;
    const auto f = parse_table_format(opts_.format);
    if (!f) throw ParameterError("unknown format '" + opts_.format + "'");
    return *f;
  }

  IngestResult load_dataset() const {
    std::ifstream in(opts_.in_path, std::ios::binary);
    if (!in) throw IoError("cannot read " + opts_.in_path);
    return ingest(in, m());
  }

  std::vector<CountryAggregate> load_aggregates() const {
    if (!opts_.aggregates_path.empty()) {
      std::ifstream in(opts_.aggregates_path, std::ios::binary);
      if (!in) throw IoError("cannot read " + opts_.aggregates_path);
      return read_aggregates(in);
    }
    const auto data = load_dataset();
    report_rejections(data.report);
    return aggregate_by_country(data.records, m(), scheme());
  }

  void report_rejections(const IngestReport& report) const {
    for (const auto& r : report.rejected) {
      err_ << "line " << r.line << ": " << r.reason << '\n';
    }
  }

 private:
  const Options& opts_;
  std::ostream& out_;
  std::ostream& err_;
};

void require_input(const Options& o, bool allow_aggregates) {
  const bool has_in = !o.in_path.empty();
  const bool has_agg = allow_aggregates && !o.aggregates_path.empty();
  if (has_in == has_agg) {
    throw ParameterError(allow_aggregates ? "give exactly one of --in or --aggregates"
                                          : "--in is required");
  }
}

std::string render_text(const ReportTable& table) {
  std::size_t width = 0;
  for (const auto& row : table.rows) width = std::max(width, cell_text(row[0]).size());
  std::string out;
  for (const auto& row : table.rows) {
    std::string key = cell_text(row[0]);
    key.resize(width + 2, ' ');
    out += key;
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (i > 1) out += "  ";
      out += cell_text(row[i]);
    }
    out += '\n';
  }
  for (const auto& note : table.notes) out += "note: " + note + '\n';
  return out;
}

// --- subcommands -----------------------------------------------------------

int cmd_ingest(const Options& o, Context& ctx) {
  require_input(o, false);
  const auto data = ctx.load_dataset();
  ctx.report_rejections(data.report);
  const auto& r = data.report;
  ctx.err() << "accepted=" << r.accepted << " defaulted_rank=" << r.defaulted_rank
            << " rejected=" << r.rejected.size() << " deduplicated=" << r.deduplicated
            << '\n';
  ctx.write(emit_dataset(data.records));
  return o.strict && !r.rejected.empty() ? kExitValidation : kExitOk;
}

int cmd_compute(const Options& o, Context& ctx) {
  require_input(o, false);
  const auto data = ctx.load_dataset();
  ctx.report_rejections(data.report);
  const auto summary = summarize(data.records, ctx.m(), ctx.scheme());
  const auto table = summary_table(summary);

  std::vector<ReportTable> extra;
  if (o.detail) {
    const auto aggs = aggregate_by_country(data.records, ctx.m(), ctx.scheme());
    extra.push_back(country_table(rank_countries(aggs, RankingKey::kWeight),
                                  TableStyle::kCountryWeight));
    if (!data.records.empty()) {
      extra.push_back(university_table(rank_universities(
          data.records, ctx.m(), ctx.scheme(), data.records.size())));
    }
  }

  if (o.format.empty() || o.format == "text") {
    std::string text = render_text(table);
    for (const auto& t : extra) text += "\n" + render_table(t, TableFormat::kCsv);
    ctx.write(text);
    return kExitOk;
  }
  const auto format = ctx.table_format(TableFormat::kCsv);
  if (format == TableFormat::kJson) {
    nlohmann::ordered_json doc;
    doc["summary"] = nlohmann::ordered_json::parse(render_table(table, format));
    if (o.detail) {
      doc["countries"] = nlohmann::ordered_json::parse(render_table(extra.at(0), format));
      doc["sites"] = extra.size() > 1
                         ? nlohmann::ordered_json::parse(render_table(extra[1], format))
                         : nlohmann::ordered_json();
    }
    ctx.write(doc.dump(2) + "\n");
    return kExitOk;
  }
  std::string text = render_table(table, format);
  for (const auto& t : extra) text += "\n" + render_table(t, format);
  ctx.write(text);
  return kExitOk;
}

int cmd_rank_countries(const Options& o, Context& ctx) {
  require_input(o, true);
  const auto key = parse_ranking_key(o.by);
  if (!key) throw ParameterError("--by must be weight, count or average");
  const std::size_t min_n = o.min_universities.value_or(
      *key == RankingKey::kAverage ? kAverageMinUniversities : 0);

  const auto aggs = ctx.load_aggregates();
  auto ranking = rank_countries(aggs, *key, min_n);
  if (o.top > 0 && ranking.size() > o.top) {
    ranking.erase(ranking.begin() + static_cast<std::ptrdiff_t>(o.top), ranking.end());
  }

  const TableStyle style = *key == RankingKey::kCount    ? TableStyle::kUniversityCount
                           : *key == RankingKey::kWeight ? TableStyle::kCountryWeight
                                                         : TableStyle::kCountryAverage;
  ctx.write(emit_table(ranking, style, ctx.table_format(TableFormat::kCsv)));
  return kExitOk;
}

int cmd_top_universities(const Options& o, Context& ctx) {
  require_input(o, false);
  const auto data = ctx.load_dataset();
  ctx.report_rejections(data.report);
  const std::size_t top = o.top == 0 ? 80 : o.top;
  const auto ranked = rank_universities(data.records, ctx.m(), ctx.scheme(), top);
  ctx.write(emit_table(ranked, ctx.table_format(TableFormat::kCsv)));
  return kExitOk;
}

int cmd_choropleth(const Options& o, Context& ctx) {
  require_input(o, true);
  const auto metric = parse_choropleth_metric(o.metric);
  if (!metric) throw ParameterError("--metric must be count, weight or average");

  const auto aggs = ctx.load_aggregates();
  BucketStrategy strategy = QuantileBuckets{o.buckets};
  if (!o.bounds.empty()) strategy = FixedBuckets{o.bounds};
  const auto spec = bucketize(metric_values(aggs, *metric), strategy, *metric);

  const auto geometry = MapGeometry::load(
      o.geometry_path.empty() ? default_geometry_path()
                              : std::filesystem::path(o.geometry_path));
  const auto output = emit_choropleth_svg(spec, geometry);
  if (!output.unmapped.empty()) {
    ctx.err() << "unmapped:";
    for (const auto& code : output.unmapped) ctx.err() << ' ' << code.str();
    ctx.err() << '\n';
  }
  if (!o.spec_out.empty()) {
    std::ofstream file(o.spec_out, std::ios::binary | std::ios::trunc);
    if (!file || !(file << choropleth_spec_json(spec))) {
      throw IoError("cannot write " + o.spec_out);
    }
  }
  ctx.write(output.svg);
  return kExitOk;
}

int cmd_snapshot_save(const Options& o, Context& ctx) {
  require_input(o, false);
  const auto data = ctx.load_dataset();
  ctx.report_rejections(data.report);

  Timestamp taken_at = std::chrono::time_point_cast<std::chrono::seconds>(
      std::chrono::system_clock::now());
  if (!o.taken_at.empty()) {
    const auto parsed = parse_timestamp(o.taken_at);
    if (!parsed) throw ParameterError("--taken-at must look like 2014-01-31T00:00:00Z");
    taken_at = *parsed;
  }
  const auto snapshot = make_snapshot(data.records, ctx.m(), ctx.scheme(), taken_at);
  ctx.write(SnapshotStore(o.store).save(snapshot) + "\n");
  return kExitOk;
}

int cmd_snapshot_diff(const Options& o, Context& ctx) {
  const SnapshotStore store(o.store);
  const auto diff = diff_snapshots(store.load(o.old_id), store.load(o.new_id));
  ctx.write(render_table(diff_table(diff), ctx.table_format(TableFormat::kCsv)));
  const auto& s = diff.summary;
  ctx.err() << "improved=" << s.improved << " worsened=" << s.worsened
            << " unchanged=" << s.unchanged << " added=" << s.added
            << " removed=" << s.removed << " delta_w_at=" << format_shortest(s.delta_w_at)
            << " delta_p_at=" << format_shortest(s.delta_p_at) << '\n';
  return kExitOk;
}

int cmd_snapshot_list(const Options& o, Context& ctx) {
  std::string text;
  for (const auto& e : SnapshotStore(o.store).list()) {
    text += e.id + ' ' + format_timestamp(e.taken_at) + '\n';
  }
  ctx.write(text);
  return kExitOk;
}

int cmd_simulate(const Options& o, Context& ctx) {
  const auto selection = parse_selection(o.selection);
  if (!selection) throw ParameterError("--selection must be top, bottom, random or stratified");
  const auto rows = bias_sweep(o.sim_m, o.exponents, o.fraction, *selection, o.seed);
  ctx.write(render_table(sweep_table(rows), ctx.table_format(TableFormat::kCsv)));
  return kExitOk;
}

void add_common(CLI::App* sub, Options& o, bool with_m = true) {
  if (with_m) {
    sub->add_option("--m", o.common.m, "Universe size (number of ranked sites)")
        ->check(CLI::PositiveNumber);
  }
  sub->add_option("--scheme", o.common.scheme, "Weight scheme")
      ->check(CLI::IsMember({"harmonic", "linear"}));
  sub->add_option("--out", o.common.out_path, "Write data here instead of stdout");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Rank-weighted academic traffic estimation", "rankweight"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_config("--config", "", "TOML file pre-setting flags (command line wins)");

  const char* kTableFormats = "csv, json or markdown";

  auto* ingest_cmd = app.add_subcommand("ingest", "Validate and normalize a dataset CSV");
  ingest_cmd->add_option("--in", o.in_path, "Dataset CSV")->required();
  ingest_cmd->add_flag("--strict", o.strict, "Exit 1 when any row is rejected");
  add_common(ingest_cmd, o);

  auto* compute_cmd = app.add_subcommand("compute", "World-level academic traffic figures");
  compute_cmd->add_option("--in", o.in_path, "Dataset CSV")->required();
  compute_cmd->add_option("--format", o.format, "text, csv, json or markdown");
  compute_cmd->add_flag("--detail", o.detail, "Append per-country W_c and per-site W_u");
  add_common(compute_cmd, o);

  auto* rank_cmd = app.add_subcommand("rank-countries", "Ranked country table");
  rank_cmd->add_option("--in", o.in_path, "Dataset CSV");
  rank_cmd->add_option("--aggregates", o.aggregates_path,
                       "Country totals CSV (country_code,universities,weight)");
  rank_cmd->add_option("--by", o.by, "weight, count or average")
      ->check(CLI::IsMember({"weight", "count", "average"}));
  rank_cmd->add_option("--min-universities", o.min_universities,
                       "Drop countries with fewer sites (default 100 for average)");
  rank_cmd->add_option("--top", o.top, "Keep only the first N rows");
  rank_cmd->add_option("--format", o.format, kTableFormats);
  add_common(rank_cmd, o);

  auto* top_cmd = app.add_subcommand("top-universities", "Highest-weight sites");
  top_cmd->add_option("--in", o.in_path, "Dataset CSV")->required();
  top_cmd->add_option("--top", o.top, "Number of rows (default 80)")->check(CLI::PositiveNumber);
  top_cmd->add_option("--format", o.format, kTableFormats);
  add_common(top_cmd, o);

  auto* map_cmd = app.add_subcommand("choropleth", "Country map as SVG");
  map_cmd->add_option("--in", o.in_path, "Dataset CSV");
  map_cmd->add_option("--aggregates", o.aggregates_path, "Country totals CSV");
  map_cmd->add_option("--metric", o.metric, "count, weight or average")
      ->check(CLI::IsMember({"count", "weight", "average"}));
  auto* buckets_opt = map_cmd->add_option("--buckets", o.buckets, "Quantile bucket count");
  map_cmd->add_option("--bounds", o.bounds, "Fixed lower bounds, comma separated")
      ->delimiter(',')
      ->excludes(buckets_opt);
  map_cmd->add_option("--geometry", o.geometry_path,
                      "World outline SVG (default: $RANKWEIGHT_GEOMETRY or bundled)");
  map_cmd->add_option("--spec-out", o.spec_out, "Also write the bucket spec as JSON");
  add_common(map_cmd, o);

  auto* snap_cmd = app.add_subcommand("snapshot", "Dataset snapshots");
  snap_cmd->require_subcommand(1);
  auto* save_cmd = snap_cmd->add_subcommand("save", "Store a dataset capture");
  save_cmd->add_option("--in", o.in_path, "Dataset CSV")->required();
  save_cmd->add_option("--store", o.store, "Snapshot directory")->required();
  save_cmd->add_option("--taken-at", o.taken_at, "Capture time, UTC (default now)");
  add_common(save_cmd, o);
  auto* diff_cmd = snap_cmd->add_subcommand("diff", "Rank changes between two snapshots");
  diff_cmd->add_option("--store", o.store, "Snapshot directory")->required();
  diff_cmd->add_option("old", o.old_id, "Older snapshot id")->required();
  diff_cmd->add_option("new", o.new_id, "Newer snapshot id")->required();
  diff_cmd->add_option("--format", o.format, kTableFormats);
  diff_cmd->add_option("--out", o.common.out_path, "Write data here instead of stdout");
  auto* list_cmd = snap_cmd->add_subcommand("list", "Stored snapshot ids");
  list_cmd->add_option("--store", o.store, "Snapshot directory")->required();
  list_cmd->add_option("--out", o.common.out_path, "Write data here instead of stdout");

  auto* sim_cmd = app.add_subcommand("simulate", "Estimator bias on synthetic Zipf traffic");
  sim_cmd->add_option("--m", o.sim_m, "Universe size")->check(CLI::Range(10ULL, 1'000'000'000ULL));
  sim_cmd->add_option("--s", o.exponents, "Zipf exponents, comma separated")->delimiter(',');
  sim_cmd->add_option("--fraction", o.fraction, "Academic share of sites, (0, 1]");
  sim_cmd->add_option("--selection", o.selection, "top, bottom, random or stratified")
      ->check(CLI::IsMember({"top", "bottom", "random", "stratified"}));
  sim_cmd->add_option("--seed", o.seed, "RNG seed");
  sim_cmd->add_option("--format", o.format, kTableFormats);
  sim_cmd->add_option("--out", o.common.out_path, "Write data here instead of stdout");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  Context ctx(o, out, err);
  try {
    if (ingest_cmd->parsed()) return cmd_ingest(o, ctx);
    if (compute_cmd->parsed()) return cmd_compute(o, ctx);
    if (rank_cmd->parsed()) return cmd_rank_countries(o, ctx);
    if (top_cmd->parsed()) return cmd_top_universities(o, ctx);
    if (map_cmd->parsed()) return cmd_choropleth(o, ctx);
    if (save_cmd->parsed()) return cmd_snapshot_save(o, ctx);
    if (diff_cmd->parsed()) return cmd_snapshot_diff(o, ctx);
    if (list_cmd->parsed()) return cmd_snapshot_list(o, ctx);
    if (sim_cmd->parsed()) return cmd_simulate(o, ctx);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const StorageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ProviderError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace rankweight::cli
