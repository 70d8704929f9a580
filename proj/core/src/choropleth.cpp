#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rankweight/errors.hpp"
#include "rankweight/reporting.hpp"

namespace rankweight {

std::string_view to_string(ChoroplethMetric metric) {
  switch (metric) {
    case ChoroplethMetric::kCount:
      return "count";
    case ChoroplethMetric::kWeight:
      return "weight";
    case ChoroplethMetric::kAverage:
      return "average";
  }
  return "weight";
}

std::optional<ChoroplethMetric> parse_choropleth_metric(std::string_view text) {
  if (text == "count") return ChoroplethMetric::kCount;
  if (text == "weight") return ChoroplethMetric::kWeight;
  if (text == "average") return ChoroplethMetric::kAverage;
  return std::nullopt;
}

std::vector<std::string> color_ramp(std::size_t n) {
  // ColorBrewer YlOrRd, 9 classes.
  static constexpr unsigned kStops[] = {0xffffcc, 0xffeda0, 0xfed976,
                                        0xfeb24c, 0xfd8d3c, 0xfc4e2a,
                                        0xe31a1c, 0xbd0026, 0x800026};
  constexpr std::size_t kLast = std::size(kStops) - 1;

  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    const double pos = t * kLast;
    const auto lo = std::min(static_cast<std::size_t>(pos), kLast - 1);
    const double f = pos - static_cast<double>(lo);
    unsigned rgb = 0;
    for (int shift = 16; shift >= 0; shift -= 8) {
      const double a = (kStops[lo] >> shift) & 0xff;
      const double b = (kStops[lo + 1] >> shift) & 0xff;
      const auto c = static_cast<unsigned>(std::lround(a + (b - a) * f));
      rgb |= c << shift;
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%06x", rgb);
    out.emplace_back(buf);
  }
  return out;
}

std::map<CountryCode, double> metric_values(std::span<const CountryAggregate> aggs,
                                            ChoroplethMetric metric) {
  std::map<CountryCode, double> out;
  for (const auto& a : aggs) {
    switch (metric) {
      case ChoroplethMetric::kCount:
        out.insert_or_assign(a.country, static_cast<double>(a.n));
        break;
      case ChoroplethMetric::kWeight:
        out.insert_or_assign(a.country, a.w_c);
        break;
      case ChoroplethMetric::kAverage:
        out.insert_or_assign(a.country, average_country_weight(a));
        break;
    }
  }
  return out;
}

namespace {

ChoroplethSpec quantile_buckets(const std::map<CountryCode, double>& values,
                                std::size_t q, ChoroplethMetric metric) {
  if (q < 2) throw ParameterError("quantile bucketing needs q >= 2");

  std::vector<std::pair<double, CountryCode>> sorted;
  sorted.reserve(values.size());
  for (const auto& [code, v] : values) sorted.emplace_back(v, code);
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const auto colors = color_ramp(q);
  ChoroplethSpec spec;
  spec.metric = metric;

  std::size_t group = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool tied = i > 0 && sorted[i].first == sorted[i - 1].first;
    if (!tied) {
      const std::size_t candidate = i * q / n;
      if (spec.buckets.empty() || candidate != group) {
        group = candidate;
        spec.buckets.push_back({sorted[i].first, colors[group]});
      }
    }
    spec.assignments.emplace(sorted[i].second, spec.buckets.size() - 1);
  }
  return spec;
}

ChoroplethSpec fixed_buckets(const std::map<CountryCode, double>& values,
                             const std::vector<double>& bounds,
                             ChoroplethMetric metric) {
  if (bounds.empty()) throw ParameterError("fixed bucketing needs at least one bound");
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    if (!(bounds[i - 1] < bounds[i])) {
      throw ParameterError("fixed bucket bounds must be strictly increasing");
    }
  }
  const auto colors = color_ramp(bounds.size());
  ChoroplethSpec spec;
  spec.metric = metric;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    spec.buckets.push_back({bounds[i], colors[i]});
  }
  for (const auto& [code, v] : values) {
    const auto it = std::upper_bound(bounds.begin(), bounds.end(), v);
    const auto index = it == bounds.begin()
                           ? std::size_t{0}
                           : static_cast<std::size_t>(it - bounds.begin()) - 1;
    spec.assignments.emplace(code, index);
  }
  return spec;
}

}  // namespace

ChoroplethSpec bucketize(const std::map<CountryCode, double>& values,
                         const BucketStrategy& strategy, ChoroplethMetric metric) {
  if (values.empty()) throw ParameterError("bucketize needs at least one country");
  for (const auto& [code, v] : values) {
    if (!std::isfinite(v)) {
      throw ParameterError("non-finite value for " + std::string(code.str()));
    }
  }
  if (const auto* q = std::get_if<QuantileBuckets>(&strategy)) {
    return quantile_buckets(values, q->q, metric);
  }
  return fixed_buckets(values, std::get<FixedBuckets>(strategy).bounds, metric);
}

namespace {

std::optional<std::string> attribute(std::string_view tag, std::string_view name) {
  const std::string needle = " " + std::string(name) + "=\"";
  const auto start = tag.find(needle);
  if (start == std::string_view::npos) return std::nullopt;
  const auto value_start = start + needle.size();
  const auto end = tag.find('"', value_start);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(tag.substr(value_start, end - value_start));
}

std::vector<double> parse_view_box(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  double v = 0;
  while (in >> v) out.push_back(v);
  return out;
}

}  // namespace

MapGeometry MapGeometry::parse(std::string_view svg) {
  const auto root = svg.find("<svg");
  if (root == std::string_view::npos) throw ResourceError("geometry: no <svg> element");
  const auto root_end = svg.find('>', root);
  if (root_end == std::string_view::npos) throw ResourceError("geometry: truncated <svg> tag");

  MapGeometry geometry;
  const auto view_box = attribute(svg.substr(root, root_end - root), "viewBox");
  if (!view_box || parse_view_box(*view_box).size() != 4) {
    throw ResourceError("geometry: missing or invalid viewBox");
  }
  geometry.view_box_ = *view_box;

  std::size_t pos = root_end;
  while ((pos = svg.find("<path", pos)) != std::string_view::npos) {
    const auto end = svg.find('>', pos);
    if (end == std::string_view::npos) throw ResourceError("geometry: truncated <path> tag");
    const auto tag = svg.substr(pos, end - pos);
    auto id = attribute(tag, "id");
    auto d = attribute(tag, "d");
    if (!id || !d || !CountryCode::parse(*id) || *id != CountryCode::parse(*id)->str()) {
      throw ResourceError("geometry: path without a valid alpha-2 id near offset " +
                          std::to_string(pos));
    }
    geometry.regions_.push_back({std::move(*id), std::move(*d)});
    pos = end;
  }
  if (geometry.regions_.empty()) throw ResourceError("geometry: no country paths");
  if (svg.find("</svg>", root_end) == std::string_view::npos) {
    throw ResourceError("geometry: missing </svg>");
  }
  std::sort(geometry.regions_.begin(), geometry.regions_.end(),
            [](const Region& a, const Region& b) { return a.code < b.code; });
  return geometry;
}

MapGeometry MapGeometry::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("geometry: cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool MapGeometry::contains(std::string_view code) const {
  const auto it = std::lower_bound(
      regions_.begin(), regions_.end(), code,
      [](const Region& r, std::string_view c) { return r.code < c; });
  return it != regions_.end() && it->code == code;
}

std::filesystem::path default_geometry_path() {
  if (const char* env = std::getenv("RANKWEIGHT_GEOMETRY"); env && *env) {
    return env;
  }
  std::filesystem::path build_tree = RANKWEIGHT_SOURCE_GEOMETRY;
  std::error_code ec;
  if (std::filesystem::exists(build_tree, ec)) return build_tree;
  return RANKWEIGHT_INSTALLED_GEOMETRY;
}

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

ChoroplethOutput emit_choropleth_svg(const ChoroplethSpec& spec,
                                     const MapGeometry& geometry) {
  for (std::size_t i = 1; i < spec.buckets.size(); ++i) {
    if (!(spec.buckets[i - 1].lower < spec.buckets[i].lower)) {
      throw ParameterError("choropleth bucket bounds must be strictly increasing");
    }
  }
  ChoroplethOutput out;
  for (const auto& [code, bucket] : spec.assignments) {
    if (bucket >= spec.buckets.size()) {
      throw ParameterError("assignment for " + std::string(code.str()) +
                           " references a missing bucket");
    }
    if (!geometry.contains(code.str())) out.unmapped.push_back(code);
  }

  const auto box = parse_view_box(geometry.view_box());
  const double height = box[3];
  constexpr double kRow = 8.0;

  std::string& svg = out.svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" +
         xml_escape(geometry.view_box()) + "\">\n";
  svg += "<title>Academic traffic by country (" + std::string(to_string(spec.metric)) +
         ")</title>\n";
  svg += "<g id=\"countries\" stroke=\"#808080\" stroke-width=\"0.2\">\n";
  for (const auto& region : geometry.regions()) {
    svg += "<path id=\"" + xml_escape(region.code) + "\"";
    const auto code = CountryCode(region.code);
    if (const auto it = spec.assignments.find(code); it != spec.assignments.end()) {
      svg += " class=\"bucket-" + std::to_string(it->second) + "\" fill=\"" +
             xml_escape(spec.buckets[it->second].color) + "\"";
    } else {
      svg += " fill=\"#e0e0e0\"";
    }
    svg += " d=\"" + xml_escape(region.path) + "\"/>\n";
  }
  svg += "</g>\n";

  svg += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"6\">\n";
  const double top = height - 6.0 - kRow * static_cast<double>(spec.buckets.size());
  for (std::size_t i = 0; i < spec.buckets.size(); ++i) {
    const std::string y = format_shortest(top + kRow * static_cast<double>(i));
    const std::string text_y = format_shortest(top + kRow * static_cast<double>(i) + 5.5);
    svg += "<rect class=\"legend-entry\" x=\"6\" y=\"" + y +
           "\" width=\"10\" height=\"6\" fill=\"" + xml_escape(spec.buckets[i].color) +
           "\"/><text x=\"19\" y=\"" + text_y + "\">&#8805; " +
           format_shortest(spec.buckets[i].lower) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return out;
}

std::string choropleth_spec_json(const ChoroplethSpec& spec) {
  nlohmann::ordered_json doc;
  doc["metric"] = to_string(spec.metric);
  auto buckets = nlohmann::ordered_json::array();
  for (const auto& b : spec.buckets) {
    buckets.push_back({{"lower", b.lower}, {"color", b.color}});
  }
  doc["buckets"] = std::move(buckets);
  auto assignments = nlohmann::ordered_json::object();
  for (const auto& [code, bucket] : spec.assignments) {
    assignments[std::string(code.str())] = bucket;
  }
  doc["assignments"] = std::move(assignments);
  return doc.dump(2) + "\n";
}

}  // namespace rankweight
