#include "rankweight/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_set>

#include "rankweight/errors.hpp"

namespace rankweight {

std::string_view to_string(Selection selection) {
  switch (selection) {
    case Selection::kTop:
      return "top";
    case Selection::kBottom:
      return "bottom";
    case Selection::kRandom:
      return "random";
    case Selection::kStratified:
      return "stratified";
  }
  return "top";
}

std::optional<Selection> parse_selection(std::string_view text) {
  if (text == "top") return Selection::kTop;
  if (text == "bottom") return Selection::kBottom;
  if (text == "random") return Selection::kRandom;
  if (text == "stratified") return Selection::kStratified;
  return std::nullopt;
}

double ZipfWorld::hits(std::uint64_t rank) const {
  const auto r = static_cast<double>(rank);
  return s == 1.0 ? 1.0 / r : std::pow(r, -s);
}

namespace {

// Uniform integer in [0, bound) from raw engine output by rejection;
// std::uniform_int_distribution differs between standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

std::vector<std::uint64_t> select_ranks(std::uint64_t m, std::uint64_t k,
                                        Selection selection, std::uint64_t seed) {
  std::vector<std::uint64_t> out;
  out.reserve(k);
  switch (selection) {
    case Selection::kTop:
      for (std::uint64_t r = 1; r <= k; ++r) out.push_back(r);
      break;
    case Selection::kBottom:
      for (std::uint64_t r = m - k + 1; r <= m; ++r) out.push_back(r);
      break;
    case Selection::kRandom: {
      // Floyd's sampling: k distinct values from [1, m].
      std::mt19937_64 rng(seed);
      std::unordered_set<std::uint64_t> chosen;
      for (std::uint64_t j = m - k + 1; j <= m; ++j) {
        const std::uint64_t t = uniform_below(rng, j) + 1;
        const std::uint64_t pick = chosen.contains(t) ? j : t;
        chosen.insert(pick);
        out.push_back(pick);
      }
      std::sort(out.begin(), out.end());
      break;
    }
    case Selection::kStratified: {
      std::mt19937_64 rng(seed);
      for (std::uint64_t i = 0; i < k; ++i) {
        const std::uint64_t lo = i * m / k;        // stratum [lo, hi)
        const std::uint64_t hi = (i + 1) * m / k;
        out.push_back(lo + uniform_below(rng, hi - lo) + 1);
      }
      break;
    }
  }
  return out;
}

}  // namespace

ZipfWorld build_world(const WorldParams& p) {
  if (p.m < 10) throw ParameterError("simulation needs m >= 10");
  if (!(p.s > 0.0) || !std::isfinite(p.s)) throw ParameterError("exponent s must be > 0");
  if (!(p.academic_fraction > 0.0 && p.academic_fraction <= 1.0)) {
    throw ParameterError("academic fraction must lie in (0, 1]");
  }
  // Guard against 0.1 * 100 = 10.000000000000002 style round-up.
  const double raw = p.academic_fraction * static_cast<double>(p.m);
  auto k = static_cast<std::uint64_t>(std::ceil(raw - 1e-9 * raw));
  k = std::clamp<std::uint64_t>(k, 1, p.m);

  ZipfWorld world;
  world.m = UniverseSize(p.m);
  world.s = p.s;
  world.seed = p.seed;
  world.academic = select_ranks(p.m, k, p.selection, p.seed);
  return world;
}

double true_share(const ZipfWorld& world) {
  if (world.academic.size() == world.m.value()) return 100.0;
  CompensatedSum academic;
  for (auto r : world.academic) academic.add(world.hits(r));
  CompensatedSum total;
  for (std::uint64_t r = world.m.value(); r >= 1; --r) total.add(world.hits(r));
  return academic.value() / total.value() * 100.0;
}

double estimated_share(const ZipfWorld& world) {
  if (world.academic.size() == world.m.value()) return 100.0;
  std::vector<double> weights;
  weights.reserve(world.academic.size());
  for (auto r : world.academic) {
    weights.push_back(site_weight(Rank(r), world.m, WeightScheme::kHarmonic));
  }
  return percentage_academic_traffic(academic_weight(weights), world.m);
}

SimResult simulate(const ZipfWorld& world) {
  SimResult out;
  out.s = world.s;
  out.true_share = true_share(world);
  out.estimated_share = estimated_share(world);
  out.absolute_error = std::fabs(out.true_share - out.estimated_share);
  out.relative_error = out.absolute_error / out.true_share;
  return out;
}

std::vector<SimResult> bias_sweep(std::uint64_t m, std::span<const double> exponents,
                                  double academic_fraction, Selection selection,
                                  std::uint64_t seed) {
  std::vector<SimResult> rows;
  rows.reserve(exponents.size());
  for (double s : exponents) {
    rows.push_back(simulate(build_world({m, s, academic_fraction, selection, seed})));
  }
  return rows;
}

ReportTable sweep_table(std::span<const SimResult> rows) {
  ReportTable table;
  table.title = "Harmonic-weighting bias on synthetic Zipf traffic";
  table.columns = {"s", "True Share (%)", "Estimated Share (%)",
                   "Absolute Error (%)", "Relative Error"};
  for (const auto& r : rows) {
    table.add_row({format_shortest(r.s), Decimal{r.true_share, 9},
                   Decimal{r.estimated_share, 9}, Decimal{r.absolute_error, 12},
                   Decimal{r.relative_error, 12}});
  }
  return table;
}

}  // namespace rankweight
