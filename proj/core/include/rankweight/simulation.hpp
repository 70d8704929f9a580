#ifndef RANKWEIGHT_SIMULATION_HPP
#define RANKWEIGHT_SIMULATION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rankweight/reporting.hpp"
#include "rankweight/weighting.hpp"

namespace rankweight {

enum class Selection {
  kTop,         // ranks 1..k
  kBottom,      // ranks m-k+1..m
  kRandom,      // k distinct ranks drawn uniformly
  kStratified,  // one rank drawn uniformly from each of k equal strata
};

std::string_view to_string(Selection selection);
std::optional<Selection> parse_selection(std::string_view text);

// Synthetic universe where site r receives r^-s hits.  Deterministic power
// law, no sampling noise.
struct ZipfWorld {
  UniverseSize m;
  double s = 1.0;
  std::vector<std::uint64_t> academic;  // ascending ranks, non-empty
  std::uint64_t seed = 0;

  double hits(std::uint64_t rank) const;
};

struct WorldParams {
  std::uint64_t m = 1000;
  double s = 1.0;
  double academic_fraction = 0.01;
  Selection selection = Selection::kTop;
  std::uint64_t seed = 0;
};

// k = ceil(fraction * m) academic sites.  Throws ParameterError for m < 10,
// s <= 0, fraction outside (0, 1].
ZipfWorld build_world(const WorldParams& params);

// Academic hits over all hits, by direct summation, in percent.
double true_share(const ZipfWorld& world);

// Harmonic-weighting estimate over the academic ranks, in percent.
double estimated_share(const ZipfWorld& world);

struct SimResult {
  double s = 1.0;
  double true_share = 0.0;
  double estimated_share = 0.0;
  double absolute_error = 0.0;
  double relative_error = 0.0;
};

SimResult simulate(const ZipfWorld& world);

// One row per exponent, in input order.  The academic set is the same for
// every row.
std::vector<SimResult> bias_sweep(std::uint64_t m, std::span<const double> exponents,
                                  double academic_fraction, Selection selection,
                                  std::uint64_t seed);

ReportTable sweep_table(std::span<const SimResult> rows);

}  // namespace rankweight

#endif  // RANKWEIGHT_SIMULATION_HPP
