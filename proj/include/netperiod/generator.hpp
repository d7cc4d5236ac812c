#pragma once
// Synthetic corpus generation: series of alternating periodic and
// non-periodic intervals over a fixed alphabet, with ground truth for
// every planted periodicity, plus seeded noise injection.

#include <cstdint>
#include <string>
#include <vector>

#include "netperiod/series.hpp"

namespace netperiod {

struct GeneratorConfig {
  std::uint32_t series_count = 5000;
  std::uint32_t slots_per_series = 10000;
  std::uint32_t alphabet_size = 30;
  std::uint32_t period_min = 2;
  std::uint32_t period_max = 30;
  // How often a planted pattern repeats; the paper leaves the distribution
  // open, so it is configurable (uniform over the range).
  std::uint32_t repetitions_min = 3;
  std::uint32_t repetitions_max = 40;
  std::int64_t step_seconds = 60;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

struct PlantedPeriodicity {
  std::uint32_t period = 0;
  std::vector<Symbol> pattern;
  std::size_t start_slot = 0;  // half-open
  std::size_t end_slot = 0;
};

struct SeriesTruth {
  std::string series_id;
  std::vector<PlantedPeriodicity> planted;  // disjoint, ordered by start
};

struct Corpus {
  std::vector<SymbolSeries> series;
  std::vector<SeriesTruth> truth;  // aligned with series
};

Corpus generate(const GeneratorConfig& config);

struct NoiseStats {
  std::size_t inserts = 0;
  std::size_t deletions = 0;
  std::size_t substitutions = 0;

  std::size_t total() const { return inserts + deletions + substitutions; }
};

// Applies round(fraction * planted slots) noise events, each picking a
// uniform slot inside the (current) planted intervals and then, with equal
// probability, inserting a random symbol there, deleting the slot, or
// substituting a different random symbol. Interval bounds in `truth` are
// kept consistent with the shifts. Throws std::invalid_argument for a
// positive fraction on a series without planted intervals.
NoiseStats inject_noise(SymbolSeries& series, SeriesTruth& truth, double fraction,
                        std::uint64_t seed);

// Ground-truth JSON Lines:
// {"series_id": str, "planted": [{"period": int, "start_slot": int,
//  "end_slot": int, "pattern": [str, ...]}, ...]}
std::string truth_to_json_line(const SeriesTruth& truth, const SymbolSeries& series);
SeriesTruth truth_from_json_line(const std::string& line, SymbolSeries& series);
void write_truth_jsonl(std::ostream& out, const Corpus& corpus);
// Resolves each truth line against the series with the same id, interning
// pattern values as needed. Throws std::runtime_error on unknown ids.
std::vector<SeriesTruth> read_truth_jsonl(std::istream& in, std::vector<SymbolSeries>& series);

}  // namespace netperiod
