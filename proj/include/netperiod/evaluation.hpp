#pragma once
// Scoring of detections against planted ground truth: greedy one-to-one
// matching, characterization accuracy, noise sweeps, and the plot-ready
// false-negative histograms.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "netperiod/detector.hpp"
#include "netperiod/generator.hpp"

namespace netperiod {

struct MatchedPair {
  std::size_t detected_index = 0;
  std::size_t planted_index = 0;
  std::size_t overlap_slots = 0;
};

struct Matching {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> unmatched_detected;  // false positives
  std::vector<std::size_t> unmatched_planted;   // false negatives
};

// Greedy one-to-one matching by decreasing overlap. A detection is
// eligible for a planted periodicity when the periods are equal and the
// interval overlap covers at least `overlap_threshold` of the shorter
// interval.
Matching match_detections(const std::vector<Periodicity>& detected,
                          const std::vector<PlantedPeriodicity>& planted,
                          double overlap_threshold = 0.5);

// True when the detected pattern equals some cyclic rotation of the
// planted pattern within Hamming distance `tolerance`.
bool characterization_correct(const Periodicity& detected, const PlantedPeriodicity& planted,
                              std::uint32_t tolerance);

struct NoiseRow {
  double noise_fraction = 0.0;
  std::size_t planted_count = 0;
  std::size_t matched_count = 0;
  std::size_t false_positive_count = 0;
  // Planted periodicities missed because only an exact divisor of their
  // period was reported (chance sub-periods of random patterns).
  std::size_t subperiod_mismatches = 0;
  double found_rate = 0.0;
  double false_negative_rate = 0.0;
  double false_positive_rate = 0.0;  // relative to the planted count
  double characterization_accuracy = 0.0;
};

struct EvalReport {
  std::vector<NoiseRow> sweep;  // one row per requested noise level
  // Histograms from the first noise level (the baseline run).
  std::map<std::uint32_t, std::size_t> fn_by_period;
  std::map<std::uint32_t, std::size_t> fn_by_repetitions;
  std::map<std::uint32_t, std::size_t> planted_by_period;
  std::map<std::uint32_t, std::size_t> planted_by_repetitions;
};

struct EvalOptions {
  std::vector<double> noise_levels{0.0};  // fractions, e.g. 0.05 for 5%
  std::uint64_t noise_seed = 7;
  double overlap_threshold = 0.5;
  unsigned workers = 0;
};

EvalReport evaluate(const Corpus& corpus, const DetectorConfig& detector,
                    const EvalOptions& options);

void write_report_json(std::ostream& out, const EvalReport& report);
void write_fn_by_period_csv(std::ostream& out, const EvalReport& report);
void write_fn_by_repetitions_csv(std::ostream& out, const EvalReport& report);
void write_noise_sweep_csv(std::ostream& out, const EvalReport& report);

}  // namespace netperiod
