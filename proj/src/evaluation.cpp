#include "netperiod/evaluation.hpp"

#include <algorithm>
#include <ostream>

#include "json.hpp"
#include "netperiod/parallel.hpp"
#include "netperiod/rng.hpp"

namespace netperiod {

using nlohmann::json;

namespace {

std::size_t interval_overlap(std::size_t a_lo, std::size_t a_hi, std::size_t b_lo,
                             std::size_t b_hi) {
  const std::size_t lo = std::max(a_lo, b_lo);
  const std::size_t hi = std::min(a_hi, b_hi);
  return hi > lo ? hi - lo : 0;
}

}  // namespace

Matching match_detections(const std::vector<Periodicity>& detected,
                          const std::vector<PlantedPeriodicity>& planted,
                          double overlap_threshold) {
  struct Candidate {
    std::size_t overlap;
    std::size_t d;
    std::size_t g;
  };
  std::vector<Candidate> candidates;
  for (std::size_t d = 0; d < detected.size(); ++d) {
    for (std::size_t g = 0; g < planted.size(); ++g) {
      if (detected[d].period_slots != planted[g].period) continue;
      const std::size_t overlap =
          interval_overlap(detected[d].start_slot, detected[d].end_slot,
                           planted[g].start_slot, planted[g].end_slot);
      if (overlap == 0) continue;
      const std::size_t min_len =
          std::min(detected[d].end_slot - detected[d].start_slot,
                   planted[g].end_slot - planted[g].start_slot);
      if (static_cast<double>(overlap) <
          overlap_threshold * static_cast<double>(min_len)) {
        continue;
      }
      candidates.push_back({overlap, d, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.g != b.g) return a.g < b.g;
    return a.d < b.d;
  });

  Matching matching;
  std::vector<bool> d_used(detected.size(), false);
  std::vector<bool> g_used(planted.size(), false);
  for (const Candidate& c : candidates) {
    if (d_used[c.d] || g_used[c.g]) continue;
    d_used[c.d] = true;
    g_used[c.g] = true;
    matching.pairs.push_back({c.d, c.g, c.overlap});
  }
  for (std::size_t d = 0; d < detected.size(); ++d) {
    if (!d_used[d]) matching.unmatched_detected.push_back(d);
  }
  for (std::size_t g = 0; g < planted.size(); ++g) {
    if (!g_used[g]) matching.unmatched_planted.push_back(g);
  }
  return matching;
}

bool characterization_correct(const Periodicity& detected, const PlantedPeriodicity& planted,
                              std::uint32_t tolerance) {
  const std::size_t p = planted.pattern.size();
  if (detected.pattern.size() != p || p == 0) return false;
  for (std::size_t rot = 0; rot < p; ++rot) {
    std::uint32_t mismatches = 0;
    for (std::size_t i = 0; i < p && mismatches <= tolerance; ++i) {
      const Symbol a = detected.pattern[i];
      const Symbol b = planted.pattern[(i + rot) % p];
      mismatches += static_cast<std::uint32_t>(a == kMissing || a != b);
    }
    if (mismatches <= tolerance) return true;
  }
  return false;
}

EvalReport evaluate(const Corpus& corpus, const DetectorConfig& detector,
                    const EvalOptions& options) {
  detector.validate();
  EvalReport report;
  struct SeriesTally {
    std::size_t planted = 0;
    std::size_t matched = 0;
    std::size_t false_positives = 0;
    std::size_t char_correct = 0;
    std::size_t subperiod = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> missed;   // (period, repetitions)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> planted_shape;
  };

  for (std::size_t level = 0; level < options.noise_levels.size(); ++level) {
    const double fraction = options.noise_levels[level];
    std::vector<SeriesTally> tallies(corpus.series.size());
    parallel_for(corpus.series.size(), options.workers, [&](std::size_t i) {
      SymbolSeries series = corpus.series[i];
      SeriesTruth truth = corpus.truth[i];
      if (fraction > 0.0 && !truth.planted.empty()) {
        inject_noise(series, truth, fraction,
                     child_seed(options.noise_seed, level * corpus.series.size() + i));
      }
      const std::vector<Periodicity> found = detect(series, detector);
      const Matching matching =
          match_detections(found, truth.planted, options.overlap_threshold);
      SeriesTally& tally = tallies[i];
      tally.planted = truth.planted.size();
      tally.matched = matching.pairs.size();
      tally.false_positives = matching.unmatched_detected.size();
      for (const MatchedPair& pair : matching.pairs) {
        const PlantedPeriodicity& g = truth.planted[pair.planted_index];
        if (characterization_correct(found[pair.detected_index], g,
                                     tolerance_for(g.period, detector))) {
          ++tally.char_correct;
        }
      }
      for (const auto& g : truth.planted) {
        tally.planted_shape.emplace_back(
            g.period, static_cast<std::uint32_t>((g.end_slot - g.start_slot) / g.period));
      }
      for (const std::size_t gi : matching.unmatched_planted) {
        const PlantedPeriodicity& g = truth.planted[gi];
        tally.missed.emplace_back(
            g.period, static_cast<std::uint32_t>((g.end_slot - g.start_slot) / g.period));
        for (const std::size_t di : matching.unmatched_detected) {
          const Periodicity& d = found[di];
          if (d.period_slots < g.period && g.period % d.period_slots == 0) {
            const std::size_t overlap = interval_overlap(d.start_slot, d.end_slot,
                                                         g.start_slot, g.end_slot);
            const std::size_t min_len = std::min(d.end_slot - d.start_slot,
                                                 g.end_slot - g.start_slot);
            if (static_cast<double>(overlap) >=
                options.overlap_threshold * static_cast<double>(min_len)) {
              ++tally.subperiod;
              break;
            }
          }
        }
      }
    });

    NoiseRow row;
    row.noise_fraction = fraction;
    for (const SeriesTally& tally : tallies) {
      row.planted_count += tally.planted;
      row.matched_count += tally.matched;
      row.false_positive_count += tally.false_positives;
      row.subperiod_mismatches += tally.subperiod;
    }
    std::size_t char_correct = 0;
    for (const SeriesTally& tally : tallies) char_correct += tally.char_correct;
    if (row.planted_count > 0) {
      row.found_rate =
          static_cast<double>(row.matched_count) / static_cast<double>(row.planted_count);
      row.false_positive_rate = static_cast<double>(row.false_positive_count) /
                                static_cast<double>(row.planted_count);
    }
    row.false_negative_rate = 1.0 - row.found_rate;
    row.characterization_accuracy =
        row.matched_count > 0
            ? static_cast<double>(char_correct) / static_cast<double>(row.matched_count)
            : 0.0;
    report.sweep.push_back(row);

    if (level == 0) {
      for (const SeriesTally& tally : tallies) {
        for (const auto& [period, reps] : tally.missed) {
          ++report.fn_by_period[period];
          ++report.fn_by_repetitions[reps];
        }
        for (const auto& [period, reps] : tally.planted_shape) {
          ++report.planted_by_period[period];
          ++report.planted_by_repetitions[reps];
        }
      }
    }
  }
  return report;
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  json sweep = json::array();
  for (const NoiseRow& row : report.sweep) {
    sweep.push_back({{"noise_pct", row.noise_fraction * 100.0},
                     {"planted", row.planted_count},
                     {"matched", row.matched_count},
                     {"false_positives", row.false_positive_count},
                     {"subperiod_mismatches", row.subperiod_mismatches},
                     {"found_rate", row.found_rate},
                     {"false_negative_rate", row.false_negative_rate},
                     {"false_positive_rate", row.false_positive_rate},
                     {"characterization_accuracy", row.characterization_accuracy}});
  }
  const auto histogram = [](const std::map<std::uint32_t, std::size_t>& h) {
    json obj = json::object();
    for (const auto& [key, count] : h) obj[std::to_string(key)] = count;
    return obj;
  };
  const json doc = {{"noise_sweep", std::move(sweep)},
                    {"fn_by_period", histogram(report.fn_by_period)},
                    {"fn_by_repetitions", histogram(report.fn_by_repetitions)},
                    {"planted_by_period", histogram(report.planted_by_period)},
                    {"planted_by_repetitions", histogram(report.planted_by_repetitions)}};
  out << doc.dump(2) << '\n';
}

void write_fn_by_period_csv(std::ostream& out, const EvalReport& report) {
  out << "period,count\n";
  for (const auto& [period, count] : report.fn_by_period) {
    out << period << ',' << count << '\n';
  }
}

void write_fn_by_repetitions_csv(std::ostream& out, const EvalReport& report) {
  out << "repetitions,count\n";
  for (const auto& [reps, count] : report.fn_by_repetitions) {
    out << reps << ',' << count << '\n';
  }
}

void write_noise_sweep_csv(std::ostream& out, const EvalReport& report) {
  out << "pct,found_rate,fp_rate,char_accuracy\n";
  for (const NoiseRow& row : report.sweep) {
    out << row.noise_fraction * 100.0 << ',' << row.found_rate << ',' << row.false_positive_rate
        << ',' << row.characterization_accuracy << '\n';
  }
}

}  // namespace netperiod
