#include "netperiod/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace netperiod {

namespace {

bool fraction_in_unit(double v) { return v > 0.0 && v <= 1.0; }

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Coefficient of variation (population std / mean) of the consecutive lag
// gaps of `peaks`. Needs at least two peaks; a single gap has CV 0.
double gap_cv(const std::vector<Peak>& peaks) {
  std::vector<double> gaps;
  gaps.reserve(peaks.size() - 1);
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    gaps.push_back(static_cast<double>(peaks[i].lag) - static_cast<double>(peaks[i - 1].lag));
  }
  const double mean = mean_of(gaps);
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var /= static_cast<double>(gaps.size());
  return std::sqrt(var) / mean;
}

std::uint32_t median_gap(const std::vector<Peak>& peaks) {
  std::vector<double> gaps;
  gaps.reserve(peaks.size() - 1);
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    gaps.push_back(static_cast<double>(peaks[i].lag) - static_cast<double>(peaks[i - 1].lag));
  }
  std::sort(gaps.begin(), gaps.end());
  const std::size_t n = gaps.size();
  const double med = (n % 2 == 1) ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
  return static_cast<std::uint32_t>(std::llround(med));
}

// Extracts the train of evenly spaced peaks anchored at group[anchor]:
// lags at anchor, 2*anchor, 3*anchor, ... The walk stops at the first
// multiple with no peak, so interleaved trains of other periods cannot
// contaminate the gap structure.
std::vector<Peak> walk_train(const std::vector<Peak>& group, std::size_t anchor) {
  std::vector<Peak> members{group[anchor]};
  const std::uint32_t gap = group[anchor].lag;
  std::uint32_t expected = gap + gap;
  std::size_t from = anchor + 1;
  while (from < group.size()) {
    const auto it = std::lower_bound(
        group.begin() + static_cast<std::ptrdiff_t>(from), group.end(), expected,
        [](const Peak& p, std::uint32_t lag) { return p.lag < lag; });
    if (it == group.end() || it->lag != expected) break;
    members.push_back(*it);
    expected += gap;
    from = static_cast<std::size_t>(it - group.begin()) + 1;
  }
  return members;
}

}  // namespace

void DetectorConfig::validate() const {
  if (!fraction_in_unit(max_lag_fraction) || !fraction_in_unit(peak_threshold) ||
      !fraction_in_unit(cluster_y_tolerance) || !fraction_in_unit(gap_cv_threshold) ||
      !fraction_in_unit(max_outlier_fraction) || !fraction_in_unit(tolerance_fraction)) {
    throw std::invalid_argument("DetectorConfig: fractions must be in (0, 1]");
  }
  if (min_repetitions < 2) {
    throw std::invalid_argument("DetectorConfig: min_repetitions must be at least 2");
  }
  if (tolerance_threshold < 1) {
    throw std::invalid_argument("DetectorConfig: tolerance_threshold must be positive");
  }
}

AcfProfile::AcfProfile(std::size_t series_len, std::vector<std::uint64_t> raw)
    : series_len_(series_len), raw_(std::move(raw)) {
  if (raw_.empty() || raw_.size() > series_len_) {
    throw std::invalid_argument("AcfProfile: max lag must be below series length");
  }
  normalized_.assign(raw_.size(), 0.0);
  for (std::size_t lag = 1; lag < raw_.size(); ++lag) {
    normalized_[lag] =
        static_cast<double>(raw_[lag]) / static_cast<double>(series_len_ - lag);
  }
}

AcfProfile autocorrelate(const SymbolSeries& series, const MatchOperator& match,
                         std::uint32_t max_lag) {
  const std::size_t n = series.size();
  if (n < 2) {
    throw std::invalid_argument("autocorrelate: series must have at least 2 slots");
  }
  if (max_lag < 1 || max_lag >= n) {
    throw std::invalid_argument("autocorrelate: max lag must be in [1, series length)");
  }
  std::vector<std::uint64_t> raw(max_lag + 1, 0);
  const Symbol* s = series.slots.data();
  if (match.is_identity()) {
    for (std::uint32_t lag = 1; lag <= max_lag; ++lag) {
      const Symbol* a = s;
      const Symbol* b = s + lag;
      std::uint64_t count = 0;
      for (std::size_t i = 0, m = n - lag; i < m; ++i) {
        count += static_cast<std::uint64_t>((a[i] == b[i]) & (a[i] != kMissing));
      }
      raw[lag] = count;
    }
  } else {
    for (std::uint32_t lag = 1; lag <= max_lag; ++lag) {
      std::uint64_t count = 0;
      for (std::size_t i = 0, m = n - lag; i < m; ++i) {
        count += static_cast<std::uint64_t>(slots_match(match, s[i], s[i + lag]));
      }
      raw[lag] = count;
    }
  }
  return AcfProfile(n, std::move(raw));
}

std::vector<Peak> detect_peaks(const AcfProfile& acf, double threshold) {
  if (!fraction_in_unit(threshold)) {
    throw std::invalid_argument("detect_peaks: threshold must be in (0, 1]");
  }
  const std::uint32_t max_lag = acf.max_lag();
  std::vector<Peak> peaks;
  for (std::uint32_t lag = 1; lag <= max_lag; ++lag) {
    const double h = acf.normalized(lag);
    if (h < threshold) continue;
    const double left =
        lag > 1 ? acf.normalized(lag - 1) : -std::numeric_limits<double>::infinity();
    const double right =
        lag < max_lag ? acf.normalized(lag + 1) : -std::numeric_limits<double>::infinity();
    if (h > left && h > right) {
      peaks.push_back({lag, h});
    }
  }
  return peaks;
}

std::vector<PeakCluster> cluster_peaks(const std::vector<Peak>& peaks, double y_tolerance) {
  std::vector<PeakCluster> clusters;
  if (peaks.empty()) return clusters;

  // Single-linkage by height: sort by height, break where the gap between
  // neighbors exceeds the tolerance.
  std::vector<std::size_t> by_height(peaks.size());
  for (std::size_t i = 0; i < by_height.size(); ++i) by_height[i] = i;
  std::sort(by_height.begin(), by_height.end(), [&](std::size_t a, std::size_t b) {
    if (peaks[a].height != peaks[b].height) return peaks[a].height < peaks[b].height;
    return peaks[a].lag < peaks[b].lag;
  });
  std::vector<std::vector<Peak>> groups;
  for (std::size_t k = 0; k < by_height.size(); ++k) {
    if (k == 0 ||
        peaks[by_height[k]].height - peaks[by_height[k - 1]].height > y_tolerance) {
      groups.emplace_back();
    }
    groups.back().push_back(peaks[by_height[k]]);
  }

  // Within each height group, pull out trains of evenly spaced lags. Lags
  // of distinct periodicities interleave freely, so spacing structure, not
  // lag proximity, separates them. A peak may serve several trains.
  for (auto& group : groups) {
    std::sort(group.begin(), group.end(),
              [](const Peak& a, const Peak& b) { return a.lag < b.lag; });
    std::vector<bool> in_train(group.size(), false);
    for (std::size_t anchor = 0; anchor < group.size(); ++anchor) {
      std::vector<Peak> members = walk_train(group, anchor);
      if (members.size() < 2) continue;
      for (const Peak& m : members) {
        const auto it = std::lower_bound(
            group.begin(), group.end(), m.lag,
            [](const Peak& p, std::uint32_t lag) { return p.lag < lag; });
        in_train[static_cast<std::size_t>(it - group.begin())] = true;
      }
      clusters.push_back({std::move(members), std::nullopt, 0});
    }
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (!in_train[i]) {
        clusters.push_back({{group[i]}, std::nullopt, 0});
      }
    }
  }

  std::sort(clusters.begin(), clusters.end(), [](const PeakCluster& a, const PeakCluster& b) {
    if (a.peaks.front().lag != b.peaks.front().lag) {
      return a.peaks.front().lag < b.peaks.front().lag;
    }
    return a.peaks.size() > b.peaks.size();
  });
  return clusters;
}

PeakCluster regularize_cluster(PeakCluster cluster, double cv_threshold,
                               double max_outlier_fraction) {
  cluster.candidate_period.reset();
  cluster.discarded_outliers = 0;
  if (cluster.peaks.size() < 2) {
    return cluster;
  }
  const std::size_t budget = static_cast<std::size_t>(
      max_outlier_fraction * static_cast<double>(cluster.peaks.size()));
  std::vector<Peak> retained = cluster.peaks;
  std::uint32_t discarded = 0;
  double cv = gap_cv(retained);
  while (cv > cv_threshold && discarded < budget && retained.size() > 2) {
    // Drop the peak whose removal shrinks the CV the most.
    std::size_t best = retained.size();
    double best_cv = cv;
    for (std::size_t i = 0; i < retained.size(); ++i) {
      std::vector<Peak> trial = retained;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      const double trial_cv = gap_cv(trial);
      if (trial_cv < best_cv) {
        best_cv = trial_cv;
        best = i;
      }
    }
    if (best == retained.size()) break;
    retained.erase(retained.begin() + static_cast<std::ptrdiff_t>(best));
    ++discarded;
    cv = best_cv;
  }
  if (cv <= cv_threshold) {
    cluster.peaks = std::move(retained);
    cluster.discarded_outliers = discarded;
    cluster.candidate_period = median_gap(cluster.peaks);
  }
  return cluster;
}

std::uint32_t tolerance_for(std::uint32_t period, const DetectorConfig& config) {
  if (period < 1) {
    throw std::invalid_argument("tolerance_for: period must be positive");
  }
  if (period < config.tolerance_threshold) {
    return 1;
  }
  const auto scaled =
      static_cast<std::uint32_t>(std::llround(config.tolerance_fraction * period));
  return std::max<std::uint32_t>(1, scaled);
}

std::vector<Periodicity> characterize(const SymbolSeries& series, std::uint32_t period,
                                      const MatchOperator& match, std::uint32_t tolerance,
                                      std::uint32_t min_repetitions) {
  if (period == 0) {
    throw std::invalid_argument("characterize: period must be positive");
  }
  const std::size_t n = series.size();
  std::vector<Periodicity> out;
  if (n == 0 || static_cast<std::size_t>(period) * 2 > n) {
    return out;
  }
  const Symbol* s = series.slots.data();
  const std::size_t p = period;
  // When the tolerance reaches half the window, a single shared slot glues
  // two windows; demand one extra repetition to compensate.
  if (2 * static_cast<std::size_t>(tolerance) >= p) {
    ++min_repetitions;
  }

  const auto window_distance = [&](std::size_t a, std::size_t b) {
    std::uint32_t d = 0;
    for (std::size_t j = 0; j < p; ++j) {
      d += static_cast<std::uint32_t>(!slots_match(match, s[a + j], s[b + j]));
    }
    return d;
  };

  // Walks the windows of one alignment and reports each maximal glued run that
  // clears the structural guards: enough repetitions, at least one exactly
  // matching adjacent pair, and no more than half the glue budget spent.
  // Runs failing those guards are chains of near-misses, which short
  // patterns make cheap on random data.
  struct Run {
    std::size_t first_window;
    std::size_t last_window;
    std::uint32_t mismatches;
  };
  const auto scan_offset = [&](std::size_t offset, auto&& on_run) {
    const std::size_t windows = (n - offset) / p;
    if (windows < 2) return;
    std::size_t run_start = 0;
    std::uint32_t run_mismatches = 0;
    bool exact_pair = false;
    const auto flush = [&](std::size_t run_end) {
      const std::size_t reps = run_end - run_start + 1;
      if (reps < min_repetitions) return;
      if (!exact_pair) return;
      if (2 * static_cast<std::uint64_t>(run_mismatches) >
          static_cast<std::uint64_t>(tolerance) * (reps - 1)) {
        return;
      }
      on_run(Run{run_start, run_end, run_mismatches});
    };
    for (std::size_t w = 0; w + 1 < windows; ++w) {
      const std::size_t a = offset + w * p;
      const std::uint32_t d = window_distance(a, a + p);
      if (d <= tolerance) {
        run_mismatches += d;
        if (d == 0) exact_pair = true;
      } else {
        flush(w);
        run_start = w + 1;
        run_mismatches = 0;
        exact_pair = false;
      }
    }
    flush(windows - 1);
  };

  // Pick the alignment carrying the longest acceptable run; ties go to the
  // run with fewer mismatches (shift-invariant, unlike the offset index),
  // then to the earliest offset.
  std::size_t best_offset = 0;
  std::size_t best_len = 0;
  std::uint32_t best_mismatches = 0;
  for (std::size_t offset = 0; offset < p; ++offset) {
    scan_offset(offset, [&](const Run& run) {
      const std::size_t len = run.last_window - run.first_window + 1;
      if (len > best_len || (len == best_len && run.mismatches < best_mismatches)) {
        best_len = len;
        best_mismatches = run.mismatches;
        best_offset = offset;
      }
    });
  }
  if (best_len < min_repetitions) {
    return out;
  }

  scan_offset(best_offset, [&](const Run& run) {
    // The pattern is the most frequent window content of the run; one that
    // never repeats exactly is not reported, and neither is a constant
    // pattern, which has no fundamental period at this length (constant
    // stretches would otherwise be reported at every candidate period).
    std::map<std::vector<Symbol>, std::pair<std::size_t, std::size_t>> counts;
    for (std::size_t w = run.first_window; w <= run.last_window; ++w) {
      const std::size_t a = best_offset + w * p;
      std::vector<Symbol> content(s + a, s + a + p);
      auto it = counts
                    .try_emplace(std::move(content),
                                 std::pair<std::size_t, std::size_t>{0, w})
                    .first;
      ++it->second.first;
    }
    std::size_t mode_count = 0;
    std::size_t mode_first = 0;
    const std::vector<Symbol>* mode = nullptr;
    for (const auto& [content, info] : counts) {
      if (info.first > mode_count ||
          (info.first == mode_count && info.second < mode_first)) {
        mode_count = info.first;
        mode_first = info.second;
        mode = &content;
      }
    }
    if (mode_count < 2) return;
    bool constant = true;
    for (const Symbol sym : *mode) {
      if (sym != mode->front()) constant = false;
    }
    if (constant) return;
    Periodicity result;
    result.period_slots = period;
    result.pattern = *mode;
    result.start_slot = best_offset + run.first_window * p;
    result.end_slot = best_offset + (run.last_window + 1) * p;
    result.repetitions = static_cast<std::uint32_t>(run.last_window - run.first_window + 1);
    result.mismatch_count = run.mismatches;
    out.push_back(std::move(result));
  });
  return out;
}

std::vector<Periodicity> suppress_harmonics(std::vector<Periodicity> periodicities,
                                            const MatchOperator& match) {
  const std::size_t n = periodicities.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (periodicities[a].period_slots != periodicities[b].period_slots) {
      return periodicities[a].period_slots < periodicities[b].period_slots;
    }
    return periodicities[a].start_slot < periodicities[b].start_slot;
  });
  std::vector<bool> removed(n, false);
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    if (removed[i]) continue;
    const Periodicity& base = periodicities[i];
    for (std::size_t oj = oi + 1; oj < n; ++oj) {
      const std::size_t j = order[oj];
      if (removed[j]) continue;
      const Periodicity& multiple = periodicities[j];
      if (multiple.period_slots == base.period_slots ||
          multiple.period_slots % base.period_slots != 0) {
        continue;
      }
      const auto lo = std::max(base.start_slot, multiple.start_slot);
      const auto hi = std::min(base.end_slot, multiple.end_slot);
      if (hi <= lo) continue;
      const std::size_t overlap = hi - lo;
      const std::size_t min_len = std::min(base.end_slot - base.start_slot,
                                           multiple.end_slot - multiple.start_slot);
      if (2 * overlap < min_len) continue;
      // The longer pattern must be exactly the shorter one repeated,
      // phase-aligned by the interval starts. Any disagreement means the
      // shorter period does not actually explain the longer pattern.
      const auto bp = static_cast<std::int64_t>(base.period_slots);
      bool concatenation = true;
      for (std::size_t r = 0; concatenation && r < multiple.pattern.size(); ++r) {
        const std::int64_t shift = static_cast<std::int64_t>(multiple.start_slot + r) -
                                   static_cast<std::int64_t>(base.start_slot);
        const auto idx = static_cast<std::size_t>(((shift % bp) + bp) % bp);
        concatenation = slots_match(match, multiple.pattern[r], base.pattern[idx]);
      }
      if (concatenation) {
        removed[j] = true;
      }
    }
  }
  std::vector<Periodicity> kept;
  kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) kept.push_back(std::move(periodicities[i]));
  }
  return kept;
}

std::vector<Periodicity> detect(const SymbolSeries& series, const DetectorConfig& config,
                                const MatchOperator* match) {
  config.validate();
  const ExactMatch exact;
  const MatchOperator& op = match != nullptr ? *match : exact;
  const std::size_t n = series.size();
  std::vector<Periodicity> out;
  if (n < 2) return out;
  auto max_lag = static_cast<std::uint32_t>(static_cast<double>(n) * config.max_lag_fraction);
  max_lag = std::min<std::uint32_t>(max_lag, static_cast<std::uint32_t>(n - 1));
  if (max_lag < 1) return out;

  const AcfProfile acf = autocorrelate(series, op, max_lag);
  const std::vector<Peak> peaks = detect_peaks(acf, config.peak_threshold);
  const std::vector<PeakCluster> clusters = cluster_peaks(peaks, config.cluster_y_tolerance);

  std::set<std::uint32_t> candidates;
  for (const PeakCluster& cluster : clusters) {
    const PeakCluster regular =
        regularize_cluster(cluster, config.gap_cv_threshold, config.max_outlier_fraction);
    if (regular.candidate_period && *regular.candidate_period >= 2 &&
        static_cast<std::size_t>(*regular.candidate_period) * 2 <= n) {
      candidates.insert(*regular.candidate_period);
    }
  }
  // A fundamental whose own peak is shadowed by a stronger overlapping
  // train still surfaces through its multiples: try every integer divisor
  // of every candidate as well.
  std::set<std::uint32_t> enriched = candidates;
  for (const std::uint32_t period : candidates) {
    for (std::uint32_t d = 2; d * d <= period; ++d) {
      if (period % d != 0) continue;
      enriched.insert(d);
      if (period / d >= 2) enriched.insert(period / d);
    }
  }
  candidates = std::move(enriched);
  for (const std::uint32_t period : candidates) {
    auto found = characterize(series, period, op, tolerance_for(period, config),
                              config.min_repetitions);
    out.insert(out.end(), std::make_move_iterator(found.begin()),
               std::make_move_iterator(found.end()));
  }
  out = suppress_harmonics(std::move(out), op);
  std::sort(out.begin(), out.end(), [](const Periodicity& a, const Periodicity& b) {
    if (a.start_slot != b.start_slot) return a.start_slot < b.start_slot;
    if (a.period_slots != b.period_slots) return a.period_slots < b.period_slots;
    return a.end_slot < b.end_slot;
  });
  return out;
}

}  // namespace netperiod
