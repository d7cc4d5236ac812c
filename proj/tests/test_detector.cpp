#include <algorithm>
#include <map>

#include "doctest.h"
#include "netperiod/detector.hpp"
#include "netperiod/rng.hpp"
#include "test_helpers.hpp"

using namespace netperiod;
using test::make_series;
using test::naive_acf;

namespace {

SymbolSeries random_series(SplitMix64& rng, std::size_t length, std::uint32_t alphabet,
                           double missing_rate = 0.0) {
  std::vector<std::uint32_t> ids;
  ids.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    if (missing_rate > 0.0 && rng.unit() < missing_rate) {
      ids.push_back(kMissing);
    } else {
      ids.push_back(static_cast<std::uint32_t>(rng.range(0, alphabet - 1)));
    }
  }
  return make_series(ids, alphabet);
}

// A planted case: pattern of `period` distinct symbols repeated, padded on
// both sides by slots that match nothing.
SymbolSeries planted_series(std::uint32_t period, std::uint32_t repetitions,
                            std::size_t pad_left, std::size_t pad_right) {
  SymbolSeries s;
  s.series_id = "planted";
  s.start_ts = 0;
  s.step = 1;
  for (std::size_t i = 0; i < pad_left; ++i) {
    s.slots.push_back(s.table.intern("padL-" + std::to_string(i)));
  }
  std::vector<Symbol> pattern;
  for (std::uint32_t j = 0; j < period; ++j) {
    pattern.push_back(s.table.intern("pat-" + std::to_string(j)));
  }
  for (std::uint32_t r = 0; r < repetitions; ++r) {
    s.slots.insert(s.slots.end(), pattern.begin(), pattern.end());
  }
  for (std::size_t i = 0; i < pad_right; ++i) {
    s.slots.push_back(s.table.intern("padR-" + std::to_string(i)));
  }
  return s;
}

}  // namespace

TEST_CASE("autocorrelation of an alternating series counts matches at even lags") {
  const SymbolSeries s = make_series("ABABAB");
  const ExactMatch match;
  const AcfProfile acf = autocorrelate(s, match, 4);
  CHECK(acf.raw_count(1) == 0);
  CHECK(acf.raw_count(2) == 4);
  CHECK(acf.raw_count(3) == 0);
  CHECK(acf.raw_count(4) == 2);
  CHECK(acf.normalized(2) == doctest::Approx(1.0));
}

TEST_CASE("autocorrelation of a constant series is one at every lag") {
  const SymbolSeries s = make_series("AAAAAAAAAA");
  const ExactMatch match;
  const AcfProfile acf = autocorrelate(s, match, 5);
  for (std::uint32_t lag = 1; lag <= 5; ++lag) {
    CHECK(acf.normalized(lag) == doctest::Approx(1.0));
  }
}

TEST_CASE("missing slots match nothing in the autocorrelation") {
  const SymbolSeries s = make_series("A.A");
  const ExactMatch match;
  const AcfProfile acf = autocorrelate(s, match, 2);
  CHECK(acf.raw_count(1) == 0);
  CHECK(acf.raw_count(2) == 1);

  const SymbolSeries mm = make_series("..");
  const AcfProfile acf2 = autocorrelate(mm, match, 1);
  CHECK(acf2.raw_count(1) == 0);
}

TEST_CASE("autocorrelate rejects degenerate input") {
  const ExactMatch match;
  CHECK_THROWS_AS(autocorrelate(make_series("A"), match, 1), std::invalid_argument);
  CHECK_THROWS_AS(autocorrelate(make_series("ABC"), match, 3), std::invalid_argument);
  CHECK_THROWS_AS(autocorrelate(make_series("ABC"), match, 0), std::invalid_argument);
}

TEST_CASE("fast autocorrelation equals the naive double loop exactly") {
  SplitMix64 rng(2024);
  const ExactMatch match;
  for (int round = 0; round < 200; ++round) {
    const std::size_t length = rng.range(2, 200);
    const auto alphabet = static_cast<std::uint32_t>(rng.range(1, 30));
    const SymbolSeries s = random_series(rng, length, alphabet, round % 3 == 0 ? 0.1 : 0.0);
    const auto max_lag = static_cast<std::uint32_t>(rng.range(1, length - 1));
    const AcfProfile acf = autocorrelate(s, match, max_lag);
    const auto expected = naive_acf(s, match, max_lag);
    for (std::uint32_t lag = 1; lag <= max_lag; ++lag) {
      REQUIRE(acf.raw_count(lag) == expected[lag]);
    }
  }
}

TEST_CASE("peaks of an alternating series sit at even lags only") {
  std::string symbols;
  for (int i = 0; i < 50; ++i) symbols += "AB";
  const SymbolSeries s = make_series(symbols);
  const ExactMatch match;
  const AcfProfile acf = autocorrelate(s, match, 33);
  const auto peaks = detect_peaks(acf, 0.25);
  CHECK(!peaks.empty());
  for (const Peak& p : peaks) {
    CHECK(p.lag % 2 == 0);
    CHECK(p.height == doctest::Approx(1.0));
  }
  for (std::uint32_t lag = 1; lag <= 33; lag += 2) {
    CHECK(acf.raw_count(lag) == 0);
  }
}

TEST_CASE("a constant plateau has no strict local maximum") {
  const SymbolSeries s = make_series(std::string(60, 'A'));
  const ExactMatch match;
  const AcfProfile acf = autocorrelate(s, match, 20);
  CHECK(detect_peaks(acf, 0.25).empty());
}

TEST_CASE("an ACF entirely below the threshold yields no peaks") {
  // 10 isolated matches at lag 3 over a long series: normalized heights stay
  // far below 0.25.
  SplitMix64 rng(7);
  const SymbolSeries s = random_series(rng, 150, 40);
  const ExactMatch match;
  const AcfProfile acf = autocorrelate(s, match, 50);
  bool all_below = true;
  for (std::uint32_t lag = 1; lag <= 50; ++lag) {
    if (acf.normalized(lag) >= 0.25) all_below = false;
  }
  REQUIRE(all_below);
  CHECK(detect_peaks(acf, 0.25).empty());
}

TEST_CASE("clustering separates peak groups by height") {
  const std::vector<Peak> peaks{{16, 0.9}, {32, 0.88}, {48, 0.91}, {90, 0.4}};
  const auto clusters = cluster_peaks(peaks, 0.15);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].peaks.size() == 3);
  CHECK(clusters[0].peaks[0].lag == 16);
  CHECK(clusters[0].peaks[2].lag == 48);
  CHECK(clusters[1].peaks.size() == 1);
  CHECK(clusters[1].peaks[0].lag == 90);
}

TEST_CASE("a single peak forms a singleton cluster") {
  const auto clusters = cluster_peaks({{10, 0.5}}, 0.15);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].peaks.size() == 1);
}

TEST_CASE("clustering of no peaks is empty") {
  CHECK(cluster_peaks({}, 0.15).empty());
}

TEST_CASE("clustering splits interleaved trains of similar height") {
  // Two periodicities, periods 7 and 16, equal heights: lag spacing alone
  // must pull them apart.
  std::vector<Peak> peaks;
  for (std::uint32_t k = 1; k <= 6; ++k) peaks.push_back({7 * k, 0.50});
  for (std::uint32_t k = 1; k <= 3; ++k) peaks.push_back({16 * k, 0.52});
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.lag < b.lag; });
  const auto clusters = cluster_peaks(peaks, 0.15);
  bool found7 = false;
  bool found16 = false;
  for (const auto& cluster : clusters) {
    std::vector<std::uint32_t> lags;
    for (const auto& p : cluster.peaks) lags.push_back(p.lag);
    if (lags == std::vector<std::uint32_t>{7, 14, 21, 28, 35, 42}) found7 = true;
    if (lags == std::vector<std::uint32_t>{16, 32, 48}) found16 = true;
  }
  CHECK(found7);
  CHECK(found16);
}

TEST_CASE("regularizing an evenly spaced cluster yields its gap as the period") {
  PeakCluster cluster{{{16, 0.8}, {32, 0.79}, {48, 0.81}, {64, 0.8}}, std::nullopt, 0};
  const auto r = regularize_cluster(cluster, 0.10, 0.20);
  REQUIRE(r.candidate_period.has_value());
  CHECK(*r.candidate_period == 16);
  CHECK(r.discarded_outliers == 0);
}

TEST_CASE("slightly jittered gaps stay within the regularity tolerance") {
  PeakCluster cluster{{{10, 0.8}, {20, 0.8}, {31, 0.8}, {40, 0.8}}, std::nullopt, 0};
  const auto r = regularize_cluster(cluster, 0.10, 0.20);
  REQUIRE(r.candidate_period.has_value());
  CHECK(*r.candidate_period == 10);  // gaps 10, 11, 9: CV ~= 0.082
}

TEST_CASE("an irregular cluster is rejected") {
  PeakCluster cluster{{{5, 0.8}, {9, 0.8}, {30, 0.8}}, std::nullopt, 0};
  const auto r = regularize_cluster(cluster, 0.10, 0.20);
  CHECK(!r.candidate_period.has_value());
}

TEST_CASE("outlier removal can rescue a cluster within its budget") {
  // Gap sequence 10,10,25,10,10 -> dropping the stray peak at 45 leaves a
  // clean train. Budget: 20% of 6 peaks = 1 removal.
  PeakCluster cluster{{{10, .8}, {20, .8}, {30, .8}, {45, .8}, {40, .8}, {50, .8}},
                      std::nullopt,
                      0};
  std::sort(cluster.peaks.begin(), cluster.peaks.end(),
            [](const Peak& a, const Peak& b) { return a.lag < b.lag; });
  const auto r = regularize_cluster(cluster, 0.10, 0.20);
  REQUIRE(r.candidate_period.has_value());
  CHECK(*r.candidate_period == 10);
  CHECK(r.discarded_outliers == 1);
  CHECK(r.peaks.size() == 5);
}

TEST_CASE("singleton clusters never produce a candidate period") {
  PeakCluster cluster{{{24, 0.9}}, std::nullopt, 0};
  CHECK(!regularize_cluster(cluster, 0.10, 0.20).candidate_period.has_value());
}

TEST_CASE("matching tolerance follows the short-pattern rule") {
  CHECK(tolerance_for(3) == 1);
  CHECK(tolerance_for(4) == 1);
  CHECK(tolerance_for(5) == 1);
  CHECK(tolerance_for(7) == 1);
  CHECK(tolerance_for(20) == 2);
  CHECK(tolerance_for(35) == 4);
  CHECK_THROWS_AS(tolerance_for(0), std::invalid_argument);
}

TEST_CASE("characterize glues exact repetitions into one periodicity") {
  const SymbolSeries s = make_series("ABCABCABCABC");
  const ExactMatch match;
  const auto found = characterize(s, 3, match, 1, 3);
  REQUIRE(found.size() == 1);
  CHECK(found[0].period_slots == 3);
  CHECK(found[0].start_slot == 0);
  CHECK(found[0].end_slot == 12);
  CHECK(found[0].repetitions == 4);
  CHECK(found[0].mismatch_count == 0);
  REQUIRE(found[0].pattern.size() == 3);
  CHECK(s.table.lookup(found[0].pattern[0]) == "A");
  CHECK(s.table.lookup(found[0].pattern[1]) == "B");
  CHECK(s.table.lookup(found[0].pattern[2]) == "C");
}

TEST_CASE("characterize tolerates one mismatching slot within tolerance") {
  const SymbolSeries s = make_series("ABCABCAXC");
  const ExactMatch match;
  const auto found = characterize(s, 3, match, 1, 3);
  REQUIRE(found.size() == 1);
  CHECK(found[0].start_slot == 0);
  CHECK(found[0].end_slot == 9);
  CHECK(found[0].repetitions == 3);
  CHECK(found[0].mismatch_count == 1);
  CHECK(s.table.lookup(found[0].pattern[0]) == "A");
  CHECK(s.table.lookup(found[0].pattern[1]) == "B");
  CHECK(s.table.lookup(found[0].pattern[2]) == "C");
}

TEST_CASE("characterize finds nothing in random series") {
  SplitMix64 rng(99);
  const ExactMatch match;
  // Sanity-check the premise first: the chance that two adjacent windows of
  // 7 random symbols over a 30-symbol alphabet are compatible at tolerance 1
  // is far below anything 100 slots could chain into a run.
  std::size_t compatible = 0;
  const std::size_t trials = 20000;
  for (std::size_t t = 0; t < trials; ++t) {
    std::uint32_t mismatches = 0;
    for (int j = 0; j < 7; ++j) {
      if (rng.range(0, 29) != rng.range(0, 29)) ++mismatches;
    }
    if (mismatches <= 1) ++compatible;
  }
  CHECK(static_cast<double>(compatible) / trials < 1e-3);
  for (int round = 0; round < 25; ++round) {
    const SymbolSeries s = random_series(rng, 100, 30);
    CHECK(characterize(s, 7, match, 1, 3).empty());
  }
}

TEST_CASE("characterize scans all phase offsets") {
  // The periodic interval starts at slot 2; with only offset 0 the windows
  // would straddle the boundary.
  const SymbolSeries s = make_series("XYABCABCABCABCZW");
  const ExactMatch match;
  const auto found = characterize(s, 3, match, 1, 3);
  REQUIRE(found.size() == 1);
  CHECK(found[0].start_slot == 2);
  CHECK(found[0].end_slot == 14);
  CHECK(found[0].repetitions == 4);
}

TEST_CASE("harmonic suppression keeps the fundamental period") {
  const auto planted = planted_series(4, 10, 0, 0);  // pattern of 4, 10 reps
  const ExactMatch match;
  const auto p4 = characterize(planted, 4, match, 1, 3);
  const auto p8 = characterize(planted, 8, match, 1, 3);
  REQUIRE(p4.size() == 1);
  REQUIRE(p8.size() == 1);
  std::vector<Periodicity> all{p4[0], p8[0]};
  const auto kept = suppress_harmonics(all, match);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].period_slots == 4);
}

TEST_CASE("harmonic suppression leaves disjoint intervals alone") {
  Periodicity small;
  small.period_slots = 4;
  small.pattern = {0, 1, 2, 3};
  small.start_slot = 0;
  small.end_slot = 40;
  small.repetitions = 10;
  Periodicity large = small;
  large.period_slots = 8;
  large.pattern = {0, 1, 2, 3, 0, 1, 2, 3};
  large.start_slot = 100;
  large.end_slot = 140;
  large.repetitions = 5;
  const ExactMatch match;
  CHECK(suppress_harmonics({small, large}, match).size() == 2);
}

TEST_CASE("harmonic suppression requires divisibility") {
  Periodicity a;
  a.period_slots = 4;
  a.pattern = {0, 1, 2, 3};
  a.start_slot = 0;
  a.end_slot = 40;
  Periodicity b;
  b.period_slots = 6;
  b.pattern = {0, 1, 2, 3, 0, 1};
  b.start_slot = 0;
  b.end_slot = 36;
  const ExactMatch match;
  CHECK(suppress_harmonics({a, b}, match).size() == 2);
}

TEST_CASE("detect recovers two planted periodicities separated by noise") {
  SymbolSeries s;
  s.series_id = "two";
  s.start_ts = 0;
  s.step = 1;
  std::vector<Symbol> first;
  for (int j = 0; j < 5; ++j) first.push_back(s.table.intern("a" + std::to_string(j)));
  std::vector<Symbol> second;
  for (int j = 0; j < 8; ++j) second.push_back(s.table.intern("b" + std::to_string(j)));
  for (int r = 0; r < 12; ++r) s.slots.insert(s.slots.end(), first.begin(), first.end());
  for (int j = 0; j < 30; ++j) s.slots.push_back(s.table.intern("noise-" + std::to_string(j)));
  for (int r = 0; r < 10; ++r) s.slots.insert(s.slots.end(), second.begin(), second.end());
  const auto found = detect(s);
  REQUIRE(found.size() == 2);
  CHECK(found[0].period_slots == 5);
  CHECK(found[0].start_slot == 0);
  CHECK(found[0].end_slot == 60);
  CHECK(found[1].period_slots == 8);
  CHECK(found[1].start_slot == 90);
  CHECK(found[1].end_slot == 170);
}

TEST_CASE("detect returns nothing for an all-missing series") {
  const SymbolSeries s = make_series(std::string(50, '.'));
  CHECK(detect(s).empty());
}

TEST_CASE("detect finds the simplest two-symbol alternation") {
  std::string symbols;
  for (int i = 0; i < 40; ++i) symbols += "AB";
  const auto found = detect(make_series(symbols, 0, 7200));
  REQUIRE(found.size() == 1);
  CHECK(found[0].period_slots == 2);
  CHECK(found[0].start_slot == 0);
  CHECK(found[0].end_slot == 80);
}

TEST_CASE("planted periodicities are recovered across the period range") {
  SplitMix64 rng(5);
  for (std::uint32_t period = 2; period <= 30; ++period) {
    const auto reps = static_cast<std::uint32_t>(rng.range(3, 40));
    const std::size_t pad = period * 2;
    const SymbolSeries s = planted_series(period, reps, pad, pad);
    const auto found = detect(s);
    REQUIRE(found.size() == 1);
    const std::size_t planted_end = pad + static_cast<std::size_t>(period) * reps;
    CHECK(found[0].period_slots == period);
    // The reported interval covers the planted one; tolerant gluing may
    // absorb at most one straddling window on either side.
    CHECK(found[0].start_slot <= pad);
    CHECK(found[0].end_slot >= planted_end);
    CHECK(found[0].start_slot + period > pad);
    CHECK(found[0].end_slot < planted_end + period);
    CHECK(found[0].repetitions >= reps);
  }
}

TEST_CASE("prepending unique sentinels shifts detections and changes nothing else") {
  const SymbolSeries base = planted_series(6, 12, 12, 12);
  const auto baseline = detect(base);
  REQUIRE(baseline.size() == 1);
  for (const std::size_t k : {1u, 3u, 5u}) {
    SymbolSeries shifted;
    shifted.series_id = base.series_id;
    shifted.start_ts = base.start_ts;
    shifted.step = base.step;
    for (std::size_t i = 0; i < k; ++i) {
      shifted.slots.push_back(shifted.table.intern("sentinel-" + std::to_string(i)));
    }
    for (const Symbol s : base.slots) {
      shifted.slots.push_back(
          shifted.table.intern(std::string(base.table.lookup(s))));
    }
    const auto found = detect(shifted);
    REQUIRE(found.size() == 1);
    CHECK(found[0].period_slots == baseline[0].period_slots);
    CHECK(found[0].start_slot == baseline[0].start_slot + k);
    CHECK(found[0].end_slot == baseline[0].end_slot + k);
    CHECK(found[0].repetitions == baseline[0].repetitions);
  }
}

TEST_CASE("relabeling the alphabet leaves detection structure unchanged") {
  const SymbolSeries base = planted_series(5, 9, 10, 10);
  const auto baseline = detect(base);
  REQUIRE(baseline.size() == 1);
  // Apply a bijection by renaming every raw value.
  SymbolSeries relabeled;
  relabeled.series_id = base.series_id;
  relabeled.start_ts = base.start_ts;
  relabeled.step = base.step;
  const std::size_t k = base.table.size();
  for (const Symbol s : base.slots) {
    relabeled.slots.push_back(
        relabeled.table.intern("renamed-" + std::to_string((s * 7 + 3) % (2 * k))));
  }
  const auto found = detect(relabeled);
  REQUIRE(found.size() == 1);
  CHECK(found[0].period_slots == baseline[0].period_slots);
  CHECK(found[0].start_slot == baseline[0].start_slot);
  CHECK(found[0].end_slot == baseline[0].end_slot);
  CHECK(found[0].repetitions == baseline[0].repetitions);
}

TEST_CASE("detection is deterministic") {
  SplitMix64 rng(77);
  const SymbolSeries s = random_series(rng, 400, 8);
  const auto a = detect(s);
  const auto b = detect(s);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].period_slots == b[i].period_slots);
    CHECK(a[i].start_slot == b[i].start_slot);
    CHECK(a[i].end_slot == b[i].end_slot);
    CHECK(a[i].pattern == b[i].pattern);
  }
}

TEST_CASE("no reported period is a multiple of another on an overlapping interval") {
  for (const std::uint32_t period : {2u, 3u, 4u, 6u}) {
    const SymbolSeries s = planted_series(period, 24, period * 2, period * 2);
    const auto found = detect(s);
    for (std::size_t i = 0; i < found.size(); ++i) {
      for (std::size_t j = 0; j < found.size(); ++j) {
        if (i == j) continue;
        if (found[j].period_slots % found[i].period_slots == 0 &&
            found[j].period_slots != found[i].period_slots) {
          const auto lo = std::max(found[i].start_slot, found[j].start_slot);
          const auto hi = std::min(found[i].end_slot, found[j].end_slot);
          CHECK(hi <= lo);
        }
      }
    }
  }
}

TEST_CASE("detector config validation rejects bad values") {
  DetectorConfig config;
  config.peak_threshold = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = {};
  config.min_repetitions = 1;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = {};
  config.max_lag_fraction = 1.5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = {};
  CHECK_NOTHROW(config.validate());
}
