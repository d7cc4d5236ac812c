#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "netperiod/generator.hpp"
#include "netperiod/jsonl.hpp"
#include "test_helpers.hpp"

using namespace netperiod;

namespace {

GeneratorConfig small_config(std::uint64_t seed = 11) {
  GeneratorConfig config;
  config.series_count = 4;
  config.slots_per_series = 800;
  config.alphabet_size = 30;
  config.period_min = 2;
  config.period_max = 30;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("generated symbols stay inside the configured alphabet") {
  const Corpus corpus = generate(small_config());
  REQUIRE(corpus.series.size() == 4);
  for (const auto& series : corpus.series) {
    CHECK(series.size() == 800);
    CHECK(series.table.size() == 30);
    for (const Symbol s : series.slots) {
      REQUIRE(s != kMissing);
      REQUIRE(s < 30);
    }
  }
}

TEST_CASE("planted periods stay inside the configured range") {
  const Corpus corpus = generate(small_config(3));
  std::size_t planted_total = 0;
  for (const auto& truth : corpus.truth) {
    for (const auto& planted : truth.planted) {
      ++planted_total;
      CHECK(planted.period >= 2);
      CHECK(planted.period <= 30);
      CHECK(planted.pattern.size() == planted.period);
      const std::size_t len = planted.end_slot - planted.start_slot;
      CHECK(len % planted.period == 0);
      CHECK(len / planted.period >= 3);
    }
  }
  CHECK(planted_total > 0);
}

TEST_CASE("planted intervals are disjoint and hold their pattern") {
  const Corpus corpus = generate(small_config(5));
  for (std::size_t i = 0; i < corpus.series.size(); ++i) {
    const auto& series = corpus.series[i];
    const auto& planted = corpus.truth[i].planted;
    for (std::size_t a = 1; a < planted.size(); ++a) {
      CHECK(planted[a - 1].end_slot <= planted[a].start_slot);
    }
    for (const auto& p : planted) {
      for (std::size_t slot = p.start_slot; slot < p.end_slot; ++slot) {
        REQUIRE(series.slots[slot] == p.pattern[(slot - p.start_slot) % p.period]);
      }
    }
  }
}

TEST_CASE("equal seeds generate identical corpora") {
  const Corpus a = generate(small_config(21));
  const Corpus b = generate(small_config(21));
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    CHECK(a.series[i].slots == b.series[i].slots);
    REQUIRE(a.truth[i].planted.size() == b.truth[i].planted.size());
    for (std::size_t j = 0; j < a.truth[i].planted.size(); ++j) {
      CHECK(a.truth[i].planted[j].period == b.truth[i].planted[j].period);
      CHECK(a.truth[i].planted[j].start_slot == b.truth[i].planted[j].start_slot);
      CHECK(a.truth[i].planted[j].pattern == b.truth[i].planted[j].pattern);
    }
  }
  const Corpus c = generate(small_config(22));
  bool any_difference = false;
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    if (a.series[i].slots != c.series[i].slots) any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("zero noise leaves the series untouched") {
  Corpus corpus = generate(small_config(8));
  const auto original = corpus.series[0].slots;
  const auto stats = inject_noise(corpus.series[0], corpus.truth[0], 0.0, 99);
  CHECK(stats.total() == 0);
  CHECK(corpus.series[0].slots == original);
}

TEST_CASE("noise applies exactly the rounded number of events") {
  Corpus corpus = generate(small_config(9));
  std::size_t periodic_slots = 0;
  for (const auto& p : corpus.truth[0].planted) {
    periodic_slots += p.end_slot - p.start_slot;
  }
  REQUIRE(periodic_slots > 0);
  const auto stats = inject_noise(corpus.series[0], corpus.truth[0], 0.10, 4242);
  CHECK(stats.total() ==
        static_cast<std::size_t>(std::llround(0.10 * static_cast<double>(periodic_slots))));
}

TEST_CASE("a single substitution changes exactly one slot") {
  Corpus corpus = generate(small_config(10));
  auto& series = corpus.series[0];
  auto& truth = corpus.truth[0];
  const auto original = series.slots;
  // Scan seeds for one producing a single substitution event.
  std::size_t changed = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto series_copy = series;
    auto truth_copy = truth;
    std::size_t periodic_slots = 0;
    for (const auto& p : truth_copy.planted) periodic_slots += p.end_slot - p.start_slot;
    const double fraction = 1.0 / static_cast<double>(periodic_slots);
    const auto stats = inject_noise(series_copy, truth_copy, fraction, seed);
    REQUIRE(stats.total() == 1);
    if (stats.substitutions == 1) {
      REQUIRE(series_copy.slots.size() == original.size());
      changed = 0;
      for (std::size_t i = 0; i < original.size(); ++i) {
        if (series_copy.slots[i] != original[i]) ++changed;
      }
      CHECK(changed == 1);
      return;
    }
  }
  FAIL("no substitution event found across seeds");
}

TEST_CASE("noise on a series without planted intervals is an error") {
  SymbolSeries series = test::make_series("ABCD");
  SeriesTruth truth;
  truth.series_id = "test";
  CHECK_THROWS_AS(inject_noise(series, truth, 0.1, 1), std::invalid_argument);
  CHECK_NOTHROW(inject_noise(series, truth, 0.0, 1));
}

TEST_CASE("noise keeps truth intervals inside the series and patterns intact") {
  Corpus corpus = generate(small_config(12));
  for (std::size_t i = 0; i < corpus.series.size(); ++i) {
    const auto before = corpus.truth[i];
    auto& series = corpus.series[i];
    auto& truth = corpus.truth[i];
    const std::size_t len_before = series.size();
    const auto stats = inject_noise(series, truth, 0.05, 1000 + i);
    CHECK(series.size() == len_before + stats.inserts - stats.deletions);
    REQUIRE(truth.planted.size() == before.planted.size());
    for (std::size_t j = 0; j < truth.planted.size(); ++j) {
      CHECK(truth.planted[j].pattern == before.planted[j].pattern);
      CHECK(truth.planted[j].start_slot <= truth.planted[j].end_slot);
      CHECK(truth.planted[j].end_slot <= series.size());
    }
    for (std::size_t j = 1; j < truth.planted.size(); ++j) {
      CHECK(truth.planted[j - 1].end_slot <= truth.planted[j].start_slot);
    }
  }
}

TEST_CASE("substitution-only noise conserves length") {
  // With insert and delete cancelling in expectation this is only exact per
  // event category, which NoiseStats exposes.
  Corpus corpus = generate(small_config(14));
  auto& series = corpus.series[1];
  auto& truth = corpus.truth[1];
  const std::size_t len_before = series.size();
  const auto stats = inject_noise(series, truth, 0.08, 77);
  CHECK(series.size() ==
        len_before + stats.inserts - stats.deletions);
}

TEST_CASE("ground truth round-trips through JSONL") {
  Corpus corpus = generate(small_config(31));
  std::ostringstream out;
  write_truth_jsonl(out, corpus);
  std::ostringstream series_out;
  write_series_jsonl(series_out, corpus.series);

  std::istringstream series_in(series_out.str());
  auto series = read_series_jsonl(series_in);
  std::istringstream truth_in(out.str());
  const auto truths = read_truth_jsonl(truth_in, series);
  REQUIRE(truths.size() == corpus.truth.size());
  for (std::size_t i = 0; i < truths.size(); ++i) {
    REQUIRE(truths[i].planted.size() == corpus.truth[i].planted.size());
    for (std::size_t j = 0; j < truths[i].planted.size(); ++j) {
      CHECK(truths[i].planted[j].period == corpus.truth[i].planted[j].period);
      CHECK(truths[i].planted[j].start_slot == corpus.truth[i].planted[j].start_slot);
      CHECK(truths[i].planted[j].end_slot == corpus.truth[i].planted[j].end_slot);
    }
  }
}

TEST_CASE("truth referencing an unknown series id fails loudly") {
  std::vector<SymbolSeries> series;
  series.push_back(test::make_series("AB"));
  series[0].series_id = "known";
  std::istringstream in(R"({"series_id":"unknown","planted":[]})" "\n");
  CHECK_THROWS_AS(read_truth_jsonl(in, series), std::runtime_error);
}
