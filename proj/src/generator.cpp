#include "netperiod/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "netperiod/rng.hpp"

namespace netperiod {

using nlohmann::json;

void GeneratorConfig::validate() const {
  if (series_count == 0 || slots_per_series == 0) {
    throw std::invalid_argument("GeneratorConfig: empty corpus");
  }
  if (alphabet_size < 2) {
    throw std::invalid_argument("GeneratorConfig: alphabet needs at least 2 symbols");
  }
  if (period_min < 2 || period_max < period_min) {
    throw std::invalid_argument("GeneratorConfig: bad period range");
  }
  if (repetitions_min < 2 || repetitions_max < repetitions_min) {
    throw std::invalid_argument("GeneratorConfig: bad repetitions range");
  }
  if (slots_per_series < 2 * period_max) {
    throw std::invalid_argument("GeneratorConfig: series too short for the period range");
  }
  if (step_seconds <= 0) {
    throw std::invalid_argument("GeneratorConfig: step must be positive");
  }
}

namespace {

struct Block {
  bool periodic = false;
  std::uint32_t period = 0;       // periodic blocks
  std::uint32_t repetitions = 0;  // periodic blocks
  std::vector<Symbol> content;    // laid-out slots of the block
};

std::string series_name(std::size_t index) {
  std::string id = std::to_string(index);
  if (id.size() < 5) id.insert(0, 5 - id.size(), '0');
  return "series-" + id;
}

}  // namespace

Corpus generate(const GeneratorConfig& config) {
  config.validate();
  Corpus corpus;
  corpus.series.reserve(config.series_count);
  corpus.truth.reserve(config.series_count);

  for (std::size_t idx = 0; idx < config.series_count; ++idx) {
    SplitMix64 rng(child_seed(config.seed, idx));
    SymbolSeries s;
    s.series_id = series_name(idx);
    s.start_ts = 0;
    s.step = config.step_seconds;
    for (std::uint32_t a = 0; a < config.alphabet_size; ++a) {
      s.table.intern("path-" + std::to_string(a));
    }
    const auto draw_symbol = [&] {
      return static_cast<Symbol>(rng.range(0, config.alphabet_size - 1));
    };

    // Alternate periodic and non-periodic blocks until the series is full,
    // then shuffle the block order so periodic intervals land anywhere.
    std::vector<Block> blocks;
    std::size_t total = 0;
    bool periodic_next = true;
    while (total < config.slots_per_series) {
      const std::size_t room = config.slots_per_series - total;
      const auto period =
          static_cast<std::uint32_t>(rng.range(config.period_min, config.period_max));
      const auto reps = static_cast<std::uint32_t>(
          rng.range(config.repetitions_min, config.repetitions_max));
      if (periodic_next) {
        std::vector<Symbol> pattern(period);
        for (auto& sym : pattern) sym = draw_symbol();
        // Clip to whole repetitions; a remainder too short to stay periodic
        // becomes random filler.
        const std::uint32_t fit =
            std::min<std::uint32_t>(reps, static_cast<std::uint32_t>(room / period));
        if (fit >= config.repetitions_min) {
          Block b;
          b.periodic = true;
          b.period = period;
          b.repetitions = fit;
          b.content.reserve(static_cast<std::size_t>(fit) * period);
          for (std::uint32_t r = 0; r < fit; ++r) {
            b.content.insert(b.content.end(), pattern.begin(), pattern.end());
          }
          total += b.content.size();
          blocks.push_back(std::move(b));
        }
        if (fit < reps) {
          const std::size_t leftover = config.slots_per_series - total;
          if (leftover > 0) {
            Block filler;
            filler.content.resize(leftover);
            for (auto& sym : filler.content) sym = draw_symbol();
            total += filler.content.size();
            blocks.push_back(std::move(filler));
          }
        }
      } else {
        // Non-periodic interval, same length distribution as the periodic
        // ones, pure random content.
        Block b;
        b.content.resize(std::min<std::size_t>(static_cast<std::size_t>(period) * reps, room));
        for (auto& sym : b.content) sym = draw_symbol();
        total += b.content.size();
        blocks.push_back(std::move(b));
      }
      periodic_next = !periodic_next;
    }

    for (std::size_t j = blocks.size(); j > 1; --j) {
      const std::size_t k = static_cast<std::size_t>(rng.range(0, j - 1));
      std::swap(blocks[j - 1], blocks[k]);
    }

    SeriesTruth truth;
    truth.series_id = s.series_id;
    s.slots.reserve(config.slots_per_series);
    for (const Block& b : blocks) {
      if (b.periodic) {
        PlantedPeriodicity planted;
        planted.period = b.period;
        planted.pattern.assign(b.content.begin(), b.content.begin() + b.period);
        planted.start_slot = s.slots.size();
        planted.end_slot = s.slots.size() + b.content.size();
        truth.planted.push_back(std::move(planted));
      }
      s.slots.insert(s.slots.end(), b.content.begin(), b.content.end());
    }

    corpus.series.push_back(std::move(s));
    corpus.truth.push_back(std::move(truth));
  }
  return corpus;
}

NoiseStats inject_noise(SymbolSeries& series, SeriesTruth& truth, double fraction,
                        std::uint64_t seed) {
  if (fraction < 0.0) {
    throw std::invalid_argument("inject_noise: fraction must be non-negative");
  }
  if (fraction == 0.0) {
    return {};
  }
  std::size_t periodic_slots = 0;
  for (const auto& planted : truth.planted) {
    periodic_slots += planted.end_slot - planted.start_slot;
  }
  if (periodic_slots == 0) {
    throw std::invalid_argument("inject_noise: series has no planted intervals");
  }
  const auto events = static_cast<std::size_t>(std::llround(fraction * periodic_slots));
  const std::size_t alphabet = series.table.size();
  SplitMix64 rng(seed);
  NoiseStats stats;
  for (std::size_t e = 0; e < events; ++e) {
    std::size_t current_total = 0;
    for (const auto& planted : truth.planted) {
      current_total += planted.end_slot - planted.start_slot;
    }
    if (current_total == 0) break;
    std::size_t r = static_cast<std::size_t>(rng.range(0, current_total - 1));
    std::size_t pos = 0;
    for (const auto& planted : truth.planted) {
      const std::size_t len = planted.end_slot - planted.start_slot;
      if (r < len) {
        pos = planted.start_slot + r;
        break;
      }
      r -= len;
    }
    const std::uint64_t action = rng.range(0, 2);
    if (action == 0) {
      const auto sym = static_cast<Symbol>(rng.range(0, alphabet - 1));
      series.slots.insert(series.slots.begin() + static_cast<std::ptrdiff_t>(pos), sym);
      for (auto& planted : truth.planted) {
        if (pos < planted.start_slot) {
          ++planted.start_slot;
          ++planted.end_slot;
        } else if (pos < planted.end_slot) {
          ++planted.end_slot;
        }
      }
      ++stats.inserts;
    } else if (action == 1) {
      series.slots.erase(series.slots.begin() + static_cast<std::ptrdiff_t>(pos));
      for (auto& planted : truth.planted) {
        if (pos < planted.start_slot) {
          --planted.start_slot;
          --planted.end_slot;
        } else if (pos < planted.end_slot) {
          --planted.end_slot;
        }
      }
      ++stats.deletions;
    } else {
      const Symbol current = series.slots[pos];
      Symbol sym = current;
      while (sym == current) {
        sym = static_cast<Symbol>(rng.range(0, alphabet - 1));
      }
      series.slots[pos] = sym;
      ++stats.substitutions;
    }
  }
  return stats;
}

std::string truth_to_json_line(const SeriesTruth& truth, const SymbolSeries& series) {
  json planted = json::array();
  for (const auto& p : truth.planted) {
    json pattern = json::array();
    for (const Symbol sym : p.pattern) {
      pattern.push_back(std::string(series.table.lookup(sym)));
    }
    planted.push_back({{"period", p.period},
                       {"start_slot", p.start_slot},
                       {"end_slot", p.end_slot},
                       {"pattern", std::move(pattern)}});
  }
  const json record = {{"series_id", truth.series_id}, {"planted", std::move(planted)}};
  return record.dump();
}

SeriesTruth truth_from_json_line(const std::string& line, SymbolSeries& series) {
  const json record = json::parse(line);
  SeriesTruth truth;
  truth.series_id = record.at("series_id").get<std::string>();
  for (const json& p : record.at("planted")) {
    PlantedPeriodicity planted;
    planted.period = p.at("period").get<std::uint32_t>();
    planted.start_slot = p.at("start_slot").get<std::size_t>();
    planted.end_slot = p.at("end_slot").get<std::size_t>();
    for (const json& sym : p.at("pattern")) {
      planted.pattern.push_back(series.table.intern(sym.get_ref<const std::string&>()));
    }
    truth.planted.push_back(std::move(planted));
  }
  return truth;
}

void write_truth_jsonl(std::ostream& out, const Corpus& corpus) {
  for (std::size_t i = 0; i < corpus.truth.size(); ++i) {
    out << truth_to_json_line(corpus.truth[i], corpus.series[i]) << '\n';
  }
}

std::vector<SeriesTruth> read_truth_jsonl(std::istream& in, std::vector<SymbolSeries>& series) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < series.size(); ++i) {
    by_id.emplace(series[i].series_id, i);
  }
  std::vector<SeriesTruth> truths(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    truths[i].series_id = series[i].series_id;
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception&) {
      throw std::runtime_error("truth record: malformed JSON");
    }
    const auto id = record.at("series_id").get<std::string>();
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw std::runtime_error("truth record references unknown series: " + id);
    }
    truths[it->second] = truth_from_json_line(line, series[it->second]);
  }
  return truths;
}

}  // namespace netperiod
