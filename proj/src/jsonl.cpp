#include "netperiod/jsonl.hpp"

#include <stdexcept>

#include "json.hpp"

namespace netperiod {

using nlohmann::json;

std::string series_to_json_line(const SymbolSeries& series) {
  json slots = json::array();
  for (const Symbol s : series.slots) {
    if (s == kMissing) {
      slots.push_back(nullptr);
    } else {
      slots.push_back(std::string(series.table.lookup(s)));
    }
  }
  const json record = {{"series_id", series.series_id},
                       {"start_ts", series.start_ts},
                       {"step", series.step},
                       {"slots", std::move(slots)}};
  return record.dump();
}

SymbolSeries series_from_json_line(const std::string& line) {
  const json record = json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    throw std::runtime_error("series record: not a JSON object");
  }
  if (!record.contains("series_id") || !record.contains("start_ts") ||
      !record.contains("step") || !record.contains("slots") ||
      !record["slots"].is_array()) {
    throw std::runtime_error("series record: missing field");
  }
  SymbolSeries s;
  s.series_id = record["series_id"].get<std::string>();
  s.start_ts = record["start_ts"].get<std::int64_t>();
  s.step = record["step"].get<std::int64_t>();
  if (s.step <= 0) {
    throw std::runtime_error("series record: step must be positive");
  }
  s.slots.reserve(record["slots"].size());
  for (const json& slot : record["slots"]) {
    if (slot.is_null()) {
      s.slots.push_back(kMissing);
    } else if (slot.is_string()) {
      s.slots.push_back(s.table.intern(slot.get_ref<const std::string&>()));
    } else {
      throw std::runtime_error("series record: slot must be string or null");
    }
  }
  return s;
}

void write_series_jsonl(std::ostream& out, std::span<const SymbolSeries> series) {
  for (const SymbolSeries& s : series) {
    out << series_to_json_line(s) << '\n';
  }
}

std::vector<SymbolSeries> read_series_jsonl(std::istream& in, std::size_t* malformed) {
  std::vector<SymbolSeries> out;
  std::size_t bad = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(series_from_json_line(line));
    } catch (const std::exception&) {
      ++bad;
    }
  }
  if (malformed != nullptr) {
    *malformed = bad;
  }
  return out;
}

std::string periodicity_to_json_line(const Periodicity& p, const SymbolSeries& series) {
  json pattern = json::array();
  for (const Symbol s : p.pattern) {
    if (s == kMissing) {
      pattern.push_back(nullptr);
    } else {
      pattern.push_back(std::string(series.table.lookup(s)));
    }
  }
  const json record = {
      {"series_id", series.series_id},
      {"period_slots", p.period_slots},
      {"period_seconds", static_cast<std::int64_t>(p.period_slots) * series.step},
      {"start_ts", series.slot_time(p.start_slot)},
      {"end_ts", series.slot_time(p.end_slot)},
      {"repetitions", p.repetitions},
      {"mismatch_count", p.mismatch_count},
      {"pattern", std::move(pattern)}};
  return record.dump();
}

void write_periodicities_jsonl(std::ostream& out, std::span<const Periodicity> ps,
                               const SymbolSeries& series) {
  for (const Periodicity& p : ps) {
    out << periodicity_to_json_line(p, series) << '\n';
  }
}

}  // namespace netperiod
