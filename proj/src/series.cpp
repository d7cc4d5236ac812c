#include "netperiod/series.hpp"

#include <stdexcept>

namespace netperiod {

Symbol SymbolTable::intern(std::string_view raw) {
  auto it = index_.find(raw);
  if (it != index_.end()) {
    return it->second;
  }
  const Symbol id = static_cast<Symbol>(entries_.size());
  entries_.emplace_back(raw);
  index_.emplace(entries_.back(), id);
  return id;
}

std::optional<Symbol> SymbolTable::find(std::string_view raw) const {
  auto it = index_.find(raw);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::string_view SymbolTable::lookup(Symbol id) const {
  if (id >= entries_.size()) {
    throw std::out_of_range("SymbolTable::lookup: unknown symbol id");
  }
  return entries_[id];
}

std::int64_t SymbolSeries::slot_time(std::size_t i) const {
  if (i > slots.size()) {
    throw std::out_of_range("SymbolSeries::slot_time: slot index out of range");
  }
  return start_ts + static_cast<std::int64_t>(i) * step;
}

std::vector<std::optional<std::size_t>> assign_slots(std::span<const RawRecord> records,
                                                     std::int64_t start_ts, std::int64_t end_ts,
                                                     std::int64_t step, SeriesBuildStats* stats) {
  if (step <= 0) {
    throw std::invalid_argument("assign_slots: step must be positive");
  }
  if (end_ts <= start_ts) {
    throw std::invalid_argument("assign_slots: end_ts must be after start_ts");
  }
  const std::size_t slot_count =
      static_cast<std::size_t>((end_ts - start_ts + step - 1) / step);
  std::vector<std::optional<std::size_t>> owner(slot_count);
  SeriesBuildStats local;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const std::int64_t ts = records[r].ts;
    if (ts < start_ts || ts >= end_ts) {
      ++local.dropped_records;
      continue;
    }
    const std::size_t slot = static_cast<std::size_t>((ts - start_ts) / step);
    if (!owner[slot]) {
      owner[slot] = r;
      continue;
    }
    ++local.duplicate_records;
    if (ts < records[*owner[slot]].ts) {
      owner[slot] = r;  // earliest wins
    }
  }
  if (stats != nullptr) {
    *stats = local;
  }
  return owner;
}

SymbolSeries series_from_records(std::string series_id, std::span<const RawRecord> records,
                                 std::int64_t start_ts, std::int64_t end_ts, std::int64_t step,
                                 SeriesBuildStats* stats) {
  const auto owner = assign_slots(records, start_ts, end_ts, step, stats);
  SymbolSeries s;
  s.series_id = std::move(series_id);
  s.start_ts = start_ts;
  s.step = step;
  s.slots.reserve(owner.size());
  for (const auto& rec : owner) {
    s.slots.push_back(rec ? s.table.intern(records[*rec].value) : kMissing);
  }
  return s;
}

}  // namespace netperiod
