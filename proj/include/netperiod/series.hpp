#pragma once
// Symbol-interned, regularly sampled time-series of opaque measurement
// values (traceroute paths, routing states). Slots with no measurement
// are MISSING and never participate in matching.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netperiod {

using Symbol = std::uint32_t;

// Sentinel for an empty slot. Not a symbol: never interned, never equal
// to anything (including itself) under any match operator.
inline constexpr Symbol kMissing = 0xFFFFFFFFu;

// Bijective raw-value <-> dense-id mapping, scoped to one series.
class SymbolTable {
 public:
  Symbol intern(std::string_view raw);
  std::optional<Symbol> find(std::string_view raw) const;
  std::string_view lookup(Symbol id) const;  // throws std::out_of_range
  std::size_t size() const { return entries_.size(); }

 private:
  struct TransparentHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view sv) const {
      return std::hash<std::string_view>{}(sv);
    }
  };

  std::vector<std::string> entries_;
  std::unordered_map<std::string, Symbol, TransparentHash, std::equal_to<>> index_;
};

struct SymbolSeries {
  std::string series_id;
  std::int64_t start_ts = 0;  // unix seconds of slot 0
  std::int64_t step = 1;      // seconds per slot, > 0
  std::vector<Symbol> slots;  // symbol id or kMissing
  SymbolTable table;

  std::size_t size() const { return slots.size(); }
  std::int64_t slot_time(std::size_t i) const;  // valid for 0 <= i <= size()
};

struct RawRecord {
  std::int64_t ts = 0;
  std::string value;
};

struct SeriesBuildStats {
  std::size_t duplicate_records = 0;  // extra records landing in an occupied slot
  std::size_t dropped_records = 0;    // records outside [start_ts, end_ts)
};

// Maps records onto the slot grid of [start_ts, end_ts) at `step`.
// Returns, per slot, the index of the record that owns it (earliest
// timestamp wins; ties keep the first-seen record), or nullopt.
std::vector<std::optional<std::size_t>> assign_slots(std::span<const RawRecord> records,
                                                     std::int64_t start_ts, std::int64_t end_ts,
                                                     std::int64_t step,
                                                     SeriesBuildStats* stats = nullptr);

SymbolSeries series_from_records(std::string series_id, std::span<const RawRecord> records,
                                 std::int64_t start_ts, std::int64_t end_ts, std::int64_t step,
                                 SeriesBuildStats* stats = nullptr);

// A detected periodicity: `pattern` repeats every `period_slots` slots
// across [start_slot, end_slot), up to the mismatches tolerated while
// gluing adjacent windows.
struct Periodicity {
  std::uint32_t period_slots = 0;
  std::vector<Symbol> pattern;  // length == period_slots, kMissing allowed
  std::size_t start_slot = 0;   // half-open slot interval
  std::size_t end_slot = 0;
  std::uint32_t repetitions = 0;
  std::uint32_t mismatch_count = 0;
};

}  // namespace netperiod
