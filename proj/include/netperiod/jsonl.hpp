#pragma once
// JSON Lines interchange for series and periodicity records.
//
// Series record:       {"series_id": str, "start_ts": int, "step": int,
//                       "slots": [str|null, ...]}   (null = missing slot)
// Periodicity record:  {"series_id": str, "period_slots": int,
//                       "period_seconds": int, "start_ts": int, "end_ts": int,
//                       "repetitions": int, "mismatch_count": int,
//                       "pattern": [str|null, ...]}

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "netperiod/series.hpp"

namespace netperiod {

std::string series_to_json_line(const SymbolSeries& series);
SymbolSeries series_from_json_line(const std::string& line);  // throws std::runtime_error

void write_series_jsonl(std::ostream& out, std::span<const SymbolSeries> series);
std::vector<SymbolSeries> read_series_jsonl(std::istream& in, std::size_t* malformed = nullptr);

std::string periodicity_to_json_line(const Periodicity& p, const SymbolSeries& series);
void write_periodicities_jsonl(std::ostream& out, std::span<const Periodicity> ps,
                               const SymbolSeries& series);

}  // namespace netperiod
