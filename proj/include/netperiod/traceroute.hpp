#pragma once
// Traceroute ingestion: JSON Lines records to per-pair symbol series,
// per-pair path statistics, and the paris-id attribution check.
//
// Record schema: {"ts": int, "src": str, "dst": str, "paris_id": int|null,
//                 "hops": [str, ...]} with "*" for a non-responding hop.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netperiod/series.hpp"

namespace netperiod {

struct TracerouteRecord {
  std::int64_t ts = 0;
  std::string src;
  std::string dst;
  std::optional<std::uint32_t> paris_id;  // >= 1 when present
  std::vector<std::string> hops;          // non-empty; "*" = no reply
};

struct ParseStats {
  std::size_t malformed = 0;
};

std::vector<TracerouteRecord> parse_traceroute_records(std::istream& in,
                                                       ParseStats* stats = nullptr);

// Adapter for the public measurement-archive result format: takes the
// first reply of each hop ("from" of the first result entry, "*" when the
// hop did not answer).
std::vector<TracerouteRecord> parse_atlas_results(std::istream& in,
                                                  ParseStats* stats = nullptr);

// Canonical byte encoding of the hop list: hops joined by '|'. Asterisks
// are ordinary symbols; no alias folding, truncation or padding.
std::string path_of(const TracerouteRecord& record);

struct PairSeries {
  std::string src;
  std::string dst;
  SymbolSeries series;
  // Aligned with series.slots; empty annotation where the slot is missing
  // or the record carried no paris_id.
  std::vector<std::optional<std::uint32_t>> paris;
  SeriesBuildStats build_stats;
};

std::vector<PairSeries> group_pairs(std::span<const TracerouteRecord> records,
                                    std::int64_t start_ts, std::int64_t end_ts,
                                    std::int64_t step);

struct PairStats {
  std::size_t distinct_paths = 0;
  std::vector<std::size_t> occurrences;  // per symbol id, non-missing slots only
  double occurrence_stddev = 0.0;        // population stddev of the counts
};

PairStats pair_stats(const SymbolSeries& series);

enum class ParisAttribution {
  kUnknown,         // no paris annotations available in the interval
  kNotAttributed,
  kAttributed,
};

struct ParisReport {
  ParisAttribution status = ParisAttribution::kUnknown;
  // paris-id -> the single pattern path observed whenever that id was used
  // (ids seen fewer than twice in the interval do not qualify).
  std::vector<std::pair<std::uint32_t, Symbol>> associations;
  // True when every distinct pattern path is locked to some paris-id.
  bool all_pattern_paths_locked = false;
};

ParisReport paris_attribution(const PairSeries& pair, const Periodicity& p);

}  // namespace netperiod
