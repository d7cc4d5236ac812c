#include "netperiod/traceroute.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace netperiod {

using nlohmann::json;

namespace {

std::optional<TracerouteRecord> record_from_json(const json& j) {
  if (!j.is_object() || !j.contains("ts") || !j.contains("src") || !j.contains("dst") ||
      !j.contains("hops")) {
    return std::nullopt;
  }
  if (!j["ts"].is_number_integer() || !j["src"].is_string() || !j["dst"].is_string() ||
      !j["hops"].is_array() || j["hops"].empty()) {
    return std::nullopt;
  }
  TracerouteRecord record;
  record.ts = j["ts"].get<std::int64_t>();
  record.src = j["src"].get<std::string>();
  record.dst = j["dst"].get<std::string>();
  if (j.contains("paris_id") && !j["paris_id"].is_null()) {
    if (!j["paris_id"].is_number_integer()) return std::nullopt;
    const auto id = j["paris_id"].get<std::int64_t>();
    if (id < 1) return std::nullopt;
    record.paris_id = static_cast<std::uint32_t>(id);
  }
  for (const json& hop : j["hops"]) {
    if (!hop.is_string()) return std::nullopt;
    record.hops.push_back(hop.get<std::string>());
  }
  return record;
}

}  // namespace

std::vector<TracerouteRecord> parse_traceroute_records(std::istream& in, ParseStats* stats) {
  std::vector<TracerouteRecord> records;
  std::size_t malformed = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    auto record = j.is_discarded() ? std::nullopt : record_from_json(j);
    if (record) {
      records.push_back(std::move(*record));
    } else {
      ++malformed;
    }
  }
  if (stats != nullptr) stats->malformed = malformed;
  return records;
}

std::vector<TracerouteRecord> parse_atlas_results(std::istream& in, ParseStats* stats) {
  std::vector<TracerouteRecord> records;
  std::size_t malformed = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("timestamp") ||
        !j.contains("prb_id") || !(j.contains("dst_addr") || j.contains("dst_name")) ||
        !j.contains("result") || !j["result"].is_array()) {
      ++malformed;
      continue;
    }
    TracerouteRecord record;
    record.ts = j["timestamp"].get<std::int64_t>();
    record.src = j["prb_id"].is_string() ? j["prb_id"].get<std::string>()
                                         : std::to_string(j["prb_id"].get<std::int64_t>());
    record.dst = j.contains("dst_addr") ? j["dst_addr"].get<std::string>()
                                        : j["dst_name"].get<std::string>();
    if (j.contains("paris_id") && j["paris_id"].is_number_integer() &&
        j["paris_id"].get<std::int64_t>() >= 1) {
      record.paris_id = static_cast<std::uint32_t>(j["paris_id"].get<std::int64_t>());
    }
    // Keep only the first reply of each hop round.
    for (const json& hop : j["result"]) {
      if (!hop.is_object() || !hop.contains("result") || !hop["result"].is_array() ||
          hop["result"].empty()) {
        record.hops.push_back("*");
        continue;
      }
      const json& first = hop["result"].front();
      if (first.is_object() && first.contains("from") && first["from"].is_string()) {
        record.hops.push_back(first["from"].get<std::string>());
      } else {
        record.hops.push_back("*");
      }
    }
    if (record.hops.empty()) {
      ++malformed;
      continue;
    }
    records.push_back(std::move(record));
  }
  if (stats != nullptr) stats->malformed = malformed;
  return records;
}

std::string path_of(const TracerouteRecord& record) {
  std::string path;
  for (std::size_t i = 0; i < record.hops.size(); ++i) {
    if (i > 0) path.push_back('|');
    path += record.hops[i];
  }
  return path;
}

std::vector<PairSeries> group_pairs(std::span<const TracerouteRecord> records,
                                    std::int64_t start_ts, std::int64_t end_ts,
                                    std::int64_t step) {
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> by_pair;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_pair[{records[i].src, records[i].dst}].push_back(i);
  }
  std::vector<PairSeries> out;
  out.reserve(by_pair.size());
  for (const auto& [key, indices] : by_pair) {
    std::vector<RawRecord> raw;
    raw.reserve(indices.size());
    for (const std::size_t i : indices) {
      raw.push_back({records[i].ts, path_of(records[i])});
    }
    PairSeries pair;
    pair.src = key.first;
    pair.dst = key.second;
    const auto owner = assign_slots(raw, start_ts, end_ts, step, &pair.build_stats);
    pair.series.series_id = key.first + ">" + key.second;
    pair.series.start_ts = start_ts;
    pair.series.step = step;
    pair.series.slots.reserve(owner.size());
    pair.paris.reserve(owner.size());
    for (const auto& slot : owner) {
      if (slot) {
        pair.series.slots.push_back(pair.series.table.intern(raw[*slot].value));
        pair.paris.push_back(records[indices[*slot]].paris_id);
      } else {
        pair.series.slots.push_back(kMissing);
        pair.paris.push_back(std::nullopt);
      }
    }
    out.push_back(std::move(pair));
  }
  return out;
}

PairStats pair_stats(const SymbolSeries& series) {
  PairStats stats;
  stats.occurrences.assign(series.table.size(), 0);
  for (const Symbol s : series.slots) {
    if (s != kMissing) ++stats.occurrences[s];
  }
  double mean = 0.0;
  for (const std::size_t count : stats.occurrences) {
    if (count > 0) ++stats.distinct_paths;
    mean += static_cast<double>(count);
  }
  if (stats.distinct_paths == 0) return stats;
  mean /= static_cast<double>(stats.distinct_paths);
  double var = 0.0;
  for (const std::size_t count : stats.occurrences) {
    if (count > 0) {
      const double d = static_cast<double>(count) - mean;
      var += d * d;
    }
  }
  stats.occurrence_stddev = std::sqrt(var / static_cast<double>(stats.distinct_paths));
  return stats;
}

ParisReport paris_attribution(const PairSeries& pair, const Periodicity& p) {
  ParisReport report;
  if (pair.paris.size() != pair.series.size()) {
    throw std::invalid_argument("paris_attribution: annotations not aligned with slots");
  }
  std::set<Symbol> pattern_paths;
  for (const Symbol s : p.pattern) {
    if (s != kMissing) pattern_paths.insert(s);
  }
  // Per paris-id: occurrence count and the set of paths it produced.
  std::map<std::uint32_t, std::pair<std::size_t, std::set<Symbol>>> by_id;
  bool any_annotation = false;
  for (std::size_t i = p.start_slot; i < p.end_slot && i < pair.series.size(); ++i) {
    if (pair.series.slots[i] == kMissing) continue;
    if (!pair.paris[i]) continue;
    any_annotation = true;
    auto& entry = by_id[*pair.paris[i]];
    ++entry.first;
    entry.second.insert(pair.series.slots[i]);
  }
  if (!any_annotation) {
    report.status = ParisAttribution::kUnknown;
    return report;
  }
  std::set<Symbol> locked_paths;
  for (const auto& [id, entry] : by_id) {
    if (entry.first < 2 || entry.second.size() != 1) continue;
    const Symbol path = *entry.second.begin();
    if (!pattern_paths.contains(path)) continue;
    report.associations.emplace_back(id, path);
    locked_paths.insert(path);
  }
  report.status = report.associations.empty() ? ParisAttribution::kNotAttributed
                                              : ParisAttribution::kAttributed;
  report.all_pattern_paths_locked =
      !pattern_paths.empty() && locked_paths == pattern_paths;
  return report;
}

}  // namespace netperiod
