#include "netperiod/bgp.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace netperiod {

using nlohmann::json;

std::vector<BgpUpdate> parse_bgp_updates(std::istream& in, std::string_view prefix,
                                         ParseStats* stats) {
  std::vector<BgpUpdate> updates;
  std::size_t malformed = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("ts") || !j.contains("peer") ||
        !j.contains("prefix") || !j.contains("type") || !j["ts"].is_number_integer() ||
        !j["peer"].is_string() || !j["prefix"].is_string() || !j["type"].is_string()) {
      ++malformed;
      continue;
    }
    const auto type = j["type"].get<std::string>();
    if (type != "A" && type != "W") {
      ++malformed;
      continue;
    }
    BgpUpdate update;
    update.ts = j["ts"].get<std::int64_t>();
    update.peer = j["peer"].get<std::string>();
    update.prefix = j["prefix"].get<std::string>();
    if (type == "A") {
      update.kind = BgpUpdateKind::kAnnounce;
      if (!j.contains("as_path") || !j["as_path"].is_array()) {
        ++malformed;
        continue;
      }
      bool ok = true;
      for (const json& asn : j["as_path"]) {
        if (!asn.is_number_integer() || asn.get<std::int64_t>() < 0) {
          ok = false;
          break;
        }
        update.as_path.push_back(asn.get<std::uint32_t>());
      }
      if (!ok) {
        ++malformed;
        continue;
      }
    } else {
      update.kind = BgpUpdateKind::kWithdraw;
      if (j.contains("as_path") && !j["as_path"].is_null() && !j["as_path"].empty()) {
        ++malformed;  // withdrawals carry no path
        continue;
      }
    }
    if (update.prefix != prefix) continue;
    updates.push_back(std::move(update));
  }
  if (stats != nullptr) stats->malformed = malformed;
  std::stable_sort(updates.begin(), updates.end(),
                   [](const BgpUpdate& a, const BgpUpdate& b) { return a.ts < b.ts; });
  return updates;
}

std::vector<std::string> peers_in(std::span<const BgpUpdate> updates) {
  std::set<std::string> peers;
  for (const BgpUpdate& u : updates) peers.insert(u.peer);
  return {peers.begin(), peers.end()};
}

namespace {

std::string encode_as_path(const std::vector<std::uint32_t>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += std::to_string(path[i]);
  }
  return out;
}

}  // namespace

InternetStateSeries build_state_series(
    std::span<const BgpUpdate> updates, std::vector<std::string> peers, std::int64_t t0,
    std::int64_t t1, std::int64_t step,
    const std::map<std::string, std::vector<std::uint32_t>>* seed_paths) {
  if (t1 <= t0) {
    throw std::invalid_argument("build_state_series: t1 must be after t0");
  }
  if (step <= 0) {
    throw std::invalid_argument("build_state_series: step must be positive");
  }
  InternetStateSeries out;
  out.peers = std::move(peers);
  out.paths_by_peer.assign(out.peers.size(), {});
  std::unordered_map<std::string, std::size_t> peer_index;
  for (std::size_t i = 0; i < out.peers.size(); ++i) {
    peer_index.emplace(out.peers[i], i);
  }
  // Per-peer AS-path interning; current[i] == 0 means UNREACHABLE.
  std::vector<std::map<std::vector<std::uint32_t>, std::uint32_t>> path_ids(out.peers.size());
  const auto intern_path = [&](std::size_t peer, const std::vector<std::uint32_t>& path) {
    auto [it, fresh] = path_ids[peer].try_emplace(
        path, static_cast<std::uint32_t>(out.paths_by_peer[peer].size() + 1));
    if (fresh) out.paths_by_peer[peer].push_back(path);
    return it->second;
  };
  StateVector current(out.peers.size(), 0);
  if (seed_paths != nullptr) {
    for (const auto& [peer, path] : *seed_paths) {
      const auto it = peer_index.find(peer);
      if (it != peer_index.end()) {
        current[it->second] = intern_path(it->second, path);
      }
    }
  }

  out.series.start_ts = t0;
  out.series.step = step;
  const auto slot_count = static_cast<std::size_t>((t1 - t0 + step - 1) / step);
  out.series.slots.reserve(slot_count);

  std::size_t next_update = 0;
  Symbol last_symbol = kMissing;
  bool dirty = true;
  std::string encoded;
  for (std::size_t slot = 0; slot < slot_count; ++slot) {
    const std::int64_t now = t0 + static_cast<std::int64_t>(slot) * step;
    while (next_update < updates.size() && updates[next_update].ts <= now) {
      const BgpUpdate& u = updates[next_update];
      ++next_update;
      if (u.ts < t0) {
        ++out.dropped_updates;
        continue;
      }
      const auto it = peer_index.find(u.peer);
      if (it == peer_index.end()) {
        ++out.dropped_updates;
        continue;
      }
      const std::uint32_t state =
          u.kind == BgpUpdateKind::kAnnounce ? intern_path(it->second, u.as_path) : 0;
      if (current[it->second] != state) {
        current[it->second] = state;
        dirty = true;
      }
    }
    if (dirty) {
      encoded.clear();
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (i > 0) encoded.push_back(';');
        if (current[i] == 0) {
          encoded.push_back('-');
        } else {
          encoded += encode_as_path(out.paths_by_peer[i][current[i] - 1]);
        }
      }
      const std::size_t before = out.series.table.size();
      last_symbol = out.series.table.intern(encoded);
      if (out.series.table.size() > before) {
        out.state_by_symbol.push_back(current);
      }
      dirty = false;
    }
    out.series.slots.push_back(last_symbol);
  }
  out.dropped_updates += updates.size() - next_update;  // at or beyond t1
  return out;
}

bool state_match(const StateVector& a, const StateVector& b, double threshold) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("state_match: peer sets differ");
  }
  if (a.empty()) return true;
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    equal += static_cast<std::size_t>(a[i] == b[i]);
  }
  return static_cast<double>(equal) + 1e-9 >= threshold * static_cast<double>(a.size());
}

std::vector<Periodicity> detect_state_periodicity(const InternetStateSeries& series,
                                                  const DetectorConfig& config,
                                                  double threshold) {
  const StateMatchOperator op(series, threshold);
  return detect(series.series, config, &op);
}

std::vector<BgpUpdate> synth_beacon(std::string prefix, std::int64_t t0,
                                    std::int64_t duration_seconds,
                                    std::span<const std::string> peers) {
  constexpr std::int64_t kHalfPeriod = 7200;
  if (duration_seconds < 2 * kHalfPeriod) {
    throw std::invalid_argument("synth_beacon: duration must cover a full cycle");
  }
  const std::vector<std::uint32_t> beacon_path{65000, 64500};
  std::vector<BgpUpdate> updates;
  bool announce = true;
  for (std::int64_t ts = t0; ts <= t0 + duration_seconds; ts += kHalfPeriod) {
    for (const std::string& peer : peers) {
      BgpUpdate u;
      u.ts = ts;
      u.peer = peer;
      u.prefix = prefix;
      u.kind = announce ? BgpUpdateKind::kAnnounce : BgpUpdateKind::kWithdraw;
      if (announce) u.as_path = beacon_path;
      updates.push_back(std::move(u));
    }
    announce = !announce;
  }
  return updates;
}

std::vector<AsSwap> detect_as_swap(const InternetStateSeries& series, const Periodicity& p) {
  std::vector<AsSwap> swaps;
  for (std::size_t peer = 0; peer < series.peers.size(); ++peer) {
    // Distinct reachable paths this peer takes across the pattern states.
    std::set<std::uint32_t> path_ids;
    for (const Symbol sym : p.pattern) {
      if (sym == kMissing) continue;
      const std::uint32_t state = series.state_by_symbol.at(sym).at(peer);
      if (state != 0) path_ids.insert(state);
    }
    std::vector<std::set<std::pair<std::uint32_t, std::uint32_t>>> adjacency;
    for (const std::uint32_t id : path_ids) {
      const auto& path = series.paths_by_peer[peer][id - 1];
      auto& adj = adjacency.emplace_back();
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        adj.emplace(path[i], path[i + 1]);
      }
    }
    // The swapped pair must come from two different states.
    std::set<std::pair<std::uint32_t, std::uint32_t>> reported;
    for (std::size_t q = 0; q < adjacency.size(); ++q) {
      for (std::size_t r = 0; r < adjacency.size(); ++r) {
        if (q == r) continue;
        for (const auto& [u, v] : adjacency[q]) {
          if (u == v || !adjacency[r].contains({v, u})) continue;
          const auto key = std::minmax(u, v);
          if (reported.insert(key).second) {
            swaps.push_back({series.peers[peer], key.first, key.second});
          }
        }
      }
    }
  }
  return swaps;
}

}  // namespace netperiod
