#pragma once
// Per-prefix routing-state reconstruction from BGP update streams, the
// relaxed coincidence match over states, beacon synthesis, and detection
// of adjacent-AS swaps between pattern states.
//
// Update schema (JSON Lines): {"ts": int, "peer": str, "prefix": str,
// "type": "A"|"W", "as_path": [int, ...]}  (as_path on announces only)

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netperiod/detector.hpp"
#include "netperiod/series.hpp"
#include "netperiod/traceroute.hpp"  // ParseStats

namespace netperiod {

enum class BgpUpdateKind : std::uint8_t { kAnnounce, kWithdraw };

struct BgpUpdate {
  std::int64_t ts = 0;
  std::string peer;
  std::string prefix;
  BgpUpdateKind kind = BgpUpdateKind::kAnnounce;
  std::vector<std::uint32_t> as_path;  // announces only
};

// Updates for the given prefix, ordered by timestamp; file order is kept
// within a second so the later of two same-second updates wins the replay.
std::vector<BgpUpdate> parse_bgp_updates(std::istream& in, std::string_view prefix,
                                         ParseStats* stats = nullptr);

std::vector<std::string> peers_in(std::span<const BgpUpdate> updates);

// Per-peer routing state: 0 encodes UNREACHABLE, i >= 1 the (i-1)-th
// distinct AS-path observed for that peer.
using StateVector = std::vector<std::uint32_t>;

struct InternetStateSeries {
  std::string prefix;
  std::vector<std::string> peers;                        // fixed order
  std::vector<std::vector<std::vector<std::uint32_t>>> paths_by_peer;
  std::vector<StateVector> state_by_symbol;              // aligned with table ids
  SymbolSeries series;                                   // canonical state per slot
  std::size_t dropped_updates = 0;
};

InternetStateSeries build_state_series(
    std::span<const BgpUpdate> updates, std::vector<std::string> peers, std::int64_t t0,
    std::int64_t t1, std::int64_t step = 1,
    const std::map<std::string, std::vector<std::uint32_t>>* seed_paths = nullptr);

// 1 iff the fraction of peers in the same state (UNREACHABLE equal only to
// UNREACHABLE) reaches the threshold. Throws on mismatched peer sets.
bool state_match(const StateVector& a, const StateVector& b, double threshold);

class StateMatchOperator final : public MatchOperator {
 public:
  StateMatchOperator(const InternetStateSeries& series, double threshold)
      : series_(&series), threshold_(threshold) {}

  bool matches(Symbol a, Symbol b) const override {
    return state_match(series_->state_by_symbol.at(a), series_->state_by_symbol.at(b),
                       threshold_);
  }

 private:
  const InternetStateSeries* series_;
  double threshold_;
};

// Detector pipeline with the coincidence operator replacing exact symbol
// equality everywhere, window matching included.
std::vector<Periodicity> detect_state_periodicity(const InternetStateSeries& series,
                                                  const DetectorConfig& config,
                                                  double threshold);

// Announce/withdraw schedule with a two-hour half-period for every peer,
// covering [t0, t0 + duration] boundaries included.
std::vector<BgpUpdate> synth_beacon(std::string prefix, std::int64_t t0,
                                    std::int64_t duration_seconds,
                                    std::span<const std::string> peers);

struct AsSwap {
  std::string peer;
  std::uint32_t as_lower = 0;
  std::uint32_t as_higher = 0;
};

// AS pairs adjacent in one pattern state as u->v and in another as v->u,
// per peer: the signature of a routing dispute oscillating in the wild.
std::vector<AsSwap> detect_as_swap(const InternetStateSeries& series, const Periodicity& p);

}  // namespace netperiod
