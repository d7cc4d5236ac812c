#pragma once
// Periodicity detection over symbol series: autocorrelation, peak
// detection, peak clustering, and characterization of candidate periods
// by tolerant window matching. Generic over the slot match operator so
// relaxed comparisons (e.g. near-coincident routing states) plug in.

#include <cstdint>
#include <optional>
#include <vector>

#include "netperiod/series.hpp"

namespace netperiod {

struct DetectorConfig {
  // Lag range of the autocorrelation, as a fraction of series length.
  double max_lag_fraction = 1.0 / 3.0;
  // Floor on the normalized autocorrelation height for peak eligibility.
  double peak_threshold = 0.075;
  // Height tolerance for single-linkage grouping of peaks.
  double cluster_y_tolerance = 0.15;
  // Maximum coefficient of variation of inter-peak gaps in a regular cluster.
  double gap_cv_threshold = 0.10;
  // Fraction of a cluster's peaks that may be discarded as outliers.
  double max_outlier_fraction = 0.20;
  // Minimum number of repetitions a periodic interval must contain.
  std::uint32_t min_repetitions = 3;
  // Matching tolerance rule: below this period the tolerance is fixed at 1,
  // otherwise it is tolerance_fraction of the period.
  std::uint32_t tolerance_threshold = 5;
  double tolerance_fraction = 0.10;

  void validate() const;  // throws std::invalid_argument
};

class AcfProfile {
 public:
  AcfProfile() = default;
  AcfProfile(std::size_t series_len, std::vector<std::uint64_t> raw);

  std::uint32_t max_lag() const { return static_cast<std::uint32_t>(raw_.size()) - 1; }
  std::size_t series_len() const { return series_len_; }
  std::uint64_t raw_count(std::uint32_t lag) const { return raw_.at(lag); }
  double normalized(std::uint32_t lag) const { return normalized_.at(lag); }

 private:
  std::size_t series_len_ = 0;
  std::vector<std::uint64_t> raw_{0};   // index = lag, [0] unused
  std::vector<double> normalized_{0.0};
};

struct Peak {
  std::uint32_t lag = 0;
  double height = 0.0;  // normalized ACF value, in (0, 1]
};

struct PeakCluster {
  std::vector<Peak> peaks;  // ordered by lag
  std::optional<std::uint32_t> candidate_period;
  std::uint32_t discarded_outliers = 0;
};

// Binary predicate over two non-missing slot symbols. Symmetric.
// Missing slots are handled by the callers: MISSING matches nothing.
class MatchOperator {
 public:
  virtual ~MatchOperator() = default;
  virtual bool matches(Symbol a, Symbol b) const = 0;
  // True when matches() is plain id equality; enables the tight ACF loop.
  virtual bool is_identity() const { return false; }
};

class ExactMatch final : public MatchOperator {
 public:
  bool matches(Symbol a, Symbol b) const override { return a == b; }
  bool is_identity() const override { return true; }
};

inline bool slots_match(const MatchOperator& op, Symbol a, Symbol b) {
  return a != kMissing && b != kMissing && op.matches(a, b);
}

AcfProfile autocorrelate(const SymbolSeries& series, const MatchOperator& match,
                         std::uint32_t max_lag);

// Strict local maxima of the normalized profile with height >= threshold;
// boundary lags use the one available neighbor.
std::vector<Peak> detect_peaks(const AcfProfile& acf, double threshold);

// Groups peaks (sorted by lag) into clusters of similar height via
// single-linkage, then splits each height group into trains of roughly
// evenly spaced lags, anchored at the train's smallest lag. A peak may
// appear in more than one train when their lags alias; peaks in no train
// are emitted as singleton clusters.
std::vector<PeakCluster> cluster_peaks(const std::vector<Peak>& peaks, double y_tolerance);

// Fills in candidate_period when the cluster's inter-peak gaps are regular
// (coefficient of variation <= cv_threshold), possibly after discarding up
// to max_outlier_fraction of the peaks. Rejection leaves it empty.
PeakCluster regularize_cluster(PeakCluster cluster, double cv_threshold,
                               double max_outlier_fraction);

// Matching tolerance for a given period.
std::uint32_t tolerance_for(std::uint32_t period, const DetectorConfig& config = {});

// Splits the series into windows of `period` slots and glues maximal runs
// of consecutive windows whose pairwise Hamming distance stays within
// `tolerance`. All window alignments are tried; the one yielding the
// longest run wins, and every run of at least min_repetitions windows at
// that alignment becomes a Periodicity.
std::vector<Periodicity> characterize(const SymbolSeries& series, std::uint32_t period,
                                      const MatchOperator& match, std::uint32_t tolerance,
                                      std::uint32_t min_repetitions);

// Drops periodicities whose period is an integer multiple of another
// overlapping periodicity when the longer pattern is exactly a
// concatenation of the shorter one.
std::vector<Periodicity> suppress_harmonics(std::vector<Periodicity> periodicities,
                                            const MatchOperator& match);

// Full pipeline. Returns periodicities sorted by (start_slot, period).
std::vector<Periodicity> detect(const SymbolSeries& series, const DetectorConfig& config = {},
                                const MatchOperator* match = nullptr);

}  // namespace netperiod
