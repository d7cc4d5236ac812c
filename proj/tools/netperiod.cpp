// netperiod: detect and characterize periodicities in symbolic series of
// network measurements (traceroute paths, per-prefix routing states),
// generate synthetic corpora with ground truth, and score detections.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netperiod/bgp.hpp"
#include "netperiod/detector.hpp"
#include "netperiod/evaluation.hpp"
#include "netperiod/generator.hpp"
#include "netperiod/jsonl.hpp"
#include "netperiod/parallel.hpp"
#include "netperiod/traceroute.hpp"

namespace {

using namespace netperiod;
using nlohmann::json;

// Thrown for bad configuration discovered after flag parsing; maps to the
// usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kExitSuccess = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open input file: " + path);
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  return out;
}

std::filesystem::path prepare_output_dir(const std::string& dir) {
  std::filesystem::path path(dir.empty() ? "." : dir);
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory: " + path.string());
  }
  return path;
}

std::vector<double> parse_noise_levels(const std::string& csv) {
  std::vector<double> levels;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    try {
      const double pct = std::stod(item);
      if (pct < 0.0) throw std::invalid_argument("negative");
      levels.push_back(pct / 100.0);
    } catch (const std::exception&) {
      throw UsageError("invalid --noise list: " + csv);
    }
  }
  if (levels.empty()) levels.push_back(0.0);
  return levels;
}

// Options shared by every detection-running command.
struct DetectorFlags {
  DetectorConfig config;
  unsigned workers = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--theta", config.peak_threshold,
                    "peak eligibility floor on the normalized autocorrelation");
    cmd->add_option("--eps-y", config.cluster_y_tolerance,
                    "height tolerance for peak clustering");
    cmd->add_option("--gap-cv", config.gap_cv_threshold,
                    "max coefficient of variation of inter-peak gaps");
    cmd->add_option("--min-reps", config.min_repetitions,
                    "minimum repetitions of a periodic interval");
    cmd->add_option("--max-lag-fraction", config.max_lag_fraction,
                    "autocorrelation depth as a fraction of series length");
    cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
  }

  void validate() const {
    try {
      config.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

void write_histogram_csv(const std::filesystem::path& path, const std::string& key_header,
                         const std::map<std::uint64_t, std::size_t>& histogram) {
  auto out = open_output(path);
  out << key_header << ",count\n";
  for (const auto& [key, count] : histogram) {
    out << key << ',' << count << '\n';
  }
}

struct DetectionSink {
  std::ofstream records;
  std::ofstream summary;
  std::size_t series_seen = 0;
  std::size_t series_with_periodicity = 0;
  std::size_t periodicities = 0;
  std::map<std::uint64_t, std::size_t> by_pattern_paths;
  std::map<std::uint64_t, std::size_t> by_repetitions;
  std::map<std::uint64_t, std::size_t> by_pattern_length;
  std::map<std::uint64_t, std::size_t> by_duration;

  explicit DetectionSink(const std::filesystem::path& dir)
      : records(open_output(dir / "periodicities.jsonl")),
        summary(open_output(dir / "summary.csv")) {
    summary << "series_id,slots,missing_slots,distinct_values,occurrence_stddev,"
               "periodicities\n";
  }

  void add_series(const SymbolSeries& series, const std::vector<Periodicity>& found,
                  const std::vector<std::string>& extra_record_fields = {}) {
    ++series_seen;
    if (!found.empty()) ++series_with_periodicity;
    std::size_t missing = 0;
    for (const Symbol s : series.slots) {
      if (s == kMissing) ++missing;
    }
    const PairStats stats = pair_stats(series);
    summary << series.series_id << ',' << series.size() << ',' << missing << ','
            << stats.distinct_paths << ',' << stats.occurrence_stddev << ',' << found.size()
            << '\n';
    for (std::size_t i = 0; i < found.size(); ++i) {
      const Periodicity& p = found[i];
      ++periodicities;
      std::set<Symbol> distinct;
      for (const Symbol s : p.pattern) {
        if (s != kMissing) distinct.insert(s);
      }
      ++by_pattern_paths[distinct.size()];
      ++by_repetitions[p.repetitions];
      ++by_pattern_length[p.period_slots];
      ++by_duration[static_cast<std::uint64_t>(p.end_slot - p.start_slot) *
                    static_cast<std::uint64_t>(series.step)];
      std::string line = periodicity_to_json_line(p, series);
      if (i < extra_record_fields.size() && !extra_record_fields[i].empty()) {
        // Splice extra fields into the record object.
        json obj = json::parse(line);
        const json extra = json::parse(extra_record_fields[i]);
        obj.update(extra);
        line = obj.dump();
      }
      records << line << '\n';
    }
  }

  void finish(const std::filesystem::path& dir) {
    write_histogram_csv(dir / "distribution_pattern_paths.csv", "distinct_paths",
                        by_pattern_paths);
    write_histogram_csv(dir / "distribution_repetitions.csv", "repetitions", by_repetitions);
    write_histogram_csv(dir / "distribution_pattern_length.csv", "pattern_length_slots",
                        by_pattern_length);
    write_histogram_csv(dir / "distribution_duration.csv", "duration_seconds", by_duration);
    std::cout << "series analyzed: " << series_seen
              << ", with periodicities: " << series_with_periodicity
              << ", periodicities: " << periodicities << '\n';
  }
};

std::string attribution_extra(const ParisReport& report,
                              const SymbolSeries& series) {
  json extra;
  switch (report.status) {
    case ParisAttribution::kUnknown:
      extra["paris_attribution"] = "unknown";
      break;
    case ParisAttribution::kNotAttributed:
      extra["paris_attribution"] = "not_attributed";
      break;
    case ParisAttribution::kAttributed:
      extra["paris_attribution"] = "attributed";
      break;
  }
  json assoc = json::array();
  for (const auto& [id, path] : report.associations) {
    assoc.push_back({{"paris_id", id}, {"path", std::string(series.table.lookup(path))}});
  }
  extra["paris_associations"] = std::move(assoc);
  extra["all_pattern_paths_locked"] = report.all_pattern_paths_locked;
  return extra.dump();
}

int cmd_generate(const GeneratorConfig& config, const std::string& output) {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto dir = prepare_output_dir(output);
  const Corpus corpus = generate(config);
  auto series_out = open_output(dir / "series.jsonl");
  write_series_jsonl(series_out, corpus.series);
  auto truth_out = open_output(dir / "truth.jsonl");
  write_truth_jsonl(truth_out, corpus);
  std::size_t planted = 0;
  for (const auto& truth : corpus.truth) planted += truth.planted.size();
  std::cout << "series: " << corpus.series.size() << ", planted periodicities: " << planted
            << '\n';
  return kExitSuccess;
}

int cmd_detect_series(const std::string& input, const std::string& output,
                      const DetectorFlags& flags) {
  auto in = open_input(input);
  std::size_t malformed = 0;
  const auto series = read_series_jsonl(in, &malformed);
  const auto dir = prepare_output_dir(output);
  std::vector<std::vector<Periodicity>> found(series.size());
  parallel_for(series.size(), flags.workers,
               [&](std::size_t i) { found[i] = detect(series[i], flags.config); });
  DetectionSink sink(dir);
  for (std::size_t i = 0; i < series.size(); ++i) {
    sink.add_series(series[i], found[i]);
  }
  sink.finish(dir);
  if (malformed > 0) {
    std::cerr << "skipped " << malformed << " malformed series line(s)\n";
  }
  return kExitSuccess;
}

int cmd_detect_traceroute(const std::string& input, const std::string& output,
                          bool atlas_format, bool paris, std::int64_t start_ts,
                          std::int64_t end_ts, std::int64_t step,
                          const DetectorFlags& flags) {
  auto in = open_input(input);
  ParseStats stats;
  const auto records =
      atlas_format ? parse_atlas_results(in, &stats) : parse_traceroute_records(in, &stats);
  if (records.empty()) {
    throw std::runtime_error("no well-formed traceroute records in " + input);
  }
  if (end_ts == 0) {
    std::int64_t lo = records.front().ts;
    std::int64_t hi = records.front().ts;
    for (const auto& r : records) {
      lo = std::min(lo, r.ts);
      hi = std::max(hi, r.ts);
    }
    if (start_ts == 0) start_ts = lo - (lo % step + step) % step;
    end_ts = hi + 1;
  }
  const auto pairs = group_pairs(records, start_ts, end_ts, step);
  const auto dir = prepare_output_dir(output);
  std::vector<std::vector<Periodicity>> found(pairs.size());
  parallel_for(pairs.size(), flags.workers,
               [&](std::size_t i) { found[i] = detect(pairs[i].series, flags.config); });
  DetectionSink sink(dir);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<std::string> extras;
    if (paris) {
      for (const Periodicity& p : found[i]) {
        extras.push_back(attribution_extra(paris_attribution(pairs[i], p), pairs[i].series));
      }
    }
    sink.add_series(pairs[i].series, found[i], extras);
  }
  sink.finish(dir);
  if (stats.malformed > 0) {
    std::cerr << "skipped " << stats.malformed << " malformed record(s)\n";
  }
  return kExitSuccess;
}

int cmd_detect_bgp(const std::string& input, const std::string& output,
                   const std::string& prefix, double state_threshold, std::int64_t step,
                   const DetectorFlags& flags) {
  if (prefix.empty()) {
    throw UsageError("--prefix is required with --bgp");
  }
  if (state_threshold <= 0.0 || state_threshold > 1.0) {
    throw UsageError("--state-threshold must be in (0, 1]");
  }
  auto in = open_input(input);
  ParseStats stats;
  const auto updates = parse_bgp_updates(in, prefix, &stats);
  if (updates.empty()) {
    throw std::runtime_error("no updates for prefix " + prefix + " in " + input);
  }
  const auto peers = peers_in(updates);
  const std::int64_t t0 = updates.front().ts;
  const std::int64_t t1 = updates.back().ts + 1;
  auto state_series = build_state_series(updates, peers, t0, t1, step);
  state_series.prefix = prefix;
  state_series.series.series_id = prefix;
  const auto found = detect_state_periodicity(state_series, flags.config, state_threshold);
  const auto dir = prepare_output_dir(output);
  DetectionSink sink(dir);
  sink.add_series(state_series.series, found);
  auto swaps_out = open_output(dir / "as_swaps.csv");
  swaps_out << "prefix,peer,as_a,as_b\n";
  for (const Periodicity& p : found) {
    for (const AsSwap& swap : detect_as_swap(state_series, p)) {
      swaps_out << prefix << ',' << swap.peer << ',' << swap.as_lower << ','
                << swap.as_higher << '\n';
    }
  }
  sink.finish(dir);
  if (stats.malformed > 0) {
    std::cerr << "skipped " << stats.malformed << " malformed update(s)\n";
  }
  return kExitSuccess;
}

int cmd_evaluate(const std::string& input, const std::string& truth_path,
                 const std::string& output, const std::string& noise_csv,
                 std::uint64_t noise_seed, double overlap, const DetectorFlags& flags) {
  auto series_in = open_input(input);
  Corpus corpus;
  corpus.series = read_series_jsonl(series_in);
  auto truth_in = open_input(truth_path);
  corpus.truth = read_truth_jsonl(truth_in, corpus.series);
  EvalOptions options;
  options.noise_levels = parse_noise_levels(noise_csv);
  options.noise_seed = noise_seed;
  options.overlap_threshold = overlap;
  options.workers = flags.workers;
  const EvalReport report = evaluate(corpus, flags.config, options);
  const auto dir = prepare_output_dir(output);
  auto report_out = open_output(dir / "report.json");
  write_report_json(report_out, report);
  auto fn_period = open_output(dir / "fn_by_period_length.csv");
  write_fn_by_period_csv(fn_period, report);
  auto fn_reps = open_output(dir / "fn_by_repetitions.csv");
  write_fn_by_repetitions_csv(fn_reps, report);
  auto sweep = open_output(dir / "noise_sweep.csv");
  write_noise_sweep_csv(sweep, report);
  for (const NoiseRow& row : report.sweep) {
    std::cout << "noise " << row.noise_fraction * 100.0 << "%: found_rate "
              << row.found_rate << ", fp_rate " << row.false_positive_rate
              << ", characterization " << row.characterization_accuracy << '\n';
  }
  return kExitSuccess;
}

int cmd_ingest_traceroute(const std::string& input, const std::string& output,
                          bool atlas_format, std::int64_t start_ts, std::int64_t end_ts,
                          std::int64_t step) {
  auto in = open_input(input);
  ParseStats stats;
  const auto records =
      atlas_format ? parse_atlas_results(in, &stats) : parse_traceroute_records(in, &stats);
  if (records.empty()) {
    throw std::runtime_error("no well-formed traceroute records in " + input);
  }
  if (end_ts == 0) {
    std::int64_t lo = records.front().ts;
    std::int64_t hi = records.front().ts;
    for (const auto& r : records) {
      lo = std::min(lo, r.ts);
      hi = std::max(hi, r.ts);
    }
    if (start_ts == 0) start_ts = lo - (lo % step + step) % step;
    end_ts = hi + 1;
  }
  const auto pairs = group_pairs(records, start_ts, end_ts, step);
  const auto dir = prepare_output_dir(output);
  auto series_out = open_output(dir / "series.jsonl");
  auto paris_out = open_output(dir / "paris.jsonl");
  auto stats_out = open_output(dir / "pair_stats.csv");
  stats_out << "series_id,slots,distinct_paths,occurrence_stddev,duplicates,dropped\n";
  for (const auto& pair : pairs) {
    series_out << series_to_json_line(pair.series) << '\n';
    json paris_row = {{"series_id", pair.series.series_id}, {"paris", json::array()}};
    for (const auto& annotation : pair.paris) {
      if (annotation) {
        paris_row["paris"].push_back(*annotation);
      } else {
        paris_row["paris"].push_back(nullptr);
      }
    }
    paris_out << paris_row.dump() << '\n';
    const PairStats ps = pair_stats(pair.series);
    stats_out << pair.series.series_id << ',' << pair.series.size() << ','
              << ps.distinct_paths << ',' << ps.occurrence_stddev << ','
              << pair.build_stats.duplicate_records << ',' << pair.build_stats.dropped_records
              << '\n';
  }
  std::cout << "pairs: " << pairs.size() << ", records: " << records.size()
            << ", malformed: " << stats.malformed << '\n';
  return kExitSuccess;
}

int cmd_ingest_bgp(const std::string& input, const std::string& output,
                   const std::string& prefix, std::int64_t step) {
  if (prefix.empty()) {
    throw UsageError("--prefix is required");
  }
  auto in = open_input(input);
  ParseStats stats;
  const auto updates = parse_bgp_updates(in, prefix, &stats);
  if (updates.empty()) {
    throw std::runtime_error("no updates for prefix " + prefix + " in " + input);
  }
  const auto peers = peers_in(updates);
  auto state_series =
      build_state_series(updates, peers, updates.front().ts, updates.back().ts + 1, step);
  state_series.prefix = prefix;
  state_series.series.series_id = prefix;
  const auto dir = prepare_output_dir(output);
  auto series_out = open_output(dir / "series.jsonl");
  series_out << series_to_json_line(state_series.series) << '\n';
  auto peers_out = open_output(dir / "peers.txt");
  for (const auto& peer : state_series.peers) peers_out << peer << '\n';
  std::cout << "prefix " << prefix << ": " << updates.size() << " updates, "
            << state_series.peers.size() << " peers, " << state_series.series.size()
            << " slots\n";
  return kExitSuccess;
}

int cmd_beacon(const std::string& output, const std::string& prefix, std::int64_t start_ts,
               std::int64_t hours, std::size_t peer_count) {
  if (hours < 4) {
    throw UsageError("--hours must be at least 4 (one full beacon cycle)");
  }
  std::vector<std::string> peers;
  for (std::size_t i = 0; i < peer_count; ++i) {
    std::string id = std::to_string(i);
    if (id.size() < 2) id.insert(0, 2 - id.size(), '0');
    peers.push_back("peer-" + id);
  }
  const auto updates = synth_beacon(prefix, start_ts, hours * 3600, peers);
  std::ofstream out(output);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + output);
  }
  for (const auto& u : updates) {
    json record = {{"ts", u.ts},
                   {"peer", u.peer},
                   {"prefix", u.prefix},
                   {"type", u.kind == BgpUpdateKind::kAnnounce ? "A" : "W"}};
    if (u.kind == BgpUpdateKind::kAnnounce) record["as_path"] = u.as_path;
    out << record.dump() << '\n';
  }
  std::cout << "beacon updates: " << updates.size() << '\n';
  return kExitSuccess;
}

// Fills options the user did not pass on the command line from a JSON
// config file; explicit flags always win.
void apply_config_file(CLI::App& app, const std::string& path) {
  auto in = open_input(path);
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }
  if (!config.is_object()) {
    throw UsageError("config file: expected a JSON object");
  }
  for (const auto& [key, value] : config.items()) {
    bool known = false;
    for (CLI::App* cmd : app.get_subcommands({})) {
      CLI::Option* opt = cmd->get_option_no_throw("--" + key);
      if (opt == nullptr) continue;
      known = true;
      if (opt->count() > 0) continue;  // flags win
      if (value.is_boolean()) {
        if (value.get<bool>()) opt->add_result("true");
      } else if (value.is_string()) {
        opt->add_result(value.get<std::string>());
      } else {
        opt->add_result(value.dump());
      }
    }
    if (!known) {
      throw UsageError("config file: unknown option \"" + key + "\"");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodicity detection for network measurement series"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option defaults; flags win");

  GeneratorConfig gen;
  std::string gen_output = "out";
  auto* generate_cmd = app.add_subcommand("generate", "generate a synthetic corpus");
  generate_cmd->add_option("--series", gen.series_count, "number of series");
  generate_cmd->add_option("--slots", gen.slots_per_series, "slots per series");
  generate_cmd->add_option("--alphabet", gen.alphabet_size, "alphabet size");
  generate_cmd->add_option("--period-min", gen.period_min, "smallest planted period");
  generate_cmd->add_option("--period-max", gen.period_max, "largest planted period");
  generate_cmd->add_option("--reps-min", gen.repetitions_min, "fewest pattern repetitions");
  generate_cmd->add_option("--reps-max", gen.repetitions_max, "most pattern repetitions");
  generate_cmd->add_option("--step", gen.step_seconds, "seconds per slot");
  generate_cmd->add_option("--seed", gen.seed, "generator seed");
  generate_cmd->add_option("--output", gen_output, "output directory");

  DetectorFlags detect_flags;
  std::string detect_input;
  std::string detect_output = "out";
  bool detect_traceroute = false;
  bool detect_bgp = false;
  bool detect_atlas = false;
  bool detect_paris = false;
  std::string detect_prefix;
  double state_threshold = 0.95;
  std::int64_t detect_step = 900;
  std::int64_t detect_start = 0;
  std::int64_t detect_end = 0;
  auto* detect_cmd = app.add_subcommand("detect", "detect periodicities");
  detect_cmd->add_option("--input", detect_input, "input file")->required();
  detect_cmd->add_option("--output", detect_output, "output directory");
  detect_cmd->add_flag("--traceroute", detect_traceroute,
                       "input is traceroute records, not series");
  detect_cmd->add_flag("--bgp", detect_bgp, "input is BGP updates, not series");
  detect_cmd->add_flag("--atlas", detect_atlas,
                       "traceroute records use the public archive result format");
  detect_cmd->add_flag("--paris", detect_paris, "annotate detections with paris attribution");
  detect_cmd->add_option("--prefix", detect_prefix, "prefix to analyze (BGP input)");
  detect_cmd->add_option("--state-threshold", state_threshold,
                         "coincidence fraction for state matching (BGP input)");
  detect_cmd->add_option("--step", detect_step, "seconds per slot (traceroute/BGP input)");
  detect_cmd->add_option("--start-ts", detect_start, "grid start (traceroute input)");
  detect_cmd->add_option("--end-ts", detect_end, "grid end, exclusive (traceroute input)");
  detect_flags.attach(detect_cmd);

  std::string eval_input;
  std::string eval_truth;
  std::string eval_output = "out";
  std::string eval_noise = "0";
  std::uint64_t eval_seed = 7;
  double eval_overlap = 0.5;
  DetectorFlags eval_flags;
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "score detections against planted ground truth");
  evaluate_cmd->add_option("--input", eval_input, "series JSONL")->required();
  evaluate_cmd->add_option("--truth", eval_truth, "ground-truth JSONL")->required();
  evaluate_cmd->add_option("--output", eval_output, "output directory");
  evaluate_cmd->add_option("--noise", eval_noise, "comma-separated noise percentages");
  evaluate_cmd->add_option("--seed", eval_seed, "noise seed");
  evaluate_cmd->add_option("--overlap", eval_overlap, "matching overlap threshold");
  eval_flags.attach(evaluate_cmd);

  std::string ingest_tr_input;
  std::string ingest_tr_output = "out";
  bool ingest_tr_atlas = false;
  std::int64_t ingest_tr_step = 900;
  std::int64_t ingest_tr_start = 0;
  std::int64_t ingest_tr_end = 0;
  auto* ingest_tr_cmd =
      app.add_subcommand("ingest-traceroute", "build per-pair series from traceroute records");
  ingest_tr_cmd->add_option("--input", ingest_tr_input, "records JSONL")->required();
  ingest_tr_cmd->add_option("--output", ingest_tr_output, "output directory");
  ingest_tr_cmd->add_flag("--atlas", ingest_tr_atlas,
                          "records use the public archive result format");
  ingest_tr_cmd->add_option("--step", ingest_tr_step, "seconds per slot");
  ingest_tr_cmd->add_option("--start-ts", ingest_tr_start, "grid start");
  ingest_tr_cmd->add_option("--end-ts", ingest_tr_end, "grid end, exclusive");

  std::string ingest_bgp_input;
  std::string ingest_bgp_output = "out";
  std::string ingest_bgp_prefix;
  std::int64_t ingest_bgp_step = 1;
  auto* ingest_bgp_cmd =
      app.add_subcommand("ingest-bgp", "build the per-prefix state series from BGP updates");
  ingest_bgp_cmd->add_option("--input", ingest_bgp_input, "updates JSONL")->required();
  ingest_bgp_cmd->add_option("--output", ingest_bgp_output, "output directory");
  ingest_bgp_cmd->add_option("--prefix", ingest_bgp_prefix, "prefix to reconstruct");
  ingest_bgp_cmd->add_option("--step", ingest_bgp_step, "seconds per slot");

  std::string beacon_output = "beacon.jsonl";
  std::string beacon_prefix = "192.0.2.0/24";
  std::int64_t beacon_start = 0;
  std::int64_t beacon_hours = 24;
  std::size_t beacon_peers = 20;
  auto* beacon_cmd =
      app.add_subcommand("beacon", "synthesize a beacon announce/withdraw update stream");
  beacon_cmd->add_option("--output", beacon_output, "output JSONL file");
  beacon_cmd->add_option("--prefix", beacon_prefix, "beacon prefix");
  beacon_cmd->add_option("--start-ts", beacon_start, "first announcement time");
  beacon_cmd->add_option("--hours", beacon_hours, "stream duration in hours");
  beacon_cmd->add_option("--peers", beacon_peers, "number of collector peers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (!config_path.empty()) {
      apply_config_file(app, config_path);
    }
    if (generate_cmd->parsed()) {
      return cmd_generate(gen, gen_output);
    }
    if (detect_cmd->parsed()) {
      detect_flags.validate();
      if (detect_traceroute && detect_bgp) {
        throw UsageError("--traceroute and --bgp are mutually exclusive");
      }
      if (detect_bgp) {
        const std::int64_t step = detect_cmd->count("--step") > 0 ? detect_step : 1;
        return cmd_detect_bgp(detect_input, detect_output, detect_prefix, state_threshold,
                              step, detect_flags);
      }
      if (detect_traceroute) {
        return cmd_detect_traceroute(detect_input, detect_output, detect_atlas, detect_paris,
                                     detect_start, detect_end, detect_step, detect_flags);
      }
      return cmd_detect_series(detect_input, detect_output, detect_flags);
    }
    if (evaluate_cmd->parsed()) {
      eval_flags.validate();
      return cmd_evaluate(eval_input, eval_truth, eval_output, eval_noise, eval_seed,
                          eval_overlap, eval_flags);
    }
    if (ingest_tr_cmd->parsed()) {
      return cmd_ingest_traceroute(ingest_tr_input, ingest_tr_output, ingest_tr_atlas,
                                   ingest_tr_start, ingest_tr_end, ingest_tr_step);
    }
    if (ingest_bgp_cmd->parsed()) {
      return cmd_ingest_bgp(ingest_bgp_input, ingest_bgp_output, ingest_bgp_prefix,
                            ingest_bgp_step);
    }
    if (beacon_cmd->parsed()) {
      return cmd_beacon(beacon_output, beacon_prefix, beacon_start, beacon_hours,
                        beacon_peers);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitSuccess;
}
