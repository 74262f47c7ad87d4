#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lmexp {

/// Declarative description of one experiment sweep. Exactly one of `eps`
/// or `p` must be set; with `eps` the edge probability becomes
/// (1+eps) d log(n) / n per point, clamped to 1 for tiny n.
struct ExperimentConfig {
  std::vector<int> n_values;
  int d = 2;
  std::optional<double> eps;
  std::optional<double> p;
  int samples = 1;
  std::uint64_t master_seed = 0;
  double gamma = 0.0;
  std::vector<std::string> measurements = {"delta"};  ///< subset of
  /// {delta, lambda, h, phi, garland, linkspec}
  double band_constant = 3.0;
  std::int64_t phi_trials = 200;
};

/// One sampled complex; absent optionals mean the measurement was not
/// requested or was skipped by a size guard.
struct SampleRow {
  int n = 0;
  int sample_index = 0;
  std::uint64_t seed = 0;
  std::optional<double> delta;
  std::optional<double> lambda;
  std::optional<double> h;
  std::optional<double> phi;
  std::optional<double> garland_residual;
  std::optional<double> link_lambda2;
  double wall_seconds = 0;  ///< measured, never exported
};

struct Aggregate {
  int n = 0;
  std::string measurement;
  std::int64_t count = 0;
  double mean = 0, stddev = 0, min = 0, max = 0;
};

/// Full experiment outcome: per-sample rows sorted by (n, sample index),
/// per-(n, measurement) aggregates, prediction overlays in eps mode, and
/// inequality-violation counters.
struct Report {
  ExperimentConfig config;
  std::vector<SampleRow> rows;
  std::vector<Aggregate> aggregates;
  std::map<int, double> center;  ///< predicted location of delta, eps mode only
  std::map<int, double> band;    ///< prediction halfwidth, eps mode only
  std::int64_t lambda_h_violations = 0;        ///< lambda > h + 1e-8
  std::int64_t lambda_codegree_violations = 0; ///< lambda > n delta/(n-d) + 1e-8
  std::vector<std::string> notes;              ///< size-guard skips and clamps
};

enum class ExportFormat { csv, json };

/// Edge probability for one sweep point, clamped into [0, 1].
double resolve_edge_probability(int n, int d, double eps);

/// Runs every (n, sample) cell on the worker pool. Sample seeds derive from
/// (master_seed, n, sample_index) only, so results are reproducible and
/// independent of the worker count. Oversized exact measurements are skipped
/// per sample with a note; the run continues.
Report run_experiment(const ExperimentConfig& config);

/// Writes the report; returns the path. CSV rows follow the fixed header
/// "n,seed,delta,lambda,h,phi,center,band" with empty cells for absent
/// values. JSON mirrors the Report (wall times excluded). Both formats are
/// byte-identical across reruns of the same config.
std::string export_report(const Report& report, ExportFormat format,
                          const std::string& path);

/// Reads back a JSON export; aggregates round-trip bit-for-bit.
Report import_report(const std::string& path);

/// Writes one gnuplot-style series file per measured quantity into the
/// directory: columns n, mean, stddev, center, band (nan outside eps mode).
/// Returns the written paths; requires at least one aggregate.
std::vector<std::string> emit_plot_data(const Report& report,
                                        const std::string& directory);

/// Parses an ExperimentConfig from a JSON file with matching field names.
ExperimentConfig read_config_json(const std::string& path);

}  // namespace lmexp
