// Command-line front end: generate complexes, measure spectra / expansion /
// conductance, run walks, print predictions, and drive experiment sweeps.
// Exit codes: 0 success, 1 usage or runtime error, 2 deterministic-invariant
// violation detected during an experiment.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmexp/asymptotics.hpp"
#include "lmexp/cheeger.hpp"
#include "lmexp/complex.hpp"
#include "lmexp/harness.hpp"
#include "lmexp/homology.hpp"
#include "lmexp/rng.hpp"
#include "lmexp/walk.hpp"

namespace {

using namespace lmexp;

struct determinism_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenOpts {
  int n = 10;
  int d = 2;
  std::optional<double> p;
  std::optional<double> eps;
  std::uint64_t seed = 0;
  std::string in;
};

// Attach the shared generation flags to a subcommand.
void add_gen_options(CLI::App* cmd, GenOpts& opts, bool with_input) {
  cmd->add_option("--n", opts.n, "number of vertices");
  cmd->add_option("--d", opts.d, "dimension of the top faces")->check(CLI::PositiveNumber);
  auto* p = cmd->add_option("--p", opts.p, "face probability in [0,1]");
  auto* eps = cmd->add_option("--eps", opts.eps,
                              "density parameter: p = (1+eps) d log(n)/n");
  p->excludes(eps);
  eps->excludes(p);
  cmd->add_option("--seed", opts.seed, "generation seed");
  if (with_input)
    cmd->add_option("--in", opts.in, "read the complex from a JSON file instead");
}

Complex make_complex(const GenOpts& opts) {
  if (!opts.in.empty()) return read_complex_json_file(opts.in);
  if (opts.p.has_value() == opts.eps.has_value())
    throw std::invalid_argument("set exactly one of --p or --eps (or --in)");
  const double p = opts.p ? *opts.p
                          : resolve_edge_probability(opts.n, opts.d, *opts.eps);
  return Complex::generate(opts.n, opts.d, p, opts.seed);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  if (!out.flush()) throw std::runtime_error("cannot write " + out_path);
}

Face parse_face(const std::string& text) {
  Face face;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) face.push_back(std::stoi(cell));
  if (face.empty()) throw std::invalid_argument("empty face: " + text);
  return face;
}

std::int64_t support_size(const Complex& y) {
  std::int64_t count = 0;
  for (std::int64_t r = 0; r < y.codim1_count(); ++r)
    if (y.codegree_by_rank(r) > 0) ++count;
  return count;
}

bool same_rows(const Report& a, const Report& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const SampleRow& x = a.rows[i];
    const SampleRow& y = b.rows[i];
    if (x.n != y.n || x.sample_index != y.sample_index || x.seed != y.seed ||
        x.delta != y.delta || x.lambda != y.lambda || x.h != y.h ||
        x.phi != y.phi || x.garland_residual != y.garland_residual ||
        x.link_lambda2 != y.link_lambda2)
      return false;
  }
  return true;
}

void run_experiment_command(const ExperimentConfig& config,
                            const std::string& out_prefix,
                            const std::string& format,
                            const std::string& plot_dir,
                            bool check_determinism) {
  const Report report = run_experiment(config);

  if (check_determinism) {
    // Replay serially; any divergence means a measurement leaked
    // thread-dependent state.
    const char* prior = std::getenv("LMEXP_WORKERS");
    const std::string saved = prior ? prior : "";
    setenv("LMEXP_WORKERS", "1", 1);
    const Report replay = run_experiment(config);
    if (prior)
      setenv("LMEXP_WORKERS", saved.c_str(), 1);
    else
      unsetenv("LMEXP_WORKERS");
    if (!same_rows(report, replay))
      throw determinism_violation(
          "replayed run diverged from the original results");
  }
  if (report.lambda_h_violations > 0)
    throw determinism_violation(
        "spectral gap exceeded the expansion constant on " +
        std::to_string(report.lambda_h_violations) + " sample(s)");

  if (format == "csv" || format == "both")
    std::cout << "wrote " << export_report(report, ExportFormat::csv, out_prefix + ".csv")
              << '\n';
  if (format == "json" || format == "both")
    std::cout << "wrote "
              << export_report(report, ExportFormat::json, out_prefix + ".json")
              << '\n';
  if (!plot_dir.empty())
    for (const std::string& path : emit_plot_data(report, plot_dir))
      std::cout << "wrote " << path << '\n';

  for (const Aggregate& agg : report.aggregates) {
    std::cout << "n=" << agg.n << " " << agg.measurement << ": mean "
              << agg.mean << " stddev " << agg.stddev << " min " << agg.min
              << " max " << agg.max << " (" << agg.count << " samples)\n";
  }
  for (const auto& [n, center] : report.center)
    std::cout << "n=" << n << " predicted center " << center << " band +-"
              << report.band.at(n) << '\n';
  for (const std::string& note : report.notes) std::cout << "note: " << note << '\n';
  std::cout << "violations: lambda<=h " << report.lambda_h_violations
            << ", lambda<=n*delta/(n-d) " << report.lambda_codegree_violations
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random d-dimensional simplicial complexes: spectra, expansion,"
               " walks, and experiment sweeps"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "sample a complex and write it as JSON");
  GenOpts gen_opts;
  std::string gen_out;
  add_gen_options(generate, gen_opts, false);
  generate->add_option("--out", gen_out, "output path (default stdout)");
  generate->callback([&] {
    const Complex y = make_complex(gen_opts);
    if (gen_out.empty()) {
      write_complex_json(y, std::cout);
    } else {
      write_complex_json_file(y, gen_out);
      std::cout << "wrote " << gen_out << '\n';
    }
  });

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "cycle-space spectral gap");
  GenOpts spec_opts;
  std::string spec_out;
  bool spec_iterative = false;
  add_gen_options(spectrum, spec_opts, true);
  spectrum->add_flag("--iterative", spec_iterative, "force the iterative eigensolver");
  spectrum->add_option("--out", spec_out, "output path (default stdout)");
  spectrum->callback([&] {
    SpectralOptions options;
    options.force_iterative = spec_iterative;
    emit(spectral_report_json(spectral_gap(make_complex(spec_opts), options)),
         spec_out);
  });

  // cheeger
  auto* cheeger = app.add_subcommand("cheeger", "exact expansion constant");
  GenOpts ch_opts;
  std::string ch_out;
  add_gen_options(cheeger, ch_opts, true);
  cheeger->add_option("--out", ch_out, "output path (default stdout)");
  cheeger->callback(
      [&] { emit(cheeger_result_json(cheeger_exact(make_complex(ch_opts))), ch_out); });

  // conductance
  auto* conductance = app.add_subcommand("conductance", "walk conductance");
  GenOpts co_opts;
  std::string co_out, co_method = "auto";
  std::int64_t co_samples = 200;
  add_gen_options(conductance, co_opts, true);
  conductance->add_option("--samples", co_samples, "estimator trials")
      ->check(CLI::PositiveNumber);
  conductance->add_option("--method", co_method, "exact, estimate, or auto")
      ->check(CLI::IsMember({"exact", "estimate", "auto"}));
  conductance->add_option("--out", co_out, "output path (default stdout)");
  conductance->callback([&] {
    const Complex y = make_complex(co_opts);
    std::string method = co_method;
    if (method == "auto") method = support_size(y) <= 25 ? "exact" : "estimate";
    const ConductanceResult result =
        method == "exact"
            ? conductance_exact(y)
            : conductance_estimate(y, co_samples, derive_seed(co_opts.seed, 1, 0));
    emit(conductance_report_json(result), co_out);
  });

  // walk
  auto* walk = app.add_subcommand("walk", "simulate the lazy face walk");
  GenOpts walk_opts;
  std::string walk_out, walk_start;
  double walk_gamma = 0.0;
  std::int64_t walk_steps = 1000;
  add_gen_options(walk, walk_opts, true);
  walk->add_option("--gamma", walk_gamma, "laziness in [0,1)");
  walk->add_option("--steps", walk_steps, "number of moves")
      ->check(CLI::NonNegativeNumber);
  walk->add_option("--start", walk_start,
                   "comma-separated start face (default: lowest-rank face)");
  walk->add_option("--out", walk_out, "output path (default stdout)");
  walk->callback([&] {
    const Complex y = make_complex(walk_opts);
    Face start;
    if (walk_start.empty()) {
      std::int64_t rank = -1;
      for (std::int64_t r = 0; r < y.codim1_count() && rank < 0; ++r)
        if (y.codegree_by_rank(r) > 0) rank = r;
      if (rank < 0) throw std::domain_error("no faces with positive co-degree");
      start = colex_unrank(rank, y.d());
    } else {
      start = parse_face(walk_start);
    }
    const TrajectoryStats stats =
        simulate(y, walk_gamma, start, walk_steps, derive_seed(walk_opts.seed, 2, 0));
    nlohmann::json j;
    j["support"] = stats.support;
    j["visits"] = stats.visits;
    j["tv"] = nlohmann::json::array();
    for (const auto& [step, tv] : stats.tv_checkpoints)
      j["tv"].push_back({step, tv});
    emit(j.dump(2), walk_out);
  });

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "asymptotic location of the gap");
  int pr_n = 100, pr_d = 2;
  double pr_eps = 1.0, pr_band = 3.0;
  std::string pr_out;
  predict_cmd->add_option("--n", pr_n)->required();
  predict_cmd->add_option("--d", pr_d)->check(CLI::PositiveNumber);
  predict_cmd->add_option("--eps", pr_eps)->required();
  predict_cmd->add_option("--band-c", pr_band, "band constant (reported, not fit)");
  predict_cmd->add_option("--out", pr_out, "output path (default stdout)");
  predict_cmd->callback(
      [&] { emit(prediction_json(predict(pr_n, pr_d, pr_eps, pr_band)), pr_out); });

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a sweep and export reports");
  std::string ex_config, ex_out = "experiment", ex_format = "both", ex_plots;
  std::vector<int> ex_n;
  int ex_d = 2, ex_samples = 1;
  std::optional<double> ex_p, ex_eps;
  std::uint64_t ex_seed = 0;
  double ex_gamma = 0.0, ex_band = 3.0;
  std::int64_t ex_phi_trials = 200;
  std::vector<std::string> ex_measurements = {"delta"};
  bool ex_check = false;
  auto* cfg_opt = experiment->add_option("--config", ex_config,
                                         "JSON config file (overrides inline flags)");
  auto* exn_opt = experiment->add_option("--n", ex_n, "sweep points (repeatable)");
  experiment->add_option("--d", ex_d)->check(CLI::PositiveNumber);
  auto* exp_opt = experiment->add_option("--p", ex_p, "fixed face probability");
  auto* exe_opt = experiment->add_option("--eps", ex_eps, "density parameter");
  exp_opt->excludes(exe_opt);
  exe_opt->excludes(exp_opt);
  cfg_opt->excludes(exn_opt);
  experiment->add_option("--samples", ex_samples, "samples per sweep point")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--seed", ex_seed, "master seed");
  experiment->add_option("--gamma", ex_gamma, "walk laziness");
  experiment->add_option("--measurements", ex_measurements,
                         "subset of delta lambda h phi garland linkspec");
  experiment->add_option("--band-c", ex_band, "prediction band constant");
  experiment->add_option("--phi-trials", ex_phi_trials, "conductance estimator trials");
  experiment->add_option("--out", ex_out, "output path prefix");
  experiment->add_option("--format", ex_format, "csv, json, or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  experiment->add_option("--plots", ex_plots, "directory for gnuplot series files");
  experiment->add_flag("--check-determinism", ex_check,
                       "replay serially and require identical results");
  experiment->callback([&] {
    ExperimentConfig config;
    if (!ex_config.empty()) {
      config = read_config_json(ex_config);
    } else {
      config.n_values = ex_n;
      config.d = ex_d;
      config.p = ex_p;
      config.eps = ex_eps;
      config.samples = ex_samples;
      config.master_seed = ex_seed;
      config.gamma = ex_gamma;
      config.measurements = ex_measurements;
      config.band_constant = ex_band;
      config.phi_trials = ex_phi_trials;
    }
    run_experiment_command(config, ex_out, ex_format, ex_plots, ex_check);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const determinism_violation& e) {
    std::cerr << "determinism violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
