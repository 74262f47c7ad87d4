#include "lmexp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include <Eigen/Dense>

#include "lmexp/asymptotics.hpp"
#include "lmexp/cheeger.hpp"
#include "lmexp/combinatorics.hpp"
#include "lmexp/complex.hpp"
#include "lmexp/homology.hpp"
#include "lmexp/parallel.hpp"
#include "lmexp/rng.hpp"
#include "lmexp/walk.hpp"

namespace lmexp {
namespace {

using nlohmann::json;

const std::vector<std::string>& canonical_measurements() {
  static const std::vector<std::string> names = {"delta", "lambda", "h",
                                                 "phi",   "garland", "linkspec"};
  return names;
}

// Cost guards for per-sample measurements; oversized cells are skipped with a
// note instead of failing the run.
constexpr std::int64_t spectral_size_cap = 6000;     // (d-1)-faces for lambda
constexpr std::int64_t garland_size_cap = 20000;     // (d-1)-faces for residuals
constexpr double linkspec_cost_cap = 2e9;            // links * cube of link size
constexpr double violation_tol = 1e-8;

struct MeasurementSet {
  bool delta = false, lambda = false, h = false, phi = false;
  bool garland = false, linkspec = false;
};

MeasurementSet parse_measurements(const std::vector<std::string>& names) {
  MeasurementSet set;
  for (const auto& name : names) {
    if (name == "delta") set.delta = true;
    else if (name == "lambda") set.lambda = true;
    else if (name == "h") set.h = true;
    else if (name == "phi") set.phi = true;
    else if (name == "garland") set.garland = true;
    else if (name == "linkspec") set.linkspec = true;
    else throw std::invalid_argument("unknown measurement: " + name);
  }
  return set;
}

void validate(const ExperimentConfig& config) {
  if (config.d < 1) throw std::invalid_argument("d must be at least 1");
  if (config.n_values.empty())
    throw std::invalid_argument("n_values must be non-empty");
  for (int n : config.n_values)
    if (n <= config.d)
      throw std::invalid_argument("every n must exceed d");
  std::vector<int> sorted = config.n_values;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("n_values must be distinct");
  if (config.eps.has_value() == config.p.has_value())
    throw std::invalid_argument("set exactly one of eps or p");
  if (config.eps && *config.eps <= -1.0)
    throw std::invalid_argument("eps must exceed -1");
  if (config.p && (*config.p < 0.0 || *config.p > 1.0))
    throw std::invalid_argument("p must lie in [0, 1]");
  if (config.samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (config.gamma < 0.0 || config.gamma >= 1.0)
    throw std::invalid_argument("gamma must lie in [0, 1)");
  if (config.band_constant <= 0.0)
    throw std::invalid_argument("band_constant must be positive");
  if (config.phi_trials < 1)
    throw std::invalid_argument("phi_trials must be >= 1");
  if (config.measurements.empty())
    throw std::invalid_argument("measurements must be non-empty");
  parse_measurements(config.measurements);
}

// Normalized copy: measurements deduplicated into canonical order.
ExperimentConfig normalized(const ExperimentConfig& config) {
  ExperimentConfig out = config;
  const MeasurementSet set = parse_measurements(config.measurements);
  out.measurements.clear();
  for (const auto& name : canonical_measurements()) {
    const MeasurementSet one = parse_measurements({name});
    const bool wanted = (one.delta && set.delta) || (one.lambda && set.lambda) ||
                        (one.h && set.h) || (one.phi && set.phi) ||
                        (one.garland && set.garland) ||
                        (one.linkspec && set.linkspec);
    if (wanted) out.measurements.push_back(name);
  }
  return out;
}

// Smallest nontrivial Laplacian eigenvalue of every link of a (d-2)-face,
// minimized over the links.
double min_link_algebraic_connectivity(const Complex& y) {
  const std::int64_t links = binom(y.n(), y.d() - 1);
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t t = 0; t < links; ++t) {
    const LinkGraph g = y.link_graph(colex_unrank(t, y.d() - 1));
    const int k = g.vertex_count();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [u, v] : g.edges) {
      const int lu = g.local_index(u);
      const int lv = g.local_index(v);
      lap(lu, lu) += 1.0;
      lap(lv, lv) += 1.0;
      lap(lu, lv) -= 1.0;
      lap(lv, lu) -= 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    best = std::min(best, k >= 2 ? solver.eigenvalues()(1) : 0.0);
  }
  return links > 0 ? best : 0.0;
}

// Shortest decimal string that round-trips to the exact double.
std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["n_values"] = config.n_values;
  j["d"] = config.d;
  if (config.eps) j["eps"] = *config.eps;
  if (config.p) j["p"] = *config.p;
  j["samples"] = config.samples;
  j["master_seed"] = config.master_seed;
  j["gamma"] = config.gamma;
  j["measurements"] = config.measurements;
  j["band_constant"] = config.band_constant;
  j["phi_trials"] = config.phi_trials;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig config;
  config.n_values = j.at("n_values").get<std::vector<int>>();
  config.d = j.at("d").get<int>();
  if (j.contains("eps") && !j["eps"].is_null())
    config.eps = j["eps"].get<double>();
  if (j.contains("p") && !j["p"].is_null()) config.p = j["p"].get<double>();
  config.samples = j.value("samples", 1);
  config.master_seed = j.value("master_seed", std::uint64_t{0});
  config.gamma = j.value("gamma", 0.0);
  config.measurements =
      j.value("measurements", std::vector<std::string>{"delta"});
  config.band_constant = j.value("band_constant", 3.0);
  config.phi_trials = j.value("phi_trials", std::int64_t{200});
  return config;
}

json row_to_json(const SampleRow& row) {
  json j;
  j["n"] = row.n;
  j["sample_index"] = row.sample_index;
  j["seed"] = row.seed;
  if (row.delta) j["delta"] = *row.delta;
  if (row.lambda) j["lambda"] = *row.lambda;
  if (row.h) j["h"] = *row.h;
  if (row.phi) j["phi"] = *row.phi;
  if (row.garland_residual) j["garland"] = *row.garland_residual;
  if (row.link_lambda2) j["linkspec"] = *row.link_lambda2;
  return j;
}

SampleRow row_from_json(const json& j) {
  SampleRow row;
  row.n = j.at("n").get<int>();
  row.sample_index = j.at("sample_index").get<int>();
  row.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("delta")) row.delta = j["delta"].get<double>();
  if (j.contains("lambda")) row.lambda = j["lambda"].get<double>();
  if (j.contains("h")) row.h = j["h"].get<double>();
  if (j.contains("phi")) row.phi = j["phi"].get<double>();
  if (j.contains("garland")) row.garland_residual = j["garland"].get<double>();
  if (j.contains("linkspec")) row.link_lambda2 = j["linkspec"].get<double>();
  return row;
}

std::optional<double> row_value(const SampleRow& row, const std::string& name) {
  if (name == "delta") return row.delta;
  if (name == "lambda") return row.lambda;
  if (name == "h") return row.h;
  if (name == "phi") return row.phi;
  if (name == "garland") return row.garland_residual;
  return row.link_lambda2;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

double resolve_edge_probability(int n, int d, double eps) {
  if (d < 1 || n <= d) throw std::invalid_argument("need n > d >= 1");
  if (eps <= -1.0) throw std::invalid_argument("eps must exceed -1");
  return std::min(1.0, (1.0 + eps) * d * std::log(static_cast<double>(n)) /
                           static_cast<double>(n));
}

Report run_experiment(const ExperimentConfig& raw_config) {
  validate(raw_config);
  const ExperimentConfig config = normalized(raw_config);
  const MeasurementSet want = parse_measurements(config.measurements);
  const int d = config.d;

  Report report;
  report.config = config;

  // Edge probability per sweep point, with clamp notes collected up front so
  // they appear once regardless of sample count or threading.
  std::map<int, double> edge_p;
  for (int n : config.n_values) {
    if (config.p) {
      edge_p[n] = *config.p;
    } else {
      const double raw =
          (1.0 + *config.eps) * d * std::log(static_cast<double>(n)) / n;
      edge_p[n] = std::min(1.0, raw);
      if (raw > 1.0)
        report.notes.push_back("p clamped to 1 at n=" + std::to_string(n));
    }
  }

  const std::int64_t per_n = config.samples;
  const std::int64_t total =
      static_cast<std::int64_t>(config.n_values.size()) * per_n;
  report.rows.resize(static_cast<std::size_t>(total));
  std::vector<std::vector<std::string>> task_notes(
      static_cast<std::size_t>(total));

  for_each_chunk(total, [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t t = lo; t < hi; ++t) {
      const int n = config.n_values[static_cast<std::size_t>(t / per_n)];
      const int sample_index = static_cast<int>(t % per_n);
      SampleRow& row = report.rows[static_cast<std::size_t>(t)];
      auto& notes = task_notes[static_cast<std::size_t>(t)];
      const auto start = std::chrono::steady_clock::now();

      row.n = n;
      row.sample_index = sample_index;
      row.seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(sample_index));
      const Complex y = Complex::generate(n, d, edge_p.at(n), row.seed);

      if (want.delta) row.delta = static_cast<double>(y.min_codegree());

      if (want.lambda) {
        if (y.codim1_count() <= spectral_size_cap) {
          SpectralOptions options;
          options.want_spectrum = false;
          row.lambda = spectral_gap(y, options).lambda;
        } else {
          notes.push_back("lambda skipped at n=" + std::to_string(n) +
                          ": too many codimension-one faces");
        }
      }

      if (want.h) {
        try {
          row.h = cheeger_exact(y).value;
        } catch (const instance_too_large&) {
          notes.push_back("h skipped at n=" + std::to_string(n) +
                          ": partition count exceeds the exact enumeration cap");
        }
      }

      if (want.phi) {
        if (y.top_count() > 0) {
          row.phi = conductance_estimate(y, config.phi_trials,
                                         derive_seed(row.seed, 1, 0))
                        .phi;
        } else {
          notes.push_back("phi skipped at n=" + std::to_string(n) +
                          ": no top faces");
        }
      }

      if (want.garland) {
        if (d < 2) {
          notes.push_back("garland skipped: requires d >= 2");
        } else if (y.codim1_count() > garland_size_cap) {
          notes.push_back("garland skipped at n=" + std::to_string(n) +
                          ": too many codimension-one faces");
        } else {
          const Cochain f = random_cycle_cochain(y, derive_seed(row.seed, 2, 0));
          row.garland_residual = garland_check(y, f).max_residual();
        }
      }

      if (want.linkspec) {
        const double cost = static_cast<double>(binom(n, d - 1)) *
                            std::pow(static_cast<double>(n - d + 1), 3);
        if (d < 2) {
          notes.push_back("linkspec skipped: requires d >= 2");
        } else if (cost > linkspec_cost_cap) {
          notes.push_back("linkspec skipped at n=" + std::to_string(n) +
                          ": link eigensolves too large");
        } else {
          row.link_lambda2 = min_link_algebraic_connectivity(y);
        }
      }

      row.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
    }
  });

  // Deterministic note order: task order, first occurrence wins.
  std::set<std::string> seen(report.notes.begin(), report.notes.end());
  for (const auto& notes : task_notes)
    for (const auto& note : notes)
      if (seen.insert(note).second) report.notes.push_back(note);

  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const SampleRow& a, const SampleRow& b) {
                     return a.n != b.n ? a.n < b.n
                                       : a.sample_index < b.sample_index;
                   });

  for (const SampleRow& row : report.rows) {
    if (row.lambda && row.h && *row.lambda > *row.h + violation_tol)
      ++report.lambda_h_violations;
    if (row.lambda && row.delta) {
      const double bound = row.n * *row.delta / (row.n - d);
      if (*row.lambda > bound + violation_tol)
        ++report.lambda_codegree_violations;
    }
  }

  std::vector<int> sorted_n = config.n_values;
  std::sort(sorted_n.begin(), sorted_n.end());
  for (const auto& name : config.measurements) {
    for (int n : sorted_n) {
      Aggregate agg;
      agg.n = n;
      agg.measurement = name;
      agg.min = std::numeric_limits<double>::infinity();
      agg.max = -std::numeric_limits<double>::infinity();
      double sum = 0;
      for (const SampleRow& row : report.rows) {
        if (row.n != n) continue;
        const std::optional<double> value = row_value(row, name);
        if (!value) continue;
        ++agg.count;
        sum += *value;
        agg.min = std::min(agg.min, *value);
        agg.max = std::max(agg.max, *value);
      }
      if (agg.count == 0) continue;
      agg.mean = sum / static_cast<double>(agg.count);
      double ss = 0;
      for (const SampleRow& row : report.rows) {
        if (row.n != n) continue;
        const std::optional<double> value = row_value(row, name);
        if (value) ss += (*value - agg.mean) * (*value - agg.mean);
      }
      agg.stddev =
          agg.count > 1 ? std::sqrt(ss / static_cast<double>(agg.count - 1)) : 0;
      report.aggregates.push_back(agg);
    }
  }

  if (config.eps && *config.eps > 0.0) {
    for (int n : sorted_n) {
      const Prediction pred = predict(n, d, *config.eps, config.band_constant);
      report.center[n] = pred.center;
      report.band[n] = pred.band_halfwidth;
    }
  }
  return report;
}

std::string export_report(const Report& report, ExportFormat format,
                          const std::string& path) {
  std::ofstream out = open_for_write(path);
  if (format == ExportFormat::csv) {
    out << "n,seed,delta,lambda,h,phi,center,band\n";
    const auto cell = [](const std::optional<double>& v) {
      return v ? fmt_double(*v) : std::string();
    };
    for (const SampleRow& row : report.rows) {
      std::optional<double> center, band;
      if (auto it = report.center.find(row.n); it != report.center.end())
        center = it->second;
      if (auto it = report.band.find(row.n); it != report.band.end())
        band = it->second;
      out << row.n << ',' << row.seed << ',' << cell(row.delta) << ','
          << cell(row.lambda) << ',' << cell(row.h) << ',' << cell(row.phi)
          << ',' << cell(center) << ',' << cell(band) << '\n';
    }
  } else {
    json j;
    j["config"] = config_to_json(report.config);
    j["rows"] = json::array();
    for (const SampleRow& row : report.rows) j["rows"].push_back(row_to_json(row));
    j["aggregates"] = json::array();
    for (const Aggregate& agg : report.aggregates) {
      j["aggregates"].push_back({{"n", agg.n},
                                 {"measurement", agg.measurement},
                                 {"count", agg.count},
                                 {"mean", agg.mean},
                                 {"stddev", agg.stddev},
                                 {"min", agg.min},
                                 {"max", agg.max}});
    }
    json center = json::object(), band = json::object();
    for (const auto& [n, value] : report.center)
      center[std::to_string(n)] = value;
    for (const auto& [n, value] : report.band) band[std::to_string(n)] = value;
    j["center"] = center;
    j["band"] = band;
    j["violations"] = {{"lambda_h", report.lambda_h_violations},
                       {"lambda_codegree", report.lambda_codegree_violations}};
    j["notes"] = report.notes;
    out << j.dump(2) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path);
  return path;
}

Report import_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse " + path + ": " + e.what());
  }
  Report report;
  report.config = config_from_json(j.at("config"));
  for (const auto& row : j.at("rows")) report.rows.push_back(row_from_json(row));
  for (const auto& agg : j.at("aggregates")) {
    Aggregate a;
    a.n = agg.at("n").get<int>();
    a.measurement = agg.at("measurement").get<std::string>();
    a.count = agg.at("count").get<std::int64_t>();
    a.mean = agg.at("mean").get<double>();
    a.stddev = agg.at("stddev").get<double>();
    a.min = agg.at("min").get<double>();
    a.max = agg.at("max").get<double>();
    report.aggregates.push_back(a);
  }
  for (const auto& [key, value] : j.at("center").items())
    report.center[std::stoi(key)] = value.get<double>();
  for (const auto& [key, value] : j.at("band").items())
    report.band[std::stoi(key)] = value.get<double>();
  report.lambda_h_violations = j.at("violations").at("lambda_h").get<std::int64_t>();
  report.lambda_codegree_violations =
      j.at("violations").at("lambda_codegree").get<std::int64_t>();
  report.notes = j.at("notes").get<std::vector<std::string>>();
  return report;
}

std::vector<std::string> emit_plot_data(const Report& report,
                                        const std::string& directory) {
  if (report.aggregates.empty())
    throw std::invalid_argument("emit_plot_data: report has no aggregates");
  std::filesystem::create_directories(directory);
  std::vector<std::string> paths;
  for (const auto& name : report.config.measurements) {
    std::vector<const Aggregate*> series;
    for (const Aggregate& agg : report.aggregates)
      if (agg.measurement == name) series.push_back(&agg);
    if (series.empty()) continue;
    const std::string path = directory + "/" + name + ".dat";
    std::ofstream out = open_for_write(path);
    out << "# n mean stddev center band\n";
    for (const Aggregate* agg : series) {
      const auto overlay = [&](const std::map<int, double>& m) {
        const auto it = m.find(agg->n);
        return it == m.end() ? std::string("nan") : fmt_double(it->second);
      };
      out << agg->n << ' ' << fmt_double(agg->mean) << ' '
          << fmt_double(agg->stddev) << ' ' << overlay(report.center) << ' '
          << overlay(report.band) << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + path);
    paths.push_back(path);
  }
  return paths;
}

ExperimentConfig read_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse " + path + ": " + e.what());
  }
  ExperimentConfig config = config_from_json(j);
  validate(config);
  return config;
}

}  // namespace lmexp
