#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "uemgsp/csv.hpp"
#include "uemgsp/datagen.hpp"
#include "uemgsp/detector.hpp"
#include "uemgsp/gso.hpp"
#include "uemgsp/graph.hpp"

namespace uemgsp {

// ---------------------------------------------------------------------------
// Configuration

/// Full description of one experiment invocation. Sentinels (-1 counts, zero
/// AnomalySpec fields, empty grid axes) resolve to per-experiment defaults.
/// Precedence when assembled by the CLI: flags > config file > defaults.
struct ExperimentConfig {
  std::string experiment = "wave";  // wave | uniform | station
  int nodes = 30;
  int k = 3;
  int runs = 10;
  int folds = 5;
  std::uint64_t seed = 1;
  std::vector<std::string> gso = {"uem", "df1", "df2", "gft", "sp2", "sp3", "mrk"};
  std::string out_dir = "out";

  int healthy_per_set = -1;   // wave: 150, uniform: 100
  int anomalous_per_set = -1; // wave: 150, uniform: 100
  int samples = -1;           // station days per run: 350
  double lo = -15.0;          // uniform signal range
  double hi = 15.0;
  AnomalySpec anomaly{0.0, 0.0, 0};
  std::string station_csv;
  std::optional<BoundingBox> bbox;

  double rho = 0.4;  // bandwidth for eigenvalue-curve and spectra exports
  GridAxes axes;     // sparse overrides of the sweep lattice
  bool dump_grid = false;
};

inline std::vector<double> tenths(int lo, int hi) {
  std::vector<double> v;
  for (int i = lo; i <= hi; ++i) v.push_back(static_cast<double>(i) / 10.0);
  return v;
}

inline std::vector<double> halves(int lo, int hi) {
  std::vector<double> v;
  for (int i = lo; i <= hi; ++i) v.push_back(static_cast<double>(i) / 2.0);
  return v;
}

/// Sweep lattice for one method: defaults filled in wherever `overrides`
/// leaves an axis empty. Structural axes a method does not sweep stay empty.
inline GridAxes grid_axes_for(const MethodSpec& method, const GridAxes& overrides) {
  GridAxes axes;
  axes.lambda_cut_quantiles = overrides.lambda_cut_quantiles.empty()
                                  ? tenths(1, 9)
                                  : overrides.lambda_cut_quantiles;
  axes.betas = overrides.betas.empty() ? halves(0, 6) : overrides.betas;
  if (method.sweep_rho) axes.rhos = overrides.rhos.empty() ? tenths(1, 10) : overrides.rhos;
  if (method.sweep_mnt) {
    axes.ms = overrides.ms.empty() ? tenths(0, 10) : overrides.ms;
    axes.ns = overrides.ns.empty() ? tenths(0, 10) : overrides.ns;
    axes.ts = overrides.ts.empty() ? std::vector<int>{1, 2} : overrides.ts;
  }
  return axes;
}

inline BasisFactory make_basis_factory(const Graph& graph, const MethodSpec& method) {
  return [graph, method](const StructuralPoint& sp) {
    return decompose(build_gso(graph, method.to_spec(sp.rho, sp.m, sp.n, sp.t)),
                     method.name);
  };
}

namespace detail {

inline ExperimentConfig resolved(ExperimentConfig cfg) {
  if (cfg.experiment == "wave") {
    if (cfg.healthy_per_set < 0) cfg.healthy_per_set = 150;
    if (cfg.anomalous_per_set < 0) cfg.anomalous_per_set = 150;
  } else if (cfg.experiment == "uniform") {
    if (cfg.healthy_per_set < 0) cfg.healthy_per_set = 100;
    if (cfg.anomalous_per_set < 0) cfg.anomalous_per_set = 100;
    if (cfg.anomaly.b_max == 0.0) cfg.anomaly.b_max = 4.0;
    if (cfg.anomaly.noise_variance == 0.0) cfg.anomaly.noise_variance = 1.0;
    if (cfg.anomaly.max_anomalous_sensors == 0) cfg.anomaly.max_anomalous_sensors = 2;
  } else if (cfg.experiment == "station") {
    if (cfg.samples < 0) cfg.samples = 350;
    if (cfg.anomaly.b_max == 0.0) cfg.anomaly.b_max = 5.0;
    if (cfg.anomaly.noise_variance == 0.0) cfg.anomaly.noise_variance = 1.0;
    if (cfg.anomaly.max_anomalous_sensors == 0) cfg.anomaly.max_anomalous_sensors = 5;
  }
  return cfg;
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.experiment != "wave" && cfg.experiment != "uniform" && cfg.experiment != "station")
    throw std::invalid_argument("unknown kind: experiment '" + cfg.experiment + "'");
  if (cfg.nodes < 2) throw std::invalid_argument("config: nodes must be at least 2");
  if (cfg.k < 1 || cfg.k >= cfg.nodes)
    throw std::invalid_argument("config: require 1 <= k < nodes");
  if (cfg.runs < 1) throw std::invalid_argument("config: runs must be at least 1");
  if (cfg.folds < 2) throw std::invalid_argument("config: folds must be at least 2");
  if (cfg.gso.empty()) throw std::invalid_argument("config: no gso kinds selected");
  for (const auto& name : cfg.gso) method_from_name(name);  // throws on unknown kind
  for (const double q : cfg.axes.lambda_cut_quantiles)
    if (!(q >= 0.0 && q <= 1.0))
      throw std::invalid_argument("config: lambda_cut quantiles must lie in [0, 1]");
  if (cfg.experiment == "station") {
    if (cfg.station_csv.empty())
      throw std::invalid_argument("config: station experiment requires station_csv");
    if (cfg.samples < 4) throw std::invalid_argument("config: samples must be at least 4");
    validate(cfg.anomaly);
  } else {
    if (cfg.healthy_per_set < 1 || cfg.anomalous_per_set < 1)
      throw std::invalid_argument("config: need at least one signal per class");
    if (cfg.experiment == "uniform") {
      if (!(cfg.lo < cfg.hi)) throw std::invalid_argument("config: require lo < hi");
      validate(cfg.anomaly);
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Station run assembly

struct RunData {
  Graph graph;
  LabeledDataset train;
  LabeledDataset test;
};

/// One station run: draw a connected station subset, draw `samples` days,
/// label the first half of the drawn days healthy and inject anomalies into
/// the rest, then deal the labeled samples into equal train/test halves by a
/// final shuffle. All draws come from `rng` in that order.
inline RunData make_station_run_data(const StationSeries& series, int nodes, int k,
                                     int samples, const AnomalySpec& spec, Rng& rng,
                                     int max_attempts = 64) {
  if (nodes > series.n_stations())
    throw std::invalid_argument("station run: nodes exceeds station count");
  if (samples > static_cast<int>(series.samples.size()))
    throw std::invalid_argument("station run: not enough samples in series");
  if (samples < 4) throw std::invalid_argument("station run: samples must be at least 4");

  const Coords all_coords = station_graph_coords(series);
  std::vector<int> stations(series.n_stations());
  for (std::size_t i = 0; i < stations.size(); ++i) stations[i] = static_cast<int>(i);

  RunData rd;
  std::vector<int> chosen;
  bool connected = false;
  for (int attempt = 0; attempt < max_attempts && !connected; ++attempt) {
    shuffle_in_place(stations, rng);
    chosen.assign(stations.begin(), stations.begin() + nodes);
    Coords coords(nodes, 2);
    for (int i = 0; i < nodes; ++i) coords.row(i) = all_coords.row(chosen[i]);
    Eigen::MatrixXd adj = detail::knn_adjacency(coords, k);
    if (is_connected(adj)) {
      rd.graph = Graph{std::move(coords), std::move(adj), k, 0};
      connected = true;
    }
  }
  if (!connected) throw std::runtime_error("disconnected graph: resampling exhausted");

  std::vector<int> days(series.samples.size());
  for (std::size_t i = 0; i < days.size(); ++i) days[i] = static_cast<int>(i);
  shuffle_in_place(days, rng);

  const int n_anomalous = samples / 2;
  const int n_healthy = samples - n_anomalous;
  std::vector<Eigen::VectorXd> signals;
  std::vector<Label> labels;
  for (int p = 0; p < samples; ++p) {
    Eigen::VectorXd v(nodes);
    for (int i = 0; i < nodes; ++i) v(i) = series.samples[days[p]](chosen[i]);
    if (p < n_healthy) {
      signals.push_back(std::move(v));
      labels.push_back(Label::healthy);
    } else {
      signals.push_back(inject_anomaly(v, spec, rng));
      labels.push_back(Label::anomalous);
    }
  }

  std::vector<int> pos(samples);
  for (int p = 0; p < samples; ++p) pos[p] = p;
  shuffle_in_place(pos, rng);
  const int n_train = samples / 2;
  for (int p = 0; p < samples; ++p) {
    auto& side = p < n_train ? rd.train : rd.test;
    side.push(std::move(signals[pos[p]]), labels[pos[p]]);
  }
  return rd;
}

// ---------------------------------------------------------------------------
// Experiment driver

struct MethodSummary {
  std::string name;
  std::vector<double> run_f1;            // test F1 per run
  double mean_f1 = 0.0;
  double std_f1 = 0.0;                   // population convention
  std::vector<GridPointScore> run_best;  // winning lattice point per run
  bool has_modal = false;                // set for methods sweeping (m, n, t)
  double modal_m = 0.0;
  double modal_n = 0.0;
  int modal_t = 0;
};

struct ExperimentResult {
  ExperimentConfig config;  // resolved
  std::vector<MethodSummary> methods;
  std::map<int, Eigen::MatrixXd> heatmaps;  // t -> mean best F1 per (m, n)
  std::vector<std::string> warnings;
};

namespace detail {

struct RunOutput {
  Graph graph;
  std::vector<double> f1;
  std::vector<GridPointScore> best;
  std::map<int, Eigen::MatrixXd> cellbest;
  std::vector<std::string> warnings;
};

inline RunOutput execute_run(const ExperimentConfig& cfg, const StationSeries* series,
                             int run_index) {
  const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(run_index);
  RunOutput out;
  LabeledDataset train, test;

  if (cfg.experiment == "station") {
    Rng rng(derive_seed(run_seed, 0));
    RunData rd = make_station_run_data(*series, cfg.nodes, cfg.k, cfg.samples, cfg.anomaly,
                                       rng);
    out.graph = std::move(rd.graph);
    train = std::move(rd.train);
    test = std::move(rd.test);
  } else {
    out.graph = random_connected_graph(cfg.nodes, cfg.k, derive_seed(run_seed, 0));
    Rng rng_train(derive_seed(run_seed, 1));
    Rng rng_test(derive_seed(run_seed, 2));
    if (cfg.experiment == "wave") {
      // The phase state drifts over the stream, so one pool feeds both splits;
      // a stratified shuffled split keeps the phase coverage of train and test
      // identical. Independent streams per split would leave the detector
      // threshold calibrated against a different stretch of the drift.
      LabeledDataset pool = make_wave_dataset(out.graph.coords, 2 * cfg.healthy_per_set,
                                              2 * cfg.anomalous_per_set, rng_train);
      std::tie(train, test) =
          stratified_split(pool, cfg.healthy_per_set, cfg.anomalous_per_set, rng_test);
    } else {
      train = make_uniform_dataset(cfg.nodes, cfg.healthy_per_set, cfg.anomalous_per_set,
                                   cfg.lo, cfg.hi, cfg.anomaly, rng_train);
      test = make_uniform_dataset(cfg.nodes, cfg.healthy_per_set, cfg.anomalous_per_set,
                                  cfg.lo, cfg.hi, cfg.anomaly, rng_test);
    }
  }

  for (const auto& name : cfg.gso) {
    const MethodSpec& method = method_from_name(name);
    const GridAxes axes = grid_axes_for(method, cfg.axes);
    const GridSearchOutcome outcome =
        grid_search_cv(make_basis_factory(out.graph, method), train, axes, cfg.folds,
                       derive_seed(run_seed, 3));
    out.f1.push_back(f1_score(evaluate(outcome.model, test)));
    out.best.push_back(outcome.best);
    for (const auto& w : outcome.warnings)
      out.warnings.push_back("run " + std::to_string(run_index) + " " + name + ": " + w);

    if (method.sweep_mnt) {
      const std::size_t m_count = axes.ms.size(), n_count = axes.ns.size(),
                        t_count = axes.ts.size();
      const std::size_t r_count = std::max<std::size_t>(1, axes.rhos.size());
      for (const int t : axes.ts)
        if (!out.cellbest.count(t))
          out.cellbest[t] = Eigen::MatrixXd::Constant(
              static_cast<Eigen::Index>(m_count), static_cast<Eigen::Index>(n_count), -1.0);
      for (std::size_t idx = 0; idx < outcome.table.size(); ++idx) {
        std::size_t rest = idx;
        const std::size_t ti = rest % t_count;
        rest /= t_count;
        const std::size_t ni = rest % n_count;
        rest /= n_count;
        const std::size_t mi = rest % m_count;
        rest /= m_count;
        (void)r_count;
        Eigen::MatrixXd& cells = out.cellbest[axes.ts[ti]];
        auto& cell = cells(static_cast<Eigen::Index>(mi), static_cast<Eigen::Index>(ni));
        cell = std::max(cell, outcome.table[idx].mean_f1);
      }
    }
    if (cfg.dump_grid && !cfg.out_dir.empty()) {
      std::filesystem::create_directories(cfg.out_dir);
      write_grid_csv(outcome.table, axes,
                     name, cfg.out_dir + "/run" + std::to_string(run_index) + "_" + name +
                               "_grid.csv");
    }
  }
  return out;
}

inline void population_stats(const std::vector<double>& values, double& mean, double& sd) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  sd = std::sqrt(ss / static_cast<double>(values.size()));
}

}  // namespace detail

/// Most frequent (m, n, t) among per-run winners; frequency ties resolve
/// lexicographically on (m, n, t). Winners are first collapsed to canonical
/// labels so that every lattice point naming the same matrix (up to positive
/// scale) casts its vote for one representative.
inline std::tuple<double, double, int> modal_point(const std::vector<GridPointScore>& bests) {
  std::map<std::tuple<double, double, int>, int> counts;
  for (const auto& b : bests) {
    const auto [cm, cn] = canonical_uem_label(b.sp.m, b.sp.n);
    ++counts[{cm, cn, b.sp.t}];
  }
  std::tuple<double, double, int> best{};
  int best_count = -1;
  for (const auto& [key, count] : counts)
    if (count > best_count) {  // std::map iterates keys in lexicographic order
      best = key;
      best_count = count;
    }
  return best;
}

inline const std::vector<std::pair<double, double>>& spectra_showcase_cells() {
  static const std::vector<std::pair<double, double>> cells = {
      {0.0, 0.0}, {0.5, 1.0}, {1.0, 1.0}, {0.3, 0.7}, {0.6, 0.6}, {0.8, 0.2}};
  return cells;
}

/// Sorted eigenvalue curves of the family as m sweeps its lattice, for fixed
/// n. Long-form CSV: t,m,index,eigenvalue.
inline void write_eigcurve_csv(const Graph& graph, double rho, double n,
                               const std::vector<int>& ts, const std::vector<double>& ms,
                               const std::string& path) {
  auto out = open_csv(path);
  out << "t,m,index,eigenvalue\n";
  const ConsensusMatrix b = consensus_matrix(graph);
  for (const int t : ts) {
    const ExtendedMatrices ext = extended_adjacency(b, t, rho);
    for (const double m : ms) {
      const SpectralBasis basis = decompose(build_uem(ext, m, n).entries);
      for (int l = 0; l < basis.size(); ++l)
        out << t << ',' << fmt_double(m) << ',' << l << ','
            << fmt_double(basis.eigenvalues(l)) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

namespace detail {

inline std::string cell_tag(int t, double m, double n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t%d_m%.1f_n%.1f", t, m, n);
  return buf;
}

}  // namespace detail

/// Transform spectra of one signal under the showcase (m, n) members, for
/// t in `ts`. One two-column CSV per member in `dir`.
inline void write_spectra_csvs(const Graph& graph, double rho, const Eigen::VectorXd& signal,
                               const std::vector<int>& ts, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const ConsensusMatrix b = consensus_matrix(graph);
  for (const int t : ts) {
    const ExtendedMatrices ext = extended_adjacency(b, t, rho);
    for (const auto& [m, n] : spectra_showcase_cells()) {
      const SpectralBasis basis = decompose(build_uem(ext, m, n).entries);
      write_spectrum_csv(basis, gft(basis, signal),
                         dir + "/spectrum_" + detail::cell_tag(t, m, n) + ".csv");
    }
  }
}

inline ExperimentResult run_experiment(const ExperimentConfig& raw) {
  ExperimentConfig cfg = detail::resolved(raw);
  detail::validate_config(cfg);

  std::optional<StationSeries> series;
  if (cfg.experiment == "station") series = ingest_station_csv(cfg.station_csv, cfg.bbox);
  const StationSeries* series_ptr = series ? &*series : nullptr;

  std::vector<detail::RunOutput> outs(cfg.runs);
  const int batch = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (int base = 0; base < cfg.runs; base += batch) {
    const int end = std::min(cfg.runs, base + batch);
    std::vector<std::future<detail::RunOutput>> futures;
    for (int r = base; r < end; ++r)
      futures.push_back(std::async(std::launch::async, [&cfg, series_ptr, r] {
        return detail::execute_run(cfg, series_ptr, r);
      }));
    for (int r = base; r < end; ++r) outs[r] = futures[r - base].get();
  }

  ExperimentResult res;
  res.config = cfg;
  for (std::size_t mi = 0; mi < cfg.gso.size(); ++mi) {
    MethodSummary s;
    s.name = cfg.gso[mi];
    for (const auto& ro : outs) {
      s.run_f1.push_back(ro.f1[mi]);
      s.run_best.push_back(ro.best[mi]);
    }
    detail::population_stats(s.run_f1, s.mean_f1, s.std_f1);
    if (method_from_name(s.name).sweep_mnt) {
      s.has_modal = true;
      std::tie(s.modal_m, s.modal_n, s.modal_t) = modal_point(s.run_best);
    }
    res.methods.push_back(std::move(s));
  }
  for (const auto& ro : outs)
    for (const auto& [t, cells] : ro.cellbest) {
      auto it = res.heatmaps.find(t);
      if (it == res.heatmaps.end()) res.heatmaps[t] = cells;
      else it->second += cells;
    }
  for (auto& [t, cells] : res.heatmaps) cells /= static_cast<double>(cfg.runs);
  for (const auto& ro : outs)
    for (const auto& w : ro.warnings) res.warnings.push_back(w);

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    {
      auto out = open_csv(cfg.out_dir + "/summary.csv");
      out << "gso_kind,mean_f1,std_f1,modal_m,modal_n,modal_t\n";
      for (const auto& s : res.methods) {
        out << s.name << ',' << fmt_double(s.mean_f1) << ',' << fmt_double(s.std_f1) << ',';
        if (s.has_modal)
          out << fmt_double(s.modal_m) << ',' << fmt_double(s.modal_n) << ',' << s.modal_t;
        else
          out << ",,";
        out << '\n';
      }
    }

    const MethodSpec* uem_method = nullptr;
    for (const auto& name : cfg.gso)
      if (method_from_name(name).sweep_mnt) uem_method = &method_from_name(name);
    if (uem_method) {
      const GridAxes axes = grid_axes_for(*uem_method, cfg.axes);
      for (const auto& [t, cells] : res.heatmaps) {
        auto out = open_csv(cfg.out_dir + "/heatmap_t" + std::to_string(t) + ".csv");
        out << "m,n,mean_f1\n";
        for (std::size_t i = 0; i < axes.ms.size(); ++i)
          for (std::size_t j = 0; j < axes.ns.size(); ++j)
            out << fmt_double(axes.ms[i]) << ',' << fmt_double(axes.ns[j]) << ','
                << fmt_double(cells(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(j)))
                << '\n';
      }
    }

    const Graph& graph0 = outs.front().graph;
    write_eigcurve_csv(graph0, cfg.rho, 1.0, {1, 2}, tenths(0, 10),
                       cfg.out_dir + "/eigcurves.csv");
    Rng spectra_rng(derive_seed(cfg.seed, 4));
    write_spectra_csvs(graph0, cfg.rho,
                       uniform_signal(graph0.n_nodes(), 0.0, 1.0, spectra_rng), {1, 2},
                       cfg.out_dir + "/spectra");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Flat key=value config files

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  for (const auto& cell : split_csv(s)) {
    const std::string t = trim(cell);
    if (!t.empty()) parts.push_back(t);
  }
  return parts;
}

inline double parse_double_str(const std::string& s, const std::string& key) {
  return parse_number(s, "config key " + key);
}

inline int parse_int_str(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer '" + s + "' for " + key);
  }
}

inline std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
  std::vector<double> v;
  for (const auto& part : split_list(s)) v.push_back(parse_double_str(part, key));
  if (v.empty()) throw std::invalid_argument("config: empty list for " + key);
  return v;
}

inline std::vector<int> parse_int_list(const std::string& s, const std::string& key) {
  std::vector<int> v;
  for (const auto& part : split_list(s)) v.push_back(parse_int_str(part, key));
  if (v.empty()) throw std::invalid_argument("config: empty list for " + key);
  return v;
}

inline bool parse_bool_str(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("config: bad boolean '" + s + "' for " + key);
}

}  // namespace detail

inline void apply_config_kv(ExperimentConfig& cfg, const std::string& key,
                            const std::string& value) {
  using namespace detail;
  auto bbox = [&]() -> BoundingBox& {
    if (!cfg.bbox) cfg.bbox = BoundingBox{};
    return *cfg.bbox;
  };
  if (key == "experiment") cfg.experiment = value;
  else if (key == "nodes") cfg.nodes = parse_int_str(value, key);
  else if (key == "k") cfg.k = parse_int_str(value, key);
  else if (key == "runs") cfg.runs = parse_int_str(value, key);
  else if (key == "folds") cfg.folds = parse_int_str(value, key);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(
                               std::stoull(value));
  else if (key == "gso") cfg.gso = split_list(value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "healthy") cfg.healthy_per_set = parse_int_str(value, key);
  else if (key == "anomalous") cfg.anomalous_per_set = parse_int_str(value, key);
  else if (key == "samples") cfg.samples = parse_int_str(value, key);
  else if (key == "lo") cfg.lo = parse_double_str(value, key);
  else if (key == "hi") cfg.hi = parse_double_str(value, key);
  else if (key == "b_max") cfg.anomaly.b_max = parse_double_str(value, key);
  else if (key == "noise_variance") cfg.anomaly.noise_variance = parse_double_str(value, key);
  else if (key == "max_anomalous_sensors")
    cfg.anomaly.max_anomalous_sensors = parse_int_str(value, key);
  else if (key == "station_csv") cfg.station_csv = value;
  else if (key == "lat_min") bbox().lat_min = parse_double_str(value, key);
  else if (key == "lat_max") bbox().lat_max = parse_double_str(value, key);
  else if (key == "lon_min") bbox().lon_min = parse_double_str(value, key);
  else if (key == "lon_max") bbox().lon_max = parse_double_str(value, key);
  else if (key == "rho") cfg.rho = parse_double_str(value, key);
  else if (key == "quantiles") cfg.axes.lambda_cut_quantiles = parse_double_list(value, key);
  else if (key == "betas") cfg.axes.betas = parse_double_list(value, key);
  else if (key == "rhos") cfg.axes.rhos = parse_double_list(value, key);
  else if (key == "ms") cfg.axes.ms = parse_double_list(value, key);
  else if (key == "ns") cfg.axes.ns = parse_double_list(value, key);
  else if (key == "ts") cfg.axes.ts = parse_int_list(value, key);
  else if (key == "dump_grid") cfg.dump_grid = parse_bool_str(value, key);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

/// Parses `key = value` lines ('#' starts a comment) onto `base`.
inline ExperimentConfig load_config_file(const std::string& path,
                                         ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config_file: cannot open " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("load_config_file: expected key=value at line " +
                               std::to_string(line_no));
    apply_config_kv(base, detail::trim(trimmed.substr(0, eq)),
                    detail::trim(trimmed.substr(eq + 1)));
  }
  return base;
}

}  // namespace uemgsp
