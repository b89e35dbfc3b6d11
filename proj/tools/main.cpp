#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "uemgsp/uemgsp.hpp"

namespace {

uemgsp::Graph graph_or_random(const std::string& path, int nodes, int k,
                              std::uint64_t seed) {
  if (!path.empty()) return uemgsp::load_graph(path);
  return uemgsp::random_connected_graph(nodes, k, uemgsp::derive_seed(seed, 0));
}

void print_summary(const uemgsp::ExperimentResult& res) {
  std::printf("%-6s %-10s %-10s %s\n", "gso", "mean_f1", "std_f1", "modal(m,n,t)");
  for (const auto& s : res.methods) {
    std::printf("%-6s %-10.4f %-10.4f", s.name.c_str(), s.mean_f1, s.std_f1);
    if (s.has_modal) std::printf(" (%.1f, %.1f, %d)", s.modal_m, s.modal_n, s.modal_t);
    std::printf("\n");
  }
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph signal processing with the unified extended-matrix operator family"};
  app.require_subcommand(1);

  // ---- run --------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Run an anomaly-detection experiment");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "key=value config file");
  std::map<std::string, std::string> kv;
  std::map<std::string, CLI::Option*> kv_opts;
  const auto add_kv = [&](const std::string& flag, const std::string& key,
                          const std::string& desc) {
    kv_opts[key] = run_cmd->add_option(flag, kv[key], desc);
  };
  add_kv("--experiment", "experiment", "wave | uniform | station");
  add_kv("--nodes", "nodes", "graph size");
  add_kv("--k", "k", "k-NN neighbour count");
  add_kv("--runs", "runs", "independent runs");
  add_kv("--folds", "folds", "cross-validation folds");
  add_kv("--seed", "seed", "base seed; run r uses seed + r");
  add_kv("--gso", "gso", "comma list of operator kinds (gft,df1,df2,sp2,sp3,mrk,uem)");
  add_kv("--out", "out", "output directory");
  add_kv("--healthy", "healthy", "healthy signals per set");
  add_kv("--anomalous", "anomalous", "anomalous signals per set");
  add_kv("--samples", "samples", "station days drawn per run");
  add_kv("--lo", "lo", "uniform signal lower bound");
  add_kv("--hi", "hi", "uniform signal upper bound");
  add_kv("--b-max", "b_max", "anomaly bias magnitude bound");
  add_kv("--noise-variance", "noise_variance", "anomaly noise variance");
  add_kv("--max-anomalous-sensors", "max_anomalous_sensors", "sensors hit per anomaly");
  add_kv("--station-csv", "station_csv", "station data file");
  add_kv("--lat-min", "lat_min", "bounding box");
  add_kv("--lat-max", "lat_max", "bounding box");
  add_kv("--lon-min", "lon_min", "bounding box");
  add_kv("--lon-max", "lon_max", "bounding box");
  add_kv("--rho", "rho", "bandwidth for eigcurve/spectra exports");
  add_kv("--quantiles", "quantiles", "lambda_cut quantile grid");
  add_kv("--betas", "betas", "beta grid");
  add_kv("--rhos", "rhos", "rho grid");
  add_kv("--ms", "ms", "m grid");
  add_kv("--ns", "ns", "n grid");
  add_kv("--ts", "ts", "t grid");
  bool dump_grid = false;
  run_cmd->add_flag("--dump-grid", dump_grid, "write full per-run CV tables");

  // ---- fig1 -------------------------------------------------------------
  auto* fig_cmd = app.add_subcommand("fig1", "Export sorted eigenvalue curves over m");
  int fig_nodes = 10, fig_k = 3;
  double fig_rho = 0.4, fig_n = 1.0;
  std::uint64_t fig_seed = 1;
  std::string fig_out = "out", fig_graph;
  fig_cmd->add_option("--nodes", fig_nodes, "graph size");
  fig_cmd->add_option("--k", fig_k, "k-NN neighbour count");
  fig_cmd->add_option("--rho", fig_rho, "kernel bandwidth");
  fig_cmd->add_option("--n", fig_n, "fixed n");
  fig_cmd->add_option("--seed", fig_seed, "graph seed");
  fig_cmd->add_option("--out", fig_out, "output directory");
  fig_cmd->add_option("--graph", fig_graph, "edge-list file instead of a random graph");

  // ---- matrices / spectra ------------------------------------------------
  auto* mat_cmd = app.add_subcommand("matrices", "Export dense operator matrices");
  auto* spec_cmd = app.add_subcommand("spectra", "Export transform spectra of a test signal");
  int mn_nodes = 50, mn_k = 3, mn_t = 0;
  double mn_rho = 0.3, mn_m = -1.0, mn_n = -1.0;
  std::uint64_t mn_seed = 1;
  std::string mn_out = "out", mn_graph;
  for (auto* cmd : {mat_cmd, spec_cmd}) {
    cmd->add_option("--nodes", mn_nodes, "graph size");
    cmd->add_option("--k", mn_k, "k-NN neighbour count");
    cmd->add_option("--rho", mn_rho, "kernel bandwidth");
    cmd->add_option("--t", mn_t, "diffusion scale (default: both 1 and 2)");
    cmd->add_option("--m", mn_m, "specific m (default: showcase cells)");
    cmd->add_option("--n", mn_n, "specific n (default: showcase cells)");
    cmd->add_option("--seed", mn_seed, "graph seed");
    cmd->add_option("--out", mn_out, "output directory");
    cmd->add_option("--graph", mn_graph, "edge-list file instead of a random graph");
  }

  // ---- ingest-check -----------------------------------------------------
  auto* ingest_cmd = app.add_subcommand("ingest-check", "Validate a station CSV");
  std::string ingest_csv;
  double lat_min = -90, lat_max = 90, lon_min = -180, lon_max = 180;
  ingest_cmd->add_option("--csv", ingest_csv, "station data file")->required();
  auto* blat0 = ingest_cmd->add_option("--lat-min", lat_min, "bounding box");
  auto* blat1 = ingest_cmd->add_option("--lat-max", lat_max, "bounding box");
  auto* blon0 = ingest_cmd->add_option("--lon-min", lon_min, "bounding box");
  auto* blon1 = ingest_cmd->add_option("--lon-max", lon_max, "bounding box");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) {
      uemgsp::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = uemgsp::load_config_file(config_path);
      for (const auto& [key, opt] : kv_opts)
        if (opt->count() > 0) uemgsp::apply_config_kv(cfg, key, kv.at(key));
      if (dump_grid) cfg.dump_grid = true;
      const auto res = uemgsp::run_experiment(cfg);
      print_summary(res);
      if (!res.config.out_dir.empty())
        std::cout << "wrote " << res.config.out_dir << "/summary.csv\n";
    } else if (*fig_cmd) {
      const auto graph = graph_or_random(fig_graph, fig_nodes, fig_k, fig_seed);
      std::filesystem::create_directories(fig_out);
      const std::string path = fig_out + "/eigcurves.csv";
      uemgsp::write_eigcurve_csv(graph, fig_rho, fig_n, {1, 2}, uemgsp::tenths(0, 10),
                                 path);
      std::cout << "wrote " << path << '\n';
    } else if (*mat_cmd || *spec_cmd) {
      const auto graph = graph_or_random(mn_graph, mn_nodes, mn_k, mn_seed);
      std::filesystem::create_directories(mn_out);
      const std::vector<int> ts = mn_t > 0 ? std::vector<int>{mn_t} : std::vector<int>{1, 2};
      std::vector<std::pair<double, double>> cells;
      if (mn_m >= 0.0 || mn_n >= 0.0) {
        if (mn_m < 0.0 || mn_n < 0.0)
          throw std::invalid_argument("specify both --m and --n or neither");
        cells.emplace_back(mn_m, mn_n);
      } else {
        cells = uemgsp::spectra_showcase_cells();
      }
      const auto consensus = uemgsp::consensus_matrix(graph);
      uemgsp::Rng signal_rng(uemgsp::derive_seed(mn_seed, 4));
      const Eigen::VectorXd signal =
          uemgsp::uniform_signal(graph.n_nodes(), 0.0, 1.0, signal_rng);
      int written = 0;
      for (const int t : ts) {
        const auto ext = uemgsp::extended_adjacency(consensus, t, mn_rho);
        for (const auto& [m, n] : cells) {
          const auto uem = uemgsp::build_uem(ext, m, n);
          const std::string tag = uemgsp::detail::cell_tag(t, m, n);
          if (*mat_cmd) {
            uemgsp::write_matrix_csv(uem.entries, mn_out + "/matrix_" + tag + ".csv");
          } else {
            const auto basis = uemgsp::decompose(uem.entries);
            uemgsp::write_spectrum_csv(basis, uemgsp::gft(basis, signal),
                                       mn_out + "/spectrum_" + tag + ".csv");
          }
          ++written;
        }
      }
      std::cout << "wrote " << written << " files to " << mn_out << '\n';
    } else if (*ingest_cmd) {
      std::optional<uemgsp::BoundingBox> bbox;
      if (blat0->count() || blat1->count() || blon0->count() || blon1->count())
        bbox = uemgsp::BoundingBox{lat_min, lat_max, lon_min, lon_max};
      const auto series = uemgsp::ingest_station_csv(ingest_csv, bbox);
      std::printf("ok: %d stations, %zu samples, unit C (source %c)\n",
                  series.n_stations(), series.samples.size(), series.source_unit);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
