#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uemgsp/detector.hpp"
#include "uemgsp/graph.hpp"
#include "uemgsp/rng.hpp"

namespace uemgsp {

// ---------------------------------------------------------------------------
// Synthetic signals

/// Slowly drifting phases shared by the smooth wave and its interference.
struct WaveSignalState {
  double theta_x = 0.0;
  double theta_y = 0.0;
};

/// Smooth two-dimensional wave evaluated at the node coordinates:
///   cos(2 pi x + theta_x) + cos(4 pi y + theta_y)
/// Evaluates at the current phases, then drifts them by 0.1 * U(-0.5, 0.5)
/// and 0.05 * U(-0.5, 0.5) respectively.
inline Eigen::VectorXd smooth_wave_sample(const Coords& coords, WaveSignalState& state,
                                          Rng& rng) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int n = static_cast<int>(coords.rows());
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i)
    s(i) = std::cos(two_pi * coords(i, 0) + state.theta_x) +
           std::cos(2.0 * two_pi * coords(i, 1) + state.theta_y);
  state.theta_x += 0.1 * uniform_real(rng, -0.5, 0.5);
  state.theta_y += 0.05 * uniform_real(rng, -0.5, 0.5);
  return s;
}

/// High-frequency interference sharing the wave's phases:
///   0.1 * (cos(10 pi x + theta_x) + cos(12 pi y + theta_y))
inline Eigen::VectorXd wave_interference(const Coords& coords, const WaveSignalState& state) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int n = static_cast<int>(coords.rows());
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i)
    s(i) = 0.1 * (std::cos(5.0 * two_pi * coords(i, 0) + state.theta_x) +
                  std::cos(6.0 * two_pi * coords(i, 1) + state.theta_y));
  return s;
}

inline Eigen::VectorXd uniform_signal(int n_nodes, double lo, double hi, Rng& rng) {
  Eigen::VectorXd s(n_nodes);
  for (int i = 0; i < n_nodes; ++i) s(i) = uniform_real(rng, lo, hi);
  return s;
}

// ---------------------------------------------------------------------------
// Anomaly injection

struct AnomalySpec {
  double b_max = 4.0;            // bias magnitude bound, at least 1
  double noise_variance = 1.0;
  int max_anomalous_sensors = 2;
};

inline void validate(const AnomalySpec& spec) {
  if (!(spec.b_max >= 1.0)) throw std::invalid_argument("anomaly: b_max must be at least 1");
  if (!(spec.noise_variance > 0.0))
    throw std::invalid_argument("anomaly: noise_variance must be positive");
  if (spec.max_anomalous_sensors < 1)
    throw std::invalid_argument("anomaly: max_anomalous_sensors must be at least 1");
}

/// Nonzero integer bias, uniform over {-B, ..., -1, 1, ..., B}, B = floor(b_max).
inline int draw_anomaly_mean(Rng& rng, double b_max) {
  const int b = static_cast<int>(std::floor(b_max));
  if (b < 1) throw std::invalid_argument("anomaly: b_max must be at least 1");
  const auto u = static_cast<int>(uniform_below(rng, 2 * static_cast<std::uint64_t>(b)));
  return u < b ? u + 1 : -(u - b + 1);
}

/// Adds Gaussian bias noise N(b, noise_variance) to c sensors, where
/// c ~ U{1..max_anomalous_sensors}, sensors are drawn without replacement and
/// each gets an independent bias b.
inline Eigen::VectorXd inject_anomaly(const Eigen::VectorXd& signal, const AnomalySpec& spec,
                                      Rng& rng) {
  validate(spec);
  const int n = static_cast<int>(signal.size());
  if (spec.max_anomalous_sensors > n)
    throw std::invalid_argument("anomaly: max_anomalous_sensors exceeds node count");
  const int c = 1 + static_cast<int>(uniform_below(
                        rng, static_cast<std::uint64_t>(spec.max_anomalous_sensors)));
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Eigen::VectorXd out = signal;
  const double stddev = std::sqrt(spec.noise_variance);
  for (int j = 0; j < c; ++j) {
    const auto pick =
        j + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n - j)));
    std::swap(idx[j], idx[pick]);
    const int bias = draw_anomaly_mean(rng, spec.b_max);
    out(idx[j]) += normal(rng, static_cast<double>(bias), stddev);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset builders

/// Wave dataset: one phase stream runs through the whole dataset. Step i of
/// the stream yields a healthy sample (the smooth wave at the current phases)
/// and an anomalous one (the same wave plus interference at those phases), so
/// both classes see the same phase trajectory and differ only by the
/// interference term. Extra steps cover any surplus when the class counts
/// differ.
inline LabeledDataset make_wave_dataset(const Coords& coords, int n_healthy, int n_anomalous,
                                        Rng& rng) {
  LabeledDataset ds;
  WaveSignalState state;
  const int steps = std::max(n_healthy, n_anomalous);
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd interference = wave_interference(coords, state);
    const Eigen::VectorXd smooth = smooth_wave_sample(coords, state, rng);
    if (i < n_healthy) ds.push(smooth, Label::healthy);
    if (i < n_anomalous) ds.push(smooth + interference, Label::anomalous);
  }
  return ds;
}

/// Shuffles each class independently and deals the first `healthy_train` /
/// `anomalous_train` samples of each into the train split, the rest into test.
/// Both splits keep exact class counts, matching a stratified shuffled split.
inline std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& pool,
                                                                  int healthy_train,
                                                                  int anomalous_train,
                                                                  Rng& rng) {
  validate(pool);
  if (healthy_train < 0 || healthy_train > pool.count(Label::healthy))
    throw std::invalid_argument("stratified_split: healthy_train out of range");
  if (anomalous_train < 0 || anomalous_train > pool.count(Label::anomalous))
    throw std::invalid_argument("stratified_split: anomalous_train out of range");
  std::vector<int> healthy_idx, anomalous_idx;
  for (int i = 0; i < pool.size(); ++i)
    (pool.labels[i] == Label::healthy ? healthy_idx : anomalous_idx).push_back(i);
  shuffle_in_place(healthy_idx, rng);
  shuffle_in_place(anomalous_idx, rng);
  std::pair<LabeledDataset, LabeledDataset> out;
  for (int j = 0; j < static_cast<int>(healthy_idx.size()); ++j)
    (j < healthy_train ? out.first : out.second)
        .push(pool.signals[healthy_idx[j]], Label::healthy);
  for (int j = 0; j < static_cast<int>(anomalous_idx.size()); ++j)
    (j < anomalous_train ? out.first : out.second)
        .push(pool.signals[anomalous_idx[j]], Label::anomalous);
  return out;
}

/// IID uniform sensor readings; anomalous samples get biased Gaussian noise
/// injected on a random sensor subset.
inline LabeledDataset make_uniform_dataset(int n_nodes, int n_healthy, int n_anomalous,
                                           double lo, double hi, const AnomalySpec& spec,
                                           Rng& rng) {
  LabeledDataset ds;
  for (int i = 0; i < n_healthy; ++i)
    ds.push(uniform_signal(n_nodes, lo, hi, rng), Label::healthy);
  for (int i = 0; i < n_anomalous; ++i)
    ds.push(inject_anomaly(uniform_signal(n_nodes, lo, hi, rng), spec, rng),
            Label::anomalous);
  return ds;
}

// ---------------------------------------------------------------------------
// Station time-series ingestion

/// Geographic selection window; bounds are inclusive.
struct BoundingBox {
  double lat_min = -90.0, lat_max = 90.0;
  double lon_min = -180.0, lon_max = 180.0;

  bool contains(double lat, double lon) const {
    return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
  }
};

/// Daily station readings. coords holds (lat, lon) per station; samples are
/// per-date vectors over stations, always in Celsius after ingestion.
struct StationSeries {
  std::vector<std::string> station_ids;
  Coords coords;
  std::vector<std::string> dates;
  std::vector<Eigen::VectorXd> samples;
  char source_unit = 'C';

  int n_stations() const { return static_cast<int>(station_ids.size()); }
};

/// Node embedding for graph construction: x = longitude, y = latitude.
inline Coords station_graph_coords(const StationSeries& series) {
  Coords c(series.n_stations(), 2);
  for (int i = 0; i < series.n_stations(); ++i) {
    c(i, 0) = series.coords(i, 1);
    c(i, 1) = series.coords(i, 0);
  }
  return c;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline double parse_number(const std::string& cell, const std::string& context) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("non-numeric cell: '" + cell + "' in " + context);
  return value;
}

}  // namespace detail

/// Parses a station CSV:
///   #unit=F|C
///   #station,lat,lon          (schema comment, optional)
///   @<id>,<lat>,<lon>         one line per station
///   <date>,v_1,...,v_S        one line per day; empty cell = missing
///
/// Stations outside the bounding box are dropped first; then every row with
/// a missing value among the remaining stations is dropped. Fahrenheit data
/// is converted to Celsius via (F - 32) * 5 / 9.
inline StationSeries ingest_station_csv(const std::string& path,
                                        const std::optional<BoundingBox>& bbox = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_station_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("malformed header: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "#unit=F" && line != "#unit=C")
    throw std::runtime_error("malformed header: expected #unit=F or #unit=C");
  const char unit = line.back();

  StationSeries all;
  all.source_unit = unit;
  std::vector<double> lats, lons;
  bool in_data = false;
  std::vector<std::string> raw_dates;
  std::vector<std::vector<double>> raw_rows;  // NaN = missing

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!in_data && line.front() == '#') continue;  // schema comment
    if (!in_data && line.front() == '@') {
      const auto cells = detail::split_csv(line.substr(1));
      if (cells.size() != 3)
        throw std::runtime_error("malformed header: bad station line '" + line + "'");
      all.station_ids.push_back(cells[0]);
      lats.push_back(detail::parse_number(cells[1], "station " + cells[0]));
      lons.push_back(detail::parse_number(cells[2], "station " + cells[0]));
      continue;
    }
    in_data = true;
    const auto cells = detail::split_csv(line);
    if (cells.size() != all.station_ids.size() + 1)
      throw std::runtime_error("malformed row: expected " +
                               std::to_string(all.station_ids.size() + 1) + " cells, got " +
                               std::to_string(cells.size()));
    raw_dates.push_back(cells[0]);
    std::vector<double> row(all.station_ids.size());
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] = cells[j + 1].empty()
                   ? std::numeric_limits<double>::quiet_NaN()
                   : detail::parse_number(cells[j + 1], "row " + cells[0]);
    raw_rows.push_back(std::move(row));
  }
  if (all.station_ids.empty()) throw std::runtime_error("empty result: no stations");

  std::vector<int> keep;
  for (std::size_t j = 0; j < all.station_ids.size(); ++j)
    if (!bbox || bbox->contains(lats[j], lons[j])) keep.push_back(static_cast<int>(j));
  if (keep.empty())
    throw std::runtime_error("empty result: bounding box excludes all stations");

  StationSeries out;
  out.source_unit = unit;
  out.coords = Coords(static_cast<int>(keep.size()), 2);
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.station_ids.push_back(all.station_ids[keep[j]]);
    out.coords(static_cast<int>(j), 0) = lats[keep[j]];
    out.coords(static_cast<int>(j), 1) = lons[keep[j]];
  }
  for (std::size_t r = 0; r < raw_rows.size(); ++r) {
    Eigen::VectorXd sample(static_cast<int>(keep.size()));
    bool missing = false;
    for (std::size_t j = 0; j < keep.size() && !missing; ++j) {
      const double v = raw_rows[r][keep[j]];
      if (std::isnan(v)) missing = true;
      else sample(static_cast<int>(j)) = unit == 'F' ? (v - 32.0) * 5.0 / 9.0 : v;
    }
    if (missing) continue;
    out.dates.push_back(raw_dates[r]);
    out.samples.push_back(std::move(sample));
  }
  if (out.samples.empty())
    throw std::runtime_error("empty result: every row has missing values");
  return out;
}

/// Writes a station CSV with the series' stored values labeled as `unit`.
/// NaN entries become empty cells. Intended for fixtures and round trips;
/// no unit conversion is applied.
inline void write_station_csv(const StationSeries& series, const std::string& path,
                              char unit) {
  if (unit != 'F' && unit != 'C')
    throw std::invalid_argument("write_station_csv: unit must be F or C");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_station_csv: cannot open " + path);
  out << "#unit=" << unit << "\n#station,lat,lon\n";
  for (int j = 0; j < series.n_stations(); ++j)
    out << '@' << series.station_ids[j] << ',' << detail::fmt_double(series.coords(j, 0))
        << ',' << detail::fmt_double(series.coords(j, 1)) << '\n';
  for (std::size_t r = 0; r < series.samples.size(); ++r) {
    out << series.dates[r];
    for (int j = 0; j < series.n_stations(); ++j) {
      out << ',';
      const double v = series.samples[r](j);
      if (!std::isnan(v)) out << detail::fmt_double(v);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_station_csv: write failed for " + path);
}

}  // namespace uemgsp
