#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "support.hpp"
#include "uemgsp/datagen.hpp"

using namespace uemgsp;
using Catch::Matchers::WithinAbs;

namespace {

Coords probe_coords() {
  Coords c(3, 2);
  c << 0.0, 0.0, 0.5, 0.25, 0.25, 0.5;
  return c;
}

std::string write_file(const testutil::TempDir& dir, const std::string& name,
                       const std::string& body) {
  const std::string path = dir.file(name);
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("smooth wave values at zero phase", "[datagen]") {
  WaveSignalState state;
  Rng rng(1);
  const Eigen::VectorXd s = smooth_wave_sample(probe_coords(), state, rng);
  CHECK_THAT(s(0), WithinAbs(2.0, 1e-12));   // cos 0 + cos 0
  CHECK_THAT(s(1), WithinAbs(-2.0, 1e-12));  // cos pi + cos pi
  CHECK_THAT(s(2), WithinAbs(1.0, 1e-12));   // cos pi/2 + cos 2pi
}

TEST_CASE("wave phases drift by bounded increments", "[datagen]") {
  WaveSignalState state;
  Rng rng(2);
  const Coords c = probe_coords();
  double prev_x = 0.0, prev_y = 0.0;
  for (int k = 1; k <= 200; ++k) {
    (void)smooth_wave_sample(c, state, rng);
    CHECK(std::abs(state.theta_x - prev_x) <= 0.05);
    CHECK(std::abs(state.theta_y - prev_y) <= 0.025);
    prev_x = state.theta_x;
    prev_y = state.theta_y;
    CHECK(std::abs(state.theta_x) <= 0.05 * k);
    CHECK(std::abs(state.theta_y) <= 0.025 * k);
  }
  CHECK(state.theta_x != 0.0);  // the walk actually moves
}

TEST_CASE("interference values at zero phase", "[datagen]") {
  Coords c(3, 2);
  c << 0.0, 0.0, 0.1, 0.0, 0.0, 1.0 / 12.0;
  const Eigen::VectorXd v = wave_interference(c, WaveSignalState{});
  CHECK(v(0) == 0.2);                      // 0.1 * (cos 0 + cos 0), exact
  CHECK_THAT(v(1), WithinAbs(0.0, 1e-12)); // cos pi cancels cos 0
  CHECK_THAT(v(2), WithinAbs(0.0, 1e-12));
}

TEST_CASE("interference amplitude never exceeds 0.2", "[datagen]") {
  Rng rng(3);
  Coords c(50, 2);
  for (int i = 0; i < 50; ++i) {
    c(i, 0) = uniform_unit(rng);
    c(i, 1) = uniform_unit(rng);
  }
  WaveSignalState state{uniform_real(rng, -3, 3), uniform_real(rng, -3, 3)};
  const Eigen::VectorXd v = wave_interference(c, state);
  CHECK(v.cwiseAbs().maxCoeff() <= 0.2 + 1e-15);
}

TEST_CASE("wave dataset pairs both classes on one phase stream", "[datagen]") {
  Rng rng(4);
  Coords c(10, 2);
  for (int i = 0; i < 10; ++i) {
    c(i, 0) = uniform_unit(rng);
    c(i, 1) = uniform_unit(rng);
  }

  Rng gen(55);
  const LabeledDataset ds = make_wave_dataset(c, 6, 4, gen);
  REQUIRE(ds.size() == 10);
  CHECK(ds.count(Label::healthy) == 6);
  CHECK(ds.count(Label::anomalous) == 4);

  // replay the documented construction: at step i both classes share phases
  Rng replay(55);
  WaveSignalState state;
  int cursor = 0;
  for (int i = 0; i < 6; ++i) {
    const Eigen::VectorXd interference = wave_interference(c, state);
    const Eigen::VectorXd smooth = smooth_wave_sample(c, state, replay);
    REQUIRE(ds.labels[cursor] == Label::healthy);
    REQUIRE((ds.signals[cursor] - smooth).cwiseAbs().maxCoeff() == 0.0);
    ++cursor;
    if (i < 4) {
      REQUIRE(ds.labels[cursor] == Label::anomalous);
      REQUIRE((ds.signals[cursor] - (smooth + interference)).cwiseAbs().maxCoeff() == 0.0);
      ++cursor;
    }
  }

  // consequence: every anomalous sample differs from its paired healthy one
  // by at most the interference amplitude
  for (int i = 0; i < 4; ++i)
    CHECK((ds.signals[2 * i + 1] - ds.signals[2 * i]).cwiseAbs().maxCoeff() <= 0.2 + 1e-15);
}

TEST_CASE("uniform signals stay in range with the right mean", "[datagen]") {
  Rng rng(6);
  double sum = 0.0;
  const int draws = 100;
  for (int rep = 0; rep < draws; ++rep) {
    const Eigen::VectorXd s = uniform_signal(1000, -15.0, 15.0, rng);
    CHECK(s.minCoeff() >= -15.0);
    CHECK(s.maxCoeff() < 15.0);
    sum += s.sum();
  }
  // sd of the overall mean: 30 / sqrt(12 * 1e5); allow 5 sigma
  CHECK_THAT(sum / (1000.0 * draws),
             WithinAbs(0.0, 5.0 * 30.0 / std::sqrt(12.0 * 1000.0 * draws)));
}

TEST_CASE("anomaly bias draws cover plus-minus integers up to b_max", "[datagen]") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const int v = draw_anomaly_mean(rng, 1.0);
    REQUIRE((v == 1 || v == -1));
  }

  std::map<int, int> counts;
  const int draws = 16000;
  for (int i = 0; i < draws; ++i) ++counts[draw_anomaly_mean(rng, 4.9)];  // floor -> 4
  REQUIRE(counts.size() == 8);
  double mean = 0.0;
  for (const auto& [v, c] : counts) {
    REQUIRE(std::abs(v) >= 1);
    REQUIRE(std::abs(v) <= 4);
    CHECK(c > draws / 8 - 5 * 42);  // 5 sigma around the fair share of 2000
    CHECK(c < draws / 8 + 5 * 42);
    mean += static_cast<double>(v) * c;
  }
  CHECK_THAT(mean / draws, WithinAbs(0.0, 5.0 * 2.74 / std::sqrt(draws)));

  CHECK_THROWS_AS(draw_anomaly_mean(rng, 0.5), std::invalid_argument);
}

TEST_CASE("anomaly injection touches a bounded random sensor subset", "[datagen]") {
  Rng rng(8);
  const AnomalySpec spec{4.0, 1.0, 3};
  const Eigen::VectorXd clean = Eigen::VectorXd::Zero(10);

  std::set<int> seen_counts;
  for (int rep = 0; rep < 300; ++rep) {
    const Eigen::VectorXd out = inject_anomaly(clean, spec, rng);
    int changed = 0;
    for (int i = 0; i < 10; ++i)
      if (out(i) != 0.0) ++changed;
    REQUIRE(changed >= 1);
    REQUIRE(changed <= 3);
    seen_counts.insert(changed);
  }
  CHECK(seen_counts == std::set<int>{1, 2, 3});
}

TEST_CASE("anomaly injection leaves untouched coordinates bitwise intact", "[datagen]") {
  Rng rng(9);
  Eigen::VectorXd base(6);
  base << 0.1, -2.3, 4.5, -0.7, 11.0, 1.0 / 3.0;
  const Eigen::VectorXd out = inject_anomaly(base, AnomalySpec{2.0, 0.5, 2}, rng);
  int untouched = 0;
  for (int i = 0; i < 6; ++i)
    if (out(i) == base(i)) ++untouched;
  CHECK(untouched >= 4);  // at most two sensors move
}

TEST_CASE("anomaly spec validation", "[datagen]") {
  Rng rng(10);
  const Eigen::VectorXd clean = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(inject_anomaly(clean, AnomalySpec{0.5, 1.0, 2}, rng), std::invalid_argument);
  CHECK_THROWS_AS(inject_anomaly(clean, AnomalySpec{4.0, 0.0, 2}, rng), std::invalid_argument);
  CHECK_THROWS_AS(inject_anomaly(clean, AnomalySpec{4.0, 1.0, 0}, rng), std::invalid_argument);
  CHECK_THROWS_AS(inject_anomaly(clean, AnomalySpec{4.0, 1.0, 5}, rng), std::invalid_argument);
  CHECK_NOTHROW(inject_anomaly(clean, AnomalySpec{4.0, 1.0, 4}, rng));
}

TEST_CASE("uniform dataset lays out healthy then anomalous", "[datagen]") {
  Rng rng(11);
  const LabeledDataset ds =
      make_uniform_dataset(5, 3, 4, -2.0, 5.0, AnomalySpec{4.0, 1.0, 2}, rng);
  REQUIRE(ds.size() == 7);
  CHECK(ds.count(Label::healthy) == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(ds.labels[i] == Label::healthy);
    CHECK(ds.signals[i].minCoeff() >= -2.0);
    CHECK(ds.signals[i].maxCoeff() < 5.0);
  }
  for (int i = 3; i < 7; ++i) CHECK(ds.labels[i] == Label::anomalous);
}

TEST_CASE("stratified split keeps exact class counts and the pool's signals", "[datagen]") {
  Rng rng(12);
  const LabeledDataset pool =
      make_uniform_dataset(4, 8, 12, -15.0, 15.0, AnomalySpec{4.0, 1.0, 2}, rng);

  Rng split_rng(13);
  const auto [train, test] = stratified_split(pool, 5, 7, split_rng);
  CHECK(train.count(Label::healthy) == 5);
  CHECK(train.count(Label::anomalous) == 7);
  CHECK(test.count(Label::healthy) == 3);
  CHECK(test.count(Label::anomalous) == 5);

  // every pool signal appears exactly once across the two splits
  std::vector<bool> used(pool.size(), false);
  const auto consume = [&](const LabeledDataset& part) {
    for (int i = 0; i < part.size(); ++i) {
      bool found = false;
      for (int j = 0; j < pool.size() && !found; ++j) {
        if (used[j] || pool.labels[j] != part.labels[i]) continue;
        if ((pool.signals[j] - part.signals[i]).cwiseAbs().maxCoeff() == 0.0) {
          used[j] = true;
          found = true;
        }
      }
      REQUIRE(found);
    }
  };
  consume(train);
  consume(test);
  for (const bool u : used) CHECK(u);
}

TEST_CASE("stratified split is seeded and validates its bounds", "[datagen]") {
  Rng rng(14);
  const LabeledDataset pool =
      make_uniform_dataset(3, 4, 4, -1.0, 1.0, AnomalySpec{4.0, 1.0, 2}, rng);

  Rng a(9), b(9);
  const auto [t1, v1] = stratified_split(pool, 2, 2, a);
  const auto [t2, v2] = stratified_split(pool, 2, 2, b);
  for (int i = 0; i < t1.size(); ++i)
    REQUIRE((t1.signals[i] - t2.signals[i]).cwiseAbs().maxCoeff() == 0.0);

  Rng c(9);
  CHECK_THROWS_AS(stratified_split(pool, 5, 2, c), std::invalid_argument);
  CHECK_THROWS_AS(stratified_split(pool, 2, 5, c), std::invalid_argument);
  CHECK_THROWS_AS(stratified_split(pool, -1, 2, c), std::invalid_argument);
}

TEST_CASE("station csv ingestion converts units and drops broken rows", "[datagen]") {
  testutil::TempDir dir("station");
  const std::string path = write_file(dir, "s.csv",
                                      "#unit=F\n"
                                      "#station,lat,lon\n"
                                      "@s1,40,-100\n"
                                      "@s2,45,-105\n"
                                      "@s3,60,-100\n"
                                      "2020-01-01,32,50,10\n"
                                      "2020-01-02,41,,14\n"
                                      "2020-01-03,50,59,23\n");

  const StationSeries all = ingest_station_csv(path);
  REQUIRE(all.n_stations() == 3);
  REQUIRE(all.samples.size() == 2);  // the row with the missing cell is gone
  CHECK(all.source_unit == 'F');
  CHECK(all.dates == std::vector<std::string>{"2020-01-01", "2020-01-03"});

  // fahrenheit converted: 32F is exactly 0C, and the others follow (F-32)*5/9
  CHECK(all.samples[0](0) == 0.0);
  CHECK(all.samples[0](1) == (50.0 - 32.0) * 5.0 / 9.0);
  CHECK(all.samples[0](2) == (10.0 - 32.0) * 5.0 / 9.0);
  CHECK(all.samples[1](2) == -5.0);  // 23F

  // graph coords swap to (lon, lat)
  const Coords gc = station_graph_coords(all);
  CHECK(gc(0, 0) == -100.0);
  CHECK(gc(0, 1) == 40.0);
}

TEST_CASE("station bounding box filters before row dropping", "[datagen]") {
  testutil::TempDir dir("station-bbox");
  const std::string path = write_file(dir, "s.csv",
                                      "#unit=C\n"
                                      "@s1,40,-100\n"
                                      "@s2,45,-105\n"
                                      "@s3,60,-100\n"
                                      "2020-01-01,1,2,3\n"
                                      "2020-01-02,4,5,\n"  // missing only at s3
                                      "2020-01-03,7,8,9\n");

  // without a box the second row is dropped
  CHECK(ingest_station_csv(path).samples.size() == 2);

  // a box that excludes s3 keeps the row: the missing cell is outside the box
  const BoundingBox box{35.0, 50.0, -115.0, -90.0};
  const StationSeries in_box = ingest_station_csv(path, box);
  REQUIRE(in_box.n_stations() == 2);
  CHECK(in_box.station_ids == std::vector<std::string>{"s1", "s2"});
  REQUIRE(in_box.samples.size() == 3);
  CHECK(in_box.samples[1](0) == 4.0);
  CHECK(in_box.samples[1](1) == 5.0);

  const BoundingBox nowhere{0.0, 1.0, 0.0, 1.0};
  CHECK_THROWS_AS(ingest_station_csv(path, nowhere), std::runtime_error);
}

TEST_CASE("station csv rejects malformed input", "[datagen]") {
  testutil::TempDir dir("station-bad");

  CHECK_THROWS_AS(ingest_station_csv(dir.file("absent.csv")), std::runtime_error);

  const auto expect_throw = [&](const std::string& name, const std::string& body) {
    CHECK_THROWS_AS(ingest_station_csv(write_file(dir, name, body)), std::runtime_error);
  };
  expect_throw("empty.csv", "");
  expect_throw("unit.csv", "#unit=K\n@s1,0,0\n2020-01-01,1\n");
  expect_throw("nohash.csv", "unit=C\n@s1,0,0\n2020-01-01,1\n");
  expect_throw("station.csv", "#unit=C\n@s1,0\n2020-01-01,1\n");
  expect_throw("nonnum.csv", "#unit=C\n@s1,0,0\n2020-01-01,abc\n");
  expect_throw("cells.csv", "#unit=C\n@s1,0,0\n2020-01-01,1,2\n");
  expect_throw("nostations.csv", "#unit=C\n");
  expect_throw("allmissing.csv", "#unit=C\n@s1,0,0\n@s2,1,1\n2020-01-01,,5\n2020-01-02,3,\n");
}

TEST_CASE("station csv writer round-trips through ingestion", "[datagen]") {
  StationSeries series;
  series.station_ids = {"a", "b"};
  series.coords = Coords(2, 2);
  series.coords << 40.25, -100.5, 41.0, -101.0 / 3.0;
  series.dates = {"2021-06-01", "2021-06-02", "2021-06-03"};
  series.samples = {Eigen::Vector2d(1.5, -2.25), Eigen::Vector2d(0.1, 22.0 / 7.0),
                    Eigen::Vector2d(std::nan(""), 4.0)};

  testutil::TempDir dir("station-rt");
  const std::string path = dir.file("rt.csv");
  write_station_csv(series, path, 'C');

  const StationSeries back = ingest_station_csv(path);
  REQUIRE(back.n_stations() == 2);
  CHECK(back.station_ids == series.station_ids);
  CHECK((back.coords - series.coords).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.samples.size() == 2);  // the NaN row writes an empty cell, then drops
  CHECK(back.dates == std::vector<std::string>{"2021-06-01", "2021-06-02"});
  for (int r = 0; r < 2; ++r)
    CHECK((back.samples[r] - series.samples[r]).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(write_station_csv(series, dir.file("bad.csv"), 'K'),
                  std::invalid_argument);
}

TEST_CASE("checked-in station fixture ingests cleanly", "[datagen]") {
  const std::string path = std::string(UEMGSP_TEST_DATA_DIR) + "/station_small.csv";
  const StationSeries all = ingest_station_csv(path);
  CHECK(all.n_stations() == 12);
  CHECK(all.samples.size() == 38);  // 40 rows, two carry missing cells

  const BoundingBox box{35.0, 50.0, -115.0, -90.0};
  const StationSeries in_box = ingest_station_csv(path, box);
  CHECK(in_box.n_stations() == 10);
  // one of the two broken rows is only missing at an excluded station
  CHECK(in_box.samples.size() == 39);

  // station s01 reports exactly 32F on the first day: 0C after conversion
  REQUIRE(in_box.station_ids[0] == "s01");
  CHECK(in_box.samples[0](0) == 0.0);
}
