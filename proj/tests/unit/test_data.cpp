#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "newsamp/data.hpp"
#include "newsamp/linalg.hpp"
#include "oracles.hpp"

using namespace newsamp;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path("/tmp/newsamp_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) const {
    std::ofstream out(path);
    out << content;
  }
  std::string read() const {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  }
};

SpikedModelSpec base_spec(std::size_t n, Index p) {
  SpikedModelSpec spec;
  spec.n = n;
  spec.p = p;
  spec.r_spikes = 0;
  spec.seed = 11;
  return spec;
}

}  // namespace

TEST_CASE("flat model matches the scaled identity covariance") {
  SpikedModelSpec spec = base_spec(100000, 8);
  Dataset ds = generate_spiked(spec);
  Matrix cov = ds.X.transpose() * ds.X / static_cast<double>(ds.n());
  Matrix diff = cov - Matrix::Identity(8, 8);
  CHECK(spectral_norm(SymMatrix(diff)) < 0.05);
}

TEST_CASE("single spike shows up in the empirical spectrum") {
  SpikedModelSpec spec = base_spec(100000, 2);
  spec.r_spikes = 1;
  spec.spike_values = {10.0};
  Dataset ds = generate_spiked(spec);
  Matrix cov = ds.X.transpose() * ds.X / static_cast<double>(ds.n());
  auto dec = full_eigen(SymMatrix(cov));
  CHECK(std::abs(dec.values[0] - 10.0) < 0.5);
}

TEST_CASE("generation is deterministic in the seed") {
  SpikedModelSpec spec = base_spec(200, 6);
  spec.r_spikes = 2;
  spec.spike_values = {8.0, 4.0};
  Dataset a = generate_spiked(spec);
  Dataset b = generate_spiked(spec);
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  spec.seed = 12;
  Dataset c = generate_spiked(spec);
  CHECK((a.X - c.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sign-planted labels are balanced") {
  SpikedModelSpec spec = base_spec(10000, 5);
  spec.label_model = SpikedModelSpec::LabelModel::sign_planted;
  Dataset ds = generate_spiked(spec);
  double positives = 0;
  for (Index i = 0; i < ds.n(); ++i) {
    CHECK((ds.y[i] == 1.0 || ds.y[i] == -1.0));
    if (ds.y[i] > 0) positives += 1.0;
  }
  double sigma = std::sqrt(10000 * 0.25);
  CHECK(std::abs(positives - 5000.0) <= 4.0 * sigma);
}

TEST_CASE("spec validation names the broken constraint") {
  SpikedModelSpec spec = base_spec(10, 4);
  spec.r_spikes = 4;
  spec.spike_values = {5, 4, 3, 2};
  CHECK_THROWS_WITH_AS(generate_spiked(spec),
                       "spiked model needs r_spikes < p", InvalidInput);
  spec.r_spikes = 2;
  spec.spike_values = {4.0, 4.0};
  CHECK_THROWS_AS(generate_spiked(spec), InvalidInput);
}

TEST_CASE("csv loader maps two-valued labels and keeps features") {
  TempFile f("basic.csv");
  f.write("1,2,0\n3,4,1\n");
  Dataset ds = load_csv(f.path, 2);
  REQUIRE(ds.n() == 2);
  REQUIRE(ds.p() == 2);
  CHECK(ds.X(0, 0) == 1.0);
  CHECK(ds.X(0, 1) == 2.0);
  CHECK(ds.X(1, 0) == 3.0);
  CHECK(ds.X(1, 1) == 4.0);
  CHECK(ds.y[0] == -1.0);
  CHECK(ds.y[1] == 1.0);
  // Raw loading keeps 0/1.
  Dataset raw = load_csv(f.path, 2, LabelMap::none);
  CHECK(raw.y[0] == 0.0);
  CHECK(raw.y[1] == 1.0);
}

TEST_CASE("csv loader rejects empty and ragged input") {
  TempFile empty("empty.csv");
  empty.write("");
  CHECK_THROWS_AS(load_csv(empty.path, 0), ShapeError);

  TempFile ragged("ragged.csv");
  ragged.write("1,2,3\n4,5\n");
  CHECK_THROWS_AS(load_csv(ragged.path, 2), ShapeError);

  TempFile garbage("garbage.csv");
  garbage.write("1,two,3\n");
  try {
    load_csv(garbage.path, 2);
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
  }
}

TEST_CASE("libsvm loader densifies sparse rows") {
  TempFile f("rows.libsvm");
  f.write("+1 1:0.5 3:2\n-1 2:1\n");
  Dataset ds = load_libsvm(f.path, 3);
  REQUIRE(ds.n() == 2);
  REQUIRE(ds.p() == 3);
  CHECK(ds.X(0, 0) == 0.5);
  CHECK(ds.X(0, 1) == 0.0);
  CHECK(ds.X(0, 2) == 2.0);
  CHECK(ds.X(1, 1) == 1.0);
  CHECK(ds.y[0] == 1.0);
  CHECK(ds.y[1] == -1.0);
  // Dimension inferred from the largest index when not given.
  Dataset inferred = load_libsvm(f.path);
  CHECK(inferred.p() == 3);

  TempFile bad("bad.libsvm");
  bad.write("+1 1:0.5 oops\n");
  CHECK_THROWS_AS(load_libsvm(bad.path), ParseError);
}

TEST_CASE("loaders round-trip exactly") {
  SpikedModelSpec spec = base_spec(50, 7);
  spec.r_spikes = 2;
  spec.spike_values = {6.0, 3.0};
  spec.label_model = SpikedModelSpec::LabelModel::linear_gaussian;
  Dataset ds = generate_spiked(spec);

  TempFile csv("round.csv");
  save_csv(ds, csv.path);
  Dataset back = load_csv(csv.path, 7, LabelMap::none);
  CHECK((ds.X - back.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ds.y - back.y).cwiseAbs().maxCoeff() == 0.0);

  TempFile svm("round.libsvm");
  save_libsvm(ds, svm.path);
  Dataset back2 = load_libsvm(svm.path, 7, LabelMap::none);
  CHECK((ds.X - back2.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ds.y - back2.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardize centers and scales non-constant columns") {
  Dataset ds;
  ds.X.resize(2, 2);
  ds.X << 1, 5, 3, 5;  // second column constant
  ds.y = Vector::Zero(2);
  Dataset out = standardize(ds);
  CHECK(out.X(0, 0) == doctest::Approx(-1.0));
  CHECK(out.X(1, 0) == doctest::Approx(1.0));
  CHECK(out.X(0, 1) == 5.0);  // untouched
  CHECK(out.X(1, 1) == 5.0);

  // Idempotence and moment checks on random data.
  SpikedModelSpec spec = base_spec(500, 4);
  Dataset rnd = generate_spiked(spec);
  Dataset std1 = standardize(rnd);
  for (Index j = 0; j < 4; ++j) {
    double mean = std1.X.col(j).mean();
    double var = std1.X.col(j).squaredNorm() / 500.0 - mean * mean;
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(var - 1.0) < 1e-8);
  }
  Dataset std2 = standardize(std1);
  CHECK((std1.X - std2.X).cwiseAbs().maxCoeff() < 1e-10);
}
