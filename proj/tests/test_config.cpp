#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "ttsa/config.hpp"
#include "ttsa/error.hpp"

using namespace ttsa;

namespace {

const char* kSysA = R"({
  "n": 1, "m": 1,
  "A11": [[2]], "A12": [[1]], "A21": [[1]], "A22": [[1]],
  "b1": [1], "b2": [2],
  "noise": {"Gamma11": [[1]], "Gamma12": [[0]], "Gamma22": [[1]],
            "distribution": "gaussian"},
  "beta": {"base": 1, "tau": 10, "alpha": 1},
  "gamma": {"base": 1, "tau": 10, "alpha": 0.7},
  "run": {"replicas": 100, "steps": 1000, "seed": 3, "checkpoints": [10, 1000]}
})";

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("parse and canonical round trip") {
  const RunConfig c = parse_config_text(kSysA);
  CHECK(c.a11(0, 0) == 2.0);
  CHECK(c.b2(0) == 2.0);
  CHECK(c.beta == ScheduleParams{1, 10, 1});
  CHECK(c.gamma == ScheduleParams{1, 10, 0.7});
  CHECK(c.run.replicas == 100);
  CHECK(c.run.checkpoints == std::vector<std::uint64_t>{10, 1000});
  CHECK(c.run.jobs == 1);
  const auto canonical = to_json(c);
  const RunConfig back = parse_config(canonical);
  CHECK(back == c);
  CHECK(to_json(back).dump() == canonical.dump());
  CHECK(c.system().n() == 1);
  CHECK(c.schedules().beta_bar() == doctest::Approx(0.1));
}

TEST_CASE("property: random configs round trip exactly") {
  test::Rng rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const SystemSpec s = test::random_spec(rng, 4, 0.0);
    RunConfig c;
    c.a11 = s.a11();
    c.a12 = s.a12();
    c.a21 = s.a21();
    c.a22 = s.a22();
    c.b1 = s.b1();
    c.b2 = s.b2();
    c.gamma11 = s.noise().gamma11;
    c.gamma12 = s.noise().gamma12;
    c.gamma22 = s.noise().gamma22;
    c.distribution = trial % 2 ? NoiseDistribution::Gaussian : NoiseDistribution::ScaledRademacher;
    c.beta = {0.1 + trial, 3.7, 1.0};
    c.gamma = {1.0 / 3.0, 0.9, 0.51 + 0.01 * trial};
    if (trial % 3 == 0) c.init_theta = test::random_vector(rng, s.n());
    c.run.seed = 1234567890123ull + static_cast<std::uint64_t>(trial);
    const RunConfig back = parse_config_text(to_json(c).dump());
    CHECK(back == c);
  }
}

TEST_CASE("optional blocks default") {
  auto j = nlohmann::json::parse(kSysA);
  j.erase("b1");
  j.erase("run");
  j["noise"].erase("Gamma12");
  j["noise"].erase("distribution");
  const RunConfig c = parse_config(j);
  CHECK(c.b1(0) == 0.0);
  CHECK(c.gamma12(0, 0) == 0.0);
  CHECK(c.distribution == NoiseDistribution::Gaussian);
  CHECK(c.run == RunParams{});
}

TEST_CASE("parse errors") {
  CHECK(kind_of([] { parse_config_text("{not json"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_config_text("[1, 2]"); }) == ErrorKind::Parse);
  auto missing = nlohmann::json::parse(kSysA);
  missing.erase("A22");
  CHECK(kind_of([&] { parse_config(missing); }) == ErrorKind::Parse);
  auto ragged = nlohmann::json::parse(kSysA);
  ragged["A11"] = nlohmann::json::parse("[[1, 2], [3]]");
  CHECK(kind_of([&] { parse_config(ragged); }) == ErrorKind::Parse);
  auto shape = nlohmann::json::parse(kSysA);
  shape["A12"] = nlohmann::json::parse("[[1, 2]]");
  CHECK(kind_of([&] { parse_config(shape); }) == ErrorKind::Parse);
  auto text = nlohmann::json::parse(kSysA);
  text["beta"]["tau"] = "ten";
  CHECK(kind_of([&] { parse_config(text); }) == ErrorKind::Parse);
  auto dist = nlohmann::json::parse(kSysA);
  dist["noise"]["distribution"] = "cauchy";
  CHECK(kind_of([&] { parse_config(dist); }) == ErrorKind::Parse);
  CHECK(kind_of([] { load_config("/nonexistent/config.json"); }) == ErrorKind::Parse);
}

TEST_CASE("averaging config") {
  const auto c = parse_averaging_config(nlohmann::json::parse(
      R"({"A": [[1, 0.5], [0, 2]], "b": [1, -1], "Gamma": [[1, 0], [0, 1]],
          "run": {"replicas": 10, "steps": 50}})"));
  CHECK(c.a(0, 1) == 0.5);
  CHECK(c.fast == ScheduleParams{1, 1, 0.7});
  CHECK(c.run.replicas == 10);
}

TEST_CASE("prediction CSV round trips at full precision") {
  test::Rng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const SystemSpec s = test::random_spec(rng, 4, 0.5);
    PredictionBundle p{predict_full(s, 0.5), predict_reduced(s, 0.5), optimal_gain_covariance(s)};
    std::stringstream ss;
    write_prediction_csv(ss, p);
    const PredictionBundle back = read_prediction_csv(ss);
    CHECK(back.full.sigma11 == p.full.sigma11);
    CHECK(back.full.sigma12 == p.full.sigma12);
    CHECK(back.full.sigma22 == p.full.sigma22);
    CHECK(back.full.delta == p.full.delta);
    CHECK(back.full.q == p.full.q);
    CHECK(back.full.beta_bar == p.full.beta_bar);
    CHECK(back.sigma11_reduced == p.sigma11_reduced);
    CHECK(back.optimal.sigma11 == p.optimal.sigma11);
    CHECK(back.optimal.g1 == p.optimal.g1);
    CHECK(back.optimal.g == p.optimal.g);
  }
}

TEST_CASE("CSV writers") {
  std::ostringstream traj;
  write_trajectory_csv(traj, {{0, Vector::Constant(1, 0.5), Vector::Constant(2, 1.0)}});
  CHECK(traj.str() == "k,theta_0,r_0,r_1\n0,0.5,1,1\n");

  std::ostringstream rows;
  write_matrix_rows(rows, "X", (Matrix(1, 2) << 0.1, -3).finished());
  CHECK(rows.str() == "X,0,0,0.10000000000000001\nX,0,1,-3\n");

  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
}
