#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "polya/model_io.hpp"

using namespace polya;
using nlohmann::json;

#ifndef POLYA_TEST_DATA
#define POLYA_TEST_DATA "tests/data"
#endif

namespace {

std::string data_path(const std::string& name) { return std::string(POLYA_TEST_DATA) + "/" + name; }

json partition_model_json() {
  return json::parse(R"({
    "states": ["x1", "x2", "x3"],
    "nu": ["1/5", "3/10", "1/2"],
    "theta": 2,
    "kernel": {"type": "partition", "blocks": [["x1"], ["x2", "x3"]]}
  })");
}

}  // namespace

TEST_CASE("parse a partition model with exact scalars") {
  auto parsed = parse_model(partition_model_json());
  auto& fm = std::get<FiniteModel>(parsed);
  CHECK(fm.mode == ScalarMode::Exact);
  CHECK(fm.kernel_form == KernelForm::Partition);
  REQUIRE(fm.exact.has_value());
  CHECK_FALSE(fm.approx.has_value());
  REQUIRE(fm.partition.has_value());
  CHECK(fm.partition->assignment() == std::vector<std::size_t>{0, 1, 1});

  CHECK(fm.exact->joint_probability(Trajectory(fm.space, {1, 2})) == Rat(13, 80));
  CHECK(fm.exact->concentration() == Rat(2));

  // theta accepts "p/q" strings too
  auto j = partition_model_json();
  j["theta"] = "4/2";
  auto again = std::get<FiniteModel>(parse_model(j));
  CHECK(again.exact->concentration() == Rat(2));
}

TEST_CASE("decimal scalars flip the whole model to float mode") {
  auto j = partition_model_json();
  j["nu"] = {0.2, 0.3, 0.5};
  auto fm = std::get<FiniteModel>(parse_model(j));
  CHECK(fm.mode == ScalarMode::Float);
  CHECK_FALSE(fm.exact.has_value());
  REQUIRE(fm.approx.has_value());
  auto p = fm.approx->predictive(Trajectory(fm.space, {1}));
  CHECK(p[2] == doctest::Approx(13.0 / 24.0));
}

TEST_CASE("kernel statements") {
  auto j = partition_model_json();
  j["kernel"] = {{"type", "identity"}};
  auto id = std::get<FiniteModel>(parse_model(j));
  CHECK(id.kernel_form == KernelForm::Identity);
  REQUIRE(id.partition.has_value());
  CHECK(id.partition->num_blocks() == 3);

  j["kernel"] = {{"type", "iid"}};
  j.erase("theta");
  auto iid = std::get<FiniteModel>(parse_model(j));
  CHECK(iid.kernel_form == KernelForm::Iid);
  CHECK(iid.exact->kind() == PredictiveFamily<Rat>::Kind::Iid);
  REQUIRE(iid.partition.has_value());
  CHECK(iid.partition->num_blocks() == 1);

  // explicit rows that happen to be a conditional kernel are recognized
  auto e = partition_model_json();
  e["kernel"] = {{"type", "explicit"},
                 {"rows", json::array({json::array({"1", "0", "0"}),
                                       json::array({"0", "3/8", "5/8"}),
                                       json::array({"0", "3/8", "5/8"})})}};
  auto ex = std::get<FiniteModel>(parse_model(e));
  CHECK(ex.kernel_form == KernelForm::Explicit);
  REQUIRE(ex.partition.has_value());
  CHECK(ex.partition->assignment() == std::vector<std::size_t>{0, 1, 1});

  // and rows that are not stay unrecognized
  auto b = partition_model_json();
  b["states"] = {"x1", "x2"};
  b["nu"] = {"1/2", "1/2"};
  b["kernel"] = {{"type", "explicit"},
                 {"rows", json::array({json::array({"1/2", "1/2"}), json::array({"0", "1"})})}};
  auto bad = std::get<FiniteModel>(parse_model(b));
  CHECK(bad.kernel_form == KernelForm::Explicit);
  CHECK_FALSE(bad.partition.has_value());
}

TEST_CASE("coefficient statements") {
  auto j = partition_model_json();
  j.erase("theta");
  j["coefficients"] = {{"type", "list"}, {"values", {"1/3", "1/2"}}};
  auto fm = std::get<FiniteModel>(parse_model(j));
  CHECK(fm.exact->kind() == PredictiveFamily<Rat>::Kind::Sufficientness);

  // a list alongside theta is contradictory
  auto both = partition_model_json();
  both["coefficients"] = {{"type", "list"}, {"values", {"1/3"}}};
  CHECK_THROWS_AS(parse_model(both), ValidationError);

  // mvps coefficients require theta
  auto c = partition_model_json();
  c["coefficients"] = {{"type", "mvps"}};
  CHECK_NOTHROW(parse_model(c));
  c.erase("theta");
  CHECK_THROWS_AS(parse_model(c), ParseError);

  // iid kernels take neither theta nor coefficients
  auto i = partition_model_json();
  i["kernel"] = {{"type", "iid"}};
  CHECK_THROWS_AS(parse_model(i), ValidationError);

  // non-iid kernels need some statement of the mixing
  auto m = partition_model_json();
  m.erase("theta");
  CHECK_THROWS_AS(parse_model(m), ParseError);
}

TEST_CASE("malformed finite models") {
  auto dup = partition_model_json();
  dup["states"] = {"x1", "x1", "x3"};
  CHECK_THROWS_AS(parse_model(dup), Error);

  auto shortnu = partition_model_json();
  shortnu["nu"] = {"1/2", "1/2"};
  CHECK_THROWS_AS(parse_model(shortnu), Error);

  auto negnu = partition_model_json();
  negnu["nu"] = {"-1/5", "1/2", "7/10"};
  CHECK_THROWS_AS(parse_model(negnu), Error);

  auto notprob = partition_model_json();
  notprob["nu"] = {"1/5", "1/5", "1/5"};
  CHECK_THROWS_AS(parse_model(notprob), Error);

  auto badfrac = partition_model_json();
  badfrac["nu"] = {"1/5", "3/10", "1//2"};
  CHECK_THROWS_AS(parse_model(badfrac), ParseError);

  auto badblocks = partition_model_json();
  badblocks["kernel"] = {{"type", "partition"}, {"blocks", json::array({json::array({"x1"})})}};
  CHECK_THROWS_AS(parse_model(badblocks), Error);

  auto badtype = partition_model_json();
  badtype["kernel"] = {{"type", "banana"}};
  CHECK_THROWS_AS(parse_model(badtype), ParseError);
}

TEST_CASE("finite round trip preserves the law") {
  auto parsed = parse_model(partition_model_json());
  auto& fm = std::get<FiniteModel>(parsed);
  auto again = std::get<FiniteModel>(parse_model(model_to_json(fm)));
  CHECK(again.mode == ScalarMode::Exact);
  CHECK(again.kernel_form == fm.kernel_form);
  for (const auto& w : oracles::all_words(3, 3)) {
    CHECK(fm.exact->joint_probability(Trajectory(fm.space, w)) ==
          again.exact->joint_probability(Trajectory(again.space, w)));
  }
}

TEST_CASE("coefficient lists survive a round trip") {
  auto j = partition_model_json();
  j.erase("theta");
  j["coefficients"] = {{"type", "list"}, {"values", {"1/3", "1/2", "3/5"}}};
  auto fm = std::get<FiniteModel>(parse_model(j));
  auto out = model_to_json(fm);
  CHECK(out["coefficients"]["type"].get<std::string>() == "list");
  CHECK(out["coefficients"]["values"].size() == 3);
  auto again = std::get<FiniteModel>(parse_model(out));
  for (const auto& w : oracles::all_words(3, 3)) {
    CHECK(fm.exact->joint_probability(Trajectory(fm.space, w)) ==
          again.exact->joint_probability(Trajectory(again.space, w)));
  }
}

TEST_CASE("closed form sufficientness serializes as the urn statement") {
  auto parsed = parse_model(partition_model_json());
  auto fm = std::get<FiniteModel>(parsed);
  auto kern = conditional_kernel<Rat>(fm.exact->base_measure(), *fm.partition);
  fm.exact = PredictiveFamily<Rat>::sufficientness(fm.exact->base_measure(), kern,
                                                   CoefficientSequence<Rat>::closed_form(Rat(2)));
  auto out = model_to_json(fm);
  CHECK(out["theta"].get<std::string>() == "2");
  CHECK(out["coefficients"]["type"].get<std::string>() == "mvps");
  auto again = std::get<FiniteModel>(parse_model(out));
  CHECK(again.exact->kind() == PredictiveFamily<Rat>::Kind::Mvps);
  CHECK(again.exact->joint_probability(Trajectory(again.space, {1, 2})) == Rat(13, 80));
}

TEST_CASE("general model parse and round trip") {
  auto parsed = load_model(data_path("model_general_2bin.json"));
  auto& gm = std::get<GeneralModelFile>(parsed);
  CHECK(gm.model.num_bins() == 2);
  CHECK(gm.model.concentration() == Rat(1));
  CHECK(gm.model.tail_mass() == Rat(0));
  CHECK(exact_block_law(gm.model, std::vector<std::size_t>{0, 0}) == Rat(3, 8));

  auto again = std::get<GeneralModelFile>(parse_model(model_to_json(gm)));
  for (const auto& w : oracles::all_words(2, 3)) {
    CHECK(exact_block_law(gm.model, w) == exact_block_law(again.model, w));
  }

  // theta and probabilities must be exact in general models
  json g = {{"type", "general"},
            {"theta", 0.5},
            {"bins", json::array({json::object({{"lo", 0.0}, {"hi", 1.0}, {"prob", "1"}})})}};
  CHECK_THROWS_AS(parse_model(g), ParseError);
  g["theta"] = "1/2";
  CHECK_NOTHROW(parse_model(g));
  g["bins"][0]["prob"] = 0.5;
  CHECK_THROWS_AS(parse_model(g), ParseError);
}

TEST_CASE("truncated general models round trip through the tail") {
  json g = {{"type", "general"},
            {"theta", "1"},
            {"truncated", true},
            {"bins", json::array({json::object({{"lo", 0.0}, {"hi", 1.0}, {"prob", "1/3"}}),
                                  json::object({{"lo", 1.0}, {"hi", 2.0}, {"prob", "1/3"}})})}};
  auto gm = std::get<GeneralModelFile>(parse_model(g));
  CHECK(gm.model.tail_mass() == Rat(1, 3));

  auto out = model_to_json(gm);
  CHECK(out["truncated"].get<bool>());
  auto again = std::get<GeneralModelFile>(parse_model(out));
  CHECK(again.model.tail_mass() == Rat(1, 3));
  CHECK(exact_block_law(again.model, std::vector<std::size_t>{0}) ==
        exact_block_law(gm.model, std::vector<std::size_t>{0}));
}

TEST_CASE("load_model failure modes") {
  CHECK_THROWS_AS(load_model(data_path("missing.json")), ParseError);
  CHECK_THROWS_WITH_AS(load_model(data_path("missing.json")),
                       doctest::Contains("missing.json"), ParseError);
}

TEST_CASE("fixture models parse to the expected families") {
  auto part = std::get<FiniteModel>(load_model(data_path("model_partition_k3.json")));
  CHECK(part.exact->concentration() == Rat(2));

  auto dp = std::get<FiniteModel>(load_model(data_path("model_dp_k3.json")));
  CHECK(dp.kernel_form == KernelForm::Identity);

  auto iid = std::get<FiniteModel>(load_model(data_path("model_iid_k3.json")));
  CHECK(iid.exact->kind() == PredictiveFamily<Rat>::Kind::Iid);

  auto bad = std::get<FiniteModel>(load_model(data_path("model_bad_kernel.json")));
  CHECK_FALSE(bad.partition.has_value());

  auto wrong = std::get<FiniteModel>(load_model(data_path("model_wrong_coeffs.json")));
  CHECK(wrong.exact->kind() == PredictiveFamily<Rat>::Kind::Sufficientness);
}

TEST_CASE("trajectory csv round trip") {
  auto s = StateSpace::indexed(3);
  Trajectory t(s, {0, 2, 1, 1, 0});
  std::ostringstream out;
  write_trajectory_csv(out, t);
  CHECK(out.str() == "step,state\n0,0\n1,2\n2,1\n3,1\n4,0\n");

  std::istringstream in(out.str());
  CHECK(read_trajectory_csv(in) == t.values);

  std::istringstream blank("step,state\n0,1\n\n1,2\n");
  CHECK(read_trajectory_csv(blank) == std::vector<std::size_t>{1, 2});

  std::istringstream badhdr("state,step\n0,0\n");
  CHECK_THROWS_AS(read_trajectory_csv(badhdr), ParseError);

  std::istringstream badstep("step,state\n0,0\n7,1\n");
  CHECK_THROWS_WITH_AS(read_trajectory_csv(badstep), doctest::Contains("line 3"), ParseError);

  std::istringstream junk("step,state\n0,x\n");
  CHECK_THROWS_AS(read_trajectory_csv(junk), ParseError);
}

TEST_CASE("committed fixture trajectories load") {
  std::ifstream f(data_path("traj_mvps_k4_n2000.csv"));
  REQUIRE(f.good());
  auto values = read_trajectory_csv(f);
  CHECK(values.size() == 2000);
  for (auto v : values) CHECK(v < 4);

  std::ifstream g(data_path("traj_iid_k3_n400.csv"));
  REQUIRE(g.good());
  CHECK(read_trajectory_csv(g).size() == 400);
}

TEST_CASE("real trajectory csv format") {
  RealTrajectory t;
  t.values = {0.5, 1.25};
  t.blocks = {0, 1};
  std::ostringstream out;
  write_real_trajectory_csv(out, t);
  const std::string s = out.str();
  CHECK(s.substr(0, 17) == "step,value,block\n");
  CHECK(s.find("0,0.5,0") != std::string::npos);
  CHECK(s.find("1,1.25,1") != std::string::npos);
}
