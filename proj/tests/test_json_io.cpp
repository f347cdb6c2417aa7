#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qsc/json_io.hpp"

using namespace qsc;
using qsc::testing::Rng;

namespace {

void expect_same_algebra(const ItoAlgebra& a, const ItoAlgebra& b) {
  ASSERT_EQ(a.dim(), b.dim());
  EXPECT_EQ(a.names(), b.names());
  for (int j = 0; j < a.dim(); ++j) EXPECT_EQ(max_abs(Mat(a.tensor()[j] - b.tensor()[j])), 0.0);
}

}  // namespace

TEST(JsonIo, ComplexAsPairs) {
  EXPECT_EQ(parse_complex(json::array({1.5, -2.0}), "z"), cplx(1.5, -2.0));
  EXPECT_THROW(parse_complex(json(3.0), "z"), SchemaError);
  EXPECT_EQ(to_json(cplx(1.5, -2.0)), json::array({1.5, -2.0}));
  EXPECT_THROW(parse_complex(json::array({1.0, 2.0, 3.0}), "z"), SchemaError);
  EXPECT_THROW(parse_complex(json("x"), "z"), SchemaError);
}

TEST(JsonIo, MatrixRoundTrip) {
  Rng rng(130);
  const Mat m = rng.mat(3, 2);
  EXPECT_EQ(max_abs(Mat(parse_matrix(to_json(m), "m") - m)), 0.0);
  EXPECT_THROW(parse_matrix(json::array({json::array({1.0}), json::array({1.0, 2.0})}), "m"), SchemaError);
}

TEST(JsonIo, AlgebraRoundTrip) {
  for (const auto& alg : {hp_vacuum(), wiener(), poisson(2.0)})
    expect_same_algebra(*parse_algebra(algebra_to_json(*alg)), *alg);
}

TEST(JsonIo, AlgebraPresets) {
  expect_same_algebra(*parse_algebra(json{{"preset", "hp_vacuum"}}), *hp_vacuum());
  expect_same_algebra(*parse_algebra(json{{"preset", "poisson"}, {"lambda", 0.5}}), *poisson(0.5));
  EXPECT_THROW(parse_algebra(json{{"preset", "unknown"}}), SchemaError);
}

TEST(JsonIo, UnknownKeyRejected) {
  json j = algebra_to_json(*wiener());
  j["colour"] = 1;
  try {
    parse_algebra(j);
    FAIL() << "expected a schema error";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(JsonIo, WrongTensorRankRejected) {
  json j = algebra_to_json(*wiener());
  j["c"] = json::array({json::array({1.0, 0.0}), json::array({0.0, 1.0})});
  EXPECT_THROW(parse_algebra(j), SchemaError);
}

TEST(JsonIo, GridRoundTrip) {
  auto g = make_grid({0.1, 0.4, 0.9}, {0.25, 0.5, 0.125}, 2, 2);
  const GridPtr back = parse_grid(grid_to_json(*g));
  EXPECT_EQ(back->n(), 3);
  EXPECT_EQ(back->d(), 2);
  EXPECT_EQ(back->n_max(), 2);
  for (int x = 0; x < 3; ++x) {
    EXPECT_EQ(back->time(x), g->time(x));
    EXPECT_EQ(back->weight(x), g->weight(x));
  }
}

TEST(JsonIo, NonIncreasingGridRejected) {
  const json j{{"times", {0.1, 0.1}}, {"weights", {0.5, 0.5}}};
  EXPECT_THROW(parse_grid(j), SchemaError);
  const json k{{"times", {0.1, 0.2}}, {"weights", {0.5, -0.5}}};
  EXPECT_THROW(parse_grid(k), SchemaError);
}

TEST(JsonIo, KernelRoundTrip) {
  Rng rng(131);
  auto g = make_grid({0.1, 0.4, 0.9}, {0.25, 0.5, 0.125}, 2);
  const KernelTable k = rng.kernel(g, 2, 15);
  const KernelTable back = parse_kernel(kernel_to_json(k), g, 2, "K");
  EXPECT_EQ(kernel_distance(back, k), 0.0);
  EXPECT_EQ(back.size(), k.size());
}

TEST(JsonIo, KernelBadBlockRejected) {
  auto g = make_grid({0.1, 0.4}, {0.25, 0.5});
  const json j = json::array({json{{"w_pc", {0}}, {"block", json::array({json::array({1.0, 2.0})})}}});
  EXPECT_THROW(parse_kernel(j, g, 1, "K"), SchemaError);
}

TEST(JsonIo, QuadRoundTripAndDisjointness) {
  auto g = make_grid({0.1, 0.4, 0.9}, {0.25, 0.5, 0.125});
  const Quad q{point(0), 0, point(2), point(1)};
  EXPECT_EQ(parse_quad(quad_to_json(q), *g, "q"), q);
  EXPECT_THROW(parse_quad(json{{"w_pm", {0}}, {"w_cc", {0}}}, *g, "q"), SchemaError);
  EXPECT_THROW(parse_chain(json::array({5}), *g, "c"), SchemaError);
}

TEST(JsonIo, HamiltonianShapes) {
  Rng rng(132);
  const json ok{{"H_cc", to_json(rng.hermitian(2))}, {"H_pc", to_json(Mat(rng.mat(2, 1)))},
                {"H_pm", to_json(rng.hermitian(1))}};
  EXPECT_NO_THROW(parse_hamiltonian(ok, "H"));
  json bad = ok;
  bad["H_pc"] = to_json(Mat(rng.mat(3, 1)));
  EXPECT_THROW(parse_hamiltonian(bad, "H"), SchemaError);
}

TEST(Report, EmptyReportIsValid) {
  Report r;
  r.command = "gns";
  EXPECT_TRUE(r.pass());
  const json j = r.to_json();
  EXPECT_TRUE(j.at("checks").is_array());
  EXPECT_TRUE(j.at("checks").empty());
  EXPECT_EQ(j.at("pass"), true);
  EXPECT_EQ(r.to_csv(), "check,value,tolerance,pass\n");
}

TEST(Report, ChecksAndCsv) {
  Report r;
  r.command = "solve";
  r.add_check("a", 1e-13, 1e-12);
  r.add_check("b", 2.0, 1e-12);
  EXPECT_FALSE(r.pass());
  const std::string csv = r.to_csv();
  EXPECT_EQ(csv.rfind("check,value,tolerance,pass\n", 0), 0u);
  EXPECT_NE(csv.find("\na,"), std::string::npos);
  EXPECT_NE(csv.find("\nb,"), std::string::npos);
  const json j = r.to_json();
  EXPECT_EQ(j.at("checks").size(), 2u);
  EXPECT_EQ(j.at("checks")[1].at("pass"), false);
}

TEST(Report, KeysAreSorted) {
  Report r;
  r.command = "kernel-mul";
  r.inputs = json{{"z", 1}, {"a", 2}};
  const std::string text = r.to_json().dump();
  EXPECT_LT(text.find("\"checks\""), text.find("\"command\""));
  EXPECT_LT(text.find("\"command\""), text.find("\"inputs\""));
  EXPECT_LT(text.find("\"a\""), text.find("\"z\""));
}
