#include <string>

#include <gtest/gtest.h>

#include "rtk/example1.hpp"
#include "rtk/io.hpp"
#include "support.hpp"

namespace rtk {
namespace {

using testing::diff;
using testing::Gen;
using testing::kCases;

template <typename F>
std::string expect_code(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << error_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
    return e.what();
  }
  return {};
}

// Dense field text with `n` entries; `one_at` lists flat positions holding 1.
std::string dense_field(const Dims& rows, const Dims& cols, Index n, const std::vector<Index>& one_at) {
  Json j;
  j["format"] = "dense";
  j["order"] = rows.size();
  j["row_dims"] = rows;
  j["col_dims"] = cols;
  j["data"] = Json::array();
  for (Index k = 0; k < n; ++k) {
    const bool one = std::find(one_at.begin(), one_at.end(), k) != one_at.end();
    j["data"].push_back({one ? 1.0 : 0.0, 0.0});
  }
  return j.dump();
}

TEST(TensorDocument, IdentityParses) {
  const std::string text =
      R"({"kind": "lyapunov", "A": )" + dense_field({2, 2}, {2, 2}, 16, {0, 5, 10, 15}) +
      R"(, "Q": )" + dense_field({2, 2}, {2, 2}, 16, {}) + "}";
  const ProblemDocument doc = parse_problem(text);
  EXPECT_EQ(doc.kind, "lyapunov");
  EXPECT_EQ(diff(doc.tensor("A"), PairedTensor::Identity({2, 2})), 0.0);
}

TEST(TensorDocument, FlatOrderIsColumnMajorUnfolding) {
  // Entry (i1, i2; j1, j2) sits at ivec(i) + 4 * ivec(j), 0-based.
  const std::string text =
      R"({"kind": "lyapunov", "A": )" + dense_field({2, 2}, {2, 2}, 16, {1 + 4 * 2}) +
      R"(, "Q": )" + dense_field({2, 2}, {2, 2}, 16, {}) + "}";
  const PairedTensor a = parse_problem(text).tensor("A");
  EXPECT_EQ(a.at({1, 0, 0, 1}), Complex(1.0));
  EXPECT_EQ(testing::entry(a, {1, 0}, {0, 1}), Complex(1.0));
  EXPECT_EQ(frobenius_norm(a), 1.0);
}

TEST(TensorDocument, TruncatedDataNamesField) {
  const std::string text =
      R"({"kind": "lyapunov", "A": )" + dense_field({2, 2}, {2, 2}, 15, {}) +
      R"(, "Q": )" + dense_field({2, 2}, {2, 2}, 16, {}) + "}";
  const std::string msg = expect_code(ErrorCode::kValidationError, [&] { parse_problem(text); });
  EXPECT_NE(msg.find("A.data"), std::string::npos) << msg;
  EXPECT_NE(msg.find("expected 16"), std::string::npos) << msg;
  EXPECT_NE(msg.find("got 15"), std::string::npos) << msg;
}

TEST(TensorDocument, MalformedJsonReportsPosition) {
  const std::string msg = expect_code(ErrorCode::kParseError, [] { parse_problem("{\"kind\": \"arte\",\n  \"tensors\": [1,}"); });
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  expect_code(ErrorCode::kParseError, [] { load_problem("/nonexistent/problem.json"); });
}

TEST(TensorDocument, StrictFields) {
  const std::string a = dense_field({2}, {2}, 4, {0, 3});
  expect_code(ErrorCode::kValidationError, [&] {
    parse_problem(R"({"kind": "lyapunov", "A": )" + a + R"(, "Q": )" + a + R"(, "extra": 1})");
  });
  expect_code(ErrorCode::kValidationError,
              [&] { parse_problem(R"({"kind": "lyapunov", "A": )" + a + "}"); });
  expect_code(ErrorCode::kValidationError, [&] {
    parse_problem(R"({"kind": "riccati", "A": )" + a + R"(, "Q": )" + a + "}");
  });
  expect_code(ErrorCode::kValidationError, [&] {
    parse_problem(R"({"kind": "lyapunov", "A": )" + a + R"(, "Q": )" + dense_field({3}, {3}, 9, {}) +
                  "}");
  });
  expect_code(ErrorCode::kValidationError, [&] {
    parse_problem(R"({"kind": "lyapunov", "A": )" + a + R"(, "Q": )" + a + R"(, "E0": )" + a + "}");
  });
  Json bad = Json::parse(a);
  bad["data"][0] = "1+0i";
  expect_code(ErrorCode::kValidationError, [&] { tensor_from_json(bad, "A"); });
}

TEST(TensorDocument, DenseRoundTripIsBitExact) {
  Gen g(121);
  for (int c = 0; c < kCases; ++c) {
    const int n = static_cast<int>(g.pick(1, 3));
    const PairedTensor t = g.paired(Shape(g.dims(n, 3), g.dims(n, 3)));
    const Json j = tensor_to_json(t);
    const PairedTensor back = to_dense(tensor_from_json(Json::parse(j.dump()), "T"));
    ASSERT_EQ(back.shape(), t.shape());
    ASSERT_TRUE(back.unfolding() == t.unfolding());
  }
}

TEST(TensorDocument, GcpdRoundTrip) {
  Gen g(122);
  for (int c = 0; c < kCases; ++c) {
    std::vector<std::vector<CMatrix>> terms(g.pick(1, 3));
    const Dims r = g.dims(2, 3), k = g.dims(2, 3);
    for (auto& t : terms) t = {g.matrix(r[0], k[0]), g.matrix(r[1], k[1])};
    const GcpdTensor a(terms);
    const TensorField back = tensor_from_json(Json::parse(tensor_to_json(a).dump()), "A");
    ASSERT_TRUE(std::holds_alternative<GcpdTensor>(back));
    const GcpdTensor& b = std::get<GcpdTensor>(back);
    ASSERT_EQ(b.rank(), a.rank());
    for (int t = 0; t < a.rank(); ++t) {
      for (int m = 0; m < 2; ++m) ASSERT_TRUE(b.terms[t][m] == a.terms[t][m]);
    }
  }
}

TEST(ProblemDocument, CanonicalSerializationIsStable) {
  Gen g(123);
  for (int c = 0; c < kCases; ++c) {
    const testing::ArteCase ac = testing::random_arte(g, {2, 2}, c % 2 == 0);
    ProblemDocument doc = make_document(ac.problem);
    doc.E0 = ac.e0;
    doc.options["eps"] = 1e-9;
    doc.options["inner"] = "direct";
    const std::string once = serialize(doc);
    const std::string twice = serialize(parse_problem(once));
    ASSERT_EQ(once, twice);
    const ArteProblem back = to_arte_problem(parse_problem(once));
    ASSERT_TRUE(back.A.unfolding() == ac.problem.A.unfolding());
    ASSERT_TRUE(back.G.unfolding() == ac.problem.G.unfolding());
  }
}

TEST(ProblemDocument, SystemRoundTrip) {
  const MltiSystem sys = example1::system();
  const std::string text = serialize(make_document(sys));
  const MltiSystem back = to_system(parse_problem(text));
  EXPECT_EQ(diff(back.A, sys.A), 0.0);
  EXPECT_EQ(diff(back.D, sys.D), 0.0);
  EXPECT_EQ(text, serialize(parse_problem(text)));
}

TEST(ProblemDocument, ArteFactorsAndConflicts) {
  const MltiSystem sys = example1::system();
  Json j;
  j["kind"] = "arte";
  j["A"] = tensor_to_json(sys.A);
  j["B"] = tensor_to_json(sys.B);
  j["C"] = tensor_to_json(sys.C);
  const ArteProblem p = to_arte_problem(parse_problem(j.dump()));
  EXPECT_LE(diff(p.G, example1::problem().G), 1e-15);
  EXPECT_LE(diff(p.K, example1::problem().K), 1e-15);

  j["G"] = tensor_to_json(p.G);
  j["K"] = tensor_to_json(p.K);
  expect_code(ErrorCode::kValidationError, [&] { parse_problem(j.dump()); });
}

TEST(ProblemDocument, OptionsAreTypeChecked) {
  ProblemDocument doc = make_document(example1::problem());
  doc.options["eps"] = "small";
  doc.options["inner"] = "direct";
  doc.options["max_iter"] = 3;
  expect_code(ErrorCode::kValidationError, [&] { option_number(doc, "eps", 1.0); });
  EXPECT_EQ(option_string(doc, "inner", "x"), "direct");
  EXPECT_EQ(option_number(doc, "inner_tol", 0.5), 0.5);
  expect_code(ErrorCode::kValidationError, [&] { option_string(doc, "max_iter", "x"); });
  EXPECT_EQ(option_number(doc, "max_iter", 0.0), 3.0);
}

TEST(Fixture, ParsesToExampleSystem) {
  const ProblemDocument doc = load_problem(RTK_FIXTURE);
  EXPECT_EQ(doc.kind, "arte");
  ASSERT_TRUE(std::holds_alternative<GcpdTensor>(doc.tensors.at("A")));
  const MltiSystem want = example1::system();
  EXPECT_EQ(diff(doc.tensor("A"), want.A), 0.0);
  EXPECT_EQ(diff(doc.tensor("B"), want.B), 0.0);
  EXPECT_EQ(diff(doc.tensor("C"), want.C), 0.0);
  ASSERT_TRUE(doc.E0.has_value());
  EXPECT_EQ(diff(to_dense(*doc.E0), example1::initial_guess()), 0.0);
  EXPECT_EQ(option_number(doc, "inner_tol", 0.0), 1e-4);
  EXPECT_EQ(read_file(RTK_FIXTURE), serialize(doc));
}

TEST(Report, JsonFields) {
  const ArteProblem p = example1::problem();
  const Json j = report_to_json(arte_schur_solve(p));
  for (const char* key : {"method", "iterations", "residual", "residual_history", "closed_loop_eigenvalues",
                          "psd_certificate", "E"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["closed_loop_eigenvalues"].size(), 6u);
  EXPECT_EQ(diff(to_dense(tensor_from_json(j["E"], "E")), arte_schur_solve(p).E), 0.0);
}

TEST(ExitCodes, PerErrorClass) {
  EXPECT_EQ(exit_code(ErrorCode::kParseError), 2);
  EXPECT_EQ(exit_code(ErrorCode::kValidationError), 2);
  EXPECT_EQ(exit_code(ErrorCode::kNotStabilizable), 3);
  EXPECT_EQ(exit_code(ErrorCode::kImaginaryAxisEigenvalue), 3);
  EXPECT_EQ(exit_code(ErrorCode::kConvergenceFailure), 4);
  EXPECT_EQ(exit_code(ErrorCode::kMaxIterationsExceeded), 4);
}

}  // namespace
}  // namespace rtk
