#include "kg/error.hpp"
#include "kg/models.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

using namespace kg;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("kg_test_" + name);
}

ErrorCode code_of(const std::string& text) {
  try {
    parse_model(text, "test.json");
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::string& text) {
  try {
    parse_model(text, "test.json");
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("round trip is bit exact") {
  const ModelSpec w = square_well_model({1.0, std::nullopt});
  const auto path = temp_file("well.json");
  save_model(w, path);
  CHECK(load_model(path) == w);

  const ModelSpec h = harmonic_model({0.3, 0.7, 12, 4.0});
  save_model(h, path);
  const ModelSpec back = load_model(path);
  CHECK(back == h);
  CHECK(back.u_squared().matrix() == h.u_squared().matrix());
  std::filesystem::remove(path);
}

TEST_CASE("serialized reals use 17 significant digits") {
  Matrix u2 = Matrix::Identity(1, 1);
  u2(0, 0) = 0.1;
  const std::string text = serialize_model(ModelSpec(SymmetricMatrix(u2), SymmetricMatrix::zero(1), "x"));
  CHECK(text.find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("parameterized forms") {
  const ModelDescription h = parse_model(R"({"model": "harmonic", "alpha": 0.2, "beta": 1, "grid_points": 9, "half_width": 5})");
  CHECK(h.kind == ModelKind::Harmonic);
  CHECK(h.spec.order() == 9);
  CHECK(h.harmonic.alpha == 0.2);
  CHECK(h.spec == harmonic_model({0.2, 1.0, 9, 5.0}));

  const ModelDescription w = parse_model(R"({"model": "square_well", "tau": 1.7})");
  CHECK(w.kind == ModelKind::SquareWell);
  CHECK(w.square_well.tau == 1.7);
  CHECK(w.spec.v().matrix()(0, 0) == -1.7);

  const ModelDescription e = parse_model(R"({"label": "d", "u_squared": [[4, 0], [0, 9]], "v": [[0, 1], [1, 0]]})");
  CHECK(e.kind == ModelKind::Explicit);
  CHECK(e.spec.label() == "d");
  CHECK(e.spec.u_squared().matrix()(1, 1) == 9.0);
}

TEST_CASE("parse errors name the field") {
  CHECK(code_of(R"({"label": "x", "v": [[1]]})") == ErrorCode::ParseError);
  CHECK(message_of(R"({"label": "x", "v": [[1]]})").find("\"u_squared\"") != std::string::npos);
  CHECK(message_of(R"({"u_squared": [[1]], "v": [["a"]]})").find("\"v\"") != std::string::npos);
  CHECK(message_of(R"({"u_squared": [[1, 2], [3]], "v": [[1]]})").find("row 1") != std::string::npos);
  CHECK(message_of(R"({"model": "square_well"})").find("\"tau\"") != std::string::npos);
  CHECK(message_of(R"({"model": "harmonic", "alpha": 0.1, "grid_points": 2.5})").find("\"grid_points\"") !=
        std::string::npos);
  CHECK(message_of(R"({"model": "cube"})").find("cube") != std::string::npos);
  CHECK(code_of("[1, 2]") == ErrorCode::ParseError);
}

TEST_CASE("malformed JSON reports the line") {
  const std::string text = "{\n  \"u_squared\": [[1]],\n  \"v\": [[1]\n}\n";
  CHECK(code_of(text) == ErrorCode::ParseError);
  CHECK(message_of(text).find("line 4") != std::string::npos);
}

TEST_CASE("content problems are validation errors") {
  const ErrorCode asym = code_of(R"({"u_squared": [[2, 0], [0, 2]], "v": [[0, 1], [0.5, 0]]})");
  CHECK(category_of(asym) == ErrorCategory::Validation);
  const ErrorCode npd = code_of(R"({"u_squared": [[1, 0], [0, -1]], "v": [[0, 0], [0, 0]]})");
  CHECK(npd == ErrorCode::NotPositiveDefinite);
  CHECK(category_of(code_of(R"({"u_squared": [[1, 0], [0, 1]], "v": [[1]]})")) == ErrorCategory::Validation);
  CHECK(category_of(code_of(R"({"model": "square_well", "tau": -1})")) == ErrorCategory::Validation);
  CHECK(category_of(code_of(R"({"u_squared": [[1, 2]], "v": [[1]]})")) == ErrorCategory::Parse);
}

TEST_CASE("missing files") {
  CHECK_THROWS_AS(load_model(temp_file("does_not_exist.json")), Error);
  std::ofstream(temp_file("bad.json")) << "{";
  CHECK_THROWS_AS(load_model(temp_file("bad.json")), Error);
  std::filesystem::remove(temp_file("bad.json"));
}
