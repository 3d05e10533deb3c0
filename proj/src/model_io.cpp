#include "kg/error.hpp"
#include "kg/format.hpp"
#include "kg/models.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace kg {

namespace {

using nlohmann::json;

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] void field_error(const std::string& source, const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, source + ": field \"" + field + "\" " + what);
}

const json& require(const json& doc, const std::string& field, const std::string& source) {
  const auto it = doc.find(field);
  if (it == doc.end()) field_error(source, field, "is missing");
  return *it;
}

double read_real(const json& doc, const std::string& field, const std::string& source) {
  const json& v = require(doc, field, source);
  if (!v.is_number()) field_error(source, field, "must be a number");
  return v.get<double>();
}

std::optional<double> read_optional_real(const json& doc, const std::string& field, const std::string& source) {
  if (!doc.contains(field)) return std::nullopt;
  return read_real(doc, field, source);
}

int read_int(const json& doc, const std::string& field, const std::string& source) {
  const json& v = require(doc, field, source);
  if (!v.is_number_integer()) field_error(source, field, "must be an integer");
  return v.get<int>();
}

Matrix read_matrix(const json& doc, const std::string& field, const std::string& source) {
  const json& v = require(doc, field, source);
  if (!v.is_array() || v.empty()) field_error(source, field, "must be a non-empty array of rows");
  const auto rows = static_cast<Index>(v.size());
  Index cols = -1;
  Matrix m;
  for (Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array()) field_error(source, field, "row " + std::to_string(i) + " is not an array");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Index>(row.size()) != cols)
      field_error(source, field, "row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                                     " entries, expected " + std::to_string(cols));
    for (Index j = 0; j < cols; ++j) {
      const json& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number())
        field_error(source, field, "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is not a number");
      m(i, j) = x.get<double>();
    }
  }
  if (rows != cols) field_error(source, field, "must be square");
  return m;
}

// Structural problems are parse errors; matrix content problems keep their own codes
// but are reported as validation failures with the source attached.
template <class F>
auto validated(const std::string& source, F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::Parse) throw;
    throw Error(e.category() == ErrorCategory::Validation ? e.code() : ErrorCode::ValidationError,
                source + ": " + e.what());
  }
}

}  // namespace

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Explicit: return "explicit";
    case ModelKind::Harmonic: return "harmonic";
    case ModelKind::SquareWell: return "square_well";
  }
  return "unknown";
}

ModelDescription ModelDescription::from_spec(ModelSpec spec) {
  ModelDescription d;
  d.kind = ModelKind::Explicit;
  d.spec = std::move(spec);
  return d;
}

ModelDescription ModelDescription::from_harmonic(const HarmonicParams& p) {
  ModelDescription d;
  d.kind = ModelKind::Harmonic;
  d.harmonic = p;
  d.spec = harmonic_model(p);
  return d;
}

ModelDescription ModelDescription::from_square_well(const SquareWellParams& p) {
  ModelDescription d;
  d.kind = ModelKind::SquareWell;
  d.square_well = p;
  d.spec = square_well_model(p);
  return d;
}

ModelDescription parse_model(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, source + ": malformed JSON at " + line_column(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, source + ": top level must be an object");

  if (doc.contains("model")) {
    const json& kind = doc["model"];
    if (!kind.is_string()) field_error(source, "model", "must be a string");
    const std::string name = kind.get<std::string>();
    if (name == "harmonic") {
      HarmonicParams p;
      p.alpha = read_real(doc, "alpha", source);
      p.beta = read_optional_real(doc, "beta", source).value_or(0.0);
      if (doc.contains("grid_points")) p.grid_points = read_int(doc, "grid_points", source);
      if (doc.contains("half_width")) p.half_width = read_real(doc, "half_width", source);
      return validated(source, [&] { return ModelDescription::from_harmonic(p); });
    }
    if (name == "square_well") {
      SquareWellParams p;
      p.tau = read_real(doc, "tau", source);
      p.eta = read_optional_real(doc, "eta", source);
      return validated(source, [&] { return ModelDescription::from_square_well(p); });
    }
    field_error(source, "model", "has unknown value \"" + name + "\"");
  }

  std::string label;
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) field_error(source, "label", "must be a string");
    label = doc["label"].get<std::string>();
  }
  const Matrix u2 = read_matrix(doc, "u_squared", source);
  const Matrix v = read_matrix(doc, "v", source);
  return validated(source, [&] {
    return ModelDescription::from_spec(ModelSpec(SymmetricMatrix(u2), SymmetricMatrix(v), label));
  });
}

ModelDescription load_model_description(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), path.string());
}

ModelSpec load_model(const std::filesystem::path& path) { return load_model_description(path).spec; }

namespace {

void write_matrix(std::ostringstream& out, const Matrix& m) {
  out << "[";
  for (Index i = 0; i < m.rows(); ++i) {
    out << (i ? ",\n    [" : "\n    [");
    for (Index j = 0; j < m.cols(); ++j) out << (j ? ", " : "") << format_real(m(i, j));
    out << "]";
  }
  out << "\n  ]";
}

}  // namespace

std::string serialize_model(const ModelSpec& spec) {
  std::ostringstream out;
  out << "{\n  \"label\": " << json(spec.label()).dump() << ",\n  \"u_squared\": ";
  write_matrix(out, spec.u_squared().matrix());
  out << ",\n  \"v\": ";
  write_matrix(out, spec.v().matrix());
  out << "\n}\n";
  return out.str();
}

void save_model(const ModelSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, path.string() + ": cannot write file");
  out << serialize_model(spec);
  if (!out) throw Error(ErrorCode::InvalidArgument, path.string() + ": write failed");
}

}  // namespace kg
