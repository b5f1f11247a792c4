#include "rtk/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace rtk {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
  fail(ErrorCode::kValidationError, path + ": " + message);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) invalid(path, "missing field '" + key + "'");
  return *it;
}

Index positive_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1) invalid(path, "expected a positive integer");
  return static_cast<Index>(j.get<long long>());
}

Dims dims_from(const Json& j, std::size_t order, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array of dimensions");
  if (j.size() != order) invalid(path, "expected " + std::to_string(order) + " dimensions, got " + std::to_string(j.size()));
  Dims d;
  for (std::size_t k = 0; k < j.size(); ++k) d.push_back(positive_int(j[k], path + "[" + std::to_string(k) + "]"));
  return d;
}

Complex complex_from(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    invalid(path, "expected a [re, im] pair of numbers");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) invalid(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::set<std::string> tensor_names(const std::string& kind) {
  if (kind == "arte") return {"A", "G", "K", "B", "C"};
  if (kind == "lyapunov") return {"A", "Q"};
  if (kind == "sylvester") return {"A", "B", "K"};
  if (kind == "system") return {"A", "B", "C", "D"};
  invalid("kind", "expected arte, lyapunov, sylvester or system, got '" + kind + "'");
}

void require_tensors(const ProblemDocument& doc, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (!doc.has(n)) invalid(n, "required for kind '" + doc.kind + "'");
  }
}

void check_conformal(const ProblemDocument& doc) {
  try {
    if (doc.kind == "arte") {
      const bool gk = doc.has("G") || doc.has("K");
      const bool bc = doc.has("B") || doc.has("C");
      if (gk && bc) invalid("arte", "give either G and K or B and C, not both");
      if (bc) {
        require_tensors(doc, {"A", "B", "C"});
      } else {
        require_tensors(doc, {"A", "G", "K"});
      }
      const PairedTensor a = doc.tensor("A");
      if (!a.is_square()) invalid("A", "must be square, got " + a.shape().to_string());
      if (bc) {
        if (doc.tensor("B").row_dims() != a.row_dims()) invalid("B", "rows must match A");
        if (doc.tensor("C").col_dims() != a.row_dims()) invalid("C", "columns must match A");
      } else {
        if (doc.tensor("G").shape() != a.shape()) invalid("G", "shape must match A");
        if (doc.tensor("K").shape() != a.shape()) invalid("K", "shape must match A");
      }
      if (doc.E0 && to_dense(*doc.E0).shape() != a.shape()) invalid("E0", "shape must match A");
    } else if (doc.kind == "lyapunov") {
      require_tensors(doc, {"A", "Q"});
      const PairedTensor a = doc.tensor("A");
      if (!a.is_square()) invalid("A", "must be square");
      if (doc.tensor("Q").shape() != a.shape()) invalid("Q", "shape must match A");
    } else if (doc.kind == "sylvester") {
      require_tensors(doc, {"A", "B", "K"});
      const PairedTensor a = doc.tensor("A"), b = doc.tensor("B"), k = doc.tensor("K");
      if (!a.is_square()) invalid("A", "must be square");
      if (!b.is_square()) invalid("B", "must be square");
      if (k.row_dims() != a.row_dims() || k.col_dims() != b.row_dims()) invalid("K", "must be A-rows by B-columns");
    } else {
      require_tensors(doc, {"A", "B", "C", "D"});
      to_system(doc);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kValidationError) throw;
    fail(ErrorCode::kValidationError, e.what());
  }
}

}  // namespace

PairedTensor to_dense(const TensorField& field) {
  if (const auto* p = std::get_if<PairedTensor>(&field)) return *p;
  return densify(std::get<GcpdTensor>(field));
}

Json tensor_to_json(const PairedTensor& t) {
  Json j;
  j["format"] = "dense";
  j["order"] = t.order();
  j["row_dims"] = t.row_dims();
  j["col_dims"] = t.col_dims();
  Json data = Json::array();
  const CMatrix& m = t.unfolding();
  for (Index k = 0; k < m.size(); ++k) data.push_back(complex_json(m.data()[k]));
  j["data"] = std::move(data);
  return j;
}

Json tensor_to_json(const GcpdTensor& t) {
  const Shape s = t.shape();
  Json j;
  j["format"] = "gcpd";
  j["order"] = s.order();
  j["row_dims"] = s.row_dims;
  j["col_dims"] = s.col_dims;
  j["rank"] = t.rank();
  Json terms = Json::array();
  for (const auto& term : t.terms) {
    Json factors = Json::array();
    for (const auto& f : term) {
      Json flat = Json::array();
      for (Index r = 0; r < f.rows(); ++r) {
        for (Index c = 0; c < f.cols(); ++c) flat.push_back(complex_json(f(r, c)));
      }
      factors.push_back(std::move(flat));
    }
    terms.push_back(std::move(factors));
  }
  j["terms"] = std::move(terms);
  return j;
}

Json tensor_to_json(const TensorField& t) {
  return std::visit([](const auto& x) { return tensor_to_json(x); }, t);
}

TensorField tensor_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected a tensor object");
  const Json& fmt = field(j, "format", path);
  if (!fmt.is_string()) invalid(path + ".format", "expected a string");
  const std::string format = fmt.get<std::string>();
  const std::size_t order = static_cast<std::size_t>(positive_int(field(j, "order", path), path + ".order"));
  const Dims rows = dims_from(field(j, "row_dims", path), order, path + ".row_dims");
  const Dims cols = dims_from(field(j, "col_dims", path), order, path + ".col_dims");
  const Shape shape(rows, cols);

  if (format == "dense") {
    check_keys(j, {"format", "order", "row_dims", "col_dims", "data"}, path);
    const Json& data = field(j, "data", path);
    if (!data.is_array()) invalid(path + ".data", "expected an array");
    const Index expected = shape.rows() * shape.cols();
    if (static_cast<Index>(data.size()) != expected) {
      invalid(path + ".data", "expected " + std::to_string(expected) + " entries, got " + std::to_string(data.size()));
    }
    CMatrix m(shape.rows(), shape.cols());
    for (Index k = 0; k < expected; ++k) m.data()[k] = complex_from(data[k], path + ".data[" + std::to_string(k) + "]");
    return PairedTensor(shape, std::move(m));
  }
  if (format == "gcpd") {
    check_keys(j, {"format", "order", "row_dims", "col_dims", "rank", "terms"}, path);
    const Index rank = positive_int(field(j, "rank", path), path + ".rank");
    const Json& terms = field(j, "terms", path);
    if (!terms.is_array() || static_cast<Index>(terms.size()) != rank) {
      invalid(path + ".terms", "expected " + std::to_string(rank) + " terms");
    }
    GcpdTensor g;
    for (Index r = 0; r < rank; ++r) {
      const std::string tp = path + ".terms[" + std::to_string(r) + "]";
      const Json& term = terms[r];
      if (!term.is_array() || term.size() != order) invalid(tp, "expected " + std::to_string(order) + " factor matrices");
      std::vector<CMatrix> factors;
      for (std::size_t n = 0; n < order; ++n) {
        const std::string fp = tp + "[" + std::to_string(n) + "]";
        const Json& flat = term[n];
        const Index expected = rows[n] * cols[n];
        if (!flat.is_array() || static_cast<Index>(flat.size()) != expected) {
          invalid(fp, "expected " + std::to_string(expected) + " entries, got " +
                          std::to_string(flat.is_array() ? flat.size() : 0));
        }
        CMatrix f(rows[n], cols[n]);
        for (Index a = 0; a < rows[n]; ++a) {
          for (Index b = 0; b < cols[n]; ++b) {
            f(a, b) = complex_from(flat[a * cols[n] + b], fp + "[" + std::to_string(a * cols[n] + b) + "]");
          }
        }
        factors.push_back(std::move(f));
      }
      g.terms.push_back(std::move(factors));
    }
    return g;
  }
  invalid(path + ".format", "expected 'dense' or 'gcpd', got '" + format + "'");
}

Json complex_list_to_json(const std::vector<Complex>& values) {
  Json out = Json::array();
  for (const Complex& z : values) out.push_back(complex_json(z));
  return out;
}

PairedTensor ProblemDocument::tensor(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) invalid(name, "missing tensor");
  return to_dense(it->second);
}

ProblemDocument parse_problem(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(ErrorCode::kParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!root.is_object()) invalid("document", "expected a JSON object");
  ProblemDocument doc;
  const Json& kind = field(root, "kind", "document");
  if (!kind.is_string()) invalid("kind", "expected a string");
  doc.kind = kind.get<std::string>();
  std::set<std::string> allowed = tensor_names(doc.kind);
  const std::set<std::string> names = allowed;
  allowed.insert({"kind", "options", "E0"});
  check_keys(root, allowed, "");
  for (const auto& n : names) {
    if (root.contains(n)) doc.tensors.emplace(n, tensor_from_json(root[n], n));
  }
  if (root.contains("E0")) {
    if (doc.kind != "arte") invalid("E0", "only arte documents take an initial guess");
    doc.E0 = tensor_from_json(root["E0"], "E0");
  }
  if (root.contains("options")) {
    if (!root["options"].is_object()) invalid("options", "expected an object");
    doc.options = root["options"];
  }
  check_conformal(doc);
  return doc;
}

ProblemDocument load_problem(const std::string& path) { return parse_problem(read_file(path)); }

std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

std::string serialize(const ProblemDocument& doc) {
  Json root;
  root["kind"] = doc.kind;
  for (const auto& [name, t] : doc.tensors) root[name] = tensor_to_json(t);
  if (doc.E0) root["E0"] = tensor_to_json(*doc.E0);
  if (!doc.options.empty()) root["options"] = doc.options;
  return dump_canonical(root);
}

ArteProblem to_arte_problem(const ProblemDocument& doc) {
  if (doc.kind != "arte") invalid("kind", "expected an arte document");
  if (doc.has("B")) return ArteProblem::from_factors(doc.tensor("A"), doc.tensor("B"), doc.tensor("C"));
  ArteProblem p{doc.tensor("A"), doc.tensor("G"), doc.tensor("K")};
  p.validate();
  return p;
}

MltiSystem to_system(const ProblemDocument& doc) {
  if (doc.kind != "system") invalid("kind", "expected a system document");
  MltiSystem sys{doc.tensor("A"), doc.tensor("B"), doc.tensor("C"), doc.tensor("D")};
  sys.validate();
  return sys;
}

ProblemDocument make_document(const ArteProblem& p) {
  ProblemDocument doc;
  doc.kind = "arte";
  doc.tensors.emplace("A", p.A);
  doc.tensors.emplace("G", p.G);
  doc.tensors.emplace("K", p.K);
  return doc;
}

ProblemDocument make_document(const MltiSystem& sys) {
  ProblemDocument doc;
  doc.kind = "system";
  doc.tensors.emplace("A", sys.A);
  doc.tensors.emplace("B", sys.B);
  doc.tensors.emplace("C", sys.C);
  doc.tensors.emplace("D", sys.D);
  return doc;
}

Json report_to_json(const ArteReport& report) {
  Json j;
  j["method"] = report.method;
  j["iterations"] = report.iterations;
  j["initial_residual"] = report.initial_residual;
  j["residual"] = report.residual;
  j["residual_history"] = report.residual_history;
  j["inner_iterations"] = report.inner_iterations;
  j["closed_loop_eigenvalues"] = complex_list_to_json(report.closed_loop_eigenvalues);
  j["psd_certificate"] = report.psd_certificate;
  j["warnings"] = report.warnings;
  j["E"] = tensor_to_json(report.E);
  return j;
}

double option_number(const ProblemDocument& doc, const std::string& key, double fallback) {
  auto it = doc.options.find(key);
  if (it == doc.options.end()) return fallback;
  if (!it->is_number()) invalid("options." + key, "expected a number");
  return it->get<double>();
}

std::string option_string(const ProblemDocument& doc, const std::string& key, const std::string& fallback) {
  auto it = doc.options.find(key);
  if (it == doc.options.end()) return fallback;
  if (!it->is_string()) invalid("options." + key, "expected a string");
  return it->get<std::string>();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kValidationError, "cannot write '" + path + "'");
  out << contents;
}

}  // namespace rtk
