#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "rtk/control.hpp"
#include "rtk/equations.hpp"
#include "rtk/structured.hpp"

namespace rtk {

using Json = nlohmann::json;

// A tensor field as written in a document: dense or GCPD.
using TensorField = std::variant<PairedTensor, GcpdTensor>;

PairedTensor to_dense(const TensorField& field);

Json tensor_to_json(const PairedTensor& t);
Json tensor_to_json(const GcpdTensor& t);
Json tensor_to_json(const TensorField& t);
// `path` names the field in error messages.
TensorField tensor_from_json(const Json& j, const std::string& path);

Json complex_list_to_json(const std::vector<Complex>& values);

struct ProblemDocument {
  std::string kind;  // arte | lyapunov | sylvester | system
  std::map<std::string, TensorField> tensors;
  std::optional<TensorField> E0;
  Json options = Json::object();

  PairedTensor tensor(const std::string& name) const;
  bool has(const std::string& name) const { return tensors.count(name) > 0; }
};

// Strict parse with line/column on syntax errors and field paths on validation errors.
ProblemDocument parse_problem(std::string_view text);
ProblemDocument load_problem(const std::string& path);

// Canonical form: sorted keys, two-space indent, shortest round-trip doubles.
std::string serialize(const ProblemDocument& doc);
std::string dump_canonical(const Json& j);

ArteProblem to_arte_problem(const ProblemDocument& doc);
MltiSystem to_system(const ProblemDocument& doc);

ProblemDocument make_document(const ArteProblem& p);
ProblemDocument make_document(const MltiSystem& sys);

Json report_to_json(const ArteReport& report);

// Option lookups with type checking; the fallback applies when the key is absent.
double option_number(const ProblemDocument& doc, const std::string& key, double fallback);
std::string option_string(const ProblemDocument& doc, const std::string& key, const std::string& fallback);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace rtk
