#include "impatient/prior_io.hpp"

#include <json.hpp>

#include "impatient/errors.hpp"
#include "impatient/table_io.hpp"

namespace impatient {

namespace {

void append_vector(std::string& out, const Vector& v) {
  out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_real(v(i));
  }
  out += ']';
}

void append_matrix(std::string& out, const Matrix& m) {
  out += "[\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += "    ";
    append_vector(out, m.row(r).transpose());
    if (r + 1 < m.rows()) out += ',';
    out += '\n';
  }
  out += "  ]";
}

Vector json_vector(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw FormatError(std::string("prior: missing array '") + key + "'");
  const auto& a = j[key];
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

Matrix json_matrix(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw FormatError(std::string("prior: missing matrix '") + key + "'");
  const auto& a = j[key];
  const auto rows = static_cast<Eigen::Index>(a.size());
  Matrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = a[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      throw FormatError(std::string("prior: matrix '") + key + "' is not square");
    }
    for (Eigen::Index c = 0; c < rows; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace

std::string prior_to_json(const PriorModel& prior) {
  std::string out = "{\n  \"mu\": ";
  append_vector(out, prior.mu);
  out += ",\n  \"sigma\": ";
  append_matrix(out, prior.sigma);
  out += ",\n  \"v_noise\": ";
  append_matrix(out, prior.v_noise);
  out += ",\n  \"weights\": ";
  append_vector(out, prior.weights);
  out += ",\n  \"delays\": [";
  for (std::size_t i = 0; i < prior.delays.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(prior.delays[i]);
  }
  out += "]\n}\n";
  return out;
}

PriorModel prior_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("prior: ") + e.what());
  }
  PriorModel p;
  try {
    p.mu = json_vector(j, "mu");
    p.sigma = json_matrix(j, "sigma");
    p.v_noise = json_matrix(j, "v_noise");
    p.weights = json_vector(j, "weights");
    if (!j.contains("delays") || !j["delays"].is_array()) throw FormatError("prior: missing array 'delays'");
    p.delays = j["delays"].get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("prior: ") + e.what());
  }
  p.validate();
  return p;
}

void save_prior(const PriorModel& prior, const std::filesystem::path& path) {
  write_atomic(path, prior_to_json(prior));
}

PriorModel load_prior(const std::filesystem::path& path) { return prior_from_json(read_file(path)); }

}  // namespace impatient
