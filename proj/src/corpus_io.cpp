#include "impatient/corpus_io.hpp"

#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "impatient/errors.hpp"
#include "impatient/table_io.hpp"

namespace impatient {

std::string corpus_to_text(const std::vector<ShowHistory>& histories) {
  std::string out;
  for (const auto& h : histories) {
    const std::string id = nlohmann::json(h.show_id).dump();
    for (std::size_t m = 0; m < h.traces.size(); ++m) {
      const auto& z = h.traces[m].values;
      out += "{\"show_id\": ";
      out += id;
      out += ", \"trace\": [";
      for (Eigen::Index k = 0; k < z.size(); ++k) {
        if (k) out += ',';
        if (z(k) == 0.0) {
          out += '0';
        } else if (z(k) == 1.0) {
          out += '1';
        } else {
          throw FormatError("corpus: show '" + h.show_id + "' has a non-binary trace entry");
        }
      }
      out += ']';
      if (h.targets) {
        out += ", \"target\": ";
        out += format_real((*h.targets)[m]);
      }
      out += "}\n";
    }
  }
  return out;
}

std::vector<ShowHistory> parse_corpus(const std::string& text, std::optional<int> expected_K) {
  std::vector<ShowHistory> shows;
  std::unordered_map<std::string, std::size_t> index;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto where = "corpus line " + std::to_string(lineno) + ": ";
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + e.what());
    }
    if (!rec.is_object() || !rec.contains("show_id") || !rec["show_id"].is_string()) {
      throw FormatError(where + "missing string field 'show_id'");
    }
    if (!rec.contains("trace") || !rec["trace"].is_array()) {
      throw FormatError(where + "missing array field 'trace'");
    }
    const auto& arr = rec["trace"];
    const int len = static_cast<int>(arr.size());
    if (!expected_K) expected_K = len;
    if (len != *expected_K) {
      throw FormatError(where + "trace length " + std::to_string(len) + ", expected " + std::to_string(*expected_K));
    }
    Trace t;
    t.values.resize(len);
    for (int k = 0; k < len; ++k) {
      if (!arr[k].is_number()) throw FormatError(where + "non-numeric trace entry");
      const double v = arr[k].get<double>();
      if (v != 0.0 && v != 1.0) throw FormatError(where + "trace entries must be 0 or 1");
      t.values(k) = v;
    }
    t.observed_len = len;

    const auto id = rec["show_id"].get<std::string>();
    const bool has_target = rec.contains("target") && !rec["target"].is_null();
    auto [it, inserted] = index.try_emplace(id, shows.size());
    if (inserted) {
      shows.push_back(ShowHistory{id, {}, std::nullopt});
      if (has_target) shows.back().targets.emplace();
    }
    auto& show = shows[it->second];
    if (has_target != show.targets.has_value()) {
      throw FormatError(where + "show '" + id + "' mixes records with and without target");
    }
    if (has_target) {
      if (!rec["target"].is_number()) throw FormatError(where + "target must be a number");
      show.targets->push_back(rec["target"].get<double>());
    }
    show.traces.push_back(std::move(t));
  }
  return shows;
}

void write_corpus(const std::filesystem::path& path, const std::vector<ShowHistory>& histories) {
  write_atomic(path, corpus_to_text(histories));
}

std::vector<ShowHistory> read_corpus(const std::filesystem::path& path, std::optional<int> expected_K) {
  return parse_corpus(read_file(path), expected_K);
}

}  // namespace impatient
