#pragma once

// Historical corpus: one JSON object per line,
//   {"show_id": "...", "trace": [0, 1, ...], "target": 3.0}
// with "target" optional. Records of one show need not be contiguous.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "impatient/prior_training.hpp"

namespace impatient {

std::string corpus_to_text(const std::vector<ShowHistory>& histories);

// Groups records by show_id in order of first appearance. Every trace must
// have length K (the first record's length when `expected_K` is empty) and
// binary entries; targets must be present on all records of a show or none.
std::vector<ShowHistory> parse_corpus(const std::string& text, std::optional<int> expected_K = {});

void write_corpus(const std::filesystem::path& path, const std::vector<ShowHistory>& histories);
std::vector<ShowHistory> read_corpus(const std::filesystem::path& path, std::optional<int> expected_K = {});

}  // namespace impatient
