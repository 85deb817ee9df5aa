#pragma once

#include <filesystem>
#include <string>

#include "impatient/belief.hpp"

namespace impatient {

// JSON object with keys mu, sigma, v_noise, weights, delays. Matrices are
// row-major arrays of arrays; reals carry 17 significant digits.
std::string prior_to_json(const PriorModel& prior);
PriorModel prior_from_json(const std::string& text);

void save_prior(const PriorModel& prior, const std::filesystem::path& path);
PriorModel load_prior(const std::filesystem::path& path);

}  // namespace impatient
