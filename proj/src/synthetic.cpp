#include "impatient/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include "impatient/errors.hpp"
#include "impatient/table_io.hpp"

namespace impatient {

namespace {

constexpr double kLogitClamp = 30.0;
constexpr double kGridLo = -16.0;
constexpr double kGridHi = 12.0;
constexpr double kGridStep = 0.01;

}  // namespace

double logistic(double x) {
  x = std::clamp(x, -kLogitClamp, kLogitClamp);
  return 1.0 / (1.0 + std::exp(-x));
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

std::string show_name(int index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "show-" + digits;
}

void GeneratorConfig::validate() const {
  if (K < 1) throw std::invalid_argument("generator: K must be >= 1");
  const double reals[] = {base_level,  decay_rate,        weekly_amplitude, weekly_jitter, cross_show_spread,
                          drift_ratio, drift_persistence, hook_scale, hook_decay,
                          user_effect_scale, ar_coefficient, ar_scale};
  for (double r : reals) {
    if (!std::isfinite(r)) throw std::invalid_argument("generator: all scales must be finite");
  }
  if (ar_coefficient < 0.0 || ar_coefficient >= 1.0) {
    throw std::invalid_argument("generator: ar_coefficient must lie in [0, 1)");
  }
  if (hook_scale < 0.0 || hook_decay <= 0.0) {
    throw std::invalid_argument("generator: hook_scale must be >= 0 and hook_decay > 0");
  }
  if (drift_persistence < 0.0 || drift_persistence > 1.0) {
    throw std::invalid_argument("generator: drift_persistence must lie in [0, 1]");
  }
  if (cross_show_spread < 0.0 || drift_ratio < 0.0 || weekly_jitter < 0.0 ||
      user_effect_scale < 0.0 || ar_scale < 0.0) {
    throw std::invalid_argument("generator: spreads and scales must be >= 0");
  }
}

Rng split_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

Generator::Generator(GeneratorConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  mix_sd_ = std::hypot(cfg_.user_effect_scale, cfg_.ar_scale);
  grid_lo_ = kGridLo;
  grid_step_ = kGridStep;
  if (mix_sd_ == 0.0) return;

  const auto n = static_cast<std::size_t>(std::lround((kGridHi - kGridLo) / kGridStep)) + 1;
  offsets_.resize(n);
  boost::math::tools::eps_tolerance<double> tol(50);
  for (std::size_t i = 0; i < n; ++i) {
    const double target = logistic(kGridLo + kGridStep * static_cast<double>(i));
    auto f = [&](double c) { return population_rate(c) - target; };
    // the quadrature reaches 9 sd into each tail
    double lo = kGridLo - 10.0 - 9.0 * mix_sd_, hi = kGridHi + 10.0 + 9.0 * mix_sd_;
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    offsets_[i] = 0.5 * (a + b);
  }
}

double Generator::population_rate(double offset) const {
  if (mix_sd_ == 0.0) return logistic(offset);
  const double sd = mix_sd_;
  auto integrand = [&](double x) {
    return std::exp(-0.5 * x * x) * logistic(offset + sd * x);
  };
  const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  return inv_sqrt_2pi * boost::math::quadrature::gauss<double, 60>::integrate(integrand, -9.0, 9.0);
}

double Generator::offset_for_logit(double target_logit) const {
  if (offsets_.empty()) return target_logit;
  const double pos = (target_logit - grid_lo_) / grid_step_;
  if (pos <= 0.0) return offsets_.front() + (target_logit - grid_lo_);
  const auto last = static_cast<double>(offsets_.size() - 1);
  if (pos >= last) return offsets_.back() + (target_logit - (grid_lo_ + grid_step_ * last));
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return offsets_[i] + frac * (offsets_[i + 1] - offsets_[i]);
}

ShowGroundTruth Generator::gen_show(Rng& rng, std::string show_id) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double spread = cfg_.cross_show_spread;
  const double alpha = cfg_.base_level + spread * normal(rng);
  const double beta = std::min(0.0, -cfg_.decay_rate + spread * normal(rng));
  const double amplitude = cfg_.weekly_amplitude * (1.0 + cfg_.weekly_jitter * normal(rng));
  const double step = cfg_.drift_ratio * spread;
  const double hook = cfg_.hook_scale * normal(rng);

  ShowGroundTruth gt;
  gt.show_id = std::move(show_id);
  gt.mean_trace.resize(cfg_.K);
  double drift = 0.0;
  for (int k = 1; k <= cfg_.K; ++k) {
    drift = cfg_.drift_persistence * drift + step * normal(rng);
    const double x = alpha + beta * std::log(static_cast<double>(k)) +
                     amplitude * std::cos(2.0 * std::numbers::pi * k / 7.0) + drift +
                     hook * std::exp(-(k - 1) / cfg_.hook_decay);
    gt.mean_trace(k - 1) = logistic(x);
  }
  gt.stickiness = gt.mean_trace.sum();
  return gt;
}

Vector Generator::latent_offsets(const ShowGroundTruth& gt) const {
  Vector off(gt.mean_trace.size());
  for (Eigen::Index k = 0; k < off.size(); ++k) off(k) = offset_for_logit(logit(gt.mean_trace(k)));
  return off;
}

Trace Generator::sample_trace_from_offsets(const Vector& offsets, Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double rho = cfg_.ar_coefficient;
  const double innovation = cfg_.ar_scale * std::sqrt(1.0 - rho * rho);

  Trace t;
  t.values.resize(offsets.size());
  t.observed_len = static_cast<int>(offsets.size());
  const double user = cfg_.user_effect_scale * normal(rng);
  double h = cfg_.ar_scale * normal(rng);
  for (Eigen::Index k = 0; k < offsets.size(); ++k) {
    if (k > 0) h = rho * h + innovation * normal(rng);
    const double p = logistic(offsets(k) + user + h);
    t.values(k) = unif(rng) < p ? 1.0 : 0.0;
  }
  return t;
}

Trace Generator::sample_trace(const ShowGroundTruth& gt, Rng& rng) const {
  return sample_trace_from_offsets(latent_offsets(gt), rng);
}

Dataset Generator::gen_dataset(int n_shows, int traces_per_show) const {
  if (n_shows < 1 || traces_per_show < 1) {
    throw std::invalid_argument("gen_dataset: n_shows and traces_per_show must be >= 1");
  }
  Dataset ds;
  ds.histories.reserve(static_cast<std::size_t>(n_shows));
  ds.truths.reserve(static_cast<std::size_t>(n_shows));
  for (int i = 0; i < n_shows; ++i) {
    auto show_rng = split_stream(cfg_.seed, stream::kShows, static_cast<std::uint64_t>(i));
    auto gt = gen_show(show_rng, show_name(i));
    const Vector off = latent_offsets(gt);

    auto trace_rng = split_stream(cfg_.seed, stream::kTraces, static_cast<std::uint64_t>(i));
    ShowHistory h;
    h.show_id = gt.show_id;
    h.traces.reserve(static_cast<std::size_t>(traces_per_show));
    h.targets.emplace();
    h.targets->reserve(static_cast<std::size_t>(traces_per_show));
    for (int m = 0; m < traces_per_show; ++m) {
      h.traces.push_back(sample_trace_from_offsets(off, trace_rng));
      h.targets->push_back(h.traces.back().values.sum());
    }
    ds.histories.push_back(std::move(h));
    ds.truths.push_back(std::move(gt));
  }
  return ds;
}

void write_ground_truth(const std::filesystem::path& path, const std::vector<ShowGroundTruth>& truths) {
  std::string out;
  for (const auto& gt : truths) {
    out += "{\"show_id\": " + nlohmann::json(gt.show_id).dump();
    out += ", \"stickiness\": " + format_real(gt.stickiness);
    out += ", \"mean_trace\": [";
    for (Eigen::Index k = 0; k < gt.mean_trace.size(); ++k) {
      if (k) out += ", ";
      out += format_real(gt.mean_trace(k));
    }
    out += "]}\n";
  }
  write_atomic(path, out);
}

std::vector<ShowGroundTruth> read_ground_truth(const std::filesystem::path& path) {
  std::vector<ShowGroundTruth> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ShowGroundTruth gt;
      gt.show_id = j.at("show_id").get<std::string>();
      gt.stickiness = j.at("stickiness").get<double>();
      const auto mt = j.at("mean_trace").get<std::vector<double>>();
      gt.mean_trace = Eigen::Map<const Vector>(mt.data(), static_cast<Eigen::Index>(mt.size()));
      out.push_back(std::move(gt));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("ground truth: ") + e.what());
    }
  }
  return out;
}

}  // namespace impatient
