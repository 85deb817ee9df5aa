#include "impatient/prior_training.hpp"

#include <algorithm>
#include <string>

#include "impatient/errors.hpp"

namespace impatient {

ShowStats show_stats(const ShowHistory& history) {
  if (history.traces.empty()) throw EmptyHistory("show '" + history.show_id + "' has no traces");
  const int K = history.traces.front().size();
  const auto M = static_cast<double>(history.traces.size());

  ShowStats s;
  s.count = static_cast<int>(history.traces.size());
  s.mean_trace = Vector::Zero(K);
  for (const auto& t : history.traces) {
    if (t.size() != K) throw InconsistentDimensions("show '" + history.show_id + "': mixed trace lengths");
    if (t.observed_len != K) throw std::invalid_argument("show '" + history.show_id + "': partial trace");
    s.mean_trace += t.values;
  }
  s.mean_trace /= M;

  s.noise_cov = Matrix::Zero(K, K);
  for (const auto& t : history.traces) {
    const Vector d = t.values - s.mean_trace;
    s.noise_cov.selfadjointView<Eigen::Lower>().rankUpdate(d);
  }
  s.noise_cov = s.noise_cov.selfadjointView<Eigen::Lower>();
  s.noise_cov /= M;
  s.noise_cov = psd_repair(s.noise_cov);
  return s;
}

PriorModel fit_prior(std::span<const ShowHistory> histories, std::vector<int> delays, Vector weights) {
  if (histories.size() < 2) {
    throw TooFewShows("fit_prior needs at least 2 shows, got " + std::to_string(histories.size()));
  }
  std::vector<const ShowHistory*> order;
  order.reserve(histories.size());
  for (const auto& h : histories) order.push_back(&h);
  std::stable_sort(order.begin(), order.end(),
                   [](const ShowHistory* a, const ShowHistory* b) { return a->show_id < b->show_id; });

  std::vector<ShowStats> stats;
  stats.reserve(order.size());
  for (const auto* h : order) stats.push_back(show_stats(*h));

  const auto K = stats.front().mean_trace.size();
  for (const auto& s : stats) {
    if (s.mean_trace.size() != K) throw InconsistentDimensions("fit_prior: shows have different K");
  }
  if (static_cast<Eigen::Index>(delays.size()) != K || weights.size() != K) {
    throw InconsistentDimensions("fit_prior: delays/weights length differs from K");
  }

  const auto n = static_cast<double>(stats.size());
  PriorModel p;
  p.mu = Vector::Zero(K);
  p.v_noise = Matrix::Zero(K, K);
  for (const auto& s : stats) {
    p.mu += s.mean_trace;
    p.v_noise += s.noise_cov;
  }
  p.mu /= n;
  p.v_noise /= n;

  p.sigma = Matrix::Zero(K, K);
  for (const auto& s : stats) {
    const Vector d = p.mu - s.mean_trace;
    p.sigma.noalias() += d * d.transpose();
  }
  p.sigma /= n;

  p.sigma = psd_repair(p.sigma);
  p.v_noise = psd_repair(p.v_noise);
  p.weights = std::move(weights);
  p.delays = std::move(delays);
  p.validate();
  return p;
}

Vector fit_weights(std::span<const ShowHistory> histories, double ridge) {
  if (ridge < 0.0) throw std::invalid_argument("fit_weights: ridge must be >= 0");
  Eigen::Index K = -1;
  Matrix gram;
  Vector rhs;
  std::size_t n = 0;
  for (const auto& h : histories) {
    if (!h.targets) throw MissingTargets("show '" + h.show_id + "' has no targets");
    if (h.targets->size() != h.traces.size()) {
      throw MissingTargets("show '" + h.show_id + "': targets not aligned with traces");
    }
    for (std::size_t m = 0; m < h.traces.size(); ++m) {
      const auto& z = h.traces[m].values;
      if (K < 0) {
        K = z.size();
        gram = Matrix::Zero(K, K);
        rhs = Vector::Zero(K);
      }
      if (z.size() != K) throw InconsistentDimensions("fit_weights: mixed trace lengths");
      gram.selfadjointView<Eigen::Lower>().rankUpdate(z);
      rhs += (*h.targets)[m] * z;
      ++n;
    }
  }
  if (K <= 0) throw MissingTargets("fit_weights: no traces");
  if (n < static_cast<std::size_t>(K)) {
    throw Underdetermined("fit_weights: " + std::to_string(n) + " traces for K = " + std::to_string(K));
  }
  gram = gram.selfadjointView<Eigen::Lower>();

  if (ridge == 0.0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    if (top <= 0.0 || es.eigenvalues().minCoeff() <= 1e-10 * top) {
      throw Underdetermined("fit_weights: design matrix is rank deficient");
    }
  }
  gram.diagonal().array() += ridge;
  const JitteredCholesky chol(gram);
  return chol.solve(rhs);
}

Matrix psd_repair(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("psd_repair: matrix is not square");
  Matrix sym = m;
  symmetrize(sym);
  if (sym.size() == 0) return sym;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.eigenvalues().minCoeff() >= 0.0) return sym;
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  symmetrize(out);
  return out;
}

FeatureSpec identity_features(int K) {
  FeatureSpec spec;
  for (int i = 0; i < K; ++i) spec.push_back(Monomial::linear(i));
  return spec;
}

FeatureSpec quadratic_features(int K) {
  FeatureSpec spec = identity_features(K);
  for (int i = 0; i < K; ++i) spec.push_back(Monomial::product(i, i));
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) spec.push_back(Monomial::product(i, j));
  }
  return spec;
}

AugmentedTraces augment_traces(std::span<const Trace> traces, const FeatureSpec& spec,
                               std::span<const int> delays) {
  const int K = static_cast<int>(delays.size());
  if (spec.empty()) throw InvalidSpec("augment: empty feature spec");
  // latest[p] = highest constituent coordinate over features 0..p
  std::vector<int> latest(spec.size());
  int running = -1;
  for (std::size_t p = 0; p < spec.size(); ++p) {
    const auto& f = spec[p];
    if (f.first < 0 || f.first >= K || f.second < -1 || f.second >= K) {
      throw InvalidSpec("augment: feature " + std::to_string(p) + " references a coordinate outside [0, " +
                        std::to_string(K) + ")");
    }
    running = std::max({running, f.first, f.second});
    latest[p] = running;
  }

  AugmentedTraces out;
  out.delays.reserve(spec.size());
  for (int c : latest) out.delays.push_back(delays[c]);
  for (std::size_t p = 1; p < out.delays.size(); ++p) {
    out.delays[p] = std::max(out.delays[p], out.delays[p - 1]);
  }

  const auto width = static_cast<Eigen::Index>(spec.size());
  out.traces.reserve(traces.size());
  for (const auto& t : traces) {
    if (t.size() != K) throw DimensionMismatch("augment: trace length differs from delays");
    Trace a;
    a.origin_round = t.origin_round;
    a.values = Vector::Zero(width);
    int observed = 0;
    for (Eigen::Index p = 0; p < width; ++p) {
      const auto& f = spec[static_cast<std::size_t>(p)];
      if (latest[static_cast<std::size_t>(p)] >= t.observed_len) break;
      a.values(p) = f.second < 0 ? t.values(f.first) : t.values(f.first) * t.values(f.second);
      observed = static_cast<int>(p) + 1;
    }
    a.observed_len = observed;
    out.traces.push_back(std::move(a));
  }
  return out;
}

}  // namespace impatient
