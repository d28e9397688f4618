#include "gpsearch/active_learning.hpp"

#include "gpsearch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpsearch {

Metric metric_from_string(const std::string& name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "emd") return Metric::emd;
  if (name == "max1dlog") return Metric::max1dlog;
  throw std::invalid_argument("unknown metric: " + name);
}

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::euclidean:
      return "euclidean";
    case Metric::emd:
      return "emd";
    case Metric::max1dlog:
      return "max1dlog";
  }
  return "?";
}

double config_distance(Metric metric, const SystemInfo& sys, const Vec& x1,
                       const Vec& x2) {
  if (!sys.molecular) return (x1 - x2).norm();
  switch (metric) {
    case Metric::euclidean:
      return (x1 - x2).norm();
    case Metric::emd:
      return emd_distance(sys, x1, x2);
    case Metric::max1dlog:
      return max1dlog_distance(sys, x1, x2);
  }
  return (x1 - x2).norm();
}

std::vector<int> fps_select(const TrainingData& data, Metric metric, int m_sub,
                            const std::set<int>& forced) {
  const int n = data.size();
  if (n == 0) throw std::invalid_argument("fps_select: empty data");
  m_sub = std::min(m_sub, n);
  if (static_cast<int>(forced.size()) > m_sub) {
    throw std::invalid_argument("fps_select: m_sub smaller than forced set");
  }

  std::vector<char> selected(static_cast<size_t>(n), 0);
  std::vector<int> out;
  auto take = [&](int i) {
    selected[static_cast<size_t>(i)] = 1;
    out.push_back(i);
  };
  for (const int i : forced) take(i);
  if (out.empty()) take(n - 1);  // seed with the most recent point

  // Min distance from each candidate to the current selection.
  std::vector<double> min_dist(static_cast<size_t>(n),
                               std::numeric_limits<double>::infinity());
  auto update_from = [&](int j) {
    for (int i = 0; i < n; ++i) {
      if (selected[static_cast<size_t>(i)]) continue;
      const double d = config_distance(metric, data.system(),
                                       data.configs()[static_cast<size_t>(i)],
                                       data.configs()[static_cast<size_t>(j)]);
      min_dist[static_cast<size_t>(i)] = std::min(min_dist[static_cast<size_t>(i)], d);
    }
  };
  for (const int j : out) update_from(j);

  while (static_cast<int>(out.size()) < m_sub) {
    int best = -1;
    double best_d = -1.0;
    for (int i = 0; i < n; ++i) {
      if (selected[static_cast<size_t>(i)]) continue;
      if (min_dist[static_cast<size_t>(i)] > best_d) {
        best_d = min_dist[static_cast<size_t>(i)];
        best = i;
      }
    }
    if (best < 0) break;
    take(best);
    update_from(best);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<int>> per_bead_fps(const TrainingData& data,
                                           const std::vector<Vec>& images,
                                           Metric metric, double cutoff,
                                           int m_sub,
                                           const std::set<int>& forced) {
  if (images.empty()) throw std::invalid_argument("per_bead_fps: no images");
  const int n = data.size();
  std::vector<std::vector<int>> subsets;
  subsets.reserve(images.size());

  for (const auto& image : images) {
    std::vector<std::pair<double, int>> dist(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      dist[static_cast<size_t>(i)] = {
          config_distance(metric, data.system(),
                          data.configs()[static_cast<size_t>(i)], image),
          i};
    }
    std::vector<int> ball;
    for (const auto& [d, i] : dist) {
      if (d <= cutoff) ball.push_back(i);
    }
    if (ball.empty()) {
      // Fall back to the nearest m_sub points.
      std::sort(dist.begin(), dist.end());
      for (int i = 0; i < std::min(m_sub, n); ++i) {
        ball.push_back(dist[static_cast<size_t>(i)].second);
      }
      std::sort(ball.begin(), ball.end());
    }

    TrainingData local = data.subset(ball);
    std::set<int> forced_local;
    for (const int f : forced) {
      const auto it = std::find(ball.begin(), ball.end(), f);
      if (it != ball.end()) {
        forced_local.insert(static_cast<int>(it - ball.begin()));
      }
    }
    const int want = std::min<int>(m_sub, local.size());
    const auto picked = fps_select(local, metric, want, forced_local);
    std::vector<int> global;
    global.reserve(picked.size());
    for (const int p : picked) global.push_back(ball[static_cast<size_t>(p)]);
    subsets.push_back(std::move(global));
  }
  return subsets;
}

bool detect_oscillation(const std::deque<Vec>& history, int window,
                        double threshold) {
  const int h = static_cast<int>(history.size());
  if (h < 3) return false;
  const int n_comp = static_cast<int>(history.back().size());
  // O_j(t) needs t, t-1, t-2; average over the last `window` valid steps.
  const int t_last = h - 1;
  const int t_first = std::max(2, h - window);
  int count = 0;
  double oscillating = 0.0;
  for (int t = t_first; t <= t_last; ++t) {
    for (int j = 0; j < n_comp; ++j) {
      const double d1 = history[static_cast<size_t>(t)][j] -
                        history[static_cast<size_t>(t - 1)][j];
      const double d0 = history[static_cast<size_t>(t - 1)][j] -
                        history[static_cast<size_t>(t - 2)][j];
      if (d1 * d0 < 0.0) oscillating += 1.0;
      ++count;
    }
  }
  if (count == 0) return false;
  return oscillating / count > threshold;
}

double trust_threshold(int n_data, int n_atoms, const TrustConfig& cfg) {
  const double k = std::log(2.0) / cfg.n_half;
  const double earned =
      cfg.t_min + cfg.dt_explore * (1.0 - std::exp(-k * n_data));
  const double ceiling =
      std::max(cfg.a_floor, cfg.a_atomic / std::sqrt(static_cast<double>(
                                std::max(n_atoms, 1))));
  return std::min(earned, ceiling);
}

TrustCheck check_trust(const Vec& candidate, const Vec& anchor,
                       const TrainingData& data, Metric metric, double theta) {
  if (data.size() == 0) throw std::invalid_argument("check_trust: no data");
  auto nearest_dist = [&](const Vec& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : data.configs()) {
      best = std::min(best, config_distance(metric, data.system(), c, x));
    }
    return best;
  };

  if (nearest_dist(candidate) <= theta) {
    return {true, candidate};
  }
  // First crossing of theta along the segment anchor -> candidate.
  double lo = 0.0, hi = 1.0;
  const double tol = 1e-3;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vec x = anchor + mid * (candidate - anchor);
    const double d = nearest_dist(x);
    if (d > theta) {
      hi = mid;
    } else {
      lo = mid;
      if (theta - d < tol * theta) break;
    }
  }
  return {false, anchor + lo * (candidate - anchor)};
}

double max_step_length(const SystemInfo& sys, const Vec& x, double r_limit) {
  if (!sys.molecular || sys.n_atoms() < 2) {
    return std::numeric_limits<double>::infinity();
  }
  const int n = sys.n_atoms();
  double d_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      d_min = std::min(d_min, (x.segment<3>(3 * i) - x.segment<3>(3 * j)).norm());
    }
  }
  return 0.5 * (1.0 - r_limit) * d_min;
}

int select_image(const AcquisitionStrategy& strategy,
                 const std::vector<double>& force_norms,
                 const std::vector<double>& sigmas,
                 const std::vector<int>& unevaluated) {
  if (unevaluated.empty()) {
    throw std::invalid_argument("select_image: no unevaluated images");
  }
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const int i : unevaluated) {
    const double score =
        strategy.kind == AcquisitionKind::max_variance
            ? sigmas[static_cast<size_t>(i)]
            : force_norms[static_cast<size_t>(i)] +
                  strategy.kappa * sigmas[static_cast<size_t>(i)];
    if (score > best_score) {  // strict: ties keep the lowest index
      best_score = score;
      best = i;
    }
  }
  return best;
}

bool variance_gate(double sigma, double sigma_gate) {
  return sigma < sigma_gate;
}

double lcb_effective_gradient(double grad_norm, double sigma, double kappa) {
  return grad_norm + kappa * sigma;
}

}  // namespace gpsearch
