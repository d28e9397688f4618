#include "gpsearch/gp_loop.hpp"

#include "gpsearch/random.hpp"

#include <cmath>

namespace gpsearch {

SurrogateTrainer::SurrogateTrainer(GpLoopConfig cfg, SystemInfo sys)
    : cfg_(std::move(cfg)), sys_(std::move(sys)), m_sub_(cfg_.m_sub_init) {}

double SurrogateTrainer::trust_radius(const TrainingData& data) const {
  if (!cfg_.adaptive_trust) return cfg_.fixed_trust_radius;
  const int n_atoms = sys_.molecular ? sys_.n_atoms() : 1;
  return trust_threshold(data.size(), n_atoms, cfg_.trust);
}

SurrogateTrainer::Built SurrogateTrainer::build(const TrainingData& data,
                                                int outer_iteration) {
  TrainOptions opts;
  opts.const_sigma2 = cfg_.const_sigma2;
  opts.noise = cfg_.noise;
  opts.barrier = cfg_.use_barrier ? cfg_.barrier : BarrierConfig::disabled();
  opts.scg_max_iter = cfg_.scg_max_iter;

  Built out;
  const int m = data.size();
  int retries = 0;
  while (true) {
    if (cfg_.use_fps && m > m_sub_) {
      std::set<int> forced;  // the two most recent points stay in the subset
      forced.insert(m - 1);
      if (m >= 2) forced.insert(m - 2);
      out.subset = fps_select(data, cfg_.trust.metric, m_sub_, forced);
    } else {
      out.subset.resize(static_cast<size_t>(m));
      for (int i = 0; i < m; ++i) out.subset[static_cast<size_t>(i)] = i;
    }
    out.hp = train_hyperparameters(data.subset(out.subset), opts);

    Vec w(1 + out.hp.inv_lengthscales.size());
    w[0] = std::log(out.hp.signal_variance);
    for (Eigen::Index p = 0; p < out.hp.inv_lengthscales.size(); ++p) {
      w[1 + p] = std::log(out.hp.inv_lengthscales[p]);
    }
    hp_history_.push_back(w);
    while (static_cast<int>(hp_history_.size()) >
           cfg_.oscillation_window + 2) {
      hp_history_.pop_front();
    }

    const bool unstable =
        cfg_.grow_on_oscillation &&
        detect_oscillation(hp_history_, cfg_.oscillation_window,
                           cfg_.oscillation_threshold);
    if (unstable && m_sub_ < cfg_.m_sub_max && retries < cfg_.max_grow_retries &&
        cfg_.use_fps && m > m_sub_) {
      m_sub_ = std::min(m_sub_ + cfg_.m_sub_grow, cfg_.m_sub_max);
      ++retries;
      ++out.growths;
      hp_history_.pop_back();  // retrain replaces this iteration's entry
      continue;
    }
    break;
  }

  if (cfg_.use_rff) {
    const std::uint64_t seed =
        derive_seed(cfg_.seed, "rff") + static_cast<std::uint64_t>(outer_iteration);
    out.model = std::make_shared<RffModel>(
        RffModel::build(out.hp, data, cfg_.d_rff, seed));
  } else {
    out.model =
        std::make_shared<ExactGpModel>(ExactGpModel::fit(out.hp, data));
  }
  return out;
}

}  // namespace gpsearch
