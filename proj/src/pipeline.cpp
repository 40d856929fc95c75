#include "csiloc/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "csiloc/rng.hpp"

namespace csiloc {

CovarianceSet build_covariance_set(const ExperimentConfig& cfg) {
  const SceneRealization real = realize_scene(
      cfg.scene, cfg.geometry, derive_seed(cfg.seed, "scene"));

  auto snap_eng = make_engine(derive_seed(cfg.seed, "snapshots"));
  auto phase_eng = make_engine(derive_seed(cfg.seed, "common-phase"));
  std::uniform_real_distribution<double> uniform_phase(
      0.0, 2.0 * std::numbers::pi);

  TrajectorySamples samples = sample_trajectory(
      cfg.trajectory, cfg.scene, cfg.geometry, real, snap_eng);
  // Residual CFO: one random common rotation per snapshot; the covariance
  // estimator must cancel it.
  for (auto& s : samples.snapshots)
    s = apply_common_phase(s, uniform_phase(phase_eng));

  const int per_window = static_cast<int>(
      std::lround(cfg.window_seconds * cfg.trajectory.snapshot_rate));
  if (per_window < 1)
    throw std::runtime_error("covariance window shorter than one snapshot");
  const std::size_t windows = samples.snapshots.size() /
                              static_cast<std::size_t>(per_window);
  if (windows == 0)
    throw std::runtime_error(
        "insufficient snapshots: trajectory shorter than one window");

  CovarianceSet set;
  set.geometry = cfg.geometry;
  for (std::size_t w = 0; w < windows; ++w) {
    const auto first = samples.snapshots.begin() +
                       static_cast<std::ptrdiff_t>(w * per_window);
    set.covariances.push_back(sample_covariance(
        std::vector<ChannelSnapshot>(first, first + per_window)));
  }

  // Contiguous blocks assigned greedily so the running train share tracks
  // the target fraction (mimics pathway-structured splits).
  const int blocks = std::max(1, cfg.split.block_count);
  set.split.resize(windows, Split::Train);
  std::size_t train_so_far = 0, assigned = 0;
  for (int b = 0; b < blocks; ++b) {
    const std::size_t lo = windows * static_cast<std::size_t>(b) /
                           static_cast<std::size_t>(blocks);
    const std::size_t hi = windows * static_cast<std::size_t>(b + 1) /
                           static_cast<std::size_t>(blocks);
    const bool to_train =
        static_cast<double>(train_so_far) <=
        cfg.split.train_fraction * static_cast<double>(assigned);
    for (std::size_t i = lo; i < hi; ++i)
      set.split[i] = to_train ? Split::Train : Split::Test;
    if (to_train) train_so_far += hi - lo;
    assigned += hi - lo;
  }
  return set;
}

LabeledDataset build_dataset(const ExperimentConfig& cfg) {
  const CovarianceSet set = build_covariance_set(cfg);
  std::vector<int> all(static_cast<std::size_t>(cfg.geometry.size()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  LabeledDataset ds = vectorize_covariances(set, all);
  ds.master_seed = cfg.seed;
  ds.config_hash = config_hash(cfg);

  if (cfg.standardize_features) {
    // Per-dimension standardization with train-split statistics.
    const Eigen::MatrixXd train = ds.features_of(Split::Train);
    const Eigen::VectorXd mean = train.rowwise().mean();
    Eigen::VectorXd std_dev =
        ((train.colwise() - mean).array().square().rowwise().sum() /
         static_cast<double>(std::max<Eigen::Index>(1, train.cols() - 1)))
            .sqrt();
    std_dev = std_dev.cwiseMax(1e-12);
    ds.features = (ds.features.colwise() - mean).array().colwise() /
                  std_dev.array();
  }
  return ds;
}

void write_snapshot_dump(const std::vector<ChannelSnapshot>& snaps,
                         const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + file.string());
  const Eigen::Index n = snaps.empty() ? 0 : snaps.front().h.size();
  out << "timestamp_s,pos_x_m,pos_y_m";
  for (Eigen::Index k = 0; k < n; ++k) out << ",h" << k << "_re,h" << k << "_im";
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (const auto& s : snaps) {
    put(s.timestamp);
    out << ',';
    put(s.ue_position.x);
    out << ',';
    put(s.ue_position.y);
    for (Eigen::Index k = 0; k < n; ++k) {
      out << ',';
      put(s.h(k).real());
      out << ',';
      put(s.h(k).imag());
    }
    out << '\n';
  }
}

}  // namespace csiloc
