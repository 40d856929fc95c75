#pragma once

#include "csiloc/config.hpp"
#include "csiloc/dataset.hpp"
#include "csiloc/evaluation.hpp"

namespace csiloc {

/// Runs the scene simulator along the configured trajectory and windows the
/// snapshots into labeled sample covariances with train/test tags. Every
/// stochastic stage draws from a sub-stream derived from cfg.seed.
CovarianceSet build_covariance_set(const ExperimentConfig& cfg);

/// Full dataset pipeline: covariances, vectorization, optional feature
/// standardization (train-split statistics), provenance header.
LabeledDataset build_dataset(const ExperimentConfig& cfg);

/// CSV record stream of raw snapshots: timestamp, position, then the channel
/// entries as interleaved real/imag pairs.
void write_snapshot_dump(const std::vector<ChannelSnapshot>& snaps,
                         const std::filesystem::path& file);

}  // namespace csiloc
