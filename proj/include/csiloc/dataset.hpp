#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csiloc/features.hpp"

namespace csiloc {

enum class Split : std::uint8_t { Train = 0, Test = 1 };

/// Paired (feature, position) records with a train/test tag per record and
/// provenance (master seed, config hash) so that any artifact is reproducible
/// from its own header.
struct LabeledDataset {
  int antenna_count = 0;               // N
  Eigen::MatrixXd features;            // M x count, M = N^2
  Eigen::Matrix2Xd positions;          // 2 x count
  std::vector<Split> split;            // one tag per record
  int ordering_version = kFeatureOrderingVersion;
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;

  Eigen::Index count() const { return features.cols(); }
  Eigen::Index feature_dim() const { return features.rows(); }

  Eigen::MatrixXd features_of(Split s) const;
  Eigen::Matrix2Xd positions_of(Split s) const;
  Eigen::Index count_of(Split s) const;
};

void append_record(LabeledDataset& ds, const FeatureVector& f, Split tag);

/// Concatenates two datasets; feature dimension and ordering version must
/// match. Split tags are preserved.
LabeledDataset dataset_append(const LabeledDataset& existing,
                              const LabeledDataset& extra);

/// Compact binary layout with magic + version header.
void dataset_save(const LabeledDataset& ds, const std::filesystem::path& file);
LabeledDataset dataset_load(const std::filesystem::path& file);

/// CSV layout: header row, then split,x(0..M-1),pos_x_m,pos_y_m per record.
void dataset_save_csv(const LabeledDataset& ds,
                      const std::filesystem::path& file);
LabeledDataset dataset_load_csv(const std::filesystem::path& file);

}  // namespace csiloc
