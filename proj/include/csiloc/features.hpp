#pragma once

#include <vector>

#include "csiloc/scene.hpp"

namespace csiloc {

/// Trace-positive Hermitian PSD estimate of the channel covariance over a
/// short window, labeled with the mean UE position of its snapshots.
struct SampleCovariance {
  Eigen::MatrixXcd matrix;
  int snapshot_count = 0;
  Position2D ue_position;
};

/// Real feature vector of length N^2: trace-normalized covariance, real upper
/// triangle with diagonal first, then imaginary strict upper triangle, both
/// row-major. The ordering is frozen by kFeatureOrderingVersion.
struct FeatureVector {
  Eigen::VectorXd x;
  Position2D ue_position;
};

inline constexpr int kFeatureOrderingVersion = 1;

/// (1/S) * sum h h^dagger, Hermitian-symmetrized; label = mean position.
SampleCovariance sample_covariance(const std::vector<ChannelSnapshot>& snaps);

/// Divides by the trace and stacks the non-redundant entries. Output length
/// is exactly N^2.
FeatureVector normalize_and_vectorize(const SampleCovariance& cov);

/// Inverse of the vectorization (up to the dropped trace scale): rebuilds the
/// unit-trace Hermitian matrix from a length-N^2 feature vector.
Eigen::MatrixXcd reconstruct_covariance(const Eigen::VectorXd& x);

/// Greedy farthest-point antenna selection, preferring a polarization change
/// when candidates tie on distance. Deterministic; returns sorted indices.
std::vector<int> antenna_subset(const ArrayGeometry& geometry,
                                int target_count);

/// Principal submatrix on the given sorted unique indices; label preserved.
SampleCovariance restrict_features(const SampleCovariance& cov,
                                   const std::vector<int>& indices);

}  // namespace csiloc
