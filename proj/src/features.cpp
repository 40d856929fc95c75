#include "csiloc/features.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace csiloc {

SampleCovariance sample_covariance(const std::vector<ChannelSnapshot>& snaps) {
  if (snaps.empty())
    throw std::invalid_argument("sample_covariance: empty snapshot list");
  const Eigen::Index n = snaps.front().h.size();

  SampleCovariance cov;
  cov.matrix = Eigen::MatrixXcd::Zero(n, n);
  double mx = 0.0, my = 0.0;
  for (const auto& s : snaps) {
    if (s.h.size() != n)
      throw std::invalid_argument("sample_covariance: mismatched lengths");
    cov.matrix.noalias() += s.h * s.h.adjoint();
    mx += s.ue_position.x;
    my += s.ue_position.y;
  }
  const double inv = 1.0 / static_cast<double>(snaps.size());
  cov.matrix *= inv;
  // Re-symmetrize so floating-point drift cannot break the Hermitian invariant.
  cov.matrix = 0.5 * (cov.matrix + cov.matrix.adjoint()).eval();
  cov.snapshot_count = static_cast<int>(snaps.size());
  cov.ue_position = {mx * inv, my * inv};
  return cov;
}

FeatureVector normalize_and_vectorize(const SampleCovariance& cov) {
  const Eigen::Index n = cov.matrix.rows();
  const double tr = cov.matrix.real().trace();
  if (!(tr > 0.0))
    throw std::invalid_argument("all-zero covariance");

  FeatureVector f;
  f.ue_position = cov.ue_position;
  f.x.resize(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)        // real, diagonal included
    for (Eigen::Index j = i; j < n; ++j)
      f.x(k++) = cov.matrix(i, j).real() / tr;
  for (Eigen::Index i = 0; i < n; ++i)        // imaginary, strict upper
    for (Eigen::Index j = i + 1; j < n; ++j)
      f.x(k++) = cov.matrix(i, j).imag() / tr;
  return f;
}

Eigen::MatrixXcd reconstruct_covariance(const Eigen::VectorXd& x) {
  const auto n = static_cast<Eigen::Index>(std::lround(std::sqrt(
      static_cast<double>(x.size()))));
  if (n * n != x.size())
    throw std::invalid_argument("reconstruct_covariance: length is not N^2");
  Eigen::MatrixXcd c(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      c(i, j) = x(k);
      c(j, i) = x(k);
      ++k;
    }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      c(i, j) += std::complex<double>(0.0, x(k));
      c(j, i) -= std::complex<double>(0.0, x(k));
      ++k;
    }
  return c;
}

std::vector<int> antenna_subset(const ArrayGeometry& geometry,
                                int target_count) {
  const int n = static_cast<int>(geometry.size());
  if (target_count < 1 || target_count > n)
    throw std::out_of_range("antenna_subset: target_count out of range");

  constexpr double kTieTol = 1e-9;
  std::vector<int> chosen;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<double> min_dist(static_cast<std::size_t>(n),
                               std::numeric_limits<double>::infinity());
  chosen.push_back(0);
  used[0] = 1;
  Polarization last_pol = geometry.element_polarization[0];

  while (static_cast<int>(chosen.size()) < target_count) {
    const int just = chosen.back();
    for (int i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double d = (geometry.element_positions.col(i) -
                        geometry.element_positions.col(just)).norm();
      auto& md = min_dist[static_cast<std::size_t>(i)];
      md = std::min(md, d);
    }
    // Best min-distance; among ties prefer a polarization change, then the
    // lowest index.
    double best = -1.0;
    for (int i = 0; i < n; ++i)
      if (!used[static_cast<std::size_t>(i)])
        best = std::max(best, min_dist[static_cast<std::size_t>(i)]);
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      if (min_dist[static_cast<std::size_t>(i)] < best - kTieTol) continue;
      const bool flips =
          geometry.element_polarization[static_cast<std::size_t>(i)] !=
          last_pol;
      if (pick < 0) {
        pick = i;
      } else {
        const bool pick_flips =
            geometry.element_polarization[static_cast<std::size_t>(pick)] !=
            last_pol;
        if (flips && !pick_flips) pick = i;
      }
    }
    chosen.push_back(pick);
    used[static_cast<std::size_t>(pick)] = 1;
    last_pol = geometry.element_polarization[static_cast<std::size_t>(pick)];
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

SampleCovariance restrict_features(const SampleCovariance& cov,
                                   const std::vector<int>& indices) {
  const Eigen::Index n = cov.matrix.rows();
  std::set<int> seen;
  for (int k : indices) {
    if (k < 0 || k >= n)
      throw std::out_of_range("restrict_features: index out of range");
    if (!seen.insert(k).second)
      throw std::invalid_argument("restrict_features: duplicate index");
  }
  const auto m = static_cast<Eigen::Index>(indices.size());
  SampleCovariance out;
  out.snapshot_count = cov.snapshot_count;
  out.ue_position = cov.ue_position;
  out.matrix.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      out.matrix(i, j) = cov.matrix(indices[static_cast<std::size_t>(i)],
                                    indices[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace csiloc
