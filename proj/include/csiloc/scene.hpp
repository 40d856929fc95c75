#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "csiloc/geometry.hpp"

namespace csiloc {

struct Position2D {
  double x = 0.0;
  double y = 0.0;
};

struct ScatteringCluster {
  Vec3 centroid = Vec3::Zero();   // meters, world frame
  double spread = 0.0;            // meters, std of ray points around centroid
  int ray_count = 1;
  double mean_power = 1.0;        // linear gain budget of the cluster
};

/// Synthetic multipath environment standing in for a measured site.
struct ScatteringScene {
  Vec3 bs_position = Vec3::Zero();
  std::vector<ScatteringCluster> clusters;
  bool los_enabled = true;
  double los_power = 1.0;         // linear
  double noise_power = 0.0;       // linear variance per antenna
  double ue_height = 1.5;         // meters, lifts Position2D into 3-D

  void validate() const;
};

/// One generated uplink channel vector with its ground-truth label.
struct ChannelSnapshot {
  CVec h;
  double timestamp = 0.0;         // seconds
  Position2D ue_position;
};

/// Scene geometry frozen for the lifetime of an experiment: ray points are
/// drawn once from the scene stream, so that per-position channel statistics
/// are stationary across snapshots (only gains and noise vary).
struct SceneRealization {
  std::vector<Vec3> ray_points;              // all rays, cluster-major order
  std::vector<Polarization> ray_polarization;
  std::vector<double> ray_power;             // per-ray mean power budget
  Eigen::MatrixXcd ray_steering;             // N x ray_count_total, precomputed
};

SceneRealization realize_scene(const ScatteringScene& scene,
                               const ArrayGeometry& geometry,
                               std::uint64_t scene_seed);

/// Draws one snapshot at the given UE position: deterministic LOS term plus
/// per-ray i.i.d. complex Gaussian gains plus per-antenna noise. Gains are
/// attenuated by the propagation path length, which ties the covariance to
/// the UE position.
ChannelSnapshot synth_channel(const ScatteringScene& scene,
                              const ArrayGeometry& geometry,
                              const SceneRealization& real,
                              const Position2D& ue, std::mt19937_64& eng);

/// Rotates every entry by exp(j*phase), modeling residual carrier frequency
/// offset common to all antennas.
ChannelSnapshot apply_common_phase(const ChannelSnapshot& s, double phase);

struct Trajectory {
  std::vector<Position2D> waypoints;
  double speed = 1.0;             // m/s
  double snapshot_rate = 10.0;    // Hz
  double position_rate = 1.0;     // Hz

  void validate() const;
  double path_length() const;
};

struct TimedPosition {
  double timestamp = 0.0;
  Position2D position;
};

struct TrajectorySamples {
  std::vector<ChannelSnapshot> snapshots;  // labels are interpolated fixes
  std::vector<TimedPosition> fixes;        // position_rate ground-truth fixes
};

/// Moves the UE at constant speed along the waypoints. Snapshots are emitted
/// on the snapshot_rate grid starting at t=0 (endpoint included when it lands
/// on the grid); labels are linearly interpolated between position_rate fixes,
/// while channels are synthesized at the true path position.
TrajectorySamples sample_trajectory(const Trajectory& traj,
                                    const ScatteringScene& scene,
                                    const ArrayGeometry& geometry,
                                    const SceneRealization& real,
                                    std::mt19937_64& eng);

/// Position on the piecewise-linear path at arc length s (clamped to ends).
Position2D path_position(const Trajectory& traj, double arc_length);

}  // namespace csiloc
