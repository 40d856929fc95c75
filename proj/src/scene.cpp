#include "csiloc/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "csiloc/rng.hpp"

namespace csiloc {

namespace {

// Path-length attenuation with a 1 m floor so that amplitudes stay bounded.
double path_attenuation(double path_meters) {
  return 1.0 / std::max(path_meters, 1.0);
}

Vec3 lift(const Position2D& p, double height) {
  return Vec3(p.x, p.y, height);
}

}  // namespace

void ScatteringScene::validate() const {
  if (los_power < 0.0 || noise_power < 0.0)
    throw std::invalid_argument("scene: powers must be nonnegative");
  for (const auto& c : clusters) {
    if (c.mean_power < 0.0)
      throw std::invalid_argument("scene: cluster power must be nonnegative");
    if (c.ray_count < 1)
      throw std::invalid_argument("scene: ray_count must be at least 1");
    if (c.spread < 0.0)
      throw std::invalid_argument("scene: spread must be nonnegative");
    if (!c.centroid.allFinite())
      throw std::invalid_argument("scene: non-finite cluster centroid");
  }
}

SceneRealization realize_scene(const ScatteringScene& scene,
                               const ArrayGeometry& geometry,
                               std::uint64_t scene_seed) {
  scene.validate();
  geometry.validate();
  auto eng = make_engine(derive_seed(scene_seed, "scene-geometry"));
  std::normal_distribution<double> normal(0.0, 1.0);

  SceneRealization real;
  for (const auto& c : scene.clusters) {
    for (int r = 0; r < c.ray_count; ++r) {
      Vec3 p = c.centroid;
      p.x() += c.spread * normal(eng);
      p.y() += c.spread * normal(eng);
      p.z() += c.spread * normal(eng);
      real.ray_points.push_back(p);
      real.ray_polarization.push_back(
          (eng() & 1u) ? Polarization::B : Polarization::A);
      real.ray_power.push_back(c.mean_power / c.ray_count);
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(real.ray_points.size());
  real.ray_steering.resize(geometry.size(), m);
  for (Eigen::Index r = 0; r < m; ++r) {
    // Steering vectors live in the array-local frame.
    const Vec3 local =
        real.ray_points[static_cast<std::size_t>(r)] - scene.bs_position;
    real.ray_steering.col(r) = steering_vector(
        geometry, local, real.ray_polarization[static_cast<std::size_t>(r)]);
  }
  return real;
}

ChannelSnapshot synth_channel(const ScatteringScene& scene,
                              const ArrayGeometry& geometry,
                              const SceneRealization& real,
                              const Position2D& ue, std::mt19937_64& eng) {
  const Eigen::Index n = geometry.size();
  const Vec3 ue3 = lift(ue, scene.ue_height);

  ChannelSnapshot snap;
  snap.ue_position = ue;
  snap.h = CVec::Zero(n);

  if (scene.los_enabled && scene.los_power > 0.0) {
    const double d = (ue3 - scene.bs_position).norm();
    snap.h += std::sqrt(scene.los_power) * path_attenuation(d) *
              steering_vector(geometry, ue3 - scene.bs_position);
  }

  const Eigen::Index m = real.ray_steering.cols();
  if (m > 0) {
    CVec gains(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const Vec3& p = real.ray_points[static_cast<std::size_t>(r)];
      // Bistatic two-leg attenuation: the UE leg makes nearby clusters
      // dominate, so the per-ray power profile is a local fingerprint.
      const double due = path_attenuation((ue3 - p).norm());
      const double amp =
          std::sqrt(real.ray_power[static_cast<std::size_t>(r)]) * due * due *
          path_attenuation((p - scene.bs_position).norm());
      gains(r) = amp * complex_gaussian(eng);
    }
    snap.h += real.ray_steering * gains;
  }

  if (scene.noise_power > 0.0) {
    const double sigma = std::sqrt(scene.noise_power);
    for (Eigen::Index k = 0; k < n; ++k)
      snap.h(k) += sigma * complex_gaussian(eng);
  }
  return snap;
}

ChannelSnapshot apply_common_phase(const ChannelSnapshot& s, double phase) {
  ChannelSnapshot out = s;
  out.h *= std::polar(1.0, phase);
  return out;
}

void Trajectory::validate() const {
  if (waypoints.size() < 2)
    throw std::invalid_argument("trajectory: need at least two waypoints");
  if (!(speed > 0.0))
    throw std::invalid_argument("trajectory: speed must be positive");
  if (!(snapshot_rate > 0.0) || !(position_rate > 0.0))
    throw std::invalid_argument("trajectory: rates must be positive");
  if (!(path_length() > 0.0))
    throw std::invalid_argument("trajectory: zero-length path");
}

double Trajectory::path_length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double dx = waypoints[i].x - waypoints[i - 1].x;
    const double dy = waypoints[i].y - waypoints[i - 1].y;
    len += std::hypot(dx, dy);
  }
  return len;
}

Position2D path_position(const Trajectory& traj, double arc_length) {
  if (arc_length <= 0.0) return traj.waypoints.front();
  double acc = 0.0;
  for (std::size_t i = 1; i < traj.waypoints.size(); ++i) {
    const Position2D& a = traj.waypoints[i - 1];
    const Position2D& b = traj.waypoints[i];
    const double seg = std::hypot(b.x - a.x, b.y - a.y);
    if (arc_length <= acc + seg && seg > 0.0) {
      const double t = (arc_length - acc) / seg;
      return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    }
    acc += seg;
  }
  return traj.waypoints.back();
}

TrajectorySamples sample_trajectory(const Trajectory& traj,
                                    const ScatteringScene& scene,
                                    const ArrayGeometry& geometry,
                                    const SceneRealization& real,
                                    std::mt19937_64& eng) {
  traj.validate();
  const double duration = traj.path_length() / traj.speed;
  const double snap_dt = 1.0 / traj.snapshot_rate;
  const double fix_dt = 1.0 / traj.position_rate;
  const double eps = 1e-9;

  TrajectorySamples out;
  // GPS-style fixes at position_rate, exact path points.
  for (int i = 0;; ++i) {
    const double t = i * fix_dt;
    if (t > duration + eps) break;
    out.fixes.push_back({t, path_position(traj, traj.speed * t)});
  }
  // One trailing fix past the end so every snapshot has a bracketing pair.
  if (out.fixes.back().timestamp < duration - eps)
    out.fixes.push_back({out.fixes.back().timestamp + fix_dt,
                         traj.waypoints.back()});

  auto interpolate_fix = [&](double t) -> Position2D {
    const std::size_t i = std::min(
        static_cast<std::size_t>(std::max(0.0, t / fix_dt)),
        out.fixes.size() - 2);
    const TimedPosition& a = out.fixes[i];
    const TimedPosition& b = out.fixes[i + 1];
    const double u = (t - a.timestamp) / (b.timestamp - a.timestamp);
    return {a.position.x + u * (b.position.x - a.position.x),
            a.position.y + u * (b.position.y - a.position.y)};
  };

  for (int i = 0;; ++i) {
    const double t = i * snap_dt;
    if (t > duration + eps) break;
    const Position2D true_pos =
        path_position(traj, traj.speed * std::min(t, duration));
    ChannelSnapshot snap = synth_channel(scene, geometry, real, true_pos, eng);
    snap.timestamp = t;
    snap.ue_position = interpolate_fix(t);
    out.snapshots.push_back(std::move(snap));
  }
  return out;
}

}  // namespace csiloc
