#include "csiloc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace csiloc {

using nlohmann::json;

namespace {

json geometry_to_json(const ArrayGeometry& g) {
  json j;
  j["carrier_wavelength_m"] = g.carrier_wavelength;
  j["cross_pol_gain"] = g.cross_pol_gain;
  json elems = json::array();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    elems.push_back(
        {{"position_m",
          {g.element_positions(0, i), g.element_positions(1, i),
           g.element_positions(2, i)}},
         {"polarization",
          g.element_polarization[static_cast<std::size_t>(i)] ==
                  Polarization::A
              ? "A"
              : "B"}});
  }
  j["elements"] = elems;
  return j;
}

ArrayGeometry geometry_from_json(const json& j) {
  ArrayGeometry g;
  g.carrier_wavelength = j.value("carrier_wavelength_m", 0.0857);
  g.cross_pol_gain = j.value("cross_pol_gain", 0.3);
  if (j.contains("layout") && j.at("layout") == "upa") {
    g = make_upa(j.at("columns").get<int>(), j.at("rows").get<int>(),
                 j.value("spacing_wavelengths", 0.5), g.carrier_wavelength,
                 j.value("dual_polarized", true));
    g.cross_pol_gain = j.value("cross_pol_gain", 0.3);
  } else {
    const auto& elems = j.at("elements");
    g.element_positions.resize(3, static_cast<Eigen::Index>(elems.size()));
    g.element_polarization.resize(elems.size());
    Eigen::Index i = 0;
    for (const auto& e : elems) {
      const auto& p = e.at("position_m");
      g.element_positions.col(i) = Vec3(p.at(0), p.at(1), p.at(2));
      g.element_polarization[static_cast<std::size_t>(i)] =
          e.at("polarization") == "B" ? Polarization::B : Polarization::A;
      ++i;
    }
  }
  // Emulates discarded RF chains: listed element indices are dropped.
  if (j.contains("disabled_elements")) {
    std::vector<int> keep;
    std::vector<char> drop(static_cast<std::size_t>(g.size()), 0);
    for (int d : j.at("disabled_elements").get<std::vector<int>>())
      if (d >= 0 && d < g.size()) drop[static_cast<std::size_t>(d)] = 1;
    for (int i = 0; i < g.size(); ++i)
      if (!drop[static_cast<std::size_t>(i)]) keep.push_back(i);
    g = subset_geometry(g, keep);
  }
  g.validate();
  return g;
}

json scene_to_json(const ScatteringScene& s) {
  json j;
  j["bs_position_m"] = {s.bs_position.x(), s.bs_position.y(),
                        s.bs_position.z()};
  j["los_enabled"] = s.los_enabled;
  j["los_power"] = s.los_power;
  j["noise_power"] = s.noise_power;
  j["ue_height_m"] = s.ue_height;
  json clusters = json::array();
  for (const auto& c : s.clusters)
    clusters.push_back({{"centroid_m", {c.centroid.x(), c.centroid.y(),
                                        c.centroid.z()}},
                        {"spread_m", c.spread},
                        {"ray_count", c.ray_count},
                        {"mean_power", c.mean_power}});
  j["clusters"] = clusters;
  return j;
}

ScatteringScene scene_from_json(const json& j) {
  ScatteringScene s;
  const auto& bs = j.at("bs_position_m");
  s.bs_position = Vec3(bs.at(0), bs.at(1), bs.at(2));
  s.los_enabled = j.value("los_enabled", true);
  s.los_power = j.value("los_power", 1.0);
  s.noise_power = j.value("noise_power", 0.0);
  s.ue_height = j.value("ue_height_m", 1.5);
  if (j.contains("clusters"))
    for (const auto& cj : j.at("clusters")) {
      ScatteringCluster c;
      const auto& cc = cj.at("centroid_m");
      c.centroid = Vec3(cc.at(0), cc.at(1), cc.at(2));
      c.spread = cj.value("spread_m", 0.0);
      c.ray_count = cj.value("ray_count", 1);
      c.mean_power = cj.value("mean_power", 1.0);
      s.clusters.push_back(c);
    }
  s.validate();
  return s;
}

json trajectory_to_json(const Trajectory& t) {
  json j;
  json wps = json::array();
  for (const auto& w : t.waypoints) wps.push_back({w.x, w.y});
  j["waypoints_m"] = wps;
  j["speed_mps"] = t.speed;
  j["snapshot_rate_hz"] = t.snapshot_rate;
  j["position_rate_hz"] = t.position_rate;
  return j;
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory t;
  for (const auto& w : j.at("waypoints_m"))
    t.waypoints.push_back({w.at(0), w.at(1)});
  t.speed = j.value("speed_mps", 1.0);
  t.snapshot_rate = j.value("snapshot_rate_hz", 10.0);
  t.position_rate = j.value("position_rate_hz", 1.0);
  t.validate();
  return t;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["geometry"] = geometry_to_json(cfg.geometry);
  j["scene"] = scene_to_json(cfg.scene);
  j["trajectory"] = trajectory_to_json(cfg.trajectory);
  j["window_seconds"] = cfg.window_seconds;
  j["split"] = {{"train_fraction", cfg.split.train_fraction},
                {"block_count", cfg.split.block_count}};
  j["learner"] = {{"kind", cfg.learner.kind},
                  {"neurons", cfg.learner.neurons},
                  {"gamma", cfg.learner.gamma},
                  {"activation", to_string(cfg.learner.activation)},
                  {"k", cfg.learner.k},
                  {"seed", cfg.learner.seed}};
  j["sweep"] = {{"axis", cfg.sweep.axis},
                {"grid", cfg.sweep.grid},
                {"realizations", cfg.sweep.realizations}};
  j["standardize_features"] = cfg.standardize_features;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    if (!j.contains("seed"))
      throw std::runtime_error("config: 'seed' is required");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.geometry = geometry_from_json(j.at("geometry"));
    cfg.scene = scene_from_json(j.at("scene"));
    cfg.trajectory = trajectory_from_json(j.at("trajectory"));
    cfg.window_seconds = j.value("window_seconds", 1.0);
    if (!(cfg.window_seconds > 0.0))
      throw std::runtime_error("config: window_seconds must be positive");
    if (j.contains("split")) {
      cfg.split.train_fraction =
          j.at("split").value("train_fraction", cfg.split.train_fraction);
      cfg.split.block_count =
          j.at("split").value("block_count", cfg.split.block_count);
    }
    if (j.contains("learner")) {
      const auto& l = j.at("learner");
      cfg.learner.kind = l.value("kind", "elm");
      cfg.learner.neurons = l.value("neurons", 10000);
      cfg.learner.gamma = l.value("gamma", 1e-2);
      cfg.learner.activation =
          activation_from_string(l.value("activation", "relu"));
      cfg.learner.k = l.value("k", 3);
      cfg.learner.seed = l.value("seed", cfg.seed);
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      cfg.sweep.axis = s.value("axis", "gamma");
      if (s.contains("grid"))
        cfg.sweep.grid = s.at("grid").get<std::vector<double>>();
      cfg.sweep.realizations = s.value("realizations", 100);
    }
    cfg.standardize_features = j.value("standardize_features", false);
    cfg.output_dir = j.value("output_dir", "out");
    return cfg;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = config_to_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<Position2D> make_serpentine(double x0, double y0, double width,
                                        double height, int lines) {
  std::vector<Position2D> wps;
  const double dy = lines > 1 ? height / (lines - 1) : 0.0;
  for (int i = 0; i < lines; ++i) {
    const double y = y0 + i * dy;
    if (i % 2 == 0) {
      wps.push_back({x0, y});
      wps.push_back({x0 + width, y});
    } else {
      wps.push_back({x0 + width, y});
      wps.push_back({x0, y});
    }
  }
  return wps;
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.geometry = make_upa(8, 2, 0.5, 0.0857, true);  // 32 elements, dual-pol

  ScatteringScene scene;
  scene.bs_position = Vec3(60.0, -30.0, 70.0);
  scene.los_enabled = true;
  scene.los_power = 3.0;
  scene.noise_power = 1e-8;
  scene.ue_height = 1.5;
  const Vec3 centroids[6] = {
      Vec3(30.0, 40.0, 10.0),   Vec3(150.0, 30.0, 14.0),
      Vec3(90.0, 120.0, 8.0),   Vec3(195.0, 165.0, 16.0),
      Vec3(40.0, 210.0, 12.0),  Vec3(160.0, 260.0, 18.0)};
  // Cluster gains compensate the two-leg pathloss so that the scattered
  // part carries about as much power as the LOS term over the map.
  const double powers[6] = {4.5e4, 3.0e4, 6.0e4, 3.6e4, 2.4e4, 4.8e4};
  for (int i = 0; i < 6; ++i)
    scene.clusters.push_back({centroids[i], 35.0, 24, powers[i]});
  cfg.scene = scene;

  Trajectory traj;
  traj.waypoints = make_serpentine(0.0, 0.0, 200.0, 300.0, 30);
  traj.speed = 2.6;
  traj.snapshot_rate = 10.0;
  traj.position_rate = 1.0;
  cfg.trajectory = traj;

  cfg.window_seconds = 1.0;
  cfg.split.train_fraction = 2000.0 / 2400.0;
  cfg.split.block_count = 36;
  cfg.learner = LearnerSpec{};
  return cfg;
}

}  // namespace csiloc
