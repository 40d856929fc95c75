#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "csiloc/evaluation.hpp"
#include "csiloc/scene.hpp"

namespace csiloc {

struct SplitSpec {
  double train_fraction = 3500.0 / 4050.0;  // scaled from the default split
  int block_count = 12;                     // contiguous segments assigned to splits
};

struct SweepSpec {
  std::string axis = "gamma";
  std::vector<double> grid;     // numeric settings (ignored for activation)
  int realizations = 100;
};

struct LearnerSpec {
  std::string kind = "elm";     // "elm" or "knn"
  int neurons = 10000;
  double gamma = 1e-2;
  Activation activation = Activation::ReLu;
  int k = 3;
  std::uint64_t seed = 1;
};

/// Full experiment description; everything stochastic flows from `seed`.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  ArrayGeometry geometry;
  ScatteringScene scene;
  Trajectory trajectory;
  double window_seconds = 1.0;
  SplitSpec split;
  LearnerSpec learner;
  SweepSpec sweep;
  bool standardize_features = false;
  std::string output_dir = "out";
};

/// Parses the JSON config format (unit-suffixed keys, SI units). Throws
/// std::runtime_error with a diagnostic on malformed input.
ExperimentConfig load_config(const std::filesystem::path& file);
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& cfg);

/// Hash of the canonical JSON rendering; embedded in artifacts.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// The built-in default experiment: 200 x 300 m scene, 6 clusters, LOS,
/// 32-element dual-polarized array, serpentine cart trajectory.
ExperimentConfig default_experiment_config();

/// Serpentine (boustrophedon) waypoint pattern covering a rectangle.
std::vector<Position2D> make_serpentine(double x0, double y0, double width,
                                        double height, int lines);

}  // namespace csiloc
