#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "csiloc/dataset.hpp"
#include "csiloc/learners.hpp"

namespace csiloc {

/// Localization error statistics over one evaluation set, all in meters.
struct ErrorReport {
  std::vector<Position2D> sample_positions;
  std::vector<double> sample_errors;
  double average = 0.0;
  double median = 0.0;
  double maximum = 0.0;
  double rmse = 0.0;
};

/// Monte-Carlo estimate of an expectation over the random hidden weights.
struct MseEstimate {
  double mean_mse = 0.0;   // meters^2
  double std_error = 0.0;  // meters^2
  int realizations = 0;
};

enum class SweepAxis { Neurons, Gamma, Antennas, ActivationAxis };

struct SweepPoint {
  double setting = 0.0;          // numeric axis value (or activation index)
  std::string setting_label;     // human-readable setting
  MseEstimate train_mse;
  MseEstimate test_mse;
  double mean_error = 0.0;       // meters, for the antenna sweep
  double selected_gamma = 0.0;   // inner-grid argmin where applicable
};

struct SweepResult {
  SweepAxis axis = SweepAxis::Gamma;
  std::vector<SweepPoint> points;
  std::vector<std::string> realization_rows;  // tidy CSV rows, pre-rendered
};

double localization_error(const Position2D& truth, const Position2D& est);

ErrorReport make_error_report(const Eigen::Matrix2Xd& truth,
                              const Eigen::Matrix2Xd& estimates);

/// Mean squared localization error of a trained model over one split.
double dataset_mse(const ElmModel& model, const Eigen::MatrixXd& features,
                   const Eigen::Matrix2Xd& positions);

struct ElmConfig {
  int neurons = 10000;
  double gamma = 1e-2;
  Activation activation = Activation::ReLu;
  std::uint64_t seed = 0;
};

/// Trains `realizations` ELMs with fresh hidden weights and reports mean and
/// standard error of the train and test MSEs.
std::pair<MseEstimate, MseEstimate> monte_carlo_mse(
    const ElmConfig& config, const Eigen::MatrixXd& train_x,
    const Eigen::Matrix2Xd& train_y, const Eigen::MatrixXd& test_x,
    const Eigen::Matrix2Xd& test_y, int realizations, std::uint64_t seed);

/// Per-gamma train/test MSE for one realization, sharing the hidden matrix
/// across the whole gamma grid.
struct GammaProfile {
  std::vector<double> gammas;
  std::vector<double> train_mse;
  std::vector<double> test_mse;
};
GammaProfile elm_gamma_profile(const ElmModel& model,
                               const Eigen::MatrixXd& train_x,
                               const Eigen::Matrix2Xd& train_y,
                               const Eigen::MatrixXd& test_x,
                               const Eigen::Matrix2Xd& test_y,
                               const std::vector<double>& gammas);

std::vector<double> default_gamma_grid();

/// Neuron-count sweep; per grid point the regularization is chosen as the
/// argmin of the Monte-Carlo mean test MSE over the gamma grid.
SweepResult sweep_neurons(const std::vector<int>& neuron_grid,
                          const Eigen::MatrixXd& train_x,
                          const Eigen::Matrix2Xd& train_y,
                          const Eigen::MatrixXd& test_x,
                          const Eigen::Matrix2Xd& test_y, Activation act,
                          const std::vector<double>& gamma_grid,
                          int realizations, std::uint64_t seed);

/// Gamma sweep at fixed neuron count (Monte-Carlo mean per grid point).
SweepResult sweep_gamma(const std::vector<double>& gamma_grid,
                        const Eigen::MatrixXd& train_x,
                        const Eigen::Matrix2Xd& train_y,
                        const Eigen::MatrixXd& test_x,
                        const Eigen::Matrix2Xd& test_y, int neurons,
                        Activation act, int realizations, std::uint64_t seed);

/// Activation comparison at fixed neurons/gamma grid.
SweepResult sweep_activation(const Eigen::MatrixXd& train_x,
                             const Eigen::Matrix2Xd& train_y,
                             const Eigen::MatrixXd& test_x,
                             const Eigen::Matrix2Xd& test_y, int neurons,
                             const std::vector<double>& gamma_grid,
                             int realizations, std::uint64_t seed);

/// Antenna-count sweep over covariance windows: per N, picks the max-spacing
/// subset, restricts the covariances, revectorizes, retrains and evaluates.
struct CovarianceSet {
  std::vector<SampleCovariance> covariances;
  std::vector<Split> split;
  ArrayGeometry geometry;
};
SweepResult sweep_antennas(const std::vector<int>& antenna_grid,
                           const CovarianceSet& data, const ElmConfig& config,
                           std::uint64_t seed);

/// Builds a labeled dataset from a covariance set restricted to a subset of
/// antennas (full subset reproduces the unswept pipeline exactly).
LabeledDataset vectorize_covariances(const CovarianceSet& data,
                                     const std::vector<int>& indices);

struct LearnerComparison {
  ErrorReport elm;
  ErrorReport knn;
  std::string table;  // three statistics rows, Table-style text layout
};
LearnerComparison compare_learners(const LabeledDataset& ds,
                                   const ElmConfig& elm_config, int k);

/// CSV of per-test-point errors plus training positions for map plotting.
void error_map_export(const ErrorReport& report,
                      const Eigen::Matrix2Xd& training_positions,
                      const std::filesystem::path& file);

/// Fixed-width bins starting at 0; counts sum to the sample size.
std::vector<int> error_histogram(const std::vector<double>& errors,
                                 double bin_width);

void sweep_save_csv(const SweepResult& r, const std::filesystem::path& file);
void sweep_save_json(const SweepResult& r, const std::filesystem::path& file);
std::string sweep_axis_name(SweepAxis axis);

}  // namespace csiloc
