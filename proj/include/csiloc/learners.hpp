#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csiloc/features.hpp"

namespace csiloc {

enum class Activation { ReLu, Step, Sign };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Elementwise activation. Step(0) = Sign(0) = 1 (the indicator includes 0).
double activation_apply(Activation a, double t);
Eigen::MatrixXd activation_apply(Activation a, const Eigen::MatrixXd& m);

/// Random-hidden-layer network: n neurons with fixed Gaussian weights W
/// (n x M, regenerable from the stored seed) and ridge-trained output
/// weights beta (n x 2). Prediction is beta^T * act(W x).
struct ElmModel {
  Eigen::MatrixXd weights;   // n x M
  Activation activation = Activation::ReLu;
  double gamma = 0.0;
  Eigen::MatrixXd beta;      // n x 2, empty until trained
  std::uint64_t seed = 0;

  Eigen::Index neurons() const { return weights.rows(); }
  Eigen::Index input_dim() const { return weights.cols(); }
  bool trained() const { return beta.size() > 0; }
};

struct KnnModel {
  Eigen::MatrixXd training_features;   // M x T, one column per sample
  Eigen::Matrix2Xd training_positions; // 2 x T
  int k = 3;
};

/// Fills W with i.i.d. N(0,1) entries from the seeded stream (row-major
/// fill order is part of the reproducibility contract).
ElmModel elm_init(int neurons, int input_dim, std::uint64_t seed);

/// Hidden-layer outputs act(W * X) for a batch X (M x T).
Eigen::MatrixXd elm_hidden(const ElmModel& model, const Eigen::MatrixXd& X);

/// Ridge regression of positions on hidden outputs. Solves whichever of the
/// T x T (dual) and n x n (primal) normal systems is smaller, via a Cholesky
/// factorization. gamma = 0 is accepted only when the system is SPD.
void elm_train(ElmModel& model, const Eigen::MatrixXd& features,
               const Eigen::Matrix2Xd& positions);

/// Same solve on a precomputed hidden matrix Sigma (n x T); used by sweeps
/// that share Sigma across a gamma grid.
Eigen::MatrixXd elm_solve_beta(const Eigen::MatrixXd& Sigma,
                               const Eigen::Matrix2Xd& positions,
                               double gamma);

/// Dual-route solve for the equivalence property test.
Eigen::MatrixXd elm_solve_beta_primal(const Eigen::MatrixXd& Sigma,
                                      const Eigen::Matrix2Xd& positions,
                                      double gamma);
Eigen::MatrixXd elm_solve_beta_dual(const Eigen::MatrixXd& Sigma,
                                    const Eigen::Matrix2Xd& positions,
                                    double gamma);

Position2D elm_predict(const ElmModel& model, const Eigen::VectorXd& x);
Eigen::Matrix2Xd elm_predict_batch(const ElmModel& model,
                                   const Eigen::MatrixXd& X);

/// Barycenter of the k nearest training positions in Euclidean feature
/// distance; ties broken by lower training index.
Position2D knn_predict(const KnnModel& model, const Eigen::VectorXd& x);
Eigen::Matrix2Xd knn_predict_batch(const KnnModel& model,
                                   const Eigen::MatrixXd& X);

/// Versioned binary model serialization. ELM weights are stored as the seed
/// and regenerated on load.
std::vector<std::uint8_t> model_save(const ElmModel& model);
std::vector<std::uint8_t> model_save(const KnnModel& model);
ElmModel elm_load(const std::vector<std::uint8_t>& bytes);
KnnModel knn_load(const std::vector<std::uint8_t>& bytes);

/// Peeks at the kind tag ("elm" or "knn") without fully decoding.
std::string model_kind(const std::vector<std::uint8_t>& bytes);

}  // namespace csiloc
