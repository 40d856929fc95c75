#include <doctest.h>

#include "csiloc/learners.hpp"
#include "csiloc/rng.hpp"
#include "oracles.hpp"

using namespace csiloc;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c,
                              std::mt19937_64& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal(eng);
  return m;
}

}  // namespace

TEST_CASE("activation values from the reference table") {
  CHECK(activation_apply(Activation::ReLu, -3.0) == 0.0);
  CHECK(activation_apply(Activation::ReLu, 2.5) == 2.5);
  CHECK(activation_apply(Activation::Step, 0.0) == 1.0);
  CHECK(activation_apply(Activation::Sign, 0.0) == 1.0);
  CHECK(activation_apply(Activation::Sign, -0.1) == -1.0);
  CHECK(activation_apply(Activation::Step, -0.1) == 0.0);
  CHECK(activation_apply(Activation::Step, 0.1) == 1.0);
}

TEST_CASE("matrix activation matches the scalar one") {
  auto eng = make_engine(1);
  const Eigen::MatrixXd m = random_matrix(7, 5, eng);
  for (Activation a : {Activation::ReLu, Activation::Step, Activation::Sign}) {
    const Eigen::MatrixXd out = activation_apply(a, m);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        CHECK(out(i, j) == activation_apply(a, m(i, j)));
  }
}

TEST_CASE("elm_init: deterministic from seed") {
  const ElmModel a = elm_init(20, 15, 99);
  const ElmModel b = elm_init(20, 15, 99);
  CHECK(a.weights == b.weights);
  const ElmModel c = elm_init(20, 15, 100);
  CHECK(a.weights != c.weights);
}

TEST_CASE("elm_init: Gaussian moments at scale") {
  const int n = 1000, m = 500;
  const ElmModel model = elm_init(n, m, 7);
  const double mean = model.weights.mean();
  const double var =
      (model.weights.array() - mean).square().sum() / (n * m - 1);
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n) * m));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("elm_init: degenerate and invalid sizes") {
  const ElmModel tiny = elm_init(1, 1, 3);
  CHECK(tiny.weights.size() == 1);
  CHECK_THROWS_AS(elm_init(0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(elm_init(5, 0, 1), std::invalid_argument);
}

TEST_CASE("elm_train: huge gamma shrinks beta to zero") {
  auto eng = make_engine(2);
  ElmModel model = elm_init(10, 6, 5);
  model.gamma = 1e12;
  elm_train(model, random_matrix(6, 30, eng), random_matrix(2, 30, eng));
  CHECK(model.beta.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("elm_train: square invertible system interpolates exactly") {
  // Positive data and ReLu make the hidden map linear and invertible here.
  ElmModel model = elm_init(2, 2, 11);
  model.weights << 1.0, 0.25, 0.25, 1.0;
  model.gamma = 0.0;
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 2.0, 3.0, 1.0;
  Eigen::Matrix2Xd y(2, 2);
  y << 10.0, -4.0, 2.0, 8.0;
  elm_train(model, x, y);
  const Eigen::Matrix2Xd pred = elm_predict_batch(model, x);
  CHECK((pred - y).cwiseAbs().maxCoeff() < 1e-8);
  // Single prediction agrees with the batch path.
  const Position2D p = elm_predict(model, x.col(0));
  CHECK(p.x == doctest::Approx(10.0).epsilon(1e-8));
  CHECK(p.y == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("elm_train matches a gradient-descent ridge oracle") {
  auto eng = make_engine(21);
  ElmModel model = elm_init(20, 10, 31);
  model.gamma = 0.1;
  const Eigen::MatrixXd x = random_matrix(10, 50, eng);
  const Eigen::Matrix2Xd y = random_matrix(2, 50, eng);
  elm_train(model, x, y);
  const Eigen::MatrixXd sigma = elm_hidden(model, x);
  const Eigen::MatrixXd oracle =
      test::ridge_gradient_descent(sigma, y, model.gamma);
  CHECK((model.beta - oracle).norm() / oracle.norm() < 1e-6);
}

TEST_CASE("elm_train: dimension mismatches and singular systems") {
  auto eng = make_engine(23);
  ElmModel model = elm_init(5, 4, 1);
  CHECK_THROWS_AS(elm_train(model, random_matrix(3, 10, eng),
                            random_matrix(2, 10, eng)),
                  std::invalid_argument);
  CHECK_THROWS_AS(elm_train(model, random_matrix(4, 10, eng),
                            random_matrix(2, 9, eng)),
                  std::invalid_argument);

  // Duplicate columns with gamma = 0: the dual system is singular.
  ElmModel singular = elm_init(6, 3, 2);
  singular.gamma = 0.0;
  Eigen::MatrixXd x = random_matrix(3, 4, eng);
  x.col(1) = x.col(0);
  x.col(2) = x.col(0);
  x.col(3) = x.col(0);
  const Eigen::Matrix2Xd y = random_matrix(2, 4, eng);
  CHECK_THROWS_WITH_AS(elm_train(singular, x, y),
                       doctest::Contains("regularization required"),
                       std::runtime_error);
}

TEST_CASE("primal and dual ridge routes agree") {
  auto eng = make_engine(29);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 8 + rep, t = 20 - rep;
    const Eigen::MatrixXd sigma = random_matrix(n, t, eng);
    const Eigen::Matrix2Xd y = random_matrix(2, t, eng);
    const double gamma = 0.05 * (rep + 1);
    const Eigen::MatrixXd primal = elm_solve_beta_primal(sigma, y, gamma);
    const Eigen::MatrixXd dual = elm_solve_beta_dual(sigma, y, gamma);
    CHECK((primal - dual).norm() / primal.norm() < 1e-8);
  }
}

TEST_CASE("ridge normal-equations residual is tiny") {
  auto eng = make_engine(31);
  const Eigen::MatrixXd sigma = random_matrix(15, 40, eng);
  const Eigen::Matrix2Xd y = random_matrix(2, 40, eng);
  const double gamma = 0.3;
  const Eigen::MatrixXd beta = elm_solve_beta(sigma, y, gamma);
  const Eigen::MatrixXd lhs =
      (sigma * sigma.transpose() +
       gamma * Eigen::MatrixXd::Identity(15, 15)) * beta;
  const Eigen::MatrixXd rhs = sigma * y.transpose();
  CHECK((lhs - rhs).norm() <= 1e-8 * rhs.norm());
}

TEST_CASE("monotone shrinkage of beta in gamma") {
  auto eng = make_engine(37);
  const Eigen::MatrixXd sigma = random_matrix(12, 30, eng);
  const Eigen::Matrix2Xd y = random_matrix(2, 30, eng);
  double prev = std::numeric_limits<double>::infinity();
  for (double gamma : {1e-4, 1e-2, 1.0, 100.0}) {
    const double norm = elm_solve_beta(sigma, y, gamma).norm();
    CHECK(norm <= prev + 1e-12);
    prev = norm;
  }
}

TEST_CASE("elm_predict: zero input under ReLu and Step") {
  ElmModel model = elm_init(4, 3, 41);
  model.gamma = 1e-3;
  auto eng = make_engine(43);
  elm_train(model, random_matrix(3, 10, eng), random_matrix(2, 10, eng));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);

  const Position2D relu = elm_predict(model, zero);
  CHECK(relu.x == 0.0);
  CHECK(relu.y == 0.0);

  // Step(0) = 1 for every neuron: prediction is the column sum of beta.
  ElmModel step = model;
  step.activation = Activation::Step;
  const Position2D p = elm_predict(step, zero);
  CHECK(p.x == doctest::Approx(step.beta.col(0).sum()));
  CHECK(p.y == doctest::Approx(step.beta.col(1).sum()));
}

TEST_CASE("elm_predict: untrained model is rejected") {
  const ElmModel model = elm_init(4, 3, 1);
  CHECK_THROWS_AS(elm_predict(model, Eigen::VectorXd::Zero(3)),
                  std::logic_error);
}

TEST_CASE("knn_predict: exact recall and full barycenter") {
  auto eng = make_engine(47);
  const Eigen::MatrixXd x = random_matrix(5, 10, eng);
  const Eigen::Matrix2Xd y = random_matrix(2, 10, eng);

  KnnModel one{x, y, 1};
  const Position2D hit = knn_predict(one, x.col(4));
  CHECK(hit.x == y(0, 4));
  CHECK(hit.y == y(1, 4));

  KnnModel all{x, y, 10};
  const Position2D centroid = knn_predict(all, x.col(0));
  CHECK(centroid.x == doctest::Approx(y.row(0).mean()));
  CHECK(centroid.y == doctest::Approx(y.row(1).mean()));
}

TEST_CASE("knn_predict: matches the brute-force sort oracle") {
  auto eng = make_engine(53);
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::MatrixXd x = random_matrix(4, 25, eng);
    const Eigen::Matrix2Xd y = random_matrix(2, 25, eng);
    const Eigen::VectorXd q = random_matrix(4, 1, eng);
    for (int k : {1, 3, 7}) {
      KnnModel model{x, y, k};
      const Position2D got = knn_predict(model, q);
      const Position2D want = test::knn_brute_force(x, y, k, q);
      CHECK(got.x == doctest::Approx(want.x).epsilon(1e-12));
      CHECK(got.y == doctest::Approx(want.y).epsilon(1e-12));
    }
  }
}

TEST_CASE("knn_predict: deterministic tie-break by training index") {
  Eigen::MatrixXd x(1, 4);
  x << 0.0, 1.0, -1.0, 1.0;  // two training points at distance 1, same feature
  Eigen::Matrix2Xd y(2, 4);
  y << 10.0, 20.0, 30.0, 40.0, 1.0, 2.0, 3.0, 4.0;
  KnnModel model{x, y, 1};
  const Position2D p = knn_predict(model, Eigen::VectorXd::Zero(1));
  CHECK(p.x == 10.0);  // index 0 wins the zero-distance tie? no: d=0 only self
  // Query equidistant from indices 1 and 2 (and 3): lower index wins.
  Eigen::VectorXd q(1);
  q << 0.0;
  KnnModel tie{x.rightCols(3), y.rightCols(3), 1};
  const Position2D t = knn_predict(tie, q);
  CHECK(t.x == 20.0);
}

TEST_CASE("knn ranking is invariant to common feature scaling") {
  auto eng = make_engine(59);
  const Eigen::MatrixXd x = random_matrix(6, 20, eng);
  const Eigen::Matrix2Xd y = random_matrix(2, 20, eng);
  const Eigen::VectorXd q = random_matrix(6, 1, eng);
  KnnModel model{x, y, 3};
  const Position2D base = knn_predict(model, q);
  for (double alpha : {1e-3, 7.0, 1e3}) {
    KnnModel scaled{alpha * x, y, 3};
    const Position2D p = knn_predict(scaled, alpha * q);
    CHECK(p.x == doctest::Approx(base.x).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(base.y).epsilon(1e-12));
  }
}

TEST_CASE("model round trip: elm") {
  auto eng = make_engine(61);
  ElmModel model = elm_init(12, 8, 77);
  model.gamma = 0.25;
  model.activation = Activation::Sign;
  elm_train(model, random_matrix(8, 30, eng), random_matrix(2, 30, eng));

  const ElmModel loaded = elm_load(model_save(model));
  CHECK(loaded.weights == model.weights);  // bitwise via seed regeneration
  CHECK(loaded.seed == model.seed);
  CHECK(loaded.gamma == model.gamma);
  CHECK(loaded.activation == model.activation);
  CHECK((loaded.beta - model.beta).cwiseAbs().maxCoeff() < 1e-15);

  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd q = random_matrix(8, 1, eng);
    const Position2D a = elm_predict(model, q);
    const Position2D b = elm_predict(loaded, q);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
  }
}

TEST_CASE("model round trip: knn") {
  auto eng = make_engine(67);
  KnnModel model{random_matrix(5, 15, eng), random_matrix(2, 15, eng), 4};
  const KnnModel loaded = knn_load(model_save(model));
  CHECK(loaded.k == 4);
  CHECK(loaded.training_features == model.training_features);
  CHECK(loaded.training_positions == model.training_positions);
}

TEST_CASE("model load: corruption and kind mismatch are explicit errors") {
  auto eng = make_engine(71);
  ElmModel model = elm_init(3, 3, 5);
  model.gamma = 0.1;
  elm_train(model, random_matrix(3, 6, eng), random_matrix(2, 6, eng));
  std::vector<std::uint8_t> bytes = model_save(model);

  std::vector<std::uint8_t> bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(elm_load(bad_magic), std::runtime_error);

  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + 10);
  CHECK_THROWS_AS(elm_load(truncated), std::runtime_error);

  CHECK_THROWS_AS(knn_load(bytes), std::runtime_error);
  CHECK(model_kind(bytes) == "elm");
}
