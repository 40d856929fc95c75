#include "csiloc/learners.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cstring>
#include <numeric>
#include <random>
#include <stdexcept>

#include "csiloc/rng.hpp"

namespace csiloc {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::ReLu: return "relu";
    case Activation::Step: return "step";
    case Activation::Sign: return "sign";
  }
  throw std::logic_error("bad activation tag");
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::ReLu;
  if (name == "step") return Activation::Step;
  if (name == "sign") return Activation::Sign;
  throw std::invalid_argument("unknown activation: " + name);
}

double activation_apply(Activation a, double t) {
  switch (a) {
    case Activation::ReLu: return t > 0.0 ? t : 0.0;
    case Activation::Step: return t >= 0.0 ? 1.0 : 0.0;
    case Activation::Sign: return t >= 0.0 ? 1.0 : -1.0;
  }
  throw std::logic_error("bad activation tag");
}

Eigen::MatrixXd activation_apply(Activation a, const Eigen::MatrixXd& m) {
  switch (a) {
    case Activation::ReLu:
      return m.cwiseMax(0.0);
    case Activation::Step:
      return (m.array() >= 0.0).cast<double>();
    case Activation::Sign:
      return (m.array() >= 0.0).cast<double>() * 2.0 - 1.0;
  }
  throw std::logic_error("bad activation tag");
}

ElmModel elm_init(int neurons, int input_dim, std::uint64_t seed) {
  if (neurons < 1 || input_dim < 1)
    throw std::invalid_argument("elm_init: dimensions must be positive");
  ElmModel m;
  m.seed = seed;
  m.weights.resize(neurons, input_dim);
  auto eng = make_engine(derive_seed(seed, "elm-weights"));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < m.weights.rows(); ++i)
    for (Eigen::Index j = 0; j < m.weights.cols(); ++j)
      m.weights(i, j) = normal(eng);
  return m;
}

Eigen::MatrixXd elm_hidden(const ElmModel& model, const Eigen::MatrixXd& X) {
  if (X.rows() != model.input_dim())
    throw std::invalid_argument("elm_hidden: input dimension mismatch");
  return activation_apply(model.activation, model.weights * X);
}

namespace {

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          double gamma) {
  Eigen::MatrixXd reg = A;
  reg.diagonal().array() += gamma;
  Eigen::LLT<Eigen::MatrixXd> llt(reg);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "regularization required: ridge system is not positive definite");
  return llt.solve(B);
}

}  // namespace

Eigen::MatrixXd elm_solve_beta_dual(const Eigen::MatrixXd& Sigma,
                                    const Eigen::Matrix2Xd& positions,
                                    double gamma) {
  // beta = Sigma (Sigma^T Sigma + gamma I_T)^{-1} Y^T
  const Eigen::MatrixXd G = Sigma.transpose() * Sigma;
  return Sigma * spd_solve(G, positions.transpose(), gamma);
}

Eigen::MatrixXd elm_solve_beta_primal(const Eigen::MatrixXd& Sigma,
                                      const Eigen::Matrix2Xd& positions,
                                      double gamma) {
  // beta = (Sigma Sigma^T + gamma I_n)^{-1} Sigma Y^T
  const Eigen::MatrixXd G = Sigma * Sigma.transpose();
  return spd_solve(G, Sigma * positions.transpose(), gamma);
}

Eigen::MatrixXd elm_solve_beta(const Eigen::MatrixXd& Sigma,
                               const Eigen::Matrix2Xd& positions,
                               double gamma) {
  if (Sigma.cols() != positions.cols())
    throw std::invalid_argument("elm_solve_beta: sample count mismatch");
  if (gamma < 0.0)
    throw std::invalid_argument("elm_solve_beta: gamma must be nonnegative");
  // The dual system is T x T, the primal n x n; solve the smaller one.
  return Sigma.cols() < Sigma.rows()
             ? elm_solve_beta_dual(Sigma, positions, gamma)
             : elm_solve_beta_primal(Sigma, positions, gamma);
}

void elm_train(ElmModel& model, const Eigen::MatrixXd& features,
               const Eigen::Matrix2Xd& positions) {
  if (features.cols() < 1)
    throw std::invalid_argument("elm_train: empty training set");
  if (features.cols() != positions.cols())
    throw std::invalid_argument("elm_train: feature/position count mismatch");
  const Eigen::MatrixXd Sigma = elm_hidden(model, features);
  model.beta = elm_solve_beta(Sigma, positions, model.gamma);
}

Eigen::Matrix2Xd elm_predict_batch(const ElmModel& model,
                                   const Eigen::MatrixXd& X) {
  if (!model.trained())
    throw std::logic_error("elm_predict: model is not trained");
  return (model.beta.transpose() * elm_hidden(model, X)).eval();
}

Position2D elm_predict(const ElmModel& model, const Eigen::VectorXd& x) {
  const Eigen::Matrix2Xd y = elm_predict_batch(model, x);
  return {y(0, 0), y(1, 0)};
}

Position2D knn_predict(const KnnModel& model, const Eigen::VectorXd& x) {
  const Eigen::Index t = model.training_features.cols();
  if (t < 1) throw std::invalid_argument("knn_predict: empty model");
  if (model.k < 1 || model.k > t)
    throw std::invalid_argument("knn_predict: k out of range");
  if (x.size() != model.training_features.rows())
    throw std::invalid_argument("knn_predict: feature dimension mismatch");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(t));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::VectorXd d2(t);
  for (Eigen::Index j = 0; j < t; ++j)
    d2(j) = (model.training_features.col(j) - x).squaredNorm();
  // Partial sort; ties resolved by lower training index.
  std::partial_sort(order.begin(), order.begin() + model.k, order.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      if (d2(a) != d2(b)) return d2(a) < d2(b);
                      return a < b;
                    });
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < model.k; ++i) {
    sx += model.training_positions(0, order[static_cast<std::size_t>(i)]);
    sy += model.training_positions(1, order[static_cast<std::size_t>(i)]);
  }
  return {sx / model.k, sy / model.k};
}

Eigen::Matrix2Xd knn_predict_batch(const KnnModel& model,
                                   const Eigen::MatrixXd& X) {
  Eigen::Matrix2Xd out(2, X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const Position2D p = knn_predict(model, X.col(j));
    out(0, j) = p.x;
    out(1, j) = p.y;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization: little-endian binary with magic + version + kind tag.

namespace {

constexpr char kMagic[4] = {'C', 'S', 'L', 'M'};
constexpr std::uint32_t kModelFormatVersion = 1;

struct Writer {
  std::vector<std::uint8_t> buf;
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf.insert(buf.end(), b, b + n);
  }
  template <class T> void put(T v) { raw(&v, sizeof(T)); }
  void matrix(const Eigen::MatrixXd& m) {
    put<std::int64_t>(m.rows());
    put<std::int64_t>(m.cols());
    raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
};

struct Reader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;
  void raw(void* p, std::size_t n) {
    if (pos + n > buf.size())
      throw std::runtime_error("model file truncated");
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
  template <class T> T get() {
    T v;
    raw(&v, sizeof(T));
    return v;
  }
  Eigen::MatrixXd matrix() {
    const auto rows = get<std::int64_t>();
    const auto cols = get<std::int64_t>();
    if (rows < 0 || cols < 0 || rows > (1 << 24) || cols > (1 << 24))
      throw std::runtime_error("model file corrupted: bad matrix shape");
    Eigen::MatrixXd m(rows, cols);
    raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    return m;
  }
};

void write_header(Writer& w, std::uint8_t kind) {
  w.raw(kMagic, 4);
  w.put<std::uint32_t>(kModelFormatVersion);
  w.put<std::uint8_t>(kind);
}

std::uint8_t read_header(Reader& r) {
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("model file corrupted: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion)
    throw std::runtime_error("model file version mismatch");
  return r.get<std::uint8_t>();
}

}  // namespace

std::vector<std::uint8_t> model_save(const ElmModel& model) {
  Writer w;
  write_header(w, 0);
  w.put<std::uint64_t>(model.seed);
  w.put<std::int64_t>(model.neurons());
  w.put<std::int64_t>(model.input_dim());
  w.put<double>(model.gamma);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(model.activation));
  w.put<std::uint8_t>(model.trained() ? 1 : 0);
  if (model.trained()) w.matrix(model.beta);
  return std::move(w.buf);
}

std::vector<std::uint8_t> model_save(const KnnModel& model) {
  Writer w;
  write_header(w, 1);
  w.put<std::int32_t>(model.k);
  w.matrix(model.training_features);
  w.matrix(model.training_positions);
  return std::move(w.buf);
}

ElmModel elm_load(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  if (read_header(r) != 0)
    throw std::runtime_error("model file is not an ELM model");
  const auto seed = r.get<std::uint64_t>();
  const auto n = r.get<std::int64_t>();
  const auto m = r.get<std::int64_t>();
  if (n < 1 || m < 1 || n > (1 << 24) || m > (1 << 24))
    throw std::runtime_error("model file corrupted: bad dimensions");
  const double gamma = r.get<double>();
  const auto act = r.get<std::uint8_t>();
  if (act > 2) throw std::runtime_error("model file corrupted: activation");
  // W is regenerated from the seed rather than stored.
  ElmModel model = elm_init(static_cast<int>(n), static_cast<int>(m), seed);
  model.gamma = gamma;
  model.activation = static_cast<Activation>(act);
  if (r.get<std::uint8_t>() != 0) {
    model.beta = r.matrix();
    if (model.beta.rows() != n || model.beta.cols() != 2)
      throw std::runtime_error("model file corrupted: beta shape");
  }
  return model;
}

KnnModel knn_load(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  if (read_header(r) != 1)
    throw std::runtime_error("model file is not a K-nN model");
  KnnModel model;
  model.k = r.get<std::int32_t>();
  model.training_features = r.matrix();
  const Eigen::MatrixXd pos = r.matrix();
  if (pos.rows() != 2 ||
      pos.cols() != model.training_features.cols())
    throw std::runtime_error("model file corrupted: position shape");
  model.training_positions = pos;
  if (model.k < 1 || model.k > model.training_features.cols())
    throw std::runtime_error("model file corrupted: k out of range");
  return model;
}

std::string model_kind(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  return read_header(r) == 0 ? "elm" : "knn";
}

}  // namespace csiloc
