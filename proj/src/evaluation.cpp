#include "csiloc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "csiloc/rng.hpp"

namespace csiloc {

double localization_error(const Position2D& truth, const Position2D& est) {
  return std::hypot(truth.x - est.x, truth.y - est.y);
}

ErrorReport make_error_report(const Eigen::Matrix2Xd& truth,
                              const Eigen::Matrix2Xd& estimates) {
  if (truth.cols() != estimates.cols() || truth.cols() == 0)
    throw std::invalid_argument("make_error_report: bad sample counts");
  ErrorReport r;
  const Eigen::Index t = truth.cols();
  r.sample_positions.reserve(static_cast<std::size_t>(t));
  r.sample_errors.reserve(static_cast<std::size_t>(t));
  double sum = 0.0, sumsq = 0.0;
  for (Eigen::Index j = 0; j < t; ++j) {
    const double e = std::hypot(truth(0, j) - estimates(0, j),
                                truth(1, j) - estimates(1, j));
    r.sample_positions.push_back({truth(0, j), truth(1, j)});
    r.sample_errors.push_back(e);
    sum += e;
    sumsq += e * e;
    r.maximum = std::max(r.maximum, e);
  }
  r.average = sum / static_cast<double>(t);
  r.rmse = std::sqrt(sumsq / static_cast<double>(t));
  std::vector<double> sorted = r.sample_errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  r.median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  return r;
}

double dataset_mse(const ElmModel& model, const Eigen::MatrixXd& features,
                   const Eigen::Matrix2Xd& positions) {
  if (features.cols() == 0)
    throw std::invalid_argument("dataset_mse: empty dataset");
  const Eigen::Matrix2Xd est = elm_predict_batch(model, features);
  return (est - positions).colwise().squaredNorm().mean();
}

GammaProfile elm_gamma_profile(const ElmModel& model,
                               const Eigen::MatrixXd& train_x,
                               const Eigen::Matrix2Xd& train_y,
                               const Eigen::MatrixXd& test_x,
                               const Eigen::Matrix2Xd& test_y,
                               const std::vector<double>& gammas) {
  const Eigen::MatrixXd sig_train = elm_hidden(model, train_x);
  const Eigen::MatrixXd sig_test = elm_hidden(model, test_x);
  const Eigen::Index n = sig_train.rows();
  const Eigen::Index t = sig_train.cols();

  GammaProfile p;
  p.gammas = gammas;
  if (t < n) {
    // Dual route: all products are reduced to T x T Grams once, so each
    // gamma costs only one factorization.
    const Eigen::MatrixXd gram = sig_train.transpose() * sig_train;
    const Eigen::MatrixXd cross = sig_train.transpose() * sig_test;
    for (double g : gammas) {
      Eigen::MatrixXd reg = gram;
      reg.diagonal().array() += g;
      Eigen::LLT<Eigen::MatrixXd> llt(reg);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "regularization required: ridge system is not positive definite");
      const Eigen::MatrixXd alpha = llt.solve(train_y.transpose());  // T x 2
      p.train_mse.push_back(
          ((gram * alpha).transpose() - train_y).colwise().squaredNorm().mean());
      p.test_mse.push_back(
          ((cross.transpose() * alpha).transpose() - test_y)
              .colwise().squaredNorm().mean());
    }
  } else {
    const Eigen::MatrixXd gram = sig_train * sig_train.transpose();
    const Eigen::MatrixXd rhs = sig_train * train_y.transpose();
    for (double g : gammas) {
      Eigen::MatrixXd reg = gram;
      reg.diagonal().array() += g;
      Eigen::LLT<Eigen::MatrixXd> llt(reg);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "regularization required: ridge system is not positive definite");
      const Eigen::MatrixXd beta = llt.solve(rhs);  // n x 2
      p.train_mse.push_back(
          (beta.transpose() * sig_train - train_y).colwise().squaredNorm().mean());
      p.test_mse.push_back(
          (beta.transpose() * sig_test - test_y).colwise().squaredNorm().mean());
    }
  }
  return p;
}

std::vector<double> default_gamma_grid() {
  return {1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
}

namespace {

MseEstimate summarize(const std::vector<double>& samples) {
  MseEstimate e;
  e.realizations = static_cast<int>(samples.size());
  e.mean_mse = std::accumulate(samples.begin(), samples.end(), 0.0) /
               static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - e.mean_mse) * (v - e.mean_mse);
    const double var = ss / static_cast<double>(samples.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  return e;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::pair<MseEstimate, MseEstimate> monte_carlo_mse(
    const ElmConfig& config, const Eigen::MatrixXd& train_x,
    const Eigen::Matrix2Xd& train_y, const Eigen::MatrixXd& test_x,
    const Eigen::Matrix2Xd& test_y, int realizations, std::uint64_t seed) {
  if (realizations < 2)
    throw std::invalid_argument("monte_carlo_mse: need at least 2 realizations");
  std::vector<double> train_samples, test_samples;
  for (int r = 0; r < realizations; ++r) {
    ElmModel model =
        elm_init(config.neurons, static_cast<int>(train_x.rows()),
                 derive_seed(seed, "mc-realization", static_cast<std::uint64_t>(r)));
    model.gamma = config.gamma;
    model.activation = config.activation;
    elm_train(model, train_x, train_y);
    train_samples.push_back(dataset_mse(model, train_x, train_y));
    test_samples.push_back(dataset_mse(model, test_x, test_y));
  }
  return {summarize(train_samples), summarize(test_samples)};
}

SweepResult sweep_gamma(const std::vector<double>& gamma_grid,
                        const Eigen::MatrixXd& train_x,
                        const Eigen::Matrix2Xd& train_y,
                        const Eigen::MatrixXd& test_x,
                        const Eigen::Matrix2Xd& test_y, int neurons,
                        Activation act, int realizations, std::uint64_t seed) {
  if (gamma_grid.empty()) throw std::invalid_argument("sweep_gamma: empty grid");
  SweepResult result;
  result.axis = SweepAxis::Gamma;

  std::vector<std::vector<double>> train_acc(gamma_grid.size());
  std::vector<std::vector<double>> test_acc(gamma_grid.size());
  for (int r = 0; r < realizations; ++r) {
    ElmModel model = elm_init(
        neurons, static_cast<int>(train_x.rows()),
        derive_seed(seed, "sweep-gamma", static_cast<std::uint64_t>(r)));
    model.activation = act;
    const GammaProfile p =
        elm_gamma_profile(model, train_x, train_y, test_x, test_y, gamma_grid);
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
      train_acc[i].push_back(p.train_mse[i]);
      test_acc[i].push_back(p.test_mse[i]);
      std::ostringstream row;
      row << fmt(gamma_grid[i]) << ',' << r << ',' << fmt(p.train_mse[i])
          << ',' << fmt(p.test_mse[i]);
      result.realization_rows.push_back(row.str());
    }
  }
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    SweepPoint pt;
    pt.setting = gamma_grid[i];
    pt.setting_label = fmt(gamma_grid[i]);
    pt.train_mse = summarize(train_acc[i]);
    pt.test_mse = summarize(test_acc[i]);
    pt.selected_gamma = gamma_grid[i];
    result.points.push_back(pt);
  }
  return result;
}

SweepResult sweep_neurons(const std::vector<int>& neuron_grid,
                          const Eigen::MatrixXd& train_x,
                          const Eigen::Matrix2Xd& train_y,
                          const Eigen::MatrixXd& test_x,
                          const Eigen::Matrix2Xd& test_y, Activation act,
                          const std::vector<double>& gamma_grid,
                          int realizations, std::uint64_t seed) {
  if (neuron_grid.empty())
    throw std::invalid_argument("sweep_neurons: empty grid");
  SweepResult result;
  result.axis = SweepAxis::Neurons;
  for (std::size_t ni = 0; ni < neuron_grid.size(); ++ni) {
    const int n = neuron_grid[ni];
    std::vector<std::vector<double>> train_acc(gamma_grid.size());
    std::vector<std::vector<double>> test_acc(gamma_grid.size());
    for (int r = 0; r < realizations; ++r) {
      ElmModel model = elm_init(
          n, static_cast<int>(train_x.rows()),
          derive_seed(seed, "sweep-neurons",
                      static_cast<std::uint64_t>(ni) * 100003u +
                          static_cast<std::uint64_t>(r)));
      model.activation = act;
      const GammaProfile p = elm_gamma_profile(model, train_x, train_y, test_x,
                                               test_y, gamma_grid);
      for (std::size_t gi = 0; gi < gamma_grid.size(); ++gi) {
        train_acc[gi].push_back(p.train_mse[gi]);
        test_acc[gi].push_back(p.test_mse[gi]);
      }
    }
    // Optimum gamma = argmin of the Monte-Carlo mean test MSE for this n.
    std::size_t best = 0;
    double best_mean = std::numeric_limits<double>::infinity();
    std::vector<MseEstimate> test_est(gamma_grid.size());
    for (std::size_t gi = 0; gi < gamma_grid.size(); ++gi) {
      test_est[gi] = summarize(test_acc[gi]);
      if (test_est[gi].mean_mse < best_mean) {
        best_mean = test_est[gi].mean_mse;
        best = gi;
      }
    }
    SweepPoint pt;
    pt.setting = n;
    pt.setting_label = std::to_string(n);
    pt.train_mse = summarize(train_acc[best]);
    pt.test_mse = test_est[best];
    pt.selected_gamma = gamma_grid[best];
    for (int r = 0; r < realizations; ++r) {
      std::ostringstream row;
      row << n << ',' << r << ',' << fmt(train_acc[best][static_cast<std::size_t>(r)])
          << ',' << fmt(test_acc[best][static_cast<std::size_t>(r)]);
      result.realization_rows.push_back(row.str());
    }
    result.points.push_back(pt);
  }
  return result;
}

SweepResult sweep_activation(const Eigen::MatrixXd& train_x,
                             const Eigen::Matrix2Xd& train_y,
                             const Eigen::MatrixXd& test_x,
                             const Eigen::Matrix2Xd& test_y, int neurons,
                             const std::vector<double>& gamma_grid,
                             int realizations, std::uint64_t seed) {
  SweepResult result;
  result.axis = SweepAxis::ActivationAxis;
  const Activation acts[] = {Activation::ReLu, Activation::Step,
                             Activation::Sign};
  for (int ai = 0; ai < 3; ++ai) {
    SweepResult inner =
        sweep_gamma(gamma_grid, train_x, train_y, test_x, test_y, neurons,
                    acts[ai], realizations,
                    derive_seed(seed, "sweep-activation",
                                static_cast<std::uint64_t>(ai)));
    std::size_t best = 0;
    for (std::size_t i = 1; i < inner.points.size(); ++i)
      if (inner.points[i].test_mse.mean_mse <
          inner.points[best].test_mse.mean_mse)
        best = i;
    SweepPoint pt = inner.points[best];
    pt.setting = ai;
    pt.setting_label = to_string(acts[ai]);
    pt.selected_gamma = inner.points[best].setting;
    result.points.push_back(pt);
  }
  return result;
}

LabeledDataset vectorize_covariances(const CovarianceSet& data,
                                     const std::vector<int>& indices) {
  if (data.covariances.empty())
    throw std::invalid_argument("vectorize_covariances: empty set");
  const auto m = static_cast<Eigen::Index>(indices.size() * indices.size());
  LabeledDataset ds;
  ds.antenna_count = static_cast<int>(indices.size());
  ds.features.resize(m, static_cast<Eigen::Index>(data.covariances.size()));
  ds.positions.resize(2, static_cast<Eigen::Index>(data.covariances.size()));
  ds.split = data.split;
  const bool full =
      static_cast<Eigen::Index>(indices.size()) == data.covariances[0].matrix.rows();
  for (std::size_t j = 0; j < data.covariances.size(); ++j) {
    const FeatureVector f = normalize_and_vectorize(
        full ? data.covariances[j]
             : restrict_features(data.covariances[j], indices));
    ds.features.col(static_cast<Eigen::Index>(j)) = f.x;
    ds.positions(0, static_cast<Eigen::Index>(j)) = f.ue_position.x;
    ds.positions(1, static_cast<Eigen::Index>(j)) = f.ue_position.y;
  }
  return ds;
}

SweepResult sweep_antennas(const std::vector<int>& antenna_grid,
                           const CovarianceSet& data, const ElmConfig& config,
                           std::uint64_t seed) {
  if (antenna_grid.empty())
    throw std::invalid_argument("sweep_antennas: empty grid");
  SweepResult result;
  result.axis = SweepAxis::Antennas;
  for (int n_ant : antenna_grid) {
    if (n_ant > data.geometry.size())
      throw std::invalid_argument("sweep_antennas: N exceeds array size");
    const std::vector<int> idx = antenna_subset(data.geometry, n_ant);
    const LabeledDataset ds = vectorize_covariances(data, idx);

    ElmModel model = elm_init(config.neurons,
                              static_cast<int>(ds.feature_dim()),
                              derive_seed(seed, "sweep-antennas-w"));
    model.gamma = config.gamma;
    model.activation = config.activation;
    elm_train(model, ds.features_of(Split::Train), ds.positions_of(Split::Train));

    const Eigen::MatrixXd test_x = ds.features_of(Split::Test);
    const Eigen::Matrix2Xd test_y = ds.positions_of(Split::Test);
    const ErrorReport rep =
        make_error_report(test_y, elm_predict_batch(model, test_x));

    SweepPoint pt;
    pt.setting = n_ant;
    pt.setting_label = std::to_string(n_ant);
    pt.mean_error = rep.average;
    pt.test_mse.mean_mse = rep.rmse * rep.rmse;
    pt.test_mse.realizations = 1;
    pt.selected_gamma = config.gamma;
    std::ostringstream row;
    row << n_ant << ",0," << fmt(rep.average) << ',' << fmt(rep.rmse * rep.rmse);
    result.realization_rows.push_back(row.str());
    result.points.push_back(pt);
  }
  return result;
}

LearnerComparison compare_learners(const LabeledDataset& ds,
                                   const ElmConfig& elm_config, int k) {
  const Eigen::MatrixXd train_x = ds.features_of(Split::Train);
  const Eigen::Matrix2Xd train_y = ds.positions_of(Split::Train);
  const Eigen::MatrixXd test_x = ds.features_of(Split::Test);
  const Eigen::Matrix2Xd test_y = ds.positions_of(Split::Test);

  ElmModel elm = elm_init(elm_config.neurons,
                          static_cast<int>(ds.feature_dim()), elm_config.seed);
  elm.gamma = elm_config.gamma;
  elm.activation = elm_config.activation;
  elm_train(elm, train_x, train_y);

  KnnModel knn{train_x, train_y, k};

  LearnerComparison cmp;
  cmp.elm = make_error_report(test_y, elm_predict_batch(elm, test_x));
  cmp.knn = make_error_report(test_y, knn_predict_batch(knn, test_x));

  char buf[256];
  std::ostringstream table;
  std::snprintf(buf, sizeof buf, "%-36s %12s %12s\n", "Statistic",
                ("ELM (" + to_string(elm_config.activation) + ")").c_str(),
                (std::to_string(k) + "-nN").c_str());
  table << buf;
  auto row = [&](const char* name, double a, double b) {
    std::snprintf(buf, sizeof buf, "%-36s %12.2f %12.2f\n", name, a, b);
    table << buf;
  };
  row("Average localization error [in m]", cmp.elm.average, cmp.knn.average);
  row("Median localization error [in m]", cmp.elm.median, cmp.knn.median);
  row("Maximum localization error [in m]", cmp.elm.maximum, cmp.knn.maximum);
  cmp.table = table.str();
  return cmp;
}

void error_map_export(const ErrorReport& report,
                      const Eigen::Matrix2Xd& training_positions,
                      const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + file.string());
  out << "role,x_m,y_m,error_m\n";
  for (std::size_t j = 0; j < report.sample_errors.size(); ++j)
    out << "test," << fmt(report.sample_positions[j].x) << ','
        << fmt(report.sample_positions[j].y) << ','
        << fmt(report.sample_errors[j]) << '\n';
  for (Eigen::Index j = 0; j < training_positions.cols(); ++j)
    out << "train," << fmt(training_positions(0, j)) << ','
        << fmt(training_positions(1, j)) << ",\n";
}

std::vector<int> error_histogram(const std::vector<double>& errors,
                                 double bin_width) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("error_histogram: bin width must be positive");
  std::vector<int> bins;
  for (double e : errors) {
    const auto b = static_cast<std::size_t>(e / bin_width);
    if (b >= bins.size()) bins.resize(b + 1, 0);
    ++bins[b];
  }
  return bins;
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Neurons: return "neurons";
    case SweepAxis::Gamma: return "gamma";
    case SweepAxis::Antennas: return "antennas";
    case SweepAxis::ActivationAxis: return "activation";
  }
  throw std::logic_error("bad sweep axis");
}

void sweep_save_csv(const SweepResult& r, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + file.string());
  const std::string axis = sweep_axis_name(r.axis);
  out << axis << ",realization,train_mse_m2,test_mse_m2\n";
  for (const auto& row : r.realization_rows) out << row << '\n';
  out << axis
      << ",aggregate_mean_train,aggregate_se_train,aggregate_mean_test,"
         "aggregate_se_test,sqrt_mean_test,selected_gamma,mean_error_m\n";
  for (const auto& p : r.points) {
    out << p.setting_label << ',' << fmt(p.train_mse.mean_mse) << ','
        << fmt(p.train_mse.std_error) << ',' << fmt(p.test_mse.mean_mse) << ','
        << fmt(p.test_mse.std_error) << ','
        << fmt(std::sqrt(std::max(0.0, p.test_mse.mean_mse))) << ','
        << fmt(p.selected_gamma) << ',' << fmt(p.mean_error) << '\n';
  }
}

void sweep_save_json(const SweepResult& r, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + file.string());
  out << "{\n  \"axis\": \"" << sweep_axis_name(r.axis) << "\",\n  \"points\": [\n";
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& p = r.points[i];
    out << "    {\"setting\": \"" << p.setting_label
        << "\", \"train_mse_m2\": " << fmt(p.train_mse.mean_mse)
        << ", \"train_se_m2\": " << fmt(p.train_mse.std_error)
        << ", \"test_mse_m2\": " << fmt(p.test_mse.mean_mse)
        << ", \"test_se_m2\": " << fmt(p.test_mse.std_error)
        << ", \"sqrt_test_mse_m\": "
        << fmt(std::sqrt(std::max(0.0, p.test_mse.mean_mse)))
        << ", \"selected_gamma\": " << fmt(p.selected_gamma)
        << ", \"mean_error_m\": " << fmt(p.mean_error) << "}"
        << (i + 1 < r.points.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
}

}  // namespace csiloc
