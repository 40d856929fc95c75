// Acceptance suite: one self-contained check per criterion, each printing a
// single [PASS]/[FAIL] line. Run all with no arguments or one with --only N.
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "csiloc/pipeline.hpp"
#include "csiloc/rng.hpp"
#include "oracles.hpp"

using namespace csiloc;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
  void note(const std::string& text) {
    if (ok) detail = text;
  }
};

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

SampleCovariance random_covariance(int n, std::mt19937_64& eng) {
  Eigen::MatrixXcd g(n, n + 2);
  for (Eigen::Index i = 0; i < g.size(); ++i)
    g.data()[i] = complex_gaussian(eng);
  SampleCovariance cov;
  Eigen::MatrixXcd c = g * g.adjoint();
  cov.matrix = 0.5 * (c + c.adjoint().eval());
  cov.snapshot_count = n + 2;
  cov.ue_position = {1.0, 2.0};
  return cov;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reduced experiment reused by the determinism and table-format criteria.
ExperimentConfig reduced_config() {
  ExperimentConfig cfg = default_experiment_config();
  cfg.seed = 11;
  cfg.geometry = make_upa(4, 1, 0.5, 0.0857, true);  // 8 elements
  cfg.trajectory.waypoints = make_serpentine(0.0, 0.0, 200.0, 300.0, 3);
  cfg.trajectory.speed = 4.0;
  cfg.split.block_count = 6;
  cfg.learner.neurons = 400;
  cfg.learner.gamma = 1e-3;
  return cfg;
}

// ----------------------------------------------------------------------------

Check criterion_1() {
  Check c;
  for (int n : {2, 4, 8, 16, 56}) {
    auto eng = make_engine(derive_seed(7, "acc1", static_cast<std::uint64_t>(n)));
    const FeatureVector f = normalize_and_vectorize(random_covariance(n, eng));
    c.require(f.x.size() == static_cast<Eigen::Index>(n) * n,
              "feature length != N^2 for N=" + std::to_string(n));
  }
  return c;
}

Check criterion_2() {
  Check c;
  auto eng = make_engine(derive_seed(7, "acc2"));
  std::uniform_int_distribution<int> size_dist(2, 8);
  std::uniform_real_distribution<double> phase_dist(0.0, 6.283185307179586);
  for (int inst = 0; inst < 200; ++inst) {
    const int n = size_dist(eng);

    // Scale invariance of the vectorized features.
    const SampleCovariance cov = random_covariance(n, eng);
    const FeatureVector base = normalize_and_vectorize(cov);
    for (double alpha : {1e-3, 1.0, 1e3}) {
      SampleCovariance scaled = cov;
      scaled.matrix *= alpha;
      const FeatureVector f = normalize_and_vectorize(scaled);
      c.require((f.x - base.x).cwiseAbs().maxCoeff() <= 1e-12,
                "scale variance above 1e-12 at alpha=" + std::to_string(alpha));
    }

    // Common-phase invariance of the sample covariance itself.
    std::vector<ChannelSnapshot> snaps(12);
    for (auto& s : snaps) {
      s.h = CVec(n);
      for (int i = 0; i < n; ++i) s.h(i) = complex_gaussian(eng);
      s.ue_position = {3.0, 4.0};
    }
    std::vector<ChannelSnapshot> rotated;
    rotated.reserve(snaps.size());
    for (const auto& s : snaps)
      rotated.push_back(apply_common_phase(s, phase_dist(eng)));
    const SampleCovariance a = sample_covariance(snaps);
    const SampleCovariance b = sample_covariance(rotated);
    c.require((a.matrix - b.matrix).norm() <= 1e-10,
              "common-phase covariance deviation above 1e-10");
  }
  return c;
}

Check criterion_3() {
  Check c;
  auto eng = make_engine(derive_seed(7, "acc3"));
  std::uniform_int_distribution<int> m_dist(5, 20), t_dist(20, 60), n_dist(8, 30);
  const double gammas[] = {1e-3, 1e-2, 1e-1, 1.0};
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 100.0);
  for (int inst = 0; inst < 20; ++inst) {
    const int m = m_dist(eng), t = t_dist(eng), n = n_dist(eng);
    const double gamma = gammas[inst % 4];
    ElmModel model = elm_init(n, m, derive_seed(7, "acc3-w", inst));
    Eigen::MatrixXd x(m, t);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = gauss(eng);
    Eigen::Matrix2Xd y(2, t);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = pos(eng);

    const Eigen::MatrixXd sigma = elm_hidden(model, x);
    const Eigen::MatrixXd beta = elm_solve_beta(sigma, y, gamma);
    const Eigen::MatrixXd oracle = test::ridge_gradient_descent(sigma, y, gamma);
    c.require((beta - oracle).norm() <= 1e-6 * oracle.norm(),
              "beta deviates from the gradient-descent oracle");

    const Eigen::MatrixXd primal = elm_solve_beta_primal(sigma, y, gamma);
    const Eigen::MatrixXd dual = elm_solve_beta_dual(sigma, y, gamma);
    c.require((primal - dual).norm() <= 1e-8 * primal.norm(),
              "primal and dual solutions disagree beyond 1e-8");
  }
  return c;
}

Check criterion_4() {
  Check c;
  auto eng = make_engine(derive_seed(7, "acc4"));
  std::uniform_int_distribution<int> m_dist(3, 10), t_dist(10, 60);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int ks[] = {1, 3, 5};
  for (int inst = 0; inst < 50; ++inst) {
    const int m = m_dist(eng), t = t_dist(eng), k = ks[inst % 3];
    KnnModel model;
    model.k = k;
    model.training_features.resize(m, t);
    for (Eigen::Index i = 0; i < model.training_features.size(); ++i)
      model.training_features.data()[i] = gauss(eng);
    // Duplicate a few columns so distance ties actually occur.
    if (t > 4) {
      model.training_features.col(t - 1) = model.training_features.col(0);
      model.training_features.col(t - 2) = model.training_features.col(1);
    }
    model.training_positions.resize(2, t);
    for (Eigen::Index i = 0; i < model.training_positions.size(); ++i)
      model.training_positions.data()[i] = gauss(eng) * 50.0;

    for (int q = 0; q < 5; ++q) {
      Eigen::VectorXd query(m);
      for (int i = 0; i < m; ++i) query(i) = gauss(eng);
      if (q == 4) query = model.training_features.col(0);  // exact tie
      const Position2D got = knn_predict(model, query);
      const Position2D want = test::knn_brute_force(
          model.training_features, model.training_positions, k, query);
      c.require(got.x == want.x && got.y == want.y,
                "knn_predict differs from the brute-force oracle");
    }
  }
  return c;
}

Check criterion_5() {
  Check c;
  double mean_sum = 0.0, median_sum = 0.0, knn_sum = 0.0;
  const int seeds[] = {1, 2, 3};
  for (int s : seeds) {
    ExperimentConfig cfg = default_experiment_config();
    cfg.seed = static_cast<std::uint64_t>(s);
    const LabeledDataset ds = build_dataset(cfg);
    const Eigen::MatrixXd train_x = ds.features_of(Split::Train);
    const Eigen::Matrix2Xd train_y = ds.positions_of(Split::Train);
    const Eigen::MatrixXd test_x = ds.features_of(Split::Test);
    const Eigen::Matrix2Xd test_y = ds.positions_of(Split::Test);

    // Learnability gate: plain nearest neighbor on the same data.
    KnnModel knn{train_x, train_y, 1};
    const ErrorReport knn_rep =
        make_error_report(test_y, knn_predict_batch(knn, test_x));
    knn_sum += knn_rep.average;

    // ELM with grid-selected regularization, one hidden matrix per seed.
    ElmModel model = elm_init(8000, static_cast<int>(ds.feature_dim()),
                              derive_seed(cfg.seed, "acc5-w"));
    model.activation = Activation::ReLu;
    const std::vector<double> grid = default_gamma_grid();
    const GammaProfile prof =
        elm_gamma_profile(model, train_x, train_y, test_x, test_y, grid);
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (prof.test_mse[i] < prof.test_mse[best]) best = i;
    model.gamma = grid[best];
    elm_train(model, train_x, train_y);
    const ErrorReport rep =
        make_error_report(test_y, elm_predict_batch(model, test_x));
    mean_sum += rep.average;
    median_sum += rep.median;
  }
  const double mean = mean_sum / 3.0, median = median_sum / 3.0,
               knn_mean = knn_sum / 3.0;
  c.require(knn_mean < 20.0,
            "1-nN mean " + fmt1(knn_mean) + " m >= 20 m: scene not learnable");
  c.require(mean < 15.0, "ELM mean test error " + fmt1(mean) + " m >= 15 m");
  c.require(median < 10.0, "ELM median test error " + fmt1(median) + " m >= 10 m");
  c.note("ELM mean " + fmt1(mean) + " m, median " + fmt1(median) + " m, 1-nN mean " +
         fmt1(knn_mean) + " m over 3 seeds");
  return c;
}

Check criterion_6() {
  Check c;
  const std::vector<int> grid = {4, 8, 16, 32};
  std::map<int, double> err;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    ExperimentConfig cfg = default_experiment_config();
    cfg.seed = s;
    const CovarianceSet data = build_covariance_set(cfg);
    ElmConfig elm;
    elm.neurons = 2000;
    elm.gamma = 1e-2;
    elm.activation = Activation::ReLu;
    const SweepResult sweep =
        sweep_antennas(grid, data, elm, derive_seed(s, "acc6"));
    for (const auto& p : sweep.points)
      err[static_cast<int>(p.setting)] += p.mean_error / 5.0;
  }
  c.require(err[4] > err[16],
            "mean error at N=4 (" + fmt1(err[4]) + " m) does not exceed N=16 (" +
                fmt1(err[16]) + " m)");
  c.require(std::abs(err[32] - err[16]) <= 0.2 * err[16],
            "N=16 -> N=32 change exceeds 20% (" + fmt1(err[16]) + " -> " +
                fmt1(err[32]) + " m)");
  c.note("mean error [m] over 5 seeds: N=4: " + fmt1(err[4]) + ", N=8: " +
         fmt1(err[8]) + ", N=16: " + fmt1(err[16]) + ", N=32: " + fmt1(err[32]));
  return c;
}

Check criterion_7() {
  Check c;
  ExperimentConfig cfg = default_experiment_config();
  cfg.seed = 4;
  cfg.geometry = make_upa(2, 2, 0.5, 0.0857, true);  // N = 8, M = 64
  cfg.trajectory.waypoints = make_serpentine(0.0, 0.0, 200.0, 300.0, 4);
  cfg.trajectory.speed = 2.0;
  const LabeledDataset ds = build_dataset(cfg);
  const Eigen::MatrixXd train_x = ds.features_of(Split::Train);
  const Eigen::Matrix2Xd train_y = ds.positions_of(Split::Train);
  const Eigen::MatrixXd test_x = ds.features_of(Split::Test);
  const Eigen::Matrix2Xd test_y = ds.positions_of(Split::Test);

  const int t = static_cast<int>(train_x.cols());
  const std::vector<int> neuron_grid = {t / 4, t / 2, t, 2 * t, 4 * t};
  const SweepResult sweep =
      sweep_neurons(neuron_grid, train_x, train_y, test_x, test_y,
                    Activation::ReLu, default_gamma_grid(), 25,
                    derive_seed(cfg.seed, "acc7"));

  const auto& pts = sweep.points;
  c.require(pts[4].train_mse.mean_mse < pts[1].train_mse.mean_mse,
            "train MSE at n=4T not below train MSE at n=T/2");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double tol = std::hypot(pts[i].test_mse.std_error,
                                  pts[i + 1].test_mse.std_error);
    c.require(pts[i + 1].test_mse.mean_mse <= pts[i].test_mse.mean_mse + tol,
              "test MSE increases beyond one std error from n=" +
                  pts[i].setting_label + " to n=" + pts[i + 1].setting_label);
  }
  c.note("T=" + std::to_string(t) + ", train MSE " +
         fmt1(pts[1].train_mse.mean_mse) + " -> " +
         fmt1(pts[4].train_mse.mean_mse) + " m^2 (T/2 -> 4T), test MSE " +
         fmt1(pts[0].test_mse.mean_mse) + " -> " +
         fmt1(pts[4].test_mse.mean_mse) + " m^2 (T/4 -> 4T)");
  return c;
}

Check criterion_8() {
  Check c;
  auto eng = make_engine(derive_seed(7, "acc8"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 50.0);
  const int m = 16, t_train = 120, t_test = 40;
  Eigen::MatrixXd train_x(m, t_train), test_x(m, t_test);
  Eigen::Matrix2Xd train_y(2, t_train), test_y(2, t_test);
  for (Eigen::Index i = 0; i < train_x.size(); ++i) train_x.data()[i] = gauss(eng);
  for (Eigen::Index i = 0; i < test_x.size(); ++i) test_x.data()[i] = gauss(eng);
  for (Eigen::Index i = 0; i < train_y.size(); ++i) train_y.data()[i] = pos(eng);
  for (Eigen::Index i = 0; i < test_y.size(); ++i) test_y.data()[i] = pos(eng);

  ElmConfig elm;
  elm.neurons = 64;
  elm.gamma = 1e-2;
  const auto small = monte_carlo_mse(elm, train_x, train_y, test_x, test_y, 100,
                                     derive_seed(7, "acc8-mc"));
  const auto large = monte_carlo_mse(elm, train_x, train_y, test_x, test_y, 400,
                                     derive_seed(7, "acc8-mc"));
  const double ratio = small.second.std_error / large.second.std_error;
  c.require(ratio >= 1.2 && ratio <= 2.8,
            "std_error ratio R=100/R=400 is " + fmt1(ratio) +
                ", outside [1.2, 2.8]");
  c.note("std_error ratio R=100 vs R=400: " + fmt1(ratio) + " (ideal 2.0)");
  return c;
}

// Full reduced pipeline into a directory: dataset, trained model, reports.
void run_pipeline(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const LabeledDataset ds = build_dataset(cfg);
  dataset_save(ds, dir / "dataset.bin");

  ElmModel model = elm_init(cfg.learner.neurons,
                            static_cast<int>(ds.feature_dim()),
                            derive_seed(cfg.seed, "elm-weights"));
  model.gamma = cfg.learner.gamma;
  model.activation = cfg.learner.activation;
  elm_train(model, ds.features_of(Split::Train), ds.positions_of(Split::Train));
  const std::vector<std::uint8_t> bytes = model_save(model);
  std::ofstream(dir / "model.bin", std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));

  ElmConfig elm;
  elm.neurons = cfg.learner.neurons;
  elm.gamma = cfg.learner.gamma;
  elm.activation = cfg.learner.activation;
  elm.seed = derive_seed(cfg.seed, "elm-weights");
  const LearnerComparison cmp = compare_learners(ds, elm, cfg.learner.k);
  std::ofstream(dir / "comparison.txt") << cmp.table;
  error_map_export(cmp.elm, ds.positions_of(Split::Train), dir / "error_map.csv");
}

Check criterion_9() {
  Check c;
  const ExperimentConfig cfg = reduced_config();
  const auto base = std::filesystem::temp_directory_path() / "csiloc_acc9";
  run_pipeline(cfg, base / "a");
  run_pipeline(cfg, base / "b");
  for (const char* name :
       {"dataset.bin", "model.bin", "comparison.txt", "error_map.csv"}) {
    const std::string a = read_bytes(base / "a" / name);
    const std::string b = read_bytes(base / "b" / name);
    c.require(!a.empty() && a == b,
              std::string(name) + " differs between identical reruns");
  }
  std::filesystem::remove_all(base);
  return c;
}

Check criterion_10() {
  Check c;
  const ExperimentConfig cfg = reduced_config();
  const LabeledDataset ds = build_dataset(cfg);
  ElmConfig elm;
  elm.neurons = 400;
  elm.gamma = 1e-3;
  elm.seed = derive_seed(cfg.seed, "acc10-w");
  const LearnerComparison cmp = compare_learners(ds, elm, 3);
  for (const char* row :
       {"Average localization error [in m]", "Median localization error [in m]",
        "Maximum localization error [in m]"})
    c.require(cmp.table.find(row) != std::string::npos,
              std::string("missing table row: ") + row);
  c.require(cmp.table.find("3-nN") != std::string::npos,
            "missing 3-nN column header");

  // Train = test, k = 1: every query has an exact training twin, so the
  // nearest-neighbor error must be exactly zero.
  LabeledDataset twin;
  const Eigen::MatrixXd tx = ds.features_of(Split::Train);
  const Eigen::Matrix2Xd ty = ds.positions_of(Split::Train);
  twin.antenna_count = ds.antenna_count;
  twin.features.resize(ds.feature_dim(), 2 * tx.cols());
  twin.features << tx, tx;
  twin.positions.resize(2, 2 * ty.cols());
  twin.positions << ty, ty;
  twin.split.assign(static_cast<std::size_t>(tx.cols()), Split::Train);
  twin.split.insert(twin.split.end(), static_cast<std::size_t>(tx.cols()),
                    Split::Test);
  const LearnerComparison zero = compare_learners(twin, elm, 1);
  c.require(zero.knn.average == 0.0, "train=test 1-nN average is not exactly 0");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Check()>>> criteria = {
      {1, {"feature dimension is N^2", criterion_1}},
      {2, {"pathloss and common-phase invariance", criterion_2}},
      {3, {"ridge solver matches gradient-descent oracle", criterion_3}},
      {4, {"K-nN matches brute-force oracle", criterion_4}},
      {5, {"end-to-end synthetic localization", criterion_5}},
      {6, {"antenna-count sweep trend", criterion_6}},
      {7, {"neuron-count sweep trend", criterion_7}},
      {8, {"Monte-Carlo std_error calibration", criterion_8}},
      {9, {"bitwise-deterministic pipeline rerun", criterion_9}},
      {10, {"comparison table format and exact-zero K-nN", criterion_10}},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]\n");
      return 2;
    }
  }
  if (only != 0 && criteria.find(only) == criteria.end()) {
    std::fprintf(stderr, "no such criterion: %d\n", only);
    return 2;
  }

  int failures = 0;
  for (const auto& [id, entry] : criteria) {
    if (only != 0 && id != only) continue;
    Check c;
    try {
      c = entry.second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s%s%s\n", c.ok ? "PASS" : "FAIL", id,
                entry.first.c_str(), c.detail.empty() ? "" : " -- ",
                c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
