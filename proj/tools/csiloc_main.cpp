// Command-line harness: generate synthetic datasets, train/evaluate the
// localizers, and run the sweep experiments.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>

#include "csiloc/pipeline.hpp"
#include "csiloc/rng.hpp"

namespace {

constexpr int kExitRuntime = 1;

using namespace csiloc;

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p,
                 const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + p.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// "lo:hi:log[:count]", "lo:hi:lin[:count]" or a comma list.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() < 3) throw std::runtime_error("bad grid spec: " + spec);
    const double lo = std::stod(parts[0]);
    const double hi = std::stod(parts[1]);
    const bool log_scale = parts[2] == "log";
    const int count = parts.size() > 3 ? std::stoi(parts[3]) : 9;
    if (count < 1 || (log_scale && !(lo > 0.0)))
      throw std::runtime_error("bad grid spec: " + spec);
    for (int i = 0; i < count; ++i) {
      const double u = count == 1 ? 0.0
                                  : static_cast<double>(i) / (count - 1);
      grid.push_back(log_scale ? std::exp(std::log(lo) +
                                          u * (std::log(hi) - std::log(lo)))
                               : lo + u * (hi - lo));
    }
  } else {
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
  }
  return grid;
}

ErrorReport report_for_model(const std::vector<std::uint8_t>& model_bytes,
                             const LabeledDataset& ds, Split split) {
  const Eigen::MatrixXd x = ds.features_of(split);
  const Eigen::Matrix2Xd y = ds.positions_of(split);
  if (model_kind(model_bytes) == "elm") {
    const ElmModel m = elm_load(model_bytes);
    return make_error_report(y, elm_predict_batch(m, x));
  }
  const KnnModel m = knn_load(model_bytes);
  return make_error_report(y, knn_predict_batch(m, x));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CSI-fingerprint localization harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  app.add_flag_callback(
      "--version",
      [] {
        std::cout << "csiloc 1 (dataset format 1, model format 1, "
                     "feature ordering "
                  << kFeatureOrderingVersion << ")\n";
        std::exit(0);
      },
      "print format version tags");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config JSON");
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&](std::uint64_t s) {
          seed_override = s;
          seed_given = true;
        },
        "master seed override");
  };

  // generate
  auto* generate = app.add_subcommand("generate", "build a labeled dataset");
  std::string out_dir = "out";
  bool dump_snapshots = false;
  bool csv_dataset = false;
  add_common(generate);
  generate->add_option("--out", out_dir, "output directory");
  generate->add_flag("--dump-snapshots", dump_snapshots,
                     "also write the raw snapshot stream");
  generate->add_flag("--csv", csv_dataset, "write the dataset as CSV too");

  // train
  auto* train = app.add_subcommand("train", "train a localizer");
  std::string data_path, model_out = "model.bin", learner_kind;
  int neurons = 0, knn_k = 0;
  double gamma = -1.0;
  std::string activation_name;
  std::uint64_t learner_seed = 0;
  bool learner_seed_given = false;
  add_common(train);
  train->add_option("--data", data_path, "dataset file")->required();
  train->add_option("--out", model_out, "model output file");
  train->add_option("--learner", learner_kind, "elm or knn");
  train->add_option("--neurons", neurons, "hidden layer size");
  train->add_option("--gamma", gamma, "ridge regularization");
  train->add_option("--activation", activation_name, "relu, step or sign");
  train->add_option("--k", knn_k, "neighbor count for knn");
  train->add_option_function<std::uint64_t>(
      "--learner-seed",
      [&](std::uint64_t s) {
        learner_seed = s;
        learner_seed_given = true;
      },
      "seed for the hidden weights");

  // predict
  auto* predict = app.add_subcommand("predict", "predict positions");
  std::string model_path, predict_out = "predictions.csv";
  std::string predict_split = "test";
  add_common(predict);
  predict->add_option("--model", model_path, "model file")->required();
  predict->add_option("--data", data_path, "dataset file")->required();
  predict->add_option("--out", predict_out, "output CSV");
  predict->add_option("--split", predict_split, "train or test");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a model on a dataset");
  std::string eval_split = "test";
  add_common(eval);
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--data", data_path, "dataset file")->required();
  eval->add_option("--split", eval_split, "train or test");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "hyperparameter sweep");
  std::string axis = "gamma", grid_spec;
  int realizations = 0;
  add_common(sweep);
  sweep->add_option("--data", data_path, "dataset file (gamma/neurons/activation)");
  sweep->add_option("--axis", axis, "gamma | neurons | antennas | activation");
  sweep->add_option("--grid", grid_spec, "lo:hi:log[:count] or comma list");
  sweep->add_option("--realizations", realizations, "Monte-Carlo W draws");
  sweep->add_option("--out", out_dir, "output directory");

  // report
  auto* report = app.add_subcommand(
      "report", "compare ELM and K-nN, export map and histogram data");
  double bin_width = 1.0;
  add_common(report);
  report->add_option("--data", data_path, "dataset file")->required();
  report->add_option("--out", out_dir, "output directory");
  report->add_option("--bin-width", bin_width, "histogram bin width, meters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors exit with a distinct code from runtime failures.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty())
      cfg = load_config(config_path);
    else
      cfg = default_experiment_config();
    if (seed_given) cfg.seed = seed_override;

    if (*generate) {
      std::filesystem::create_directories(out_dir);
      const LabeledDataset ds = build_dataset(cfg);
      dataset_save(ds, std::filesystem::path(out_dir) / "dataset.bin");
      if (csv_dataset)
        dataset_save_csv(ds, std::filesystem::path(out_dir) / "dataset.csv");
      if (dump_snapshots) {
        const SceneRealization real = realize_scene(
            cfg.scene, cfg.geometry, derive_seed(cfg.seed, "scene"));
        auto eng = make_engine(derive_seed(cfg.seed, "snapshots"));
        const TrajectorySamples samples = sample_trajectory(
            cfg.trajectory, cfg.scene, cfg.geometry, real, eng);
        write_snapshot_dump(samples.snapshots,
                            std::filesystem::path(out_dir) / "snapshots.csv");
      }
      std::cout << "dataset: " << ds.count() << " records ("
                << ds.count_of(Split::Train) << " train, "
                << ds.count_of(Split::Test) << " test), M = "
                << ds.feature_dim() << ", seed = " << ds.master_seed << "\n";
    } else if (*train) {
      const LabeledDataset ds = dataset_load(data_path);
      LearnerSpec spec = cfg.learner;
      if (!learner_kind.empty()) spec.kind = learner_kind;
      if (neurons > 0) spec.neurons = neurons;
      if (gamma >= 0.0) spec.gamma = gamma;
      if (!activation_name.empty())
        spec.activation = activation_from_string(activation_name);
      if (knn_k > 0) spec.k = knn_k;
      if (learner_seed_given) spec.seed = learner_seed;

      if (spec.kind == "elm") {
        ElmModel m = elm_init(spec.neurons,
                              static_cast<int>(ds.feature_dim()), spec.seed);
        m.gamma = spec.gamma;
        m.activation = spec.activation;
        elm_train(m, ds.features_of(Split::Train),
                  ds.positions_of(Split::Train));
        write_bytes(model_out, model_save(m));
        std::cout << "trained elm: n = " << spec.neurons << ", gamma = "
                  << spec.gamma << ", activation = "
                  << to_string(spec.activation) << " -> " << model_out << "\n";
      } else if (spec.kind == "knn") {
        KnnModel m{ds.features_of(Split::Train),
                   ds.positions_of(Split::Train), spec.k};
        write_bytes(model_out, model_save(m));
        std::cout << "trained knn: k = " << spec.k << " -> " << model_out
                  << "\n";
      } else {
        throw std::runtime_error("unknown learner kind: " + spec.kind);
      }
    } else if (*predict) {
      const LabeledDataset ds = dataset_load(data_path);
      const Split split = predict_split == "train" ? Split::Train : Split::Test;
      const Eigen::MatrixXd x = ds.features_of(split);
      const auto bytes = read_bytes(model_path);
      Eigen::Matrix2Xd est;
      if (model_kind(bytes) == "elm")
        est = elm_predict_batch(elm_load(bytes), x);
      else
        est = knn_predict_batch(knn_load(bytes), x);
      std::ofstream out(predict_out);
      out << "est_x_m,est_y_m\n";
      for (Eigen::Index j = 0; j < est.cols(); ++j)
        out << est(0, j) << ',' << est(1, j) << '\n';
      std::cout << "wrote " << est.cols() << " predictions -> " << predict_out
                << "\n";
    } else if (*eval) {
      const LabeledDataset ds = dataset_load(data_path);
      const Split split = eval_split == "train" ? Split::Train : Split::Test;
      const ErrorReport r = report_for_model(read_bytes(model_path), ds, split);
      char buf[128];
      auto row = [&](const char* name, double v) {
        std::snprintf(buf, sizeof buf, "%-36s %12.2f\n", name, v);
        std::cout << buf;
      };
      row("Average localization error [in m]", r.average);
      row("Median localization error [in m]", r.median);
      row("Maximum localization error [in m]", r.maximum);
      row("RMS localization error [in m]", r.rmse);
    } else if (*sweep) {
      std::filesystem::create_directories(out_dir);
      if (!grid_spec.empty()) cfg.sweep.grid = parse_grid(grid_spec);
      if (realizations > 0) cfg.sweep.realizations = realizations;
      cfg.sweep.axis = axis;

      SweepResult result;
      if (axis == "antennas") {
        const CovarianceSet set = build_covariance_set(cfg);
        std::vector<int> grid;
        for (double g : cfg.sweep.grid) grid.push_back(static_cast<int>(g));
        if (grid.empty()) grid = {4, 8, 16, static_cast<int>(cfg.geometry.size())};
        ElmConfig ec{cfg.learner.neurons, cfg.learner.gamma,
                     cfg.learner.activation, cfg.learner.seed};
        result = sweep_antennas(grid, set, ec, cfg.seed);
      } else {
        LabeledDataset ds = data_path.empty() ? build_dataset(cfg)
                                              : dataset_load(data_path);
        const Eigen::MatrixXd train_x = ds.features_of(Split::Train);
        const Eigen::Matrix2Xd train_y = ds.positions_of(Split::Train);
        const Eigen::MatrixXd test_x = ds.features_of(Split::Test);
        const Eigen::Matrix2Xd test_y = ds.positions_of(Split::Test);
        if (axis == "gamma") {
          const auto grid =
              cfg.sweep.grid.empty() ? default_gamma_grid() : cfg.sweep.grid;
          result = sweep_gamma(grid, train_x, train_y, test_x, test_y,
                               cfg.learner.neurons, cfg.learner.activation,
                               cfg.sweep.realizations, cfg.seed);
        } else if (axis == "neurons") {
          std::vector<int> grid;
          for (double g : cfg.sweep.grid) grid.push_back(static_cast<int>(g));
          if (grid.empty())
            throw std::runtime_error("neuron sweep requires --grid");
          result = sweep_neurons(grid, train_x, train_y, test_x, test_y,
                                 cfg.learner.activation, default_gamma_grid(),
                                 cfg.sweep.realizations, cfg.seed);
        } else if (axis == "activation") {
          result = sweep_activation(train_x, train_y, test_x, test_y,
                                    cfg.learner.neurons, default_gamma_grid(),
                                    cfg.sweep.realizations, cfg.seed);
        } else {
          throw std::runtime_error("unknown sweep axis: " + axis);
        }
      }
      const std::string stem =
          "sweep_" + axis + "_seed" + std::to_string(cfg.seed);
      sweep_save_csv(result, std::filesystem::path(out_dir) / (stem + ".csv"));
      sweep_save_json(result, std::filesystem::path(out_dir) / (stem + ".json"));
      std::cout << "wrote " << stem << ".csv / .json in " << out_dir << "\n";
    } else if (*report) {
      std::filesystem::create_directories(out_dir);
      const LabeledDataset ds = dataset_load(data_path);
      ElmConfig ec{cfg.learner.neurons, cfg.learner.gamma,
                   cfg.learner.activation, cfg.learner.seed};
      const LearnerComparison cmp = compare_learners(ds, ec, cfg.learner.k);
      std::cout << cmp.table;
      std::ofstream(std::filesystem::path(out_dir) / "comparison.txt")
          << cmp.table;
      error_map_export(cmp.elm, ds.positions_of(Split::Train),
                       std::filesystem::path(out_dir) / "error_map.csv");
      const std::vector<int> bins =
          error_histogram(cmp.elm.sample_errors, bin_width);
      std::ofstream hist(std::filesystem::path(out_dir) / "error_histogram.csv");
      hist << "bin_lo_m,bin_hi_m,count\n";
      for (std::size_t b = 0; b < bins.size(); ++b)
        hist << b * bin_width << ',' << (b + 1) * bin_width << ',' << bins[b]
             << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
