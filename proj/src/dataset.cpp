#include "csiloc/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csiloc {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'L', 'D'};
constexpr std::uint32_t kDatasetFormatVersion = 1;

Eigen::Index count_tag(const LabeledDataset& ds, Split s) {
  Eigen::Index n = 0;
  for (Split t : ds.split)
    if (t == s) ++n;
  return n;
}

}  // namespace

Eigen::MatrixXd LabeledDataset::features_of(Split s) const {
  Eigen::MatrixXd out(feature_dim(), count_tag(*this, s));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < count(); ++j)
    if (split[static_cast<std::size_t>(j)] == s) out.col(k++) = features.col(j);
  return out;
}

Eigen::Matrix2Xd LabeledDataset::positions_of(Split s) const {
  Eigen::Matrix2Xd out(2, count_tag(*this, s));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < count(); ++j)
    if (split[static_cast<std::size_t>(j)] == s)
      out.col(k++) = positions.col(j);
  return out;
}

Eigen::Index LabeledDataset::count_of(Split s) const {
  return count_tag(*this, s);
}

void append_record(LabeledDataset& ds, const FeatureVector& f, Split tag) {
  if (ds.count() == 0 && ds.feature_dim() == 0) {
    ds.features.resize(f.x.size(), 0);
    ds.positions.resize(2, 0);
  }
  if (f.x.size() != ds.feature_dim())
    throw std::invalid_argument("append_record: feature dimension mismatch");
  ds.features.conservativeResize(Eigen::NoChange, ds.count() + 1);
  ds.positions.conservativeResize(Eigen::NoChange, ds.positions.cols() + 1);
  ds.features.col(ds.count() - 1) = f.x;
  ds.positions(0, ds.positions.cols() - 1) = f.ue_position.x;
  ds.positions(1, ds.positions.cols() - 1) = f.ue_position.y;
  ds.split.push_back(tag);
}

LabeledDataset dataset_append(const LabeledDataset& existing,
                              const LabeledDataset& extra) {
  if (extra.count() == 0) return existing;
  if (existing.count() == 0) return extra;
  if (existing.feature_dim() != extra.feature_dim())
    throw std::invalid_argument("dataset_append: feature dimension mismatch");
  if (existing.ordering_version != extra.ordering_version)
    throw std::invalid_argument("dataset_append: ordering version mismatch");

  LabeledDataset out = existing;
  const Eigen::Index n0 = existing.count();
  out.features.conservativeResize(Eigen::NoChange, n0 + extra.count());
  out.positions.conservativeResize(Eigen::NoChange, n0 + extra.count());
  out.features.rightCols(extra.count()) = extra.features;
  out.positions.rightCols(extra.count()) = extra.positions;
  out.split.insert(out.split.end(), extra.split.begin(), extra.split.end());
  return out;
}

void dataset_save(const LabeledDataset& ds,
                  const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  auto put = [&](const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  put(kMagic, 4);
  const std::uint32_t version = kDatasetFormatVersion;
  put(&version, 4);
  const std::int32_t n = ds.antenna_count;
  const std::int64_t m = ds.feature_dim();
  const std::int64_t cnt = ds.count();
  const std::int32_t ordering = ds.ordering_version;
  put(&n, sizeof n);
  put(&m, sizeof m);
  put(&ordering, sizeof ordering);
  put(&cnt, sizeof cnt);
  put(&ds.master_seed, sizeof ds.master_seed);
  put(&ds.config_hash, sizeof ds.config_hash);
  for (Eigen::Index j = 0; j < cnt; ++j) {
    put(ds.features.col(j).data(), sizeof(double) * static_cast<std::size_t>(m));
    put(ds.positions.col(j).data(), sizeof(double) * 2);
    const std::uint8_t tag =
        static_cast<std::uint8_t>(ds.split[static_cast<std::size_t>(j)]);
    put(&tag, 1);
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

LabeledDataset dataset_load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  auto get = [&](void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("dataset file truncated: " + file.string());
  };
  char magic[4];
  get(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("dataset file corrupted: bad magic");
  std::uint32_t version;
  get(&version, 4);
  if (version != kDatasetFormatVersion)
    throw std::runtime_error("dataset file version mismatch");

  LabeledDataset ds;
  std::int32_t n, ordering;
  std::int64_t m, cnt;
  get(&n, sizeof n);
  get(&m, sizeof m);
  get(&ordering, sizeof ordering);
  get(&cnt, sizeof cnt);
  get(&ds.master_seed, sizeof ds.master_seed);
  get(&ds.config_hash, sizeof ds.config_hash);
  if (m < 1 || cnt < 0 || m > (1 << 24))
    throw std::runtime_error("dataset file corrupted: bad dimensions");
  ds.antenna_count = n;
  ds.ordering_version = ordering;
  ds.features.resize(m, cnt);
  ds.positions.resize(2, cnt);
  ds.split.resize(static_cast<std::size_t>(cnt));
  for (Eigen::Index j = 0; j < cnt; ++j) {
    get(ds.features.col(j).data(), sizeof(double) * static_cast<std::size_t>(m));
    get(ds.positions.col(j).data(), sizeof(double) * 2);
    std::uint8_t tag;
    get(&tag, 1);
    if (tag > 1) throw std::runtime_error("dataset file corrupted: split tag");
    ds.split[static_cast<std::size_t>(j)] = static_cast<Split>(tag);
  }
  return ds;
}

void dataset_save_csv(const LabeledDataset& ds,
                      const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << "# csiloc dataset, antenna_count=" << ds.antenna_count
      << ", ordering_version=" << ds.ordering_version
      << ", master_seed=" << ds.master_seed
      << ", config_hash=" << ds.config_hash << "\n";
  out << "split";
  for (Eigen::Index i = 0; i < ds.feature_dim(); ++i) out << ",x" << i;
  out << ",pos_x_m,pos_y_m\n";
  char buf[32];
  for (Eigen::Index j = 0; j < ds.count(); ++j) {
    out << (ds.split[static_cast<std::size_t>(j)] == Split::Train ? "train"
                                                                  : "test");
    for (Eigen::Index i = 0; i < ds.feature_dim(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.features(i, j));
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", ds.positions(0, j));
    out << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", ds.positions(1, j));
    out << ',' << buf << '\n';
  }
}

LabeledDataset dataset_load_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  std::string line;
  LabeledDataset ds;
  // Metadata comment line.
  if (!std::getline(in, line) || line.rfind("# csiloc dataset", 0) != 0)
    throw std::runtime_error("dataset csv: missing header comment");
  {
    std::istringstream meta(line);
    std::string tok;
    while (std::getline(meta, tok, ',')) {
      auto grab = [&](const char* key, auto& dst) {
        const auto p = tok.find(key);
        if (p != std::string::npos)
          dst = static_cast<std::remove_reference_t<decltype(dst)>>(
              std::stoull(tok.substr(p + std::strlen(key))));
      };
      grab("antenna_count=", ds.antenna_count);
      grab("ordering_version=", ds.ordering_version);
      grab("master_seed=", ds.master_seed);
      grab("config_hash=", ds.config_hash);
    }
  }
  if (!std::getline(in, line))
    throw std::runtime_error("dataset csv: missing column header");
  const Eigen::Index m = static_cast<Eigen::Index>(
      std::count(line.begin(), line.end(), ',')) - 2;
  if (m < 1) throw std::runtime_error("dataset csv: bad column header");

  std::vector<Eigen::VectorXd> feats;
  std::vector<Position2D> poss;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    const Split tag = cell == "train" ? Split::Train : Split::Test;
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      std::getline(row, cell, ',');
      x(i) = std::stod(cell);
    }
    Position2D p;
    std::getline(row, cell, ',');
    p.x = std::stod(cell);
    std::getline(row, cell, ',');
    p.y = std::stod(cell);
    feats.push_back(std::move(x));
    poss.push_back(p);
    ds.split.push_back(tag);
  }
  ds.features.resize(m, static_cast<Eigen::Index>(feats.size()));
  ds.positions.resize(2, static_cast<Eigen::Index>(feats.size()));
  for (std::size_t j = 0; j < feats.size(); ++j) {
    ds.features.col(static_cast<Eigen::Index>(j)) = feats[j];
    ds.positions(0, static_cast<Eigen::Index>(j)) = poss[j].x;
    ds.positions(1, static_cast<Eigen::Index>(j)) = poss[j].y;
  }
  return ds;
}

}  // namespace csiloc
