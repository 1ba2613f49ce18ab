#include "gpland/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpland/errors.hpp"
#include "gpland/rng.hpp"

namespace gpland {
namespace {

constexpr double kSchwefelConstant = 418.9829;
constexpr int kContainerVersion = 1;

std::vector<std::string> parse_csv_record(const std::string& line,
                                          char delimiter) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

bool parse_double(const std::string& s, double* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  if (begin == end) return false;
  const auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end && std::isfinite(*out);
}

void standardize_columns(Eigen::MatrixXd& X, Eigen::VectorXd& means,
                         Eigen::VectorXd& scales) {
  const int d = static_cast<int>(X.cols());
  means.resize(d);
  scales.resize(d);
  for (int j = 0; j < d; ++j) {
    means[j] = X.col(j).mean();
    const double var =
        (X.col(j).array() - means[j]).square().sum() / X.rows();
    const double sd = std::sqrt(var);
    scales[j] = sd > 0.0 ? sd : 1.0;  // constant column: shift only
    X.col(j) = (X.col(j).array() - means[j]) / scales[j];
  }
}

void apply_feature_standardization(Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& means,
                                   const Eigen::VectorXd& scales) {
  for (int j = 0; j < X.cols(); ++j) {
    X.col(j) = (X.col(j).array() - means[j]) / scales[j];
  }
}

}  // namespace

double schwefel_constant() { return kSchwefelConstant; }

Eigen::VectorXd Dataset::destandardize_targets(const Eigen::VectorXd& v) const {
  return (v.array() * std_info.target_scale + std_info.target_mean).matrix();
}

void Dataset::validate() const {
  if (n() < 2) throw DomainError("Dataset: need at least 2 rows for a fit");
  if (y.size() != X.rows()) throw DimensionError("Dataset: X/y row mismatch");
  if (!X.allFinite() || !y.allFinite()) {
    throw NumericalError("Dataset: non-finite entries");
  }
  if (std_info.target_scale <= 0.0) {
    throw DomainError("Dataset: target scale must be positive");
  }
}

double schwefel(const Eigen::VectorXd& x) {
  if (!x.allFinite()) throw DomainError("schwefel: non-finite input");
  double sum = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    sum += x[i] * std::sin(std::sqrt(std::fabs(x[i])));
  }
  return kSchwefelConstant * static_cast<double>(x.size()) - sum;
}

Dataset schwefel_dataset(int d, int n, double low, double high,
                         std::uint64_t seed) {
  if (d < 1 || n < 2) throw ConfigError("schwefel_dataset: need d >= 1, n >= 2");
  if (!(low < high)) throw ConfigError("schwefel_dataset: need low < high");
  Rng rng(seed);
  Dataset ds;
  ds.X.resize(n, d);
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) ds.X(i, j) = rng.uniform(low, high);
    ds.y[i] = schwefel(ds.X.row(i));
  }
  std::ostringstream prov;
  prov << "schwefel(d=" << d << ",n=" << n << ",low=" << low
       << ",high=" << high << ",seed=" << seed << ")";
  ds.provenance = prov.str();
  return ds;
}

Dataset load_csv(const std::filesystem::path& path,
                 const std::string& target_column, char delimiter,
                 int* dropped_rows) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("load_csv: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();

  std::istringstream lines(content);
  std::string line;
  if (!std::getline(lines, line)) {
    throw ConfigError("load_csv: empty file " + path.string());
  }
  const auto header = parse_csv_record(line, delimiter);
  int target_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == target_column) target_idx = static_cast<int>(j);
  }
  if (target_idx < 0) {
    throw ConfigError("load_csv: target column '" + target_column +
                      "' not found in header");
  }

  const int d = static_cast<int>(header.size()) - 1;
  if (d < 1) throw ConfigError("load_csv: no feature columns");
  std::vector<std::vector<double>> rows;
  int dropped = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = parse_csv_record(line, delimiter);
    if (fields.size() != header.size()) {
      ++dropped;
      continue;
    }
    std::vector<double> row(header.size());
    bool ok = true;
    for (std::size_t j = 0; j < fields.size() && ok; ++j) {
      ok = parse_double(fields[j], &row[j]);
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (dropped_rows) *dropped_rows = dropped;
  if (rows.empty()) {
    throw ConfigError("load_csv: no usable rows in " + path.string());
  }

  Dataset ds;
  ds.X.resize(static_cast<int>(rows.size()), d);
  ds.y.resize(static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int col = 0;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (static_cast<int>(j) == target_idx) {
        ds.y[static_cast<int>(i)] = rows[i][j];
      } else {
        ds.X(static_cast<int>(i), col++) = rows[i][j];
      }
    }
  }
  ds.provenance = "csv:fnv1a=" + fnv1a_hex(content);
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed,
                                  bool standardize_features,
                                  bool standardize_targets) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("split: test_fraction must be in (0, 1)");
  }
  const int n = data.n();
  const int n_test = static_cast<int>(std::lround(test_fraction * n));
  const int n_train = n - n_test;
  if (n_train < 2 || n_test < 1) {
    throw ConfigError("split: degenerate sizes (train=" +
                      std::to_string(n_train) + ", test=" +
                      std::to_string(n_test) + ")");
  }

  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {  // Fisher-Yates
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[i], idx[j]);
  }

  Dataset train, test;
  train.X.resize(n_train, data.dim());
  train.y.resize(n_train);
  test.X.resize(n_test, data.dim());
  test.y.resize(n_test);
  for (int i = 0; i < n_train; ++i) {
    train.X.row(i) = data.X.row(idx[i]);
    train.y[i] = data.y[idx[i]];
  }
  for (int i = 0; i < n_test; ++i) {
    test.X.row(i) = data.X.row(idx[n_train + i]);
    test.y[i] = data.y[idx[n_train + i]];
  }
  train.provenance = data.provenance + "|split(train)";
  test.provenance = data.provenance + "|split(test)";

  Standardization st = data.std_info;
  if (standardize_features) {
    standardize_columns(train.X, st.feature_means, st.feature_scales);
    apply_feature_standardization(test.X, st.feature_means, st.feature_scales);
    st.features_standardized = true;
  }
  if (standardize_targets) {
    st.target_mean = train.y.mean();
    const double var =
        (train.y.array() - st.target_mean).square().sum() / n_train;
    st.target_scale = std::sqrt(var) > 0.0 ? std::sqrt(var) : 1.0;
    train.y = (train.y.array() - st.target_mean) / st.target_scale;
    test.y = (test.y.array() - st.target_mean) / st.target_scale;
    st.targets_standardized = true;
  }
  train.std_info = st;
  test.std_info = st;
  return {std::move(train), std::move(test)};
}

Dataset standardize(const Dataset& data, bool features, bool targets) {
  Dataset out = data;
  if (features) {
    standardize_columns(out.X, out.std_info.feature_means,
                        out.std_info.feature_scales);
    out.std_info.features_standardized = true;
  }
  if (targets) {
    out.std_info.target_mean = out.y.mean();
    const double var =
        (out.y.array() - out.std_info.target_mean).square().sum() / out.n();
    out.std_info.target_scale = std::sqrt(var) > 0.0 ? std::sqrt(var) : 1.0;
    out.y = (out.y.array() - out.std_info.target_mean) /
            out.std_info.target_scale;
    out.std_info.targets_standardized = true;
  }
  return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& json_path) {
  std::filesystem::path bin_path = json_path;
  bin_path.replace_extension(".bin");

  nlohmann::json j;
  j["format_version"] = kContainerVersion;
  j["n"] = data.n();
  j["d"] = data.dim();
  j["provenance"] = data.provenance;
  j["binary"] = bin_path.filename().string();
  j["layout"] = "float64 little-endian: X row-major (n*d), then y (n)";
  j["standardization"] = {
      {"features_standardized", data.std_info.features_standardized},
      {"targets_standardized", data.std_info.targets_standardized},
      {"target_mean", data.std_info.target_mean},
      {"target_scale", data.std_info.target_scale},
  };
  if (data.std_info.features_standardized) {
    j["standardization"]["feature_means"] = std::vector<double>(
        data.std_info.feature_means.data(),
        data.std_info.feature_means.data() + data.std_info.feature_means.size());
    j["standardization"]["feature_scales"] = std::vector<double>(
        data.std_info.feature_scales.data(),
        data.std_info.feature_scales.data() +
            data.std_info.feature_scales.size());
  }

  std::ofstream jf(json_path, std::ios::binary);
  if (!jf) throw ConfigError("save_dataset: cannot write " + json_path.string());
  jf << j.dump(2) << "\n";

  std::ofstream bf(bin_path, std::ios::binary);
  if (!bf) throw ConfigError("save_dataset: cannot write " + bin_path.string());
  for (int i = 0; i < data.n(); ++i) {
    for (int col = 0; col < data.dim(); ++col) {
      const double v = data.X(i, col);
      bf.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  bf.write(reinterpret_cast<const char*>(data.y.data()),
           static_cast<std::streamsize>(sizeof(double) * data.y.size()));
}

Dataset load_dataset(const std::filesystem::path& json_path) {
  std::ifstream jf(json_path);
  if (!jf) throw ConfigError("load_dataset: cannot open " + json_path.string());
  nlohmann::json j;
  jf >> j;
  if (j.value("format_version", -1) != kContainerVersion) {
    throw ConfigError("load_dataset: unsupported format_version");
  }
  const int n = j.at("n").get<int>();
  const int d = j.at("d").get<int>();

  std::filesystem::path bin_path =
      json_path.parent_path() / j.at("binary").get<std::string>();
  std::ifstream bf(bin_path, std::ios::binary);
  if (!bf) throw ConfigError("load_dataset: cannot open " + bin_path.string());

  Dataset ds;
  ds.X.resize(n, d);
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int col = 0; col < d; ++col) {
      double v;
      bf.read(reinterpret_cast<char*>(&v), sizeof(v));
      ds.X(i, col) = v;
    }
  }
  bf.read(reinterpret_cast<char*>(ds.y.data()),
          static_cast<std::streamsize>(sizeof(double) * n));
  if (!bf) throw ConfigError("load_dataset: truncated binary " + bin_path.string());

  ds.provenance = j.value("provenance", "");
  const auto& st = j.at("standardization");
  ds.std_info.features_standardized = st.value("features_standardized", false);
  ds.std_info.targets_standardized = st.value("targets_standardized", false);
  ds.std_info.target_mean = st.value("target_mean", 0.0);
  ds.std_info.target_scale = st.value("target_scale", 1.0);
  if (ds.std_info.features_standardized) {
    const auto means = st.at("feature_means").get<std::vector<double>>();
    const auto scales = st.at("feature_scales").get<std::vector<double>>();
    ds.std_info.feature_means =
        Eigen::Map<const Eigen::VectorXd>(means.data(), means.size());
    ds.std_info.feature_scales =
        Eigen::Map<const Eigen::VectorXd>(scales.data(), scales.size());
  }
  return ds;
}

std::uint64_t fnv1a_hash(const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(const std::string& content) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a_hash(content.data(), content.size())));
  return std::string(buf);
}

}  // namespace gpland
