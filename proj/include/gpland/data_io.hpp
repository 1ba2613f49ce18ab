#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

namespace gpland {

// Describes the affine transform applied to a dataset. Scales are always
// positive so the transform stays invertible; constant columns keep scale 1.
struct Standardization {
  Eigen::VectorXd feature_means;  // empty when features are raw
  Eigen::VectorXd feature_scales;
  double target_mean = 0.0;
  double target_scale = 1.0;
  bool features_standardized = false;
  bool targets_standardized = false;
};

struct Dataset {
  Eigen::MatrixXd X;  // n x d, in model space (standardized when applied)
  Eigen::VectorXd y;  // n, model space
  Standardization std_info;
  std::string provenance;

  int n() const { return static_cast<int>(X.rows()); }
  int dim() const { return static_cast<int>(X.cols()); }

  // Map model-space predictions back to raw target units.
  double destandardize_target(double v) const {
    return v * std_info.target_scale + std_info.target_mean;
  }
  Eigen::VectorXd destandardize_targets(const Eigen::VectorXd& v) const;
  double destandardize_variance(double v) const {
    return v * std_info.target_scale * std_info.target_scale;
  }

  void validate() const;  // throws on non-finite entries or n < 2
};

// d-dimensional Schwefel benchmark value.
double schwefel(const Eigen::VectorXd& x);

// n uniform points in [low, high]^d with Schwefel targets; deterministic per
// seed. Features and targets are raw (standardize at split/fit time).
Dataset schwefel_dataset(int d, int n, double low, double high,
                         std::uint64_t seed);

// Numeric CSV with a header row, RFC-style quoting. Rows containing any
// non-numeric or empty field are dropped; the count lands in *dropped_rows
// when given. Provenance is an FNV-1a hash of the file bytes.
Dataset load_csv(const std::filesystem::path& path,
                 const std::string& target_column, char delimiter = ',',
                 int* dropped_rows = nullptr);

// Deterministic shuffle split. Standardization statistics come from the
// train part only and apply to both.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed,
                                  bool standardize_features,
                                  bool standardize_targets = true);

// In-place standardization for fits without a held-out split.
Dataset standardize(const Dataset& data, bool features, bool targets);

// Versioned JSON + binary-matrix container ("<stem>.json" + "<stem>.bin").
void save_dataset(const Dataset& data, const std::filesystem::path& json_path);
Dataset load_dataset(const std::filesystem::path& json_path);

// FNV-1a 64-bit, the content hash used for provenance and config hashes.
std::uint64_t fnv1a_hash(const void* bytes, std::size_t len);
std::string fnv1a_hex(const std::string& content);

double schwefel_constant();  // the 418.9829 offset, exposed for tests

}  // namespace gpland
