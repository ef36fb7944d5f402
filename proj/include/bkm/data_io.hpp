#pragma once
// Synthetic task generation, CSV dataset loading with balanced subsampling,
// and task persistence.
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bkm/task.hpp"

namespace bkm {

struct generation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct csv_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenParams {
  int k = 3;
  int n_per_cluster = 5;
  int dim = 2;
  double d_min = 2.0;
  double d_max = 6.0;
  std::uint64_t seed = 0;
  std::string task_id;
};

/// Cluster centers drawn uniformly in a box of side 2 * d_max and rejected
/// until every pairwise center distance lies in [d_min, d_max] (at most 1e5
/// attempts); n_per_cluster unit-covariance Gaussian points per center.
/// Deterministic in the seed. Throws generation_error when the rejection
/// budget runs out.
ClusteringTask generate_task(const GenParams& params);

/// The center layout generate_task(params) builds its points from (the
/// rejection loop is replayed on the same stream).
Eigen::MatrixXd generate_centers(const GenParams& params);

struct Dataset {
  Eigen::MatrixXd points;
  std::optional<std::vector<int>> labels;
  std::vector<std::string> label_names;  // index = label value
  std::vector<std::string> feature_names;
};

/// Columns are referenced by header name. Label values may be strings; they
/// are mapped to integers by sorted order of the distinct values. Throws
/// csv_error with the offending row and column on malformed input.
Dataset load_csv(const std::filesystem::path& path,
                 const std::vector<std::string>& feature_columns,
                 const std::optional<std::string>& label_column = std::nullopt);

/// Balanced subsample: n_per_cluster points drawn per class from the first k
/// classes (by label value), over a random feature subset of size dims.
ClusteringTask subsample_balanced(const Dataset& data, int k, int n_per_cluster,
                                  int dims, std::uint64_t seed);

nlohmann::ordered_json task_to_json(const ClusteringTask& t);
ClusteringTask task_from_json(const nlohmann::json& j);

void save_task(const ClusteringTask& t, const std::filesystem::path& path);
ClusteringTask load_task(const std::filesystem::path& path);

}  // namespace bkm
