#include "bkm/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bkm/rng.hpp"

namespace bkm {

namespace {

void check_gen_params(const GenParams& params) {
  if (!(params.d_min >= 0.0) || !(params.d_min < params.d_max))
    throw std::invalid_argument("generate_task: need 0 <= d_min < d_max");
  if (params.k < 1 || params.n_per_cluster < 1 || params.dim < 1)
    throw std::invalid_argument("generate_task: k, n_per_cluster, dim must be >= 1");
  if (params.k * params.n_per_cluster < 2)
    throw std::invalid_argument("generate_task: need at least 2 points");
}

Eigen::MatrixXd draw_centers(const GenParams& params, Rng& rng) {
  Eigen::MatrixXd centers(params.k, params.dim);
  if (params.k == 1) {
    for (int d = 0; d < params.dim; ++d) {
      centers(0, d) = rng.uniform(-params.d_max, params.d_max);
    }
    return centers;
  }
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    for (int c = 0; c < params.k; ++c) {
      for (int d = 0; d < params.dim; ++d) {
        centers(c, d) = rng.uniform(-params.d_max, params.d_max);
      }
    }
    bool accepted = true;
    for (int a = 0; a < params.k && accepted; ++a) {
      for (int b = a + 1; b < params.k; ++b) {
        const double dist = (centers.row(a) - centers.row(b)).norm();
        if (dist < params.d_min || dist > params.d_max) {
          accepted = false;
          break;
        }
      }
    }
    if (accepted) return centers;
  }
  throw generation_error(
      "generate_task: no center layout found for k=" + std::to_string(params.k) +
      " dim=" + std::to_string(params.dim) + " band=[" +
      std::to_string(params.d_min) + ", " + std::to_string(params.d_max) +
      "] after 100000 attempts");
}

}  // namespace

Eigen::MatrixXd generate_centers(const GenParams& params) {
  check_gen_params(params);
  Rng rng(params.seed);
  return draw_centers(params, rng);
}

ClusteringTask generate_task(const GenParams& params) {
  check_gen_params(params);
  Rng rng(params.seed);
  const Eigen::MatrixXd centers = draw_centers(params, rng);

  const int n_points = params.k * params.n_per_cluster;
  ClusteringTask t;
  t.points.resize(n_points, params.dim);
  t.k = params.k;
  t.sizes.assign(params.k, params.n_per_cluster);
  t.seed = params.seed;
  t.task_id = params.task_id;
  std::vector<int> gt(n_points);
  int row = 0;
  for (int c = 0; c < params.k; ++c) {
    for (int i = 0; i < params.n_per_cluster; ++i, ++row) {
      for (int d = 0; d < params.dim; ++d) {
        t.points(row, d) = centers(c, d) + rng.normal();
      }
      gt[row] = c;
    }
  }
  t.ground_truth = std::move(gt);
  t.validate();
  return t;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // Trim surrounding whitespace.
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos
                        ? std::string()
                        : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_double(const std::string& cell, int row, const std::string& col) {
  double value = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw csv_error("csv: row " + std::to_string(row) + ", column '" + col +
                    "': cannot parse '" + cell + "' as a number");
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path,
                 const std::vector<std::string>& feature_columns,
                 const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw csv_error("csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw csv_error("csv: empty file " + path.string());
  const std::vector<std::string> header = split_csv_line(line);

  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw csv_error("csv: missing column '" + name + "' in " + path.string());
    return static_cast<int>(it - header.begin());
  };
  std::vector<int> feature_idx;
  for (const auto& name : feature_columns) feature_idx.push_back(column_index(name));
  const int label_idx = label_column ? column_index(*label_column) : -1;

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < header.size())
      throw csv_error("csv: row " + std::to_string(row_number) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    std::vector<double> values;
    values.reserve(feature_idx.size());
    for (std::size_t f = 0; f < feature_idx.size(); ++f) {
      values.push_back(
          parse_double(cells[feature_idx[f]], row_number, feature_columns[f]));
    }
    rows.push_back(std::move(values));
    if (label_idx >= 0) raw_labels.push_back(cells[label_idx]);
  }

  Dataset data;
  data.feature_names = feature_columns;
  data.points.resize(static_cast<int>(rows.size()),
                     static_cast<int>(feature_columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      data.points(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
  }
  if (label_idx >= 0) {
    const std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
    data.label_names.assign(distinct.begin(), distinct.end());
    std::map<std::string, int> to_index;
    for (std::size_t i = 0; i < data.label_names.size(); ++i) {
      to_index[data.label_names[i]] = static_cast<int>(i);
    }
    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (const auto& raw : raw_labels) labels.push_back(to_index[raw]);
    data.labels = std::move(labels);
  }
  return data;
}

ClusteringTask subsample_balanced(const Dataset& data, int k, int n_per_cluster,
                                  int dims, std::uint64_t seed) {
  if (!data.labels)
    throw std::invalid_argument("subsample_balanced: dataset has no labels");
  if (dims > data.points.cols())
    throw std::invalid_argument("subsample_balanced: not enough features");
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < data.labels->size(); ++i) {
    by_class[(*data.labels)[i]].push_back(static_cast<int>(i));
  }
  if (static_cast<int>(by_class.size()) < k)
    throw std::invalid_argument("subsample_balanced: dataset has fewer than k classes");

  Rng rng(seed);
  // Feature subset, sorted for stable column order.
  std::vector<int> feats =
      rng.sample_without_replacement(static_cast<int>(data.points.cols()), dims);
  std::sort(feats.begin(), feats.end());

  ClusteringTask t;
  t.k = k;
  t.sizes.assign(k, n_per_cluster);
  t.seed = seed;
  t.points.resize(k * n_per_cluster, dims);
  std::vector<int> gt(k * n_per_cluster);
  auto it = by_class.begin();
  int row = 0;
  for (int c = 0; c < k; ++c, ++it) {
    const auto& members = it->second;
    if (static_cast<int>(members.size()) < n_per_cluster)
      throw std::invalid_argument("subsample_balanced: class " +
                                  std::to_string(it->first) + " has only " +
                                  std::to_string(members.size()) + " members");
    const std::vector<int> picks = rng.sample_without_replacement(
        static_cast<int>(members.size()), n_per_cluster);
    for (int p : picks) {
      for (int d = 0; d < dims; ++d) {
        t.points(row, d) = data.points(members[p], feats[d]);
      }
      gt[row] = c;
      ++row;
    }
  }
  t.ground_truth = std::move(gt);
  t.validate();
  return t;
}

nlohmann::ordered_json task_to_json(const ClusteringTask& t) {
  nlohmann::ordered_json j;
  j["task_id"] = t.task_id;
  j["seed"] = t.seed;
  j["k"] = t.k;
  j["sizes"] = t.sizes;
  auto points = nlohmann::ordered_json::array();
  for (int i = 0; i < t.num_points(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int d = 0; d < t.dim(); ++d) row.push_back(t.points(i, d));
    points.push_back(std::move(row));
  }
  j["points"] = std::move(points);
  if (t.ground_truth) j["ground_truth"] = *t.ground_truth;
  return j;
}

ClusteringTask task_from_json(const nlohmann::json& j) {
  ClusteringTask t;
  t.task_id = j.at("task_id").get<std::string>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.k = j.at("k").get<int>();
  t.sizes = j.at("sizes").get<std::vector<int>>();
  const auto& points = j.at("points");
  const int n_points = static_cast<int>(points.size());
  const int dim = n_points > 0 ? static_cast<int>(points[0].size()) : 0;
  t.points.resize(n_points, dim);
  for (int i = 0; i < n_points; ++i) {
    if (static_cast<int>(points[i].size()) != dim)
      throw std::invalid_argument("task_from_json: ragged point rows");
    for (int d = 0; d < dim; ++d) t.points(i, d) = points[i][d].get<double>();
  }
  if (j.contains("ground_truth"))
    t.ground_truth = j.at("ground_truth").get<std::vector<int>>();
  t.validate();
  return t;
}

void save_task(const ClusteringTask& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_task: cannot write " + path.string());
  out << task_to_json(t).dump(2) << "\n";
}

ClusteringTask load_task(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_task: cannot read " + path.string());
  nlohmann::json j;
  in >> j;
  return task_from_json(j);
}

}  // namespace bkm
