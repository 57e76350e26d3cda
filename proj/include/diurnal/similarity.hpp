/**
 * @file similarity.hpp
 * @brief Pattern similarity between diurnal curves: weighted regularized DTW, average-linkage
 *        clustering, silhouette validation and distance correlation.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace diurnal {

enum class PointwiseDistance { Absolute, Squared };

/// Move weights multiply the pointwise cost of the cell being entered.
struct DtwConfig {
  double wh{1.0};  ///< step from (i-1, j)
  double wv{1.0};  ///< step from (i, j-1)
  double wd{2.0};  ///< step from (i-1, j-1)
  double lambda{0.0};
  PointwiseDistance pointwise{PointwiseDistance::Absolute};

  void validate() const;
};

struct WarpStep {
  std::size_t i{};  ///< 1-based index into x
  std::size_t j{};  ///< 1-based index into y
  friend bool operator==(const WarpStep&, const WarpStep&) = default;
};

struct DtwResult {
  double cost{};
  std::vector<WarpStep> path;  ///< (1,1) ... (n,m)
};

/**
 * @brief Weighted DTW with an index-gap penalty.
 *
 * D(1,1) = c(1,1); D(i,j) = min{D(i-1,j-1) + wd c, D(i-1,j) + wh c, D(i,j-1) + wv c} + lambda |i-j|,
 * with c = d(x_i, y_j) and infinite borders. Ties in the backtrack prefer diagonal, then (i-1, j).
 */
DtwResult dtw_distance(std::span<const double> x, std::span<const double> y, const DtwConfig& cfg);

/// Symmetric, zero-diagonal matrix over labelled items.
struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<double> d;  ///< row-major n x n

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return d.at(i * size() + j); }
  void validate() const;
};

struct Feature {
  std::string label;
  std::vector<double> values;
};

/// d[i][j] = (dtw(x_i, x_j) + dtw(x_j, x_i)) / 2. Pairs are spread over `threads` workers.
DistanceMatrix pairwise_dtw(std::span<const Feature> features, const DtwConfig& cfg, unsigned threads = 1);

/// Square CSV with a header row and a leading label column.
void write_matrix(std::ostream& out, const std::vector<std::string>& labels, std::span<const double> values);
DistanceMatrix parse_distance_matrix(std::istream& in);

struct Merge {
  std::size_t cluster_a{};  ///< leaves are 0..n-1 in label order; merge s creates n+s
  std::size_t cluster_b{};
  double height{};
};

struct ClusterReport {
  std::size_t k{};
  std::map<std::string, int> assignment;  ///< label -> cluster id in 1..k
  std::vector<std::string> leaf_order;    ///< labels in leaf-id order
  std::vector<Merge> merges;
  std::map<std::string, double> silhouettes;
  std::optional<double> mean_silhouette;  ///< empty when k = 1
};

/**
 * @brief Average-linkage agglomeration down to k clusters.
 *
 * Works on labels in sorted order, so input order never changes the result. Ties go to the
 * lexicographically smallest pair of label-sorted member lists. Cluster ids 1..k follow each
 * cluster's smallest label. Silhouettes are left empty.
 */
ClusterReport agglomerative_cluster(const DistanceMatrix& matrix, std::size_t k);

struct SilhouetteResult {
  std::map<std::string, double> per_label;
  double mean{};
};

/// S(i) = (b - a) / max(a, b), 0 for singletons or a = b = 0. Degenerate error with one cluster.
SilhouetteResult silhouette(const DistanceMatrix& matrix, const std::map<std::string, int>& assignment);

/// agglomerative_cluster plus silhouette when k >= 2.
ClusterReport cluster_and_validate(const DistanceMatrix& matrix, std::size_t k);

struct DcorResult {
  double dcor{};
  double dcov{};
  std::optional<double> p_value;
  std::size_t n_permutations{};
  std::uint64_t seed{};
};

/// Sample distance correlation (V-statistic). dcor = 0 when either distance variance is 0.
DcorResult dcor(std::span<const double> x, std::span<const double> y);

/**
 * @brief Permutation test of dcor. p = (1 + #{dcor(x, y o pi) >= dcor(x, y)}) / (n_perm + 1).
 *
 * Permutations run in fixed-size batches whose seeds derive from `seed`, so p does not depend
 * on `threads`.
 */
DcorResult dcor_permutation_test(std::span<const double> x, std::span<const double> y, std::size_t n_perm,
                                 std::uint64_t seed, unsigned threads = 1);

}  // namespace diurnal
