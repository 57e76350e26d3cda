/**
 * @file similarity.cpp
 * @brief DTW, average linkage, silhouette, distance correlation.
 */
#include "diurnal/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "diurnal/error.hpp"
#include "diurnal/parallel.hpp"
#include "diurnal/text_io.hpp"

namespace diurnal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kPermutationBatch = 64;

enum class Move : unsigned char { Start, Diagonal, FromAbove, FromLeft };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Double-centred distance matrix, row-major.
std::vector<double> centred_distances(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = std::abs(v[i] - v[j]);
    }
  }
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row_mean[i] += a[i * n + j];
    }
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  // a is symmetric, so column means equal row means
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = a[i * n + j] - row_mean[i] - row_mean[j] + grand;
    }
  }
  return a;
}

double mean_product(const std::vector<double>& a, const std::vector<double>& b, std::size_t n,
                    const std::vector<std::size_t>* perm = nullptr) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pi = perm ? (*perm)[i] : i;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t pj = perm ? (*perm)[j] : j;
      sum += a[i * n + j] * b[pi * n + pj];
    }
  }
  return sum / static_cast<double>(n * n);
}

double dcor_from(double dcov2, double dvar2x, double dvar2y) {
  const double denom = std::sqrt(dvar2x * dvar2y);
  if (!(dvar2x > 0.0) || !(dvar2y > 0.0) || !(denom > 0.0)) {
    return 0.0;
  }
  return std::clamp(std::sqrt(std::max(dcov2, 0.0) / denom), 0.0, 1.0);
}

}  // namespace

void DtwConfig::validate() const {
  require(wh >= 0.0 && wv >= 0.0 && wd >= 0.0 && std::isfinite(wh) && std::isfinite(wv) && std::isfinite(wd),
          "DTW weights must be finite and nonnegative");
  require(wh > 0.0 || wv > 0.0 || wd > 0.0, "at least one DTW weight must be positive");
  require(lambda >= 0.0 && std::isfinite(lambda), "DTW lambda must be finite and nonnegative");
}

DtwResult dtw_distance(std::span<const double> x, std::span<const double> y, const DtwConfig& cfg) {
  cfg.validate();
  require(!x.empty() && !y.empty(), "dtw_distance: empty sequence");
  for (const double v : x) require(std::isfinite(v), "dtw_distance: non-finite value in x");
  for (const double v : y) require(std::isfinite(v), "dtw_distance: non-finite value in y");

  const std::size_t n = x.size();
  const std::size_t m = y.size();
  const std::size_t cols = m + 1;
  std::vector<double> acc((n + 1) * cols, kInf);
  std::vector<Move> from((n + 1) * cols, Move::Start);
  const auto idx = [cols](std::size_t i, std::size_t j) { return i * cols + j; };
  const auto local = [&](std::size_t i, std::size_t j) {
    const double diff = x[i - 1] - y[j - 1];
    return cfg.pointwise == PointwiseDistance::Absolute ? std::abs(diff) : diff * diff;
  };

  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const double c = local(i, j);
      const double gap = cfg.lambda * static_cast<double>(i > j ? i - j : j - i);
      if (i == 1 && j == 1) {
        acc[idx(1, 1)] = c + gap;
        continue;
      }
      double best = acc[idx(i - 1, j - 1)] + cfg.wd * c;
      Move move = Move::Diagonal;
      const double above = acc[idx(i - 1, j)] + cfg.wh * c;
      if (above < best) {
        best = above;
        move = Move::FromAbove;
      }
      const double left = acc[idx(i, j - 1)] + cfg.wv * c;
      if (left < best) {
        best = left;
        move = Move::FromLeft;
      }
      acc[idx(i, j)] = best + gap;
      from[idx(i, j)] = move;
    }
  }

  DtwResult result;
  result.cost = acc[idx(n, m)];
  std::size_t i = n;
  std::size_t j = m;
  for (;;) {
    result.path.push_back({i, j});
    const Move move = from[idx(i, j)];
    if (move == Move::Start) {
      break;
    }
    if (move != Move::FromLeft) --i;
    if (move != Move::FromAbove) --j;
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

void DistanceMatrix::validate() const {
  const std::size_t n = size();
  require(d.size() == n * n, "distance matrix shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    require(at(i, i) == 0.0, "distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      require(std::isfinite(at(i, j)) && at(i, j) >= 0.0, "distance matrix entries must be finite and nonnegative");
      require(at(i, j) == at(j, i), "distance matrix must be symmetric");
    }
  }
  require(std::set<std::string>(labels.begin(), labels.end()).size() == n, "distance matrix labels must be unique");
}

DistanceMatrix pairwise_dtw(std::span<const Feature> features, const DtwConfig& cfg, unsigned threads) {
  require(features.size() >= 2, "pairwise_dtw needs at least 2 features");
  cfg.validate();
  const std::size_t n = features.size();
  DistanceMatrix out;
  for (const auto& f : features) {
    out.labels.push_back(f.label);
  }
  out.d.assign(n * n, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pairs.emplace_back(i, j);
    }
  }
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const double forward = dtw_distance(features[i].values, features[j].values, cfg).cost;
    const double backward = dtw_distance(features[j].values, features[i].values, cfg).cost;
    const double v = (forward + backward) / 2.0;
    out.d[i * n + j] = v;
    out.d[j * n + i] = v;
  });
  out.validate();
  return out;
}

void write_matrix(std::ostream& out, const std::vector<std::string>& labels, std::span<const double> values) {
  const std::size_t n = labels.size();
  require(values.size() == n * n, "write_matrix: shape mismatch");
  out << "station_id";
  for (const auto& l : labels) {
    out << ',' << io::csv_field(l);
  }
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << io::csv_field(labels[i]);
    for (std::size_t j = 0; j < n; ++j) {
      out << ',' << io::format_double(values[i * n + j]);
    }
    out << '\n';
  }
}

DistanceMatrix parse_distance_matrix(std::istream& in) {
  DistanceMatrix m;
  std::string line;
  std::size_t line_no = 0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) {
      continue;
    }
    const auto f = io::split_csv(line);
    if (m.labels.empty()) {
      if (f.size() < 2) {
        fail(ErrorKind::Parse, "matrix header needs at least one label", line_no);
      }
      for (std::size_t i = 1; i < f.size(); ++i) {
        m.labels.emplace_back(io::trim(f[i]));
      }
      m.d.assign(m.labels.size() * m.labels.size(), 0.0);
      continue;
    }
    if (row >= m.labels.size() || f.size() != m.labels.size() + 1 || io::trim(f[0]) != m.labels[row]) {
      fail(ErrorKind::Parse, "matrix line " + std::to_string(line_no) + ": row does not match header", line_no);
    }
    for (std::size_t j = 1; j < f.size(); ++j) {
      const auto v = io::parse_double(f[j]);
      if (!v) {
        fail(ErrorKind::Parse, "matrix line " + std::to_string(line_no) + ": malformed entry", line_no);
      }
      m.d[row * m.labels.size() + j - 1] = *v;
    }
    ++row;
  }
  if (m.labels.empty() || row != m.labels.size()) {
    fail(ErrorKind::Parse, "matrix is not square");
  }
  m.validate();
  return m;
}

ClusterReport agglomerative_cluster(const DistanceMatrix& matrix, std::size_t k) {
  matrix.validate();
  const std::size_t n = matrix.size();
  require(k >= 1 && k <= n, "cluster count k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");

  // canonical order: position p holds the p-th smallest label
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return matrix.labels[a] < matrix.labels[b]; });
  const auto dist = [&](std::size_t p, std::size_t q) { return matrix.at(order[p], order[q]); };

  struct Cluster {
    std::size_t id;
    std::vector<std::size_t> members;  // canonical positions, ascending
  };
  std::vector<Cluster> clusters;  // kept sorted by first member
  for (std::size_t p = 0; p < n; ++p) {
    clusters.push_back({p, {p}});
  }

  ClusterReport report;
  report.k = k;
  for (const auto o : order) {
    report.leaf_order.push_back(matrix.labels[o]);
  }
  std::size_t next_id = n;
  while (clusters.size() > k) {
    std::size_t best_a = 0;
    std::size_t best_b = 1;
    double best = kInf;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double sum = 0.0;
        for (const auto p : clusters[a].members) {
          for (const auto q : clusters[b].members) {
            sum += dist(p, q);
          }
        }
        const double avg =
            sum / static_cast<double>(clusters[a].members.size() * clusters[b].members.size());
        if (avg < best) {
          best = avg;
          best_a = a;
          best_b = b;
        }
      }
    }
    report.merges.push_back({clusters[best_a].id, clusters[best_b].id, best});
    auto& merged = clusters[best_a];
    merged.members.insert(merged.members.end(), clusters[best_b].members.begin(), clusters[best_b].members.end());
    std::sort(merged.members.begin(), merged.members.end());
    merged.id = next_id++;
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
  }

  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (const auto p : clusters[c].members) {
      report.assignment[matrix.labels[order[p]]] = static_cast<int>(c + 1);
    }
  }
  return report;
}

SilhouetteResult silhouette(const DistanceMatrix& matrix, const std::map<std::string, int>& assignment) {
  matrix.validate();
  const std::size_t n = matrix.size();
  std::vector<int> cluster_of(n);
  std::map<int, std::size_t> sizes;
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = assignment.find(matrix.labels[i]);
    require(it != assignment.end(), "silhouette: label " + matrix.labels[i] + " has no cluster");
    cluster_of[i] = it->second;
    ++sizes[it->second];
  }
  require(assignment.size() == n, "silhouette: assignment names labels absent from the matrix");
  if (sizes.size() < 2) {
    fail(ErrorKind::Degenerate, "silhouette undefined for a single cluster");
  }

  SilhouetteResult result;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    if (sizes[cluster_of[i]] > 1) {
      std::map<int, double> sums;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) {
          sums[cluster_of[j]] += matrix.at(i, j);
        }
      }
      const double a = sums[cluster_of[i]] / static_cast<double>(sizes[cluster_of[i]] - 1);
      double b = kInf;
      for (const auto& [c, sum] : sums) {
        if (c != cluster_of[i]) {
          b = std::min(b, sum / static_cast<double>(sizes[c]));
        }
      }
      const double denom = std::max(a, b);
      s = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    result.per_label[matrix.labels[i]] = s;
    total += s;
  }
  result.mean = total / static_cast<double>(n);
  return result;
}

ClusterReport cluster_and_validate(const DistanceMatrix& matrix, std::size_t k) {
  ClusterReport report = agglomerative_cluster(matrix, k);
  if (k >= 2) {
    const SilhouetteResult s = silhouette(matrix, report.assignment);
    report.silhouettes = s.per_label;
    report.mean_silhouette = s.mean;
  }
  return report;
}

DcorResult dcor(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "dcor: sequences differ in length");
  require(x.size() >= 2, "dcor needs at least 2 observations");
  for (const double v : x) require(std::isfinite(v), "dcor: non-finite value in x");
  for (const double v : y) require(std::isfinite(v), "dcor: non-finite value in y");
  const std::size_t n = x.size();
  const auto a = centred_distances(x);
  const auto b = centred_distances(y);
  const double dcov2 = mean_product(a, b, n);
  DcorResult r;
  r.dcov = std::sqrt(std::max(dcov2, 0.0));
  r.dcor = dcor_from(dcov2, mean_product(a, a, n), mean_product(b, b, n));
  return r;
}

DcorResult dcor_permutation_test(std::span<const double> x, std::span<const double> y, std::size_t n_perm,
                                 std::uint64_t seed, unsigned threads) {
  require(n_perm >= 99, "dcor permutation test needs at least 99 permutations");
  DcorResult r = dcor(x, y);
  const std::size_t n = x.size();
  const auto a = centred_distances(x);
  const auto b = centred_distances(y);
  const double vx = mean_product(a, a, n);
  const double vy = mean_product(b, b, n);
  const double observed = dcor_from(mean_product(a, b, n), vx, vy);

  const std::size_t batches = (n_perm + kPermutationBatch - 1) / kPermutationBatch;
  std::vector<std::size_t> exceed(batches, 0);
  parallel_for(batches, threads, [&](std::size_t batch) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(batch + 1)));
    std::vector<std::size_t> perm(n);
    const std::size_t begin = batch * kPermutationBatch;
    const std::size_t end = std::min(n_perm, begin + kPermutationBatch);
    for (std::size_t p = begin; p < end; ++p) {
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      if (dcor_from(mean_product(a, b, n, &perm), vx, vy) >= observed) {
        ++exceed[batch];
      }
    }
  });
  const std::size_t count = std::accumulate(exceed.begin(), exceed.end(), std::size_t{0});
  r.p_value = static_cast<double>(1 + count) / static_cast<double>(n_perm + 1);
  r.n_permutations = n_perm;
  r.seed = seed;
  return r;
}

}  // namespace diurnal
