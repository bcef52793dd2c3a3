#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mope/features.hpp"

namespace mope::clustering {

/// Row-major dense matrix of points.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows * cols) {}

  template <std::size_t N>
  static Matrix from_rows(std::span<const std::array<double, N>> rows) {
    Matrix m(rows.size(), N);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return cols_ ? data_.size() / cols_ : 0; }
  std::size_t cols() const { return cols_; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

/// k centers in standardized feature space plus the standardizer that
/// produced that space.
struct ClusterModel {
  std::size_t k = 0;
  Matrix centers;
  features::Standardizer standardizer;
  std::vector<std::size_t> sizes;    // training rows per cluster
  std::vector<std::uint32_t> labels;  // per training row; may be empty

  std::size_t nearest(std::span<const double> point) const;
};

struct KMeansOptions {
  std::uint64_t seed = 1;
  std::size_t max_iter = 300;
  double tolerance = 1e-6;  // max center displacement at convergence
};

struct KMeansResult {
  ClusterModel model;
  std::vector<double> objective;  // within-cluster sum of squares per assignment step
  std::size_t iterations = 0;
  std::size_t empty_repairs = 0;
};

/// Lloyd iterations seeded from k distinct rows drawn at random. A cluster
/// that empties is re-seeded at the row farthest from its assigned center.
/// Throws InvalidArgument when k < 2 or k exceeds the number of distinct rows.
KMeansResult kmeans(const Matrix& rows, std::size_t k, const KMeansOptions& opt = {});

struct SilhouetteOptions {
  std::optional<std::size_t> sample_cap;
  std::uint64_t seed = 1;
};

/// Mean silhouette. Points in singleton clusters score 0, as do points with
/// a(i) = b(i) = 0. With a sample cap, the mean runs over a seeded uniform
/// subset of rows while distances still cover the whole matrix.
double silhouette(const Matrix& rows, std::span<const std::uint32_t> labels,
                  const SilhouetteOptions& opt = {});

struct KRange {
  std::size_t min = 2;
  std::size_t max = 2;
  std::size_t step = 1;

  std::vector<std::size_t> values() const;
};

struct KSelectionReport {
  std::vector<std::size_t> ks;   // evaluated, ascending
  std::vector<double> scores;    // S(k) for each evaluated k
  std::size_t chosen = 0;
  double threshold = 0.0;
  bool threshold_met = false;
};

/// Smallest k whose score exceeds the threshold, scanning ascending and
/// stopping at the first hit. Falls back to the argmax with
/// threshold_met = false. `score` is called once per evaluated k.
KSelectionReport select_k(std::span<const std::size_t> ks, double threshold,
                          const std::function<double(std::size_t)>& score);

struct SelectKOptions {
  KRange range;
  double threshold = 0.7;
  std::uint64_t seed = 1;
  std::size_t max_iter = 300;
  std::optional<std::size_t> silhouette_cap = 2000;
};

struct Selection {
  KSelectionReport report;
  KMeansResult fit;  // clustering at the chosen k
};

/// Runs kmeans + silhouette per k. Throws InvalidArgument for a range
/// outside [2, distinct rows].
Selection select_k(const Matrix& rows, const SelectKOptions& opt);

std::size_t count_distinct_rows(const Matrix& rows);

/// Standardize, select k, and attach the standardizer to the result.
Selection cluster_passwords(std::span<const std::string> passwords, const SelectKOptions& opt);

}  // namespace mope::clustering
