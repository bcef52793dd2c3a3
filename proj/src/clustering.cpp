#include "mope/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mope/error.hpp"

namespace mope::clustering {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw InvalidArgument("ragged matrix");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

std::size_t ClusterModel::nearest(std::span<const double> point) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    const double d = squared_distance(point, centers.row(j));
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

namespace {

std::vector<std::size_t> distinct_row_indices(const Matrix& rows) {
  std::vector<std::size_t> idx(rows.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    const auto ra = rows.row(a), rb = rows.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::stable_sort(idx.begin(), idx.end(), less);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i == 0 || less(idx[i - 1], idx[i])) out.push_back(idx[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Returns the within-cluster sum of squares.
double assign(const Matrix& rows, const Matrix& centers, std::vector<std::uint32_t>& labels,
              std::vector<double>& dist2) {
  double objective = 0.0;
  const std::size_t k = centers.rows();
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    std::uint32_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double d = squared_distance(rows.row(i), centers.row(j));
      if (d < best_d) {
        best_d = d;
        best = static_cast<std::uint32_t>(j);
      }
    }
    labels[i] = best;
    dist2[i] = best_d;
    objective += best_d;
  }
  return objective;
}

// Centers become the means of their rows. Returns the number of empty
// clusters that had to be re-seeded.
std::size_t update(const Matrix& rows, Matrix& centers, std::vector<std::uint32_t>& labels,
                   std::vector<double>& dist2, std::vector<std::size_t>& sizes) {
  const std::size_t k = centers.rows();
  const std::size_t dims = rows.cols();
  std::size_t repairs = 0;
  for (;;) {
    Matrix sums(k, dims);
    sizes.assign(k, 0);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      auto s = sums.row(labels[i]);
      const auto r = rows.row(i);
      for (std::size_t d = 0; d < dims; ++d) s[d] += r[d];
      ++sizes[labels[i]];
    }
    const auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
    if (empty == sizes.end()) {
      for (std::size_t j = 0; j < k; ++j) {
        auto c = centers.row(j);
        const auto s = sums.row(j);
        for (std::size_t d = 0; d < dims; ++d) c[d] = s[d] / static_cast<double>(sizes[j]);
      }
      return repairs;
    }
    // Move the worst-fit row into the empty cluster and recount.
    const std::size_t j = static_cast<std::size_t>(empty - sizes.begin());
    std::size_t far = rows.rows();
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      if (sizes[labels[i]] > 1 && (far == rows.rows() || dist2[i] > dist2[far])) far = i;
    }
    std::copy(rows.row(far).begin(), rows.row(far).end(), centers.row(j).begin());
    labels[far] = static_cast<std::uint32_t>(j);
    dist2[far] = 0.0;
    ++repairs;
  }
}

}  // namespace

std::size_t count_distinct_rows(const Matrix& rows) { return distinct_row_indices(rows).size(); }

KMeansResult kmeans(const Matrix& rows, std::size_t k, const KMeansOptions& opt) {
  if (k < 2) throw InvalidArgument("kmeans requires k >= 2");
  auto distinct = distinct_row_indices(rows);
  if (k > distinct.size()) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(distinct.size()) + " distinct rows");
  }

  std::mt19937_64 rng(opt.seed);
  std::shuffle(distinct.begin(), distinct.end(), rng);

  KMeansResult res;
  Matrix centers(k, rows.cols());
  for (std::size_t j = 0; j < k; ++j) {
    std::copy(rows.row(distinct[j]).begin(), rows.row(distinct[j]).end(), centers.row(j).begin());
  }

  std::vector<std::uint32_t> labels(rows.rows());
  std::vector<double> dist2(rows.rows());
  std::vector<std::size_t> sizes;
  res.objective.push_back(assign(rows, centers, labels, dist2));

  for (res.iterations = 0; res.iterations < opt.max_iter;) {
    ++res.iterations;
    const Matrix previous = centers;
    res.empty_repairs += update(rows, centers, labels, dist2, sizes);

    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      shift = std::max(shift, distance(previous.row(j), centers.row(j)));
    }
    std::vector<std::uint32_t> next(labels.size());
    res.objective.push_back(assign(rows, centers, next, dist2));
    const bool stable = next == labels;
    labels = std::move(next);
    if (stable) break;
    if (shift < opt.tolerance) {
      res.empty_repairs += update(rows, centers, labels, dist2, sizes);
      break;
    }
  }

  res.model.k = k;
  res.model.centers = std::move(centers);
  res.model.sizes.assign(k, 0);
  for (auto l : labels) ++res.model.sizes[l];
  res.model.labels = std::move(labels);
  return res;
}

double silhouette(const Matrix& rows, std::span<const std::uint32_t> labels,
                  const SilhouetteOptions& opt) {
  const std::size_t n = rows.rows();
  if (labels.size() != n) throw InvalidArgument("label count does not match row count");
  std::size_t k = 0;
  for (auto l : labels) k = std::max<std::size_t>(k, l + 1);
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) ++sizes[l];
  if (k < 2) throw InvalidArgument("silhouette needs at least two clusters");
  if (std::find(sizes.begin(), sizes.end(), std::size_t{0}) != sizes.end()) {
    throw InvalidArgument("silhouette got an empty cluster");
  }

  std::vector<std::size_t> points(n);
  std::iota(points.begin(), points.end(), std::size_t{0});
  if (opt.sample_cap && n > *opt.sample_cap) {
    std::mt19937_64 rng(opt.seed);
    std::shuffle(points.begin(), points.end(), rng);
    points.resize(*opt.sample_cap);
    std::sort(points.begin(), points.end());
  }

  std::vector<double> sums(k);
  double total = 0.0;
  for (auto i : points) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t o = 0; o < n; ++o) {
      if (o != i) sums[labels[o]] += distance(rows.row(i), rows.row(o));
    }
    const auto own = labels[i];
    if (sizes[own] == 1) continue;  // singleton: s(i) = 0
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(points.size());
}

std::vector<std::size_t> KRange::values() const {
  if (step == 0 || min > max) throw InvalidArgument("invalid k range");
  std::vector<std::size_t> out;
  for (std::size_t k = min; k <= max; k += step) out.push_back(k);
  return out;
}

KSelectionReport select_k(std::span<const std::size_t> ks, double threshold,
                          const std::function<double(std::size_t)>& score) {
  if (ks.empty()) throw InvalidArgument("empty k range");
  KSelectionReport rep;
  rep.threshold = threshold;
  for (auto k : ks) {
    const double s = score(k);
    rep.ks.push_back(k);
    rep.scores.push_back(s);
    if (s > threshold) {
      rep.chosen = k;
      rep.threshold_met = true;
      return rep;
    }
  }
  const auto best = std::max_element(rep.scores.begin(), rep.scores.end());
  rep.chosen = rep.ks[static_cast<std::size_t>(best - rep.scores.begin())];
  return rep;
}

Selection select_k(const Matrix& rows, const SelectKOptions& opt) {
  const auto ks = opt.range.values();
  const std::size_t distinct = count_distinct_rows(rows);
  if (ks.front() < 2 || ks.back() > distinct) {
    throw InvalidArgument("k range must lie within [2, " + std::to_string(distinct) + "]");
  }
  std::vector<KMeansResult> fits;
  KMeansOptions km{opt.seed, opt.max_iter, 1e-6};
  SilhouetteOptions so{opt.silhouette_cap, opt.seed};
  auto report = select_k(ks, opt.threshold, [&](std::size_t k) {
    fits.push_back(kmeans(rows, k, km));
    return silhouette(rows, fits.back().model.labels, so);
  });
  const auto at = std::find(report.ks.begin(), report.ks.end(), report.chosen) - report.ks.begin();
  return {std::move(report), std::move(fits[static_cast<std::size_t>(at)])};
}

Selection cluster_passwords(std::span<const std::string> passwords, const SelectKOptions& opt) {
  const auto raw = features::extract_all(passwords);
  const auto standardizer = features::fit_standardizer(raw);
  Matrix rows(raw.size(), features::kDims);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto z = standardizer.apply(raw[i]);
    std::copy(z.begin(), z.end(), rows.row(i).begin());
  }
  auto sel = select_k(rows, opt);
  sel.fit.model.standardizer = standardizer;
  return sel;
}

}  // namespace mope::clustering
