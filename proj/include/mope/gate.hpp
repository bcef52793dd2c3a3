#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mope/clustering.hpp"

namespace mope::gate {

struct SparseWeights {
  std::vector<double> weights;      // length k; inactive entries are exactly 0
  std::vector<std::size_t> active;  // ascending indices with weight > 0
};

struct GateConfig {
  double beta = 10.0;
  std::shared_ptr<const clustering::ClusterModel> clusters;

  /// 1 / (k * beta).
  double threshold() const;
  void validate() const;
};

inline constexpr double kOfflineBeta = 10.0;
inline constexpr double kOnlineBeta = 2.5;

/// exp(-d_j) normalized, entries under 1/(k*beta) zeroed, survivors
/// renormalized. If nothing survives, the largest weight alone is kept.
SparseWeights sparsify(std::span<const double> distances, double beta);

/// Distances from the standardized features of `input` to every center.
std::vector<double> center_distances(const clustering::ClusterModel& model, std::string_view input);

/// Throws InvalidArgument on empty input.
SparseWeights gate_weights(const GateConfig& cfg, std::string_view input);

/// Cluster priors (training share per cluster) passed through the same
/// sparsity rule. Used for the empty prefix, which has no features.
SparseWeights prior_weights(const GateConfig& cfg);

}  // namespace mope::gate
