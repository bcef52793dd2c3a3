#include "mope/gate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mope/error.hpp"

namespace mope::gate {
namespace {

SparseWeights threshold_and_renormalize(std::vector<double> w, double beta) {
  const double cut = 1.0 / (static_cast<double>(w.size()) * beta);
  const std::size_t best = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  SparseWeights out;
  double kept = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] >= cut && w[j] > 0.0) {
      kept += w[j];
      out.active.push_back(j);
    } else {
      w[j] = 0.0;
    }
  }
  if (out.active.empty()) {
    std::fill(w.begin(), w.end(), 0.0);
    w[best] = 1.0;
    out.active.push_back(best);
  } else {
    for (auto j : out.active) w[j] /= kept;
  }
  out.weights = std::move(w);
  return out;
}

}  // namespace

double GateConfig::threshold() const {
  if (!clusters) throw InvalidArgument("gate has no cluster model");
  return 1.0 / (static_cast<double>(clusters->k) * beta);
}

void GateConfig::validate() const {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  if (!clusters || clusters->k == 0) throw InvalidArgument("gate has no cluster model");
}

SparseWeights sparsify(std::span<const double> distances, double beta) {
  if (distances.empty()) throw InvalidArgument("no experts to gate");
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  // Shift by the smallest distance so the largest term is exp(0); the
  // normalized weights are unchanged.
  const double dmin = *std::min_element(distances.begin(), distances.end());
  std::vector<double> w(distances.size());
  double z = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = std::exp(-(distances[j] - dmin));
    z += w[j];
  }
  for (double& x : w) x /= z;
  return threshold_and_renormalize(std::move(w), beta);
}

std::vector<double> center_distances(const clustering::ClusterModel& model, std::string_view input) {
  const auto z = model.standardizer.apply(features::extract_features(input));
  std::vector<double> d(model.k);
  for (std::size_t j = 0; j < model.k; ++j) d[j] = clustering::distance(z, model.centers.row(j));
  return d;
}

SparseWeights gate_weights(const GateConfig& cfg, std::string_view input) {
  cfg.validate();
  if (input.empty()) throw InvalidArgument("gate input must be non-empty");
  const auto d = center_distances(*cfg.clusters, input);
  return sparsify(d, cfg.beta);
}

SparseWeights prior_weights(const GateConfig& cfg) {
  cfg.validate();
  const auto& sizes = cfg.clusters->sizes;
  std::vector<double> w(cfg.clusters->k, 1.0 / static_cast<double>(cfg.clusters->k));
  const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
  if (sizes.size() == cfg.clusters->k && total > 0.0) {
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<double>(sizes[j]) / total;
  }
  return threshold_and_renormalize(std::move(w), cfg.beta);
}

}  // namespace mope::gate
