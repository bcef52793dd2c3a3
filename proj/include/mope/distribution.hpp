#pragma once

#include <span>
#include <vector>

namespace mope {

/// Probability vector over a fixed outcome set.
using Distribution = std::vector<double>;

double sum(std::span<const double> p);

/// KL(p || q) in nats. Terms with p = 0 contribute 0; q = 0 where p > 0
/// yields +inf.
double kl_divergence(std::span<const double> p, std::span<const double> q);

double total_variation(std::span<const double> p, std::span<const double> q);

/// p^(1/T) renormalized, computed in the log domain. T = 1 returns p.
Distribution temper(std::span<const double> p, double temperature);

std::size_t argmax(std::span<const double> p);

}  // namespace mope
