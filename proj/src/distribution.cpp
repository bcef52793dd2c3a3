#include "mope/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mope/error.hpp"

namespace mope {

double sum(std::span<const double> p) {
  double s = 0.0;
  for (double x : p) s += x;
  return s;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("distribution sizes differ");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("distribution sizes differ");
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

Distribution temper(std::span<const double> p, double temperature) {
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be positive");
  Distribution out(p.begin(), p.end());
  if (temperature == 1.0) return out;
  double hi = -std::numeric_limits<double>::infinity();
  for (double& x : out) {
    x = x > 0.0 ? std::log(x) / temperature : -std::numeric_limits<double>::infinity();
    hi = std::max(hi, x);
  }
  double z = 0.0;
  for (double& x : out) {
    x = std::exp(x - hi);
    z += x;
  }
  for (double& x : out) x /= z;
  return out;
}

std::size_t argmax(std::span<const double> p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace mope
