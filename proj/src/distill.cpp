#include "mope/distill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "mope/error.hpp"

namespace mope::distill {

void DistillConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be positive");
  if (sample_count == 0) throw InvalidArgument("sample_count must be positive");
}

double distill_loss(std::span<const double> teacher, std::span<const double> student,
                    std::size_t label, double alpha, double temperature) {
  if (teacher.size() != student.size()) throw InvalidArgument("distribution sizes differ");
  if (label >= student.size()) throw InvalidArgument("label out of range");
  double loss = 0.0;
  if (alpha > 0.0) {
    const auto t = temper(teacher, temperature);
    const auto s = temper(student, temperature);
    loss += alpha * temperature * temperature * kl_divergence(t, s);
  }
  if (alpha < 1.0) {
    if (!(student[label] > 0.0)) throw InvalidArgument("student assigns zero probability to the label");
    loss += (1.0 - alpha) * -std::log(student[label]);
  }
  return loss;
}

namespace {

// Root of a * x^p + q * x = r for x >= 0, with p > 1 and a, q, r > 0.
// Newton from x = r / q approaches from the right without overshooting.
double convex_root(double a, double p, double q, double r) {
  // Both r / q and (r / a)^(1/p) bound the root from above, and Newton
  // descends monotonically from above on a convex increasing function.
  double x = std::min(r / q, std::pow(r / a, 1.0 / p));
  for (int it = 0; it < 100; ++it) {
    const double xp1 = std::pow(x, p - 1.0);
    const double f = a * xp1 * x + q * x - r;
    const double step = f / (a * p * xp1 + q);
    if (!(step > 1e-15 * x)) break;
    x -= step;
  }
  return x;
}

}  // namespace

Distribution hybrid_optimum(std::span<const double> soft, std::span<const double> hard,
                            double alpha, double temperature) {
  if (soft.size() != hard.size()) throw InvalidArgument("distribution sizes differ");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be positive");
  const std::size_t V = soft.size();
  if (alpha == 0.0) return {hard.begin(), hard.end()};
  if (alpha == 1.0) return temper(soft, 1.0 / temperature);
  if (temperature == 1.0) {
    Distribution s(V);
    for (std::size_t k = 0; k < V; ++k) s[k] = alpha * soft[k] + (1.0 - alpha) * hard[k];
    return s;
  }

  // Componentwise: (1 - alpha) s_k + (alpha T / A) s_k^(1/T) = r_k, where A is
  // the normalizer sum_j s_j^(1/T). phi(A) = sum_k s_k(A)^(1/T) - A is
  // positive below the unique solution and negative above it.
  const double T = temperature;
  const double c = 1.0 / T;
  std::vector<double> r(V);
  for (std::size_t k = 0; k < V; ++k) r[k] = (1.0 - alpha) * hard[k] + alpha * T * soft[k];

  Distribution s(V);
  auto solve = [&](double A) {
    const double b = alpha * T / A;
    double acc = 0.0;
    for (std::size_t k = 0; k < V; ++k) {
      if (r[k] <= 0.0) {
        s[k] = 0.0;
        continue;
      }
      if (T > 1.0) {
        const double u = convex_root(1.0 - alpha, T, b, r[k]);  // u = s^(1/T)
        s[k] = std::pow(u, T);
        acc += u;
      } else {
        s[k] = convex_root(b, c, 1.0 - alpha, r[k]);
        acc += std::pow(s[k], c);
      }
    }
    return acc - A;
  };

  // Power-mean bounds on sum_k s_k^(1/T) for a distribution over V symbols.
  double lo = std::min(1.0, std::pow(static_cast<double>(V), 1.0 - c));
  double hi = std::max(1.0, std::pow(static_cast<double>(V), 1.0 - c));
  lo *= 0.5;
  hi *= 2.0;
  double flo = solve(lo);
  double fhi = solve(hi);
  int side = 0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double m = (lo * fhi - hi * flo) / (fhi - flo);
    const double fm = solve(m);
    if (std::abs(fm) <= 1e-15 * m) {
      lo = hi = m;
      break;
    }
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = m;
      flo = fm;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = m;
      fhi = fm;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  solve(0.5 * (lo + hi));
  double total = 0.0;
  for (double x : s) total += x;
  for (double& x : s) x /= total;
  return s;
}

std::vector<std::string> sample_corpus(std::span<const std::string> corpus, std::size_t count,
                                       std::uint64_t seed) {
  if (corpus.empty()) throw InvalidArgument("cannot sample an empty corpus");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::string> out;
  out.reserve(count);
  // Whole shuffled passes, then a partial one.
  while (out.size() < count) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size() && out.size() < count; ++i) out.push_back(corpus[order[i]]);
  }
  return out;
}

namespace {

struct Accumulator {
  double n = 0.0;
  std::vector<double> soft;  // sum of tempered teacher distributions
  CountModel::Row hard;      // label counts
};

}  // namespace

NGramExpert distill(const CharModel& teacher, std::span<const std::string> corpus,
                    const NGramConfig& student_cfg, const DistillConfig& cfg, std::uint64_t seed) {
  student_cfg.validate();
  cfg.validate();
  if (corpus.empty()) throw InvalidArgument("cannot distill from an empty corpus");
  const auto& alphabet = teacher.alphabet();
  const std::size_t V = alphabet.outcomes();
  const std::size_t levels = student_cfg.order + 1;
  const bool use_teacher = cfg.alpha > 0.0;

  std::vector<std::unordered_map<std::string, Accumulator>> acc(levels);
  for (const auto& pwd : sample_corpus(corpus, cfg.sample_count, seed)) {
    const auto ctx = alphabet.encode_context(pwd);
    for (std::size_t t = 1; t <= ctx.size(); ++t) {
      const auto prefix = std::span(ctx).first(t);
      const Symbol label = t < ctx.size() ? ctx[t] : alphabet.end();
      const auto keys = NGramExpert::context_keys(prefix, student_cfg.order);
      Distribution soft;
      if (use_teacher) soft = temper(teacher.next_dist(prefix), cfg.temperature);
      for (std::size_t l = 0; l < std::min(levels, keys.size()); ++l) {
        auto& a = acc[l][keys[l]];
        a.n += 1.0;
        a.hard.add(label, 1.0);
        if (use_teacher) {
          if (a.soft.empty()) a.soft.assign(V, 0.0);
          for (std::size_t y = 0; y < V; ++y) a.soft[y] += soft[y];
        }
      }
    }
  }

  CountModel counts(V, levels, student_cfg.lambda, student_cfg.level_weights);
  std::vector<double> soft(V), hard(V);
  for (std::size_t l = 0; l < levels; ++l) {
    for (const auto& [key, a] : acc[l]) {
      if (!use_teacher) {
        for (const auto& [y, w] : a.hard.counts) counts.add(l, key, y, w);
        continue;
      }
      std::fill(hard.begin(), hard.end(), 0.0);
      for (const auto& [y, w] : a.hard.counts) hard[y] = w / a.n;
      for (std::size_t y = 0; y < V; ++y) soft[y] = a.soft[y] / a.n;
      const auto s = hybrid_optimum(soft, hard, cfg.alpha, cfg.temperature);
      for (std::size_t y = 0; y < V; ++y) {
        if (s[y] > 0.0) counts.add(l, key, static_cast<Symbol>(y), a.n * s[y]);
      }
    }
  }
  std::string digest = student_cfg.digest() + ";distill:alpha=" + std::to_string(cfg.alpha) +
                       ";T=" + std::to_string(cfg.temperature) +
                       ";samples=" + std::to_string(cfg.sample_count) + ";seed=" + std::to_string(seed);
  return NGramExpert(alphabet, student_cfg.order, std::move(counts),
                     {ExpertKind::kDistilled, std::nullopt, std::move(digest)});
}

double student_fidelity(const CharModel& teacher, const CharModel& student,
                        std::span<const std::string> probe_prefixes) {
  if (!(teacher.alphabet() == student.alphabet())) {
    throw InvalidArgument("teacher and student alphabets differ");
  }
  if (probe_prefixes.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : probe_prefixes) {
    total += kl_divergence(teacher.next_dist(std::string_view(p)), student.next_dist(std::string_view(p)));
  }
  return total / static_cast<double>(probe_prefixes.size());
}

}  // namespace mope::distill
