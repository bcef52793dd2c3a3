#include "mope/guess.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "mope/error.hpp"
#include "mope/offline.hpp"

namespace mope::guess {
namespace {

constexpr std::size_t kChunk = 1024;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Draw {
  std::string password;
  double prob;
};

Draw draw(const CharModel& model, std::mt19937_64& rng, std::size_t max_len) {
  const auto& alphabet = model.alphabet();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Symbol> ctx{alphabet.start()};
  Draw d{"", 1.0};
  while (d.password.size() < max_len) {
    const auto dist = model.next_dist(std::span<const Symbol>(ctx));
    const bool first = ctx.size() == 1;
    double total = 0.0;
    for (std::size_t c = 0; c < dist.size(); ++c) {
      if (!(first && c == alphabet.end())) total += dist[c];
    }
    const double u = unit(rng) * total;
    double acc = 0.0;
    std::size_t pick = dist.size();
    for (std::size_t c = 0; c < dist.size(); ++c) {
      if (first && c == alphabet.end()) continue;
      acc += dist[c];
      pick = c;
      if (u < acc) break;
    }
    d.prob *= dist[pick];
    if (pick == alphabet.end()) break;
    ctx.push_back(static_cast<Symbol>(pick));
    d.password.push_back(alphabet.character(static_cast<Symbol>(pick)));
  }
  return d;
}

}  // namespace

SamplePool::SamplePool(std::vector<double> probs, double nonempty_mass) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidArgument("sample pool must not be empty");
  if (!(nonempty_mass > 0.0 && nonempty_mass <= 1.0)) {
    throw InvalidArgument("non-empty mass must lie in (0, 1]");
  }
  std::sort(probs_.begin(), probs_.end(), std::greater<>());
  const double n = static_cast<double>(probs_.size());
  cumsum_.resize(probs_.size() + 1, 0.0);
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    cumsum_[i + 1] = cumsum_[i] + nonempty_mass / (n * probs_[i]);
  }
}

double SamplePool::guess_number(double q) const {
  // Samples strictly more probable than q form a prefix of probs_. Products
  // of the same factors in a different order can differ in the last bits,
  // so values within kTieTolerance of q count as ties.
  const double cut = q * (1.0 + kTieTolerance);
  const auto it = std::upper_bound(probs_.begin(), probs_.end(), cut, std::greater<>());
  return 1.0 + cumsum_[static_cast<std::size_t>(it - probs_.begin())];
}

std::string sample_password(const CharModel& model, std::uint64_t seed, std::size_t max_len) {
  std::mt19937_64 rng(seed);
  return draw(model, rng, max_len).password;
}

SamplePool build_pool(const CharModel& model, const PoolOptions& opt) {
  if (opt.samples == 0) throw InvalidArgument("need at least one sample");
  const auto& alphabet = model.alphabet();
  const std::vector<Symbol> start{alphabet.start()};
  const double nonempty = 1.0 - model.next_dist(std::span<const Symbol>(start))[alphabet.end()];

  std::vector<double> probs(opt.samples);
  const std::size_t chunks = (opt.samples + kChunk - 1) / kChunk;
  auto run_chunk = [&](std::size_t chunk) {
    std::mt19937_64 rng(mix_seed(opt.seed, chunk));
    const std::size_t end = std::min(opt.samples, (chunk + 1) * kChunk);
    for (std::size_t i = chunk * kChunk; i < end; ++i) probs[i] = draw(model, rng, opt.max_len).prob;
  };

  const std::size_t workers = std::clamp<std::size_t>(opt.threads, 1, chunks);
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
  }
  return SamplePool(std::move(probs), nonempty);
}

GuessEstimate estimate_guess_number(const CharModel& model, const SamplePool& pool,
                                    std::string_view password, std::size_t max_len) {
  GuessEstimate est;
  est.password = std::string(password);
  est.prob = offline::candidate_prob(model, password, max_len);
  if (!(est.prob > 0.0)) throw DataError("password has zero probability under the model");
  est.guesses = pool.guess_number(est.prob);
  est.log10_guesses = std::log10(est.guesses);
  return est;
}

GuessEstimate estimate_guess_number(const CharModel& model, std::string_view password,
                                    const PoolOptions& opt) {
  return estimate_guess_number(model, build_pool(model, opt), password, opt.max_len);
}

CrackCurve crack_curve_from(const std::vector<std::vector<double>>& guess_numbers,
                            std::span<const double> budgets, CrackMode mode) {
  if (guess_numbers.empty() || guess_numbers.front().empty()) {
    throw InvalidArgument("crack curve needs a non-empty test set");
  }
  if (mode == CrackMode::kSingle && guess_numbers.size() != 1) {
    throw InvalidArgument("single mode takes exactly one model");
  }
  if (!std::is_sorted(budgets.begin(), budgets.end())) {
    throw InvalidArgument("budgets must be ascending");
  }
  const std::size_t n = guess_numbers.front().size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (const auto& g : guess_numbers) {
    if (g.size() != n) throw InvalidArgument("guess-number tables differ in length");
    for (std::size_t i = 0; i < n; ++i) best[i] = std::min(best[i], std::round(g[i]));
  }
  CrackCurve curve;
  curve.budgets.assign(budgets.begin(), budgets.end());
  for (double b : budgets) {
    const auto cracked = std::count_if(best.begin(), best.end(), [b](double g) { return g <= b; });
    curve.fractions.push_back(static_cast<double>(cracked) / static_cast<double>(n));
  }
  return curve;
}

CrackCurve crack_curve(std::span<const CharModel* const> models,
                       std::span<const std::string> test_set, std::span<const double> budgets,
                       CrackMode mode, const PoolOptions& opt) {
  if (test_set.empty()) throw InvalidArgument("crack curve needs a non-empty test set");
  if (models.empty()) throw InvalidArgument("crack curve needs at least one model");
  std::vector<std::vector<double>> table;
  for (const auto* m : models) {
    const auto pool = build_pool(*m, opt);
    auto& row = table.emplace_back();
    row.reserve(test_set.size());
    for (const auto& pwd : test_set) {
      row.push_back(estimate_guess_number(*m, pool, pwd, opt.max_len).guesses);
    }
  }
  return crack_curve_from(table, budgets, mode);
}

}  // namespace mope::guess
