#include "mope/psm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mope/corpus.hpp"
#include "mope/error.hpp"
#include "mope/offline.hpp"

namespace mope::psm {

const char* to_string(StrengthLevel level) {
  switch (level) {
    case StrengthLevel::kWeak: return "weak";
    case StrengthLevel::kMedium: return "medium";
    case StrengthLevel::kStrong: return "strong";
  }
  return "unknown";
}

StrengthLevel level_for(double guesses) {
  if (guesses < kWeakBelow) return StrengthLevel::kWeak;
  if (guesses < kStrongFrom) return StrengthLevel::kMedium;
  return StrengthLevel::kStrong;
}

StrengthMeter::StrengthMeter(std::shared_ptr<const CharModel> model, const guess::PoolOptions& pool)
    : model_(std::move(model)), max_len_(pool.max_len) {
  if (!model_) throw InvalidArgument("strength meter needs a model");
  pool_ = guess::build_pool(*model_, pool);
}

double StrengthMeter::guess_number(std::string_view password) const {
  if (auto r = corpus::validate(password, model_->alphabet())) {
    throw InvalidArgument(std::string("invalid password: ") + corpus::to_string(*r));
  }
  const double q = offline::candidate_prob(*model_, password, max_len_);
  return pool_.guess_number(q);
}

StrengthVerdict StrengthMeter::strength(std::string_view password) const {
  const auto t0 = std::chrono::steady_clock::now();
  const double g = guess_number(password);
  StrengthVerdict v;
  v.log10_guess_number = std::log10(g);
  v.level = level_for(g);
  v.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

std::size_t UnsafeErrorMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

std::size_t UnsafeErrorMatrix::unsafe() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) n += counts[i][j];
  }
  return n;
}

std::vector<double> default_edges() {
  std::vector<double> e;
  for (int p = 0; p <= 18; p += 3) e.push_back(std::pow(10.0, p));
  return e;
}

std::size_t bucket_of(double guesses, std::span<const double> edges) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), guesses);
  return it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
}

UnsafeErrorMatrix unsafe_error_matrix(const GuessMeter& a, const GuessMeter& b,
                                      std::span<const std::string> test_set,
                                      std::span<const double> edges) {
  if (test_set.empty()) throw InvalidArgument("unsafe-error matrix needs a non-empty test set");
  if (!(a.alphabet() == b.alphabet())) throw InvalidArgument("meters must share an alphabet");
  UnsafeErrorMatrix m;
  m.edges = edges.empty() ? default_edges() : std::vector<double>(edges.begin(), edges.end());
  m.counts.assign(m.edges.size(), std::vector<std::size_t>(m.edges.size(), 0));
  for (const auto& p : test_set) {
    ++m.counts[bucket_of(a.guess_number(p), m.edges)][bucket_of(b.guess_number(p), m.edges)];
  }
  return m;
}

}  // namespace mope::psm
