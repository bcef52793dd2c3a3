#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mope/expert.hpp"

namespace mope::guess {

/// Relative gap below which two probabilities are treated as equal.
inline constexpr double kTieTolerance = 1e-12;

/// Passwords sampled from a model, kept as their probabilities in
/// descending order with prefix sums of the importance weights, so a guess
/// number costs one binary search.
class SamplePool {
 public:
  SamplePool() = default;
  /// `probs` are candidate probabilities of the samples; `nonempty_mass` is
  /// the probability that an unconditioned draw is a non-empty password.
  SamplePool(std::vector<double> probs, double nonempty_mass);

  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }

  /// 1 + sum over samples with prob > q of 1 / (n * prob'), where prob' is
  /// the sample's probability conditioned on a non-empty password. Ties
  /// (relative gap under kTieTolerance) are left out of the sum.
  double guess_number(double q) const;

 private:
  std::vector<double> probs_;   // descending
  std::vector<double> cumsum_;  // cumsum_[i] = weight of the first i samples
};

struct PoolOptions {
  std::size_t samples = 10'000;
  std::uint64_t seed = 1;
  std::size_t max_len = kMaxPasswordLength;
  std::size_t threads = 1;
};

/// Ancestral sampling. The first step draws from the characters only (a
/// rejected empty password), later steps stop at END or the length cap.
/// Samples are drawn in fixed chunks with per-chunk seeds, so the pool does
/// not depend on the thread count.
SamplePool build_pool(const CharModel& model, const PoolOptions& opt);

/// One ancestral sample; exposed for tests.
std::string sample_password(const CharModel& model, std::uint64_t seed,
                            std::size_t max_len = kMaxPasswordLength);

struct GuessEstimate {
  std::string password;
  double prob = 0.0;
  double guesses = 1.0;
  double log10_guesses = 0.0;
};

/// Throws InvalidArgument for n_samples = 0, DataError when the password
/// has probability 0 under the model.
GuessEstimate estimate_guess_number(const CharModel& model, std::string_view password,
                                    const PoolOptions& opt);
GuessEstimate estimate_guess_number(const CharModel& model, const SamplePool& pool,
                                    std::string_view password,
                                    std::size_t max_len = kMaxPasswordLength);

enum class CrackMode { kSingle, kMinAuto };

struct CrackCurve {
  std::vector<double> budgets;
  std::vector<double> fractions;
};

/// A password counts as cracked at budget B when its guess number, rounded
/// to the nearest integer, is at most B. In min-auto mode the smallest guess
/// number across models is used; single mode expects one model.
CrackCurve crack_curve(std::span<const CharModel* const> models,
                       std::span<const std::string> test_set, std::span<const double> budgets,
                       CrackMode mode, const PoolOptions& opt);

/// Variant over precomputed per-model guess numbers, indexed [model][password].
CrackCurve crack_curve_from(const std::vector<std::vector<double>>& guess_numbers,
                            std::span<const double> budgets, CrackMode mode);

}  // namespace mope::guess
