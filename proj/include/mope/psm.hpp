#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mope/expert.hpp"
#include "mope/guess.hpp"

namespace mope::psm {

enum class StrengthLevel { kWeak, kMedium, kStrong };

const char* to_string(StrengthLevel level);

inline constexpr double kWeakBelow = 1e6;
inline constexpr double kStrongFrom = 1e14;

/// weak below 10^6 guesses, strong from 10^14, medium in between.
StrengthLevel level_for(double guesses);

struct StrengthVerdict {
  double log10_guess_number = 0.0;
  StrengthLevel level = StrengthLevel::kWeak;
  double latency_ms = 0.0;
};

/// Anything that assigns guess numbers to passwords.
class GuessMeter {
 public:
  virtual ~GuessMeter() = default;
  virtual const Alphabet& alphabet() const = 0;
  virtual double guess_number(std::string_view password) const = 0;
};

/// Monte-Carlo meter over a sample pool drawn once at construction, so a
/// query costs one probability evaluation plus a binary search.
class StrengthMeter final : public GuessMeter {
 public:
  StrengthMeter(std::shared_ptr<const CharModel> model, const guess::PoolOptions& pool);

  const Alphabet& alphabet() const override { return model_->alphabet(); }
  /// Throws InvalidArgument for passwords outside the record invariants.
  double guess_number(std::string_view password) const override;
  StrengthVerdict strength(std::string_view password) const;

  const guess::SamplePool& pool() const { return pool_; }

 private:
  std::shared_ptr<const CharModel> model_;
  guess::SamplePool pool_;
  std::size_t max_len_;
};

struct UnsafeErrorMatrix {
  std::vector<double> edges;                      // bucket i covers [edges[i], edges[i+1])
  std::vector<std::vector<std::size_t>> counts;   // [bucket under meter a][bucket under meter b]

  std::size_t total() const;
  /// Passwords that meter a places in a strictly higher bucket than meter b.
  std::size_t unsafe() const;
};

/// 10^0, 10^3, ..., 10^18.
std::vector<double> default_edges();

std::size_t bucket_of(double guesses, std::span<const double> edges);

/// Cross-tabulates bucketed guess numbers; throws InvalidArgument on an
/// empty test set or meters with different alphabets.
UnsafeErrorMatrix unsafe_error_matrix(const GuessMeter& a, const GuessMeter& b,
                                      std::span<const std::string> test_set,
                                      std::span<const double> edges = {});

}  // namespace mope::psm
