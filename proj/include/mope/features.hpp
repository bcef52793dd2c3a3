#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace mope::features {

inline constexpr std::size_t kDims = 8;

/// Structural features in fixed order:
/// [length, digit ratio, lower ratio, upper ratio, special ratio,
///  class switches, longest digit run, longest letter run].
using FeatureVector = std::array<double, kDims>;
using StdFeatureVector = std::array<double, kDims>;

enum Index : std::size_t {
  kLength = 0,
  kDigitRatio,
  kLowerRatio,
  kUpperRatio,
  kSpecialRatio,
  kSwitches,
  kMaxDigitRun,
  kMaxLetterRun,
};

/// Ratios use four classes (digit/lower/upper/special). Switches and runs
/// use three (letter/digit/special), so "Abc123" has one switch and a letter
/// run of three. Throws InvalidArgument on empty input.
FeatureVector extract_features(std::string_view password);

/// Per-column population mean and standard deviation.
struct Standardizer {
  std::array<double, kDims> means{};
  std::array<double, kDims> stds{};

  /// (v - mean) / std per column; zero-variance columns map to 0.
  StdFeatureVector apply(const FeatureVector& v) const;

  bool operator==(const Standardizer&) const = default;
};

/// Throws InvalidArgument on an empty matrix.
Standardizer fit_standardizer(std::span<const FeatureVector> rows);

inline StdFeatureVector standardize(const Standardizer& s, const FeatureVector& v) {
  return s.apply(v);
}

std::vector<FeatureVector> extract_all(std::span<const std::string> passwords);

}  // namespace mope::features
