#include "mope/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mope/error.hpp"

namespace mope::features {
namespace {

enum class RunClass { kLetter, kDigit, kSpecial };

RunClass run_class(unsigned char c) {
  if (c >= '0' && c <= '9') return RunClass::kDigit;
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return RunClass::kLetter;
  return RunClass::kSpecial;
}

}  // namespace

FeatureVector extract_features(std::string_view password) {
  if (password.empty()) throw InvalidArgument("cannot extract features of an empty string");

  std::size_t digits = 0, lower = 0, upper = 0, special = 0;
  std::size_t switches = 0, digit_run = 0, letter_run = 0, max_digit = 0, max_letter = 0;
  RunClass prev = run_class(static_cast<unsigned char>(password.front()));

  for (std::size_t i = 0; i < password.size(); ++i) {
    const auto c = static_cast<unsigned char>(password[i]);
    if (c >= '0' && c <= '9') {
      ++digits;
    } else if (c >= 'a' && c <= 'z') {
      ++lower;
    } else if (c >= 'A' && c <= 'Z') {
      ++upper;
    } else {
      ++special;
    }

    const RunClass cls = run_class(c);
    if (i > 0 && cls != prev) ++switches;
    prev = cls;

    digit_run = cls == RunClass::kDigit ? digit_run + 1 : 0;
    letter_run = cls == RunClass::kLetter ? letter_run + 1 : 0;
    max_digit = std::max(max_digit, digit_run);
    max_letter = std::max(max_letter, letter_run);
  }

  const double l = static_cast<double>(password.size());
  return {l,
          static_cast<double>(digits) / l,
          static_cast<double>(lower) / l,
          static_cast<double>(upper) / l,
          static_cast<double>(special) / l,
          static_cast<double>(switches),
          static_cast<double>(max_digit),
          static_cast<double>(max_letter)};
}

StdFeatureVector Standardizer::apply(const FeatureVector& v) const {
  StdFeatureVector out{};
  for (std::size_t j = 0; j < kDims; ++j) {
    out[j] = stds[j] > 0.0 ? (v[j] - means[j]) / stds[j] : 0.0;
  }
  return out;
}

Standardizer fit_standardizer(std::span<const FeatureVector> rows) {
  if (rows.empty()) throw InvalidArgument("cannot fit a standardizer on an empty matrix");
  Standardizer s;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < kDims; ++j) s.means[j] += r[j];
  }
  for (auto& m : s.means) m /= n;
  // Second pass over centered values keeps the variance free of cancellation.
  std::array<double, kDims> ss{};
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < kDims; ++j) {
      const double d = r[j] - s.means[j];
      ss[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < kDims; ++j) s.stds[j] = std::sqrt(ss[j] / n);
  return s;
}

std::vector<FeatureVector> extract_all(std::span<const std::string> passwords) {
  std::vector<FeatureVector> out;
  out.reserve(passwords.size());
  for (const auto& p : passwords) out.push_back(extract_features(p));
  return out;
}

}  // namespace mope::features
