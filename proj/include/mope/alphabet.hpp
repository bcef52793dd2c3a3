#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mope {

using Symbol = std::uint16_t;

inline constexpr std::size_t kMaxPasswordLength = 16;

/// Ordered character set. Characters map to ordinals [0, size()); the two
/// reserved tokens sit just past the character range so that a next-symbol
/// distribution over characters plus END has exactly size() + 1 entries.
class Alphabet {
 public:
  /// The 95 printable ASCII characters, ' ' through '~'.
  static Alphabet printable_ascii();

  explicit Alphabet(std::string symbols);

  std::size_t size() const { return symbols_.size(); }
  Symbol end() const { return static_cast<Symbol>(symbols_.size()); }
  Symbol start() const { return static_cast<Symbol>(symbols_.size() + 1); }
  /// Number of outcomes of a next-character distribution (characters + END).
  std::size_t outcomes() const { return symbols_.size() + 1; }

  bool contains(char c) const { return index_[static_cast<unsigned char>(c)] >= 0; }
  std::optional<Symbol> ordinal(char c) const;
  char character(Symbol s) const { return symbols_.at(s); }
  const std::string& symbols() const { return symbols_; }

  /// Every byte of `text` is a member of the alphabet.
  bool covers(std::string_view text) const;

  /// START followed by the ordinals of `text`. Throws InvalidArgument on a
  /// character outside the alphabet.
  std::vector<Symbol> encode_context(std::string_view text) const;

  /// FNV-1a over the symbol string; stored in model files to detect a
  /// mismatched alphabet at load time.
  std::uint64_t digest() const;

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::string symbols_;
  std::array<std::int16_t, 256> index_{};
};

}  // namespace mope
