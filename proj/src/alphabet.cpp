#include "mope/alphabet.hpp"

#include "mope/error.hpp"

namespace mope {

Alphabet Alphabet::printable_ascii() {
  std::string s;
  for (char c = ' '; c <= '~'; ++c) s.push_back(c);
  return Alphabet(std::move(s));
}

Alphabet::Alphabet(std::string symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw InvalidArgument("alphabet must not be empty");
  index_.fill(-1);
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    auto& slot = index_[static_cast<unsigned char>(symbols_[i])];
    if (slot >= 0) throw InvalidArgument("duplicate alphabet symbol");
    slot = static_cast<std::int16_t>(i);
  }
}

std::optional<Symbol> Alphabet::ordinal(char c) const {
  const auto i = index_[static_cast<unsigned char>(c)];
  if (i < 0) return std::nullopt;
  return static_cast<Symbol>(i);
}

bool Alphabet::covers(std::string_view text) const {
  for (char c : text) {
    if (!contains(c)) return false;
  }
  return true;
}

std::vector<Symbol> Alphabet::encode_context(std::string_view text) const {
  std::vector<Symbol> out;
  out.reserve(text.size() + 1);
  out.push_back(start());
  for (char c : text) {
    const auto o = ordinal(c);
    if (!o) throw InvalidArgument("character outside alphabet");
    out.push_back(*o);
  }
  return out;
}

std::uint64_t Alphabet::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : symbols_) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace mope
