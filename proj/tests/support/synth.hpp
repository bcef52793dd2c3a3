#pragma once

// Synthetic corpora with known structure.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mope/corpus.hpp"

namespace synth {

// Index in [0, n) with P(i) proportional to 1 / (i + 1).
inline std::size_t zipf(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> d(w.begin(), w.end());
  return d(rng);
}

inline std::string random_from(std::mt19937_64& rng, const std::string& chars, std::size_t len) {
  std::uniform_int_distribution<std::size_t> pick(0, chars.size() - 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(chars[pick(rng)]);
  return s;
}

inline const std::string kDigits = "0123456789";
inline const std::string kLower = "abcdefghijklmnopqrstuvwxyz";
inline const std::string kUpper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
inline const std::string kSpecial = "!@#$%&*?";

struct Vocab {
  std::vector<std::string> digits;  // all-digit passwords
  std::vector<std::string> words;   // all-lowercase passwords
  std::vector<std::string> mixed;   // Capitalized word + digits + special
};

inline Vocab make_vocab(std::uint64_t seed, std::size_t per_family = 60) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dlen(6, 8), wlen(5, 8), mlen(4, 6), tail(2, 3);
  Vocab v;
  for (std::size_t i = 0; i < per_family; ++i) {
    v.digits.push_back(random_from(rng, kDigits, dlen(rng)));
    v.words.push_back(random_from(rng, kLower, wlen(rng)));
    std::string m = random_from(rng, kUpper, 1) + random_from(rng, kLower, mlen(rng));
    m += random_from(rng, kDigits, tail(rng)) + random_from(rng, kSpecial, 1);
    v.mixed.push_back(m);
  }
  return v;
}

// Wider length spread than make_vocab. The families then sit at similar
// distances with visible internal spread, which is the regime where merging
// any two of them drops the silhouette below 0.5.
inline Vocab spread_vocab(std::uint64_t seed, std::size_t per_family = 60) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(4, 12), mlen(1, 7), tail(1, 4);
  Vocab v;
  for (std::size_t i = 0; i < per_family; ++i) {
    v.digits.push_back(random_from(rng, kDigits, len(rng)));
    v.words.push_back(random_from(rng, kLower, len(rng)));
    std::string m = random_from(rng, kUpper, 1) + random_from(rng, kLower, mlen(rng));
    m += random_from(rng, kDigits, tail(rng)) + random_from(rng, kSpecial, 1);
    v.mixed.push_back(m);
  }
  return v;
}

// Three structural families in equal shares, each drawn Zipf-style from
// its own vocabulary: all digits, all lowercase, and Capital+lower+digits+special.
inline std::vector<std::string> three_families(std::size_t n, std::uint64_t seed,
                                               const Vocab& vocab) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& fam = i % 3 == 0 ? vocab.digits : i % 3 == 1 ? vocab.words : vocab.mixed;
    out.push_back(fam[zipf(rng, fam.size())]);
  }
  return out;
}

inline std::vector<std::string> three_families(std::size_t n, std::uint64_t seed) {
  return three_families(n, seed, make_vocab(seed ^ 0x5eedULL));
}

// One word list shared by two families: plain lowercase words, and the same
// words capitalized with a digit suffix. Words are longer than the default
// n-gram order, so by the end of a word a single n-gram model has lost the
// capital that tells the families apart; the third family is all digits.
struct SharedVocab {
  std::vector<std::string> words;
  std::vector<std::string> suffixes;
  std::vector<std::string> pins;
};

inline SharedVocab shared_vocab(std::uint64_t seed, std::size_t words = 1000) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> wlen(6, 9), slen(2, 4), plen(6, 8);
  SharedVocab v;
  for (std::size_t i = 0; i < words; ++i) v.words.push_back(random_from(rng, kLower, wlen(rng)));
  for (std::size_t i = 0; i < 30; ++i) v.suffixes.push_back(random_from(rng, kDigits, slen(rng)));
  for (std::size_t i = 0; i < words; ++i) v.pins.push_back(random_from(rng, kDigits, plen(rng)));
  return v;
}

inline std::vector<std::string> shared_families(std::size_t n, std::uint64_t seed, const SharedVocab& v) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 3 == 0) {
      out.push_back(v.pins[zipf(rng, v.pins.size())]);
    } else if (i % 3 == 1) {
      out.push_back(v.words[zipf(rng, v.words.size())]);
    } else {
      auto w = v.words[zipf(rng, v.words.size())];
      w[0] = static_cast<char>(w[0] - 'a' + 'A');
      out.push_back(w + v.suffixes[zipf(rng, v.suffixes.size())]);
    }
  }
  return out;
}

// Source passwords whose target appends "1".
inline std::vector<mope::corpus::PairRecord> suffix_pairs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(4, 10), fam(0, 2);
  std::vector<mope::corpus::PairRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = fam(rng);
    const std::string& chars = f == 0 ? kLower : f == 1 ? kDigits : kLower + kUpper + kDigits;
    const auto src = random_from(rng, chars, len(rng));
    out.push_back({src, src + "1"});
  }
  return out;
}

}  // namespace synth
