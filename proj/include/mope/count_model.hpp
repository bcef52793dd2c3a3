#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mope/alphabet.hpp"
#include "mope/distribution.hpp"

namespace mope {

/// Weighted next-symbol counts under a chain of nested contexts, from the
/// most general (level 0, the empty context) to the most specific.
///
/// Queries interpolate recursively: starting from the uniform distribution,
/// each level with data replaces P by
///
///   (count(ctx, y) + kappa * P(y)) / (count(ctx) + kappa),
///   kappa = lambda * vocab * level_weight.
///
/// At level 0 this is add-lambda smoothing, so every symbol keeps positive
/// mass. A level whose context was never observed ends the chain, since
/// every more specific context is unseen too.
class CountModel {
 public:
  struct Row {
    double total = 0.0;
    std::vector<std::pair<Symbol, double>> counts;  // sorted by symbol

    void add(Symbol y, double w);
    bool operator==(const Row&) const = default;
  };

  CountModel() = default;
  CountModel(std::size_t vocab, std::size_t levels, double lambda,
             std::vector<double> level_weights = {});

  std::size_t vocab() const { return vocab_; }
  std::size_t levels() const { return tables_.size(); }
  double lambda() const { return lambda_; }
  const std::vector<double>& level_weights() const { return level_weights_; }

  /// `keys[l]` is the context key at level l; a span shorter than levels()
  /// updates only the leading levels.
  void observe(std::span<const std::string> keys, Symbol y, double weight = 1.0);
  /// Soft target: adds weight * target[y] for every y.
  void observe(std::span<const std::string> keys, std::span<const double> target,
               double weight = 1.0);

  /// Adds weight w for symbol y to the row of `key` at one level only.
  void add(std::size_t level, const std::string& key, Symbol y, double w);

  Distribution query(std::span<const std::string> keys) const;

  /// (this + gamma * base) / (1 + gamma), key by key over the union.
  /// Smoothing parameters come from `this`.
  CountModel blend(const CountModel& base, double gamma) const;

  std::size_t context_count() const;

  void write(std::ostream& out) const;
  static CountModel read(std::istream& in);

  bool operator==(const CountModel&) const = default;

 private:
  std::size_t vocab_ = 0;
  double lambda_ = 0.01;
  std::vector<double> level_weights_;
  std::vector<std::unordered_map<std::string, Row>> tables_;
};

/// Appends the two-byte little-endian form of `s` to a context key.
inline void append_symbol(std::string& key, Symbol s) {
  key.push_back(static_cast<char>(s & 0xff));
  key.push_back(static_cast<char>(s >> 8));
}

namespace binio {
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
void write_str(std::ostream& out, const std::string& s);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
std::string read_str(std::istream& in);
}  // namespace binio

}  // namespace mope
