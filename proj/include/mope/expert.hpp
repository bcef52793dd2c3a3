#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mope/alphabet.hpp"
#include "mope/count_model.hpp"
#include "mope/distribution.hpp"

namespace mope {

/// Anything that yields P(next | prefix) over the characters plus END.
/// Contexts are START-prefixed symbol sequences.
class CharModel {
 public:
  virtual ~CharModel() = default;

  virtual const Alphabet& alphabet() const = 0;
  virtual Distribution next_dist(std::span<const Symbol> context) const = 0;

  /// Convenience wrapper over a plain-text prefix.
  Distribution next_dist(std::string_view prefix) const;
};

enum class ExpertKind { kPretrained, kFinetuned, kDistilled };

const char* to_string(ExpertKind k);
ExpertKind expert_kind_from(std::string_view s);

struct NGramConfig {
  std::size_t order = 5;
  double lambda = 0.01;
  /// Multipliers on the smoothing strength per context length 0..order.
  /// Empty means all ones.
  std::vector<double> level_weights;
  /// Weight of the pretrained counts when fine-tuning; unset picks
  /// cluster_size / (10 * corpus_size).
  std::optional<double> gamma;

  void validate() const;
  std::string digest() const;
};

struct ExpertMeta {
  ExpertKind kind = ExpertKind::kPretrained;
  std::optional<std::size_t> cluster;
  std::string config_digest;
};

/// Interpolated add-lambda n-gram over characters. Immutable once built.
class NGramExpert final : public CharModel {
 public:
  NGramExpert(Alphabet alphabet, std::size_t order, CountModel counts, ExpertMeta meta);

  const Alphabet& alphabet() const override { return alphabet_; }
  using CharModel::next_dist;
  Distribution next_dist(std::span<const Symbol> context) const override;

  std::size_t order() const { return order_; }
  const ExpertMeta& meta() const { return meta_; }
  const CountModel& counts() const { return counts_; }

  /// Context keys for levels 0..order over the tail of `context`.
  static std::vector<std::string> context_keys(std::span<const Symbol> context, std::size_t order);

  void save(const std::filesystem::path& path) const;
  static NGramExpert load(const std::filesystem::path& path, const Alphabet& alphabet);
  void write(std::ostream& out) const;
  static NGramExpert read(std::istream& in, const Alphabet& alphabet);

 private:
  Alphabet alphabet_;
  std::size_t order_;
  CountModel counts_;
  ExpertMeta meta_;
};

/// Counts every prefix -> next-symbol pair of every START...END-wrapped
/// password, which is the likelihood maximizer for the count model. Throws
/// InvalidArgument on an empty corpus or a password outside the alphabet.
NGramExpert pretrain(std::span<const std::string> corpus, const Alphabet& alphabet,
                     const NGramConfig& cfg);

/// New expert whose counts are (cluster + gamma * base) / (1 + gamma).
/// `corpus_size` sizes the default gamma.
NGramExpert finetune(const NGramExpert& base, std::span<const std::string> cluster_corpus,
                     const NGramConfig& cfg, std::size_t cluster_id, std::size_t corpus_size);

/// Sum of log P(password) over the corpus, END included.
double log_likelihood(const CharModel& model, std::span<const std::string> corpus);

}  // namespace mope
