#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mope/corpus.hpp"
#include "mope/count_model.hpp"
#include "mope/edit_ops.hpp"
#include "mope/expert.hpp"
#include "mope/gate.hpp"

namespace mope::online {

/// P(next edit op | source, ops so far) over the codec's symbol space.
class EditModel {
 public:
  virtual ~EditModel() = default;

  virtual const edit::OpCodec& codec() const = 0;
  virtual Distribution next_dist(std::string_view src, std::span<const edit::EditOp> history) const = 0;
};

struct OnlineConfig {
  double lambda = 1e-3;
  std::optional<double> gamma;  // unset: cluster_size / (10 * corpus_size)
  std::size_t max_ops = 4;

  void validate() const;
  std::string digest() const;
};

/// Count model conditioned on a coarse source bucket (length, class of the
/// first and last character) and the last two ops, backing off to the
/// bucket alone and then to no context.
class EditExpert final : public EditModel {
 public:
  static constexpr std::size_t kLevels = 4;

  EditExpert(edit::OpCodec codec, CountModel counts, ExpertMeta meta);

  const edit::OpCodec& codec() const override { return codec_; }
  Distribution next_dist(std::string_view src, std::span<const edit::EditOp> history) const override;

  const ExpertMeta& meta() const { return meta_; }
  const CountModel& counts() const { return counts_; }

  static std::vector<std::string> context_keys(const edit::OpCodec& codec, std::string_view src,
                                               std::span<const edit::EditOp> history);

  void save(const std::filesystem::path& path) const;
  static EditExpert load(const std::filesystem::path& path, const Alphabet& alphabet);

 private:
  edit::OpCodec codec_;
  CountModel counts_;
  ExpertMeta meta_;
};

/// Trains on the minimal edit script of every pair. Throws InvalidArgument
/// on an empty pair list or a pair needing more than cfg.max_ops edits.
EditExpert pretrain_online(std::span<const corpus::PairRecord> pairs, const Alphabet& alphabet,
                           const OnlineConfig& cfg);

EditExpert finetune_online(const EditExpert& base, std::span<const corpus::PairRecord> cluster_pairs,
                           const OnlineConfig& cfg, std::size_t cluster_id, std::size_t corpus_size);

struct ScoredCandidate {
  std::string password;
  double score = 0.0;

  bool operator==(const ScoredCandidate&) const = default;
};

struct BeamOptions {
  std::size_t beam_width = 150;
  std::size_t max_ops = 4;
};

/// Beam search over edit sequences under one expert. Ops that cannot apply
/// to the current string are masked and the rest renormalized; after
/// max_ops edits only end remains. Finished sequences stay in the beam and
/// compete with live ones. Returns every finished candidate string with the
/// summed probability of its surviving paths, highest first.
std::vector<ScoredCandidate> expert_beam(const EditModel& model, std::string_view src,
                                         const BeamOptions& opt);

/// Online mixture: gate once on the source, beam each active expert, sum
/// w'_j * P_j per candidate string.
class OnlineMope {
 public:
  OnlineMope(std::vector<std::shared_ptr<const EditModel>> experts, gate::GateConfig gate,
             std::size_t beam_width = 150, std::size_t candidates = 1000);

  std::size_t size() const { return experts_.size(); }
  const EditModel& expert(std::size_t j) const { return *experts_.at(j); }
  const gate::GateConfig& gate() const { return gate_; }
  std::size_t beam_width() const { return beam_width_; }
  std::size_t candidates() const { return candidates_; }

 private:
  std::vector<std::shared_ptr<const EditModel>> experts_;
  gate::GateConfig gate_;
  std::size_t beam_width_;
  std::size_t candidates_;
};

/// Top-k candidates for `src`, descending by mixture score, ties by string.
/// Throws InvalidArgument when beam_width < 1.
std::vector<ScoredCandidate> beam_search(const OnlineMope& m, std::string_view src,
                                         std::size_t beam_width, std::size_t k,
                                         std::size_t max_ops = 4);

/// Fraction of pairs whose target appears among the first b candidates for
/// its source, per budget. Budgets must not exceed the model's candidate count.
std::vector<double> online_crack_rate(const OnlineMope& m,
                                      std::span<const corpus::PairRecord> test_pairs,
                                      std::span<const std::size_t> budgets, std::size_t max_ops = 4);

}  // namespace mope::online
