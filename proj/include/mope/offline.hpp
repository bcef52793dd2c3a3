#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mope/expert.hpp"
#include "mope/gate.hpp"

namespace mope::offline {

enum class GatingMode {
  kPerPrefix,      // re-gate on the current prefix at every step
  kWholePassword,  // score a complete password with the weights of the whole string
};

/// Mixture of character experts behind the center-distance gate.
class OfflineMope final : public CharModel {
 public:
  OfflineMope(Alphabet alphabet, std::vector<std::shared_ptr<const CharModel>> experts,
              gate::GateConfig gate, GatingMode mode = GatingMode::kPerPrefix);

  const Alphabet& alphabet() const override { return alphabet_; }
  using CharModel::next_dist;
  /// Sum over active experts of w'_j * P_j(c | prefix), gated on the prefix.
  Distribution next_dist(std::span<const Symbol> context) const override;

  /// Gate output for a START-prefixed context; the bare START uses the
  /// cluster priors.
  gate::SparseWeights weights(std::span<const Symbol> context) const;
  Distribution mix(std::span<const Symbol> context, const gate::SparseWeights& w) const;

  std::size_t size() const { return experts_.size(); }
  const CharModel& expert(std::size_t j) const { return *experts_.at(j); }
  const gate::GateConfig& gate() const { return gate_; }
  GatingMode mode() const { return mode_; }

 private:
  Alphabet alphabet_;
  std::vector<std::shared_ptr<const CharModel>> experts_;
  gate::GateConfig gate_;
  GatingMode mode_;
};

/// Product of next-symbol probabilities along START password END. Throws
/// InvalidArgument on characters outside the alphabet.
double sequence_prob(const CharModel& model, std::string_view password);
double log_sequence_prob(const CharModel& model, std::string_view password);

/// As sequence_prob, except that a password of exactly `max_len`
/// characters carries its prefix mass (no END factor), matching how
/// enumeration and sampling truncate at the length cap. An OfflineMope in
/// whole-password mode is scored with one gate evaluation.
double candidate_prob(const CharModel& model, std::string_view password,
                      std::size_t max_len = kMaxPasswordLength);

struct GenerationConfig {
  double tau = 1e-7;
  std::size_t min_len = 1;
  std::size_t max_len = kMaxPasswordLength;
  std::size_t hard_cap = 10'000'000;

  void validate() const;
};

struct Candidate {
  std::string password;
  double prob = 0.0;

  bool operator==(const Candidate&) const = default;
};

class CandidateCapExceeded : public std::runtime_error {
 public:
  explicit CandidateCapExceeded(std::size_t count);
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

/// Threshold enumeration from a FIFO queue: a child is queued only when its
/// cumulative probability reaches tau; prefixes ending in END or reaching
/// max_len are emitted when at least min_len long. Output is sorted by
/// descending probability, ties by string. Throws CandidateCapExceeded when
/// live plus emitted entries pass cfg.hard_cap. An OfflineMope in
/// whole-password mode still prunes on prefixes; emitted candidates carry
/// candidate_prob.
std::vector<Candidate> generate(const CharModel& model, const GenerationConfig& cfg);

/// Same enumeration, written as `password<TAB>probability` lines. Sorted
/// runs of at most `memory_cap` candidates spill to temporary files next to
/// `out` and are merged at the end. Returns the candidate count.
std::size_t generate_to_file(const CharModel& model, const GenerationConfig& cfg,
                             const std::filesystem::path& out, std::size_t memory_cap = 10'000'000);

std::string format_probability(double p);
void write_candidates(std::ostream& out, std::span<const Candidate> candidates);

}  // namespace mope::offline
