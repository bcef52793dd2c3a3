#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mope/expert.hpp"

namespace mope::distill {

struct DistillConfig {
  double alpha = 0.7;
  double temperature = 2.0;
  double learning_rate = 1e-5;  // parametric students only; unused by the count student
  std::size_t sample_count = 20'000;

  void validate() const;
};

/// alpha * T^2 * KL(temper(t, T) || temper(s, T)) + (1 - alpha) * -log s[label].
/// Throws InvalidArgument when s[label] is 0 and the hard term carries weight.
double distill_loss(std::span<const double> teacher, std::span<const double> student,
                    std::size_t label, double alpha, double temperature);

/// Distribution s minimizing the mean hybrid loss of one context, given the
/// mean tempered teacher distribution and the empirical label distribution:
///
///   alpha * T * (temper(s, T) - soft) + (1 - alpha) * (s - hard) = 0.
///
/// Closed form for alpha in {0, 1} and T = 1; otherwise solved per
/// component for a fixed normalizer of temper(s, T), with that scalar found
/// by bracketed secant search.
Distribution hybrid_optimum(std::span<const double> soft, std::span<const double> hard,
                            double alpha, double temperature);

/// `count` passwords taken from successive shuffled passes over the corpus,
/// so every password appears floor or ceil of count / |corpus| times.
/// Deterministic in seed.
std::vector<std::string> sample_corpus(std::span<const std::string> corpus, std::size_t count,
                                       std::uint64_t seed);

/// Count-model student with the order and smoothing of `cfg`. Every prefix
/// of the sampled passwords is one training example; each context row of
/// the student stores n * hybrid_optimum(...) for the n examples it saw.
/// With alpha = 0 this is pretrain() on the sample.
NGramExpert distill(const CharModel& teacher, std::span<const std::string> corpus,
                    const NGramConfig& student_cfg, const DistillConfig& cfg, std::uint64_t seed);

/// Mean KL(teacher || student) of the next-symbol distributions over the
/// probe prefixes (plain text, START implied).
double student_fidelity(const CharModel& teacher, const CharModel& student,
                        std::span<const std::string> probe_prefixes);

}  // namespace mope::distill
