#include "mope/offline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <queue>

#include "mope/error.hpp"

namespace mope::offline {

OfflineMope::OfflineMope(Alphabet alphabet, std::vector<std::shared_ptr<const CharModel>> experts,
                         gate::GateConfig gate, GatingMode mode)
    : alphabet_(std::move(alphabet)), experts_(std::move(experts)), gate_(std::move(gate)),
      mode_(mode) {
  gate_.validate();
  if (experts_.size() != gate_.clusters->k) {
    throw InvalidArgument("expert count must equal the number of clusters");
  }
  for (const auto& e : experts_) {
    if (!e || !(e->alphabet() == alphabet_)) {
      throw InvalidArgument("every expert must share the mixture alphabet");
    }
  }
}

gate::SparseWeights OfflineMope::weights(std::span<const Symbol> context) const {
  if (context.size() <= 1) return gate::prior_weights(gate_);
  std::string prefix;
  prefix.reserve(context.size() - 1);
  for (std::size_t i = 1; i < context.size(); ++i) {
    if (context[i] >= alphabet_.size()) throw InvalidArgument("unknown symbol in context");
    prefix.push_back(alphabet_.character(context[i]));
  }
  return gate::gate_weights(gate_, prefix);
}

Distribution OfflineMope::mix(std::span<const Symbol> context, const gate::SparseWeights& w) const {
  Distribution out(alphabet_.outcomes(), 0.0);
  for (auto j : w.active) {
    const auto p = experts_[j]->next_dist(context);
    const double wj = w.weights[j];
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += wj * p[c];
  }
  return out;
}

Distribution OfflineMope::next_dist(std::span<const Symbol> context) const {
  return mix(context, weights(context));
}

double log_sequence_prob(const CharModel& model, std::string_view password) {
  const auto& alphabet = model.alphabet();
  const auto ctx = alphabet.encode_context(password);
  double lp = 0.0;
  for (std::size_t t = 1; t <= ctx.size(); ++t) {
    const Symbol next = t < ctx.size() ? ctx[t] : alphabet.end();
    lp += std::log(model.next_dist(std::span(ctx).first(t))[next]);
  }
  return lp;
}

double sequence_prob(const CharModel& model, std::string_view password) {
  const auto& alphabet = model.alphabet();
  const auto ctx = alphabet.encode_context(password);
  double p = 1.0;
  for (std::size_t t = 1; t <= ctx.size(); ++t) {
    const Symbol next = t < ctx.size() ? ctx[t] : alphabet.end();
    p *= model.next_dist(std::span(ctx).first(t))[next];
  }
  return p;
}

double candidate_prob(const CharModel& model, std::string_view password, std::size_t max_len) {
  const auto& alphabet = model.alphabet();
  const auto ctx = alphabet.encode_context(password);
  const bool truncated = password.size() >= max_len;
  const std::size_t steps = truncated ? ctx.size() - 1 : ctx.size();

  const auto* mope = dynamic_cast<const OfflineMope*>(&model);
  std::optional<gate::SparseWeights> fixed;
  if (mope && mope->mode() == GatingMode::kWholePassword && !password.empty()) {
    fixed = gate::gate_weights(mope->gate(), password);
  }

  double p = 1.0;
  for (std::size_t t = 1; t <= steps; ++t) {
    const Symbol next = t < ctx.size() ? ctx[t] : alphabet.end();
    const auto prefix = std::span(ctx).first(t);
    p *= (fixed ? mope->mix(prefix, *fixed) : model.next_dist(prefix))[next];
  }
  return p;
}

void GenerationConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in (0, 1)");
  if (min_len < 1 || min_len > max_len || max_len > kMaxPasswordLength) {
    throw InvalidArgument("length bounds must satisfy 1 <= min_len <= max_len <= 16");
  }
}

CandidateCapExceeded::CandidateCapExceeded(std::size_t count)
    : std::runtime_error("candidate set exceeded the hard cap (" + std::to_string(count) +
                         " entries); raise tau or the cap"),
      count_(count) {}

namespace {

bool by_prob_desc(const Candidate& a, const Candidate& b) {
  if (a.prob != b.prob) return a.prob > b.prob;
  return a.password < b.password;
}

struct QueueEntry {
  std::string text;
  double prob;
  bool ended;
};

// Runs the enumeration and hands every emitted candidate to `emit`.
void enumerate(const CharModel& model, const GenerationConfig& cfg, std::size_t live_cap,
               const std::function<void(Candidate&&)>& emit) {
  cfg.validate();
  const auto& alphabet = model.alphabet();
  // whole-password gating prunes on prefixes and rescores what it emits
  const auto* mope = dynamic_cast<const OfflineMope*>(&model);
  const bool rescore = mope && mope->mode() == GatingMode::kWholePassword;
  std::deque<QueueEntry> queue;
  queue.push_back({"", 1.0, false});
  std::vector<Symbol> ctx;

  while (!queue.empty()) {
    QueueEntry x = std::move(queue.front());
    queue.pop_front();
    if (x.ended || x.text.size() >= cfg.max_len) {
      if (x.text.size() >= cfg.min_len) {
        const double p = rescore ? candidate_prob(model, x.text, cfg.max_len) : x.prob;
        emit({std::move(x.text), p});
      }
      continue;
    }
    ctx = alphabet.encode_context(x.text);
    const auto dist = model.next_dist(std::span<const Symbol>(ctx));
    for (std::size_t c = 0; c < dist.size(); ++c) {
      const double p = x.prob * dist[c];
      if (!(p >= cfg.tau)) continue;
      if (c == alphabet.end()) {
        queue.push_back({x.text, p, true});
      } else {
        queue.push_back({x.text + alphabet.character(static_cast<Symbol>(c)), p, false});
      }
    }
    if (queue.size() > live_cap) throw CandidateCapExceeded(queue.size());
  }
}

}  // namespace

std::vector<Candidate> generate(const CharModel& model, const GenerationConfig& cfg) {
  std::vector<Candidate> out;
  enumerate(model, cfg, cfg.hard_cap, [&](Candidate&& c) {
    out.push_back(std::move(c));
    if (out.size() > cfg.hard_cap) throw CandidateCapExceeded(out.size());
  });
  std::sort(out.begin(), out.end(), by_prob_desc);
  return out;
}

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", p);
  return buf;
}

void write_candidates(std::ostream& out, std::span<const Candidate> candidates) {
  for (const auto& c : candidates) out << c.password << '\t' << format_probability(c.prob) << '\n';
}

std::size_t generate_to_file(const CharModel& model, const GenerationConfig& cfg,
                             const std::filesystem::path& out, std::size_t memory_cap) {
  if (memory_cap == 0) throw InvalidArgument("memory cap must be positive");
  std::vector<Candidate> buffer;
  std::vector<std::filesystem::path> runs;
  std::size_t total = 0;

  auto spill = [&] {
    std::sort(buffer.begin(), buffer.end(), by_prob_desc);
    auto path = out;
    path += ".run" + std::to_string(runs.size());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    write_candidates(f, buffer);
    runs.push_back(std::move(path));
    buffer.clear();
  };

  enumerate(model, cfg, cfg.hard_cap, [&](Candidate&& c) {
    buffer.push_back(std::move(c));
    ++total;
    if (buffer.size() >= memory_cap) spill();
  });

  std::ofstream dst(out, std::ios::binary);
  if (!dst) throw DataError("cannot write " + out.string());
  if (runs.empty()) {
    std::sort(buffer.begin(), buffer.end(), by_prob_desc);
    write_candidates(dst, buffer);
    return total;
  }
  if (!buffer.empty()) spill();

  // k-way merge of the sorted runs.
  struct Head {
    Candidate cand;
    std::size_t run;
  };
  auto worse = [](const Head& a, const Head& b) { return by_prob_desc(b.cand, a.cand); };
  std::priority_queue<Head, std::vector<Head>, decltype(worse)> heap(worse);
  std::vector<std::ifstream> streams;
  streams.reserve(runs.size());
  auto pull = [&](std::size_t r) {
    std::string line;
    if (!std::getline(streams[r], line)) return;
    const auto tab = line.rfind('\t');
    heap.push({{line.substr(0, tab), std::stod(line.substr(tab + 1))}, r});
  };
  for (std::size_t r = 0; r < runs.size(); ++r) {
    streams.emplace_back(runs[r], std::ios::binary);
    pull(r);
  }
  while (!heap.empty()) {
    Head h = heap.top();
    heap.pop();
    dst << h.cand.password << '\t' << format_probability(h.cand.prob) << '\n';
    pull(h.run);
  }
  streams.clear();
  for (const auto& r : runs) std::filesystem::remove(r);
  return total;
}

}  // namespace mope::offline
