#include "mope/online.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "mope/error.hpp"

namespace mope::online {
namespace {

constexpr char kMagic[] = "MOPEOP01";

Symbol char_class(char c) {
  if (c >= '0' && c <= '9') return 0;
  if (c >= 'a' && c <= 'z') return 1;
  if (c >= 'A' && c <= 'Z') return 2;
  return 3;
}

}  // namespace

void OnlineConfig::validate() const {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
  if (gamma && !(*gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  if (max_ops < 1 || max_ops > edit::kMaxWorkingLength - kMaxPasswordLength) {
    throw InvalidArgument("max_ops must lie in [1, 4]");
  }
}

std::string OnlineConfig::digest() const {
  std::ostringstream os;
  os.precision(17);
  os << "edit:lambda=" << lambda << ";max_ops=" << max_ops << ";gamma=";
  if (gamma) {
    os << *gamma;
  } else {
    os << "auto";
  }
  return os.str();
}

EditExpert::EditExpert(edit::OpCodec codec, CountModel counts, ExpertMeta meta)
    : codec_(std::move(codec)), counts_(std::move(counts)), meta_(std::move(meta)) {
  if (counts_.vocab() != codec_.size() || counts_.levels() != kLevels) {
    throw InvalidArgument("count model shape does not match the op space");
  }
}

std::vector<std::string> EditExpert::context_keys(const edit::OpCodec& codec, std::string_view src,
                                                  std::span<const edit::EditOp> history) {
  std::vector<std::string> keys(kLevels);
  std::string key;
  append_symbol(key, static_cast<Symbol>(src.size()));
  append_symbol(key, src.empty() ? Symbol{4} : char_class(src.front()));
  append_symbol(key, src.empty() ? Symbol{4} : char_class(src.back()));
  keys[1] = key;
  // Missing history positions use one past the last op symbol.
  const auto none = static_cast<Symbol>(codec.size());
  for (std::size_t back = 1; back <= 2; ++back) {
    append_symbol(key, history.size() >= back ? codec.encode(history[history.size() - back]) : none);
    keys[1 + back] = key;
  }
  return keys;
}

Distribution EditExpert::next_dist(std::string_view src, std::span<const edit::EditOp> history) const {
  return counts_.query(context_keys(codec_, src, history));
}

void EditExpert::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kMagic, 8);
  binio::write_str(out, to_string(meta_.kind));
  binio::write_u64(out, meta_.cluster ? *meta_.cluster + 1 : 0);
  binio::write_u64(out, codec_.alphabet().digest());
  binio::write_u64(out, codec_.size());
  binio::write_str(out, meta_.config_digest);
  counts_.write(out);
  if (!out) throw DataError("write failed for " + path.string());
}

EditExpert EditExpert::load(const std::filesystem::path& path, const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::string_view(magic, 8) != std::string_view(kMagic, 8)) {
    throw DataError("not an edit expert file: " + path.string());
  }
  ExpertMeta meta;
  meta.kind = expert_kind_from(binio::read_str(in));
  if (const auto c = binio::read_u64(in)) meta.cluster = c - 1;
  if (binio::read_u64(in) != alphabet.digest()) throw DataError("edit expert alphabet mismatch");
  edit::OpCodec codec(alphabet);
  if (binio::read_u64(in) != codec.size()) throw DataError("edit expert op space mismatch");
  meta.config_digest = binio::read_str(in);
  return EditExpert(std::move(codec), CountModel::read(in), std::move(meta));
}

namespace {

CountModel count_pairs(std::span<const corpus::PairRecord> pairs, const edit::OpCodec& codec,
                       const OnlineConfig& cfg) {
  CountModel counts(codec.size(), EditExpert::kLevels, cfg.lambda);
  for (const auto& p : pairs) {
    const auto script = edit::min_edit_script(p.src, p.tgt);
    if (script.size() - 1 > cfg.max_ops) {
      throw InvalidArgument("pair (" + p.src + ", " + p.tgt + ") exceeds the edit-distance cap");
    }
    for (std::size_t t = 0; t < script.size(); ++t) {
      const auto keys = EditExpert::context_keys(codec, p.src, std::span(script).first(t));
      counts.observe(keys, codec.encode(script[t]));
    }
  }
  return counts;
}

}  // namespace

EditExpert pretrain_online(std::span<const corpus::PairRecord> pairs, const Alphabet& alphabet,
                           const OnlineConfig& cfg) {
  cfg.validate();
  if (pairs.empty()) throw InvalidArgument("cannot pretrain on an empty pair list");
  edit::OpCodec codec(alphabet);
  auto counts = count_pairs(pairs, codec, cfg);
  return EditExpert(std::move(codec), std::move(counts),
                    {ExpertKind::kPretrained, std::nullopt, cfg.digest()});
}

EditExpert finetune_online(const EditExpert& base, std::span<const corpus::PairRecord> cluster_pairs,
                           const OnlineConfig& cfg, std::size_t cluster_id, std::size_t corpus_size) {
  cfg.validate();
  if (cluster_pairs.empty()) throw InvalidArgument("cannot fine-tune on an empty cluster");
  const double gamma =
      cfg.gamma.value_or(static_cast<double>(cluster_pairs.size()) /
                         (10.0 * static_cast<double>(std::max<std::size_t>(corpus_size, 1))));
  auto counts = count_pairs(cluster_pairs, base.codec(), cfg);
  return EditExpert(base.codec(), counts.blend(base.counts(), gamma),
                    {ExpertKind::kFinetuned, cluster_id, cfg.digest()});
}

std::vector<ScoredCandidate> expert_beam(const EditModel& model, std::string_view src,
                                         const BeamOptions& opt) {
  if (opt.beam_width < 1) throw InvalidArgument("beam width must be >= 1");
  const auto& codec = model.codec();
  std::vector<edit::EditOp> ops(codec.size());
  for (std::size_t s = 0; s < ops.size(); ++s) ops[s] = codec.decode(static_cast<Symbol>(s));

  struct Hyp {
    std::string text;
    std::vector<edit::EditOp> history;
    double prob;
    bool done;
  };
  struct Expansion {
    double prob;
    std::size_t parent;
    std::size_t symbol;  // ops.size() marks a finished hypothesis carried over
  };

  std::vector<Hyp> beam{{std::string(src), {}, 1.0, false}};
  for (std::size_t step = 0;; ++step) {
    std::vector<Expansion> next;
    bool any_live = false;
    for (std::size_t h = 0; h < beam.size(); ++h) {
      const Hyp& hyp = beam[h];
      if (hyp.done) {
        next.push_back({hyp.prob, h, ops.size()});
        continue;
      }
      any_live = true;
      const auto dist = model.next_dist(src, hyp.history);
      const bool must_end = step >= opt.max_ops;
      double z = 0.0;
      for (std::size_t s = 0; s < ops.size(); ++s) {
        if ((!must_end || ops[s].kind == edit::OpKind::kEnd) && edit::applicable(ops[s], hyp.text.size())) {
          z += dist[s];
        }
      }
      if (!(z > 0.0)) continue;
      for (std::size_t s = 0; s < ops.size(); ++s) {
        if (dist[s] > 0.0 && (!must_end || ops[s].kind == edit::OpKind::kEnd) &&
            edit::applicable(ops[s], hyp.text.size())) {
          next.push_back({hyp.prob * dist[s] / z, h, s});
        }
      }
    }
    if (!any_live) break;

    auto better = [](const Expansion& a, const Expansion& b) {
      if (a.prob != b.prob) return a.prob > b.prob;
      if (a.parent != b.parent) return a.parent < b.parent;
      return a.symbol < b.symbol;
    };
    if (next.size() > opt.beam_width) {
      std::nth_element(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(opt.beam_width) - 1,
                       next.end(), better);
      next.resize(opt.beam_width);
    }
    std::sort(next.begin(), next.end(), better);

    std::vector<Hyp> grown;
    grown.reserve(next.size());
    for (const auto& e : next) {
      const Hyp& parent = beam[e.parent];
      if (e.symbol == ops.size()) {
        grown.push_back(parent);
        continue;
      }
      Hyp child{parent.text, parent.history, e.prob, false};
      const auto& op = ops[e.symbol];
      child.history.push_back(op);
      if (op.kind == edit::OpKind::kEnd) {
        child.done = true;
      } else {
        edit::apply(child.text, op);
      }
      grown.push_back(std::move(child));
    }
    beam = std::move(grown);
  }

  std::map<std::string, double> merged;
  for (const auto& h : beam) {
    if (h.done) merged[h.text] += h.prob;
  }
  std::vector<ScoredCandidate> out;
  out.reserve(merged.size());
  for (auto& [text, p] : merged) out.push_back({text, p});
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredCandidate& a, const ScoredCandidate& b) { return a.score > b.score; });
  return out;
}

OnlineMope::OnlineMope(std::vector<std::shared_ptr<const EditModel>> experts, gate::GateConfig gate,
                       std::size_t beam_width, std::size_t candidates)
    : experts_(std::move(experts)), gate_(std::move(gate)), beam_width_(beam_width),
      candidates_(candidates) {
  gate_.validate();
  if (experts_.size() != gate_.clusters->k) {
    throw InvalidArgument("expert count must equal the number of clusters");
  }
  if (beam_width_ < 1) throw InvalidArgument("beam width must be >= 1");
  // K may exceed B since candidates are pooled across the active experts.
  if (candidates_ < 1) throw InvalidArgument("candidate count must be >= 1");
}

std::vector<ScoredCandidate> beam_search(const OnlineMope& m, std::string_view src,
                                         std::size_t beam_width, std::size_t k,
                                         std::size_t max_ops) {
  if (beam_width < 1) throw InvalidArgument("beam width must be >= 1");
  const auto w = gate::gate_weights(m.gate(), src);
  std::unordered_map<std::string, double> combined;
  for (auto j : w.active) {
    for (const auto& c : expert_beam(m.expert(j), src, {beam_width, max_ops})) {
      combined[c.password] += w.weights[j] * c.score;
    }
  }
  std::vector<ScoredCandidate> out;
  out.reserve(combined.size());
  for (auto& [text, s] : combined) out.push_back({text, s});
  std::sort(out.begin(), out.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.password < b.password;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<double> online_crack_rate(const OnlineMope& m,
                                      std::span<const corpus::PairRecord> test_pairs,
                                      std::span<const std::size_t> budgets, std::size_t max_ops) {
  if (test_pairs.empty()) throw InvalidArgument("online crack rate needs test pairs");
  if (budgets.empty()) throw InvalidArgument("no budgets given");
  const std::size_t top = *std::max_element(budgets.begin(), budgets.end());
  if (top > m.candidates()) throw InvalidArgument("budget exceeds the candidate count K");

  std::vector<std::size_t> cracked(budgets.size(), 0);
  for (const auto& p : test_pairs) {
    const auto cands = beam_search(m, p.src, m.beam_width(), top, max_ops);
    const auto hit = std::find_if(cands.begin(), cands.end(),
                                  [&](const ScoredCandidate& c) { return c.password == p.tgt; });
    if (hit == cands.end()) continue;
    const auto rank = static_cast<std::size_t>(hit - cands.begin()) + 1;
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      if (rank <= budgets[b]) ++cracked[b];
    }
  }
  std::vector<double> rates;
  for (auto c : cracked) rates.push_back(static_cast<double>(c) / static_cast<double>(test_pairs.size()));
  return rates;
}

}  // namespace mope::online
