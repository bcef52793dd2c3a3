#include "mope/expert.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mope/error.hpp"

namespace mope {

namespace {
constexpr char kMagic[] = "MOPEXP01";
}

Distribution CharModel::next_dist(std::string_view prefix) const {
  const auto ctx = alphabet().encode_context(prefix);
  return next_dist(std::span<const Symbol>(ctx));
}

const char* to_string(ExpertKind k) {
  switch (k) {
    case ExpertKind::kPretrained: return "pretrained";
    case ExpertKind::kFinetuned: return "finetuned";
    case ExpertKind::kDistilled: return "distilled";
  }
  return "unknown";
}

ExpertKind expert_kind_from(std::string_view s) {
  if (s == "pretrained") return ExpertKind::kPretrained;
  if (s == "finetuned") return ExpertKind::kFinetuned;
  if (s == "distilled") return ExpertKind::kDistilled;
  throw DataError("unknown expert kind: " + std::string(s));
}

void NGramConfig::validate() const {
  if (order < 1) throw InvalidArgument("n-gram order must be >= 1");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
  if (!level_weights.empty() && level_weights.size() != order + 1) {
    throw InvalidArgument("level_weights needs order + 1 entries");
  }
  if (gamma && !(*gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
}

std::string NGramConfig::digest() const {
  std::ostringstream os;
  os.precision(17);
  os << "ngram:order=" << order << ";lambda=" << lambda << ";weights=";
  for (double w : level_weights) os << w << ',';
  os << ";gamma=";
  if (gamma) {
    os << *gamma;
  } else {
    os << "auto";
  }
  return os.str();
}

NGramExpert::NGramExpert(Alphabet alphabet, std::size_t order, CountModel counts, ExpertMeta meta)
    : alphabet_(std::move(alphabet)), order_(order), counts_(std::move(counts)),
      meta_(std::move(meta)) {
  if (counts_.vocab() != alphabet_.outcomes() || counts_.levels() != order_ + 1) {
    throw InvalidArgument("count model shape does not match alphabet and order");
  }
}

std::vector<std::string> NGramExpert::context_keys(std::span<const Symbol> context,
                                                   std::size_t order) {
  std::vector<std::string> keys;
  const std::size_t usable = std::min(order, context.size());
  keys.reserve(usable + 1);
  std::string key;
  keys.push_back(key);
  // Level l holds the last l symbols, most recent first.
  for (std::size_t l = 1; l <= usable; ++l) {
    append_symbol(key, context[context.size() - l]);
    keys.push_back(key);
  }
  return keys;
}

Distribution NGramExpert::next_dist(std::span<const Symbol> context) const {
  if (context.empty() || context.front() != alphabet_.start()) {
    throw InvalidArgument("context must begin with START");
  }
  for (std::size_t i = 1; i < context.size(); ++i) {
    if (context[i] >= alphabet_.size()) throw InvalidArgument("unknown symbol in context");
  }
  const auto keys = context_keys(context, order_);
  return counts_.query(keys);
}

void NGramExpert::write(std::ostream& out) const {
  out.write(kMagic, 8);
  binio::write_str(out, to_string(meta_.kind));
  binio::write_u64(out, meta_.cluster ? *meta_.cluster + 1 : 0);
  binio::write_u64(out, order_);
  binio::write_u64(out, alphabet_.digest());
  binio::write_str(out, meta_.config_digest);
  counts_.write(out);
}

NGramExpert NGramExpert::read(std::istream& in, const Alphabet& alphabet) {
  char magic[8];
  if (!in.read(magic, 8) || std::string_view(magic, 8) != std::string_view(kMagic, 8)) {
    throw DataError("not an expert file");
  }
  ExpertMeta meta;
  meta.kind = expert_kind_from(binio::read_str(in));
  if (const auto c = binio::read_u64(in)) meta.cluster = c - 1;
  const auto order = binio::read_u64(in);
  if (binio::read_u64(in) != alphabet.digest()) throw DataError("expert alphabet mismatch");
  meta.config_digest = binio::read_str(in);
  auto counts = CountModel::read(in);
  return NGramExpert(alphabet, order, std::move(counts), std::move(meta));
}

void NGramExpert::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write(out);
  if (!out) throw DataError("write failed for " + path.string());
}

NGramExpert NGramExpert::load(const std::filesystem::path& path, const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return read(in, alphabet);
}

namespace {

CountModel count_corpus(std::span<const std::string> corpus, const Alphabet& alphabet,
                        const NGramConfig& cfg) {
  CountModel counts(alphabet.outcomes(), cfg.order + 1, cfg.lambda, cfg.level_weights);
  for (const auto& pwd : corpus) {
    const auto ctx = alphabet.encode_context(pwd);
    for (std::size_t t = 1; t <= ctx.size(); ++t) {
      const Symbol next = t < ctx.size() ? ctx[t] : alphabet.end();
      const auto keys = NGramExpert::context_keys(std::span(ctx).first(t), cfg.order);
      counts.observe(keys, next);
    }
  }
  return counts;
}

}  // namespace

NGramExpert pretrain(std::span<const std::string> corpus, const Alphabet& alphabet,
                     const NGramConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw InvalidArgument("cannot pretrain on an empty corpus");
  return NGramExpert(alphabet, cfg.order, count_corpus(corpus, alphabet, cfg),
                     {ExpertKind::kPretrained, std::nullopt, cfg.digest()});
}

NGramExpert finetune(const NGramExpert& base, std::span<const std::string> cluster_corpus,
                     const NGramConfig& cfg, std::size_t cluster_id, std::size_t corpus_size) {
  cfg.validate();
  if (cluster_corpus.empty()) throw InvalidArgument("cannot fine-tune on an empty cluster");
  if (cfg.order != base.order()) throw InvalidArgument("fine-tune order must match the base");
  const double gamma =
      cfg.gamma.value_or(static_cast<double>(cluster_corpus.size()) /
                         (10.0 * static_cast<double>(std::max<std::size_t>(corpus_size, 1))));
  auto cluster_counts = count_corpus(cluster_corpus, base.alphabet(), cfg);
  return NGramExpert(base.alphabet(), cfg.order, cluster_counts.blend(base.counts(), gamma),
                     {ExpertKind::kFinetuned, cluster_id, cfg.digest()});
}

double log_likelihood(const CharModel& model, std::span<const std::string> corpus) {
  const auto& alphabet = model.alphabet();
  double ll = 0.0;
  for (const auto& pwd : corpus) {
    const auto ctx = alphabet.encode_context(pwd);
    for (std::size_t t = 1; t <= ctx.size(); ++t) {
      const Symbol next = t < ctx.size() ? ctx[t] : alphabet.end();
      ll += std::log(model.next_dist(std::span(ctx).first(t))[next]);
    }
  }
  return ll;
}

}  // namespace mope
