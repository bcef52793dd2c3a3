#include "mope/count_model.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>

#include "mope/error.hpp"

namespace mope {

namespace binio {

void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

void write_str(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw DataError("truncated model file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

std::string read_str(std::istream& in) {
  const auto n = read_u64(in);
  if (n > (1u << 20)) throw DataError("corrupt string length in model file");
  std::string s(n, '\0');
  if (!in.read(s.data(), static_cast<std::streamsize>(n))) throw DataError("truncated model file");
  return s;
}

}  // namespace binio

void CountModel::Row::add(Symbol y, double w) {
  auto it = std::lower_bound(counts.begin(), counts.end(), y,
                             [](const auto& e, Symbol s) { return e.first < s; });
  if (it != counts.end() && it->first == y) {
    it->second += w;
  } else {
    counts.insert(it, {y, w});
  }
  total += w;
}

CountModel::CountModel(std::size_t vocab, std::size_t levels, double lambda,
                       std::vector<double> level_weights)
    : vocab_(vocab), lambda_(lambda), level_weights_(std::move(level_weights)), tables_(levels) {
  if (vocab_ == 0 || levels == 0) throw InvalidArgument("count model needs a vocabulary and levels");
  if (!(lambda_ > 0.0)) throw InvalidArgument("smoothing lambda must be positive");
  if (level_weights_.empty()) level_weights_.assign(levels, 1.0);
  if (level_weights_.size() != levels) throw InvalidArgument("one weight per level required");
  for (double w : level_weights_) {
    if (!(w > 0.0)) throw InvalidArgument("level weights must be positive");
  }
}

void CountModel::observe(std::span<const std::string> keys, Symbol y, double weight) {
  if (y >= vocab_) throw InvalidArgument("symbol outside the vocabulary");
  const std::size_t n = std::min(keys.size(), tables_.size());
  for (std::size_t l = 0; l < n; ++l) tables_[l][keys[l]].add(y, weight);
}

void CountModel::observe(std::span<const std::string> keys, std::span<const double> target,
                         double weight) {
  if (target.size() != vocab_) throw InvalidArgument("target size does not match vocabulary");
  const std::size_t n = std::min(keys.size(), tables_.size());
  for (std::size_t l = 0; l < n; ++l) {
    auto& row = tables_[l][keys[l]];
    for (std::size_t y = 0; y < vocab_; ++y) {
      if (target[y] > 0.0) row.add(static_cast<Symbol>(y), weight * target[y]);
    }
  }
}

void CountModel::add(std::size_t level, const std::string& key, Symbol y, double w) {
  if (level >= tables_.size()) throw InvalidArgument("level out of range");
  if (y >= vocab_) throw InvalidArgument("symbol outside the vocabulary");
  tables_[level][key].add(y, w);
}

Distribution CountModel::query(std::span<const std::string> keys) const {
  Distribution p(vocab_, 1.0 / static_cast<double>(vocab_));
  const std::size_t n = std::min(keys.size(), tables_.size());
  const double base_kappa = lambda_ * static_cast<double>(vocab_);
  for (std::size_t l = 0; l < n; ++l) {
    const auto it = tables_[l].find(keys[l]);
    if (it == tables_[l].end()) break;
    const Row& row = it->second;
    const double kappa = base_kappa * level_weights_[l];
    const double denom = row.total + kappa;
    const double keep = kappa / denom;
    for (double& x : p) x *= keep;
    for (const auto& [y, c] : row.counts) p[y] += c / denom;
  }
  return p;
}

CountModel CountModel::blend(const CountModel& base, double gamma) const {
  if (base.vocab_ != vocab_ || base.tables_.size() != tables_.size()) {
    throw InvalidArgument("cannot blend count models of different shape");
  }
  if (!(gamma >= 0.0)) throw InvalidArgument("blend weight must be non-negative");
  CountModel out(vocab_, tables_.size(), lambda_, level_weights_);
  const double scale = 1.0 / (1.0 + gamma);
  for (std::size_t l = 0; l < tables_.size(); ++l) {
    auto& dst = out.tables_[l];
    for (const auto& [key, row] : tables_[l]) {
      auto& r = dst[key];
      for (const auto& [y, c] : row.counts) r.add(y, c);
    }
    if (gamma > 0.0) {
      for (const auto& [key, row] : base.tables_[l]) {
        auto& r = dst[key];
        for (const auto& [y, c] : row.counts) r.add(y, gamma * c);
      }
    }
    if (gamma > 0.0) {
      for (auto& [_, r] : dst) {
        r.total = 0.0;
        for (auto& [y, c] : r.counts) {
          c *= scale;
          r.total += c;
        }
      }
    }
  }
  return out;
}

std::size_t CountModel::context_count() const {
  std::size_t n = 0;
  for (const auto& t : tables_) n += t.size();
  return n;
}

void CountModel::write(std::ostream& out) const {
  binio::write_u64(out, vocab_);
  binio::write_f64(out, lambda_);
  binio::write_u64(out, tables_.size());
  for (double w : level_weights_) binio::write_f64(out, w);
  for (const auto& table : tables_) {
    std::vector<const std::pair<const std::string, Row>*> entries;
    entries.reserve(table.size());
    for (const auto& e : table) entries.push_back(&e);
    std::sort(entries.begin(), entries.end(), [](auto a, auto b) { return a->first < b->first; });
    binio::write_u64(out, entries.size());
    for (const auto* e : entries) {
      binio::write_str(out, e->first);
      binio::write_f64(out, e->second.total);
      binio::write_u64(out, e->second.counts.size());
      for (const auto& [y, c] : e->second.counts) {
        binio::write_u64(out, y);
        binio::write_f64(out, c);
      }
    }
  }
}

CountModel CountModel::read(std::istream& in) {
  CountModel m;
  m.vocab_ = binio::read_u64(in);
  m.lambda_ = binio::read_f64(in);
  const auto levels = binio::read_u64(in);
  if (m.vocab_ == 0 || m.vocab_ > 65536 || levels == 0 || levels > 64) {
    throw DataError("corrupt count model header");
  }
  m.level_weights_.resize(levels);
  for (auto& w : m.level_weights_) w = binio::read_f64(in);
  m.tables_.resize(levels);
  for (auto& table : m.tables_) {
    const auto n = binio::read_u64(in);
    table.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      auto key = binio::read_str(in);
      Row row;
      row.total = binio::read_f64(in);
      const auto entries = binio::read_u64(in);
      if (entries > m.vocab_) throw DataError("corrupt count row");
      row.counts.reserve(entries);
      for (std::uint64_t e = 0; e < entries; ++e) {
        const auto y = binio::read_u64(in);
        const double c = binio::read_f64(in);
        if (y >= m.vocab_) throw DataError("corrupt count row symbol");
        row.counts.emplace_back(static_cast<Symbol>(y), c);
      }
      table.emplace(std::move(key), std::move(row));
    }
  }
  return m;
}

}  // namespace mope
