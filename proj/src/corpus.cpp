#include "mope/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "mope/edit_ops.hpp"
#include "mope/error.hpp"

namespace mope::corpus {
namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw DataError("read error on " + path.string());
  return lines;
}

void count_reject(LoadReport* report, RejectReason r) {
  if (report) ++report->rejected[r];
}

}  // namespace

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kEmpty: return "empty";
    case RejectReason::kTooLong: return "too_long";
    case RejectReason::kInvalidChar: return "invalid_char";
    case RejectReason::kMalformed: return "malformed";
  }
  return "unknown";
}

std::size_t LoadReport::rejected_total() const {
  std::size_t n = 0;
  for (const auto& [_, c] : rejected) n += c;
  return n;
}

std::optional<RejectReason> validate(std::string_view password, const Alphabet& alphabet) {
  if (password.empty()) return RejectReason::kEmpty;
  if (password.size() > kMaxPasswordLength) return RejectReason::kTooLong;
  if (!alphabet.covers(password)) return RejectReason::kInvalidChar;
  return std::nullopt;
}

std::vector<PasswordRecord> filter_lines(const std::vector<std::string>& lines,
                                         const Alphabet& alphabet, LoadReport* report) {
  std::vector<PasswordRecord> out;
  for (const auto& line : lines) {
    if (report) ++report->lines;
    if (auto r = validate(line, alphabet)) {
      count_reject(report, *r);
      continue;
    }
    out.push_back({line, std::nullopt});
  }
  if (report) report->kept = out.size();
  return out;
}

std::vector<PasswordRecord> load_passwords(const std::filesystem::path& path,
                                           const Alphabet& alphabet, LoadReport* report) {
  auto out = filter_lines(read_lines(path), alphabet, report);
  if (out.empty()) throw DataError("no valid passwords in " + path.string());
  return out;
}

std::vector<PasswordRecord> load_accounts(const std::filesystem::path& path,
                                          const Alphabet& alphabet, LoadReport* report) {
  std::vector<PasswordRecord> out;
  for (const auto& line : read_lines(path)) {
    if (report) ++report->lines;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      count_reject(report, RejectReason::kMalformed);
      continue;
    }
    std::string pwd = line.substr(tab + 1);
    if (auto r = validate(pwd, alphabet)) {
      count_reject(report, *r);
      continue;
    }
    out.push_back({std::move(pwd), line.substr(0, tab)});
  }
  if (report) report->kept = out.size();
  if (out.empty()) throw DataError("no valid account records in " + path.string());
  return out;
}

std::vector<PairRecord> load_pairs(const std::filesystem::path& path, const Alphabet& alphabet,
                                   LoadReport* report) {
  std::vector<PairRecord> out;
  for (const auto& line : read_lines(path)) {
    if (report) ++report->lines;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      count_reject(report, RejectReason::kMalformed);
      continue;
    }
    PairRecord p{line.substr(0, tab), line.substr(tab + 1)};
    auto r = validate(p.src, alphabet);
    if (!r) r = validate(p.tgt, alphabet);
    if (r) {
      count_reject(report, *r);
      continue;
    }
    out.push_back(std::move(p));
  }
  if (report) report->kept = out.size();
  if (out.empty()) throw DataError("no valid pairs in " + path.string());
  return out;
}

void write_pairs(const std::filesystem::path& path, const std::vector<PairRecord>& pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& p : pairs) out << p.src << '\t' << p.tgt << '\n';
}

Split split_train_test(const std::vector<PasswordRecord>& records, std::size_t n_train,
                       std::size_t n_test, std::uint64_t seed) {
  // Group occurrences by string, in first-appearance order.
  std::vector<std::string> distinct;
  std::unordered_map<std::string, std::vector<std::size_t>> occurrences;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, fresh] = occurrences.try_emplace(records[i].password);
    if (fresh) distinct.push_back(records[i].password);
    it->second.push_back(i);
  }
  if (n_train + n_test > records.size()) {
    throw DataError("insufficient data: need " + std::to_string(n_train + n_test) +
                    " records, have " + std::to_string(records.size()));
  }

  std::mt19937_64 rng(seed);
  std::shuffle(distinct.begin(), distinct.end(), rng);

  Split split;
  std::vector<std::size_t> train_pool;
  for (const auto& s : distinct) {
    const auto& occ = occurrences.at(s);
    if (split.test.size() < n_test) {
      for (std::size_t i = 0; i < occ.size() && split.test.size() < n_test; ++i) {
        split.test.push_back(records[occ[i]]);
      }
    } else {
      train_pool.insert(train_pool.end(), occ.begin(), occ.end());
    }
  }
  if (split.test.size() < n_test || train_pool.size() < n_train) {
    throw DataError("insufficient data after enforcing no overlap between train and test");
  }
  std::shuffle(train_pool.begin(), train_pool.end(), rng);
  train_pool.resize(n_train);
  split.train.reserve(n_train);
  for (auto i : train_pool) split.train.push_back(records[i]);
  return split;
}

std::vector<PairRecord> extract_pairs(const std::vector<PasswordRecord>& records,
                                      std::size_t max_ed) {
  std::map<std::string, std::vector<std::string>> by_account;
  for (const auto& r : records) {
    if (!r.account_key) continue;
    auto& list = by_account[*r.account_key];
    if (std::find(list.begin(), list.end(), r.password) == list.end()) {
      list.push_back(r.password);
    }
  }
  std::vector<PairRecord> pairs;
  for (const auto& [_, pwds] : by_account) {
    for (std::size_t i = 0; i < pwds.size(); ++i) {
      for (std::size_t j = i + 1; j < pwds.size(); ++j) {
        if (edit::levenshtein(pwds[i], pwds[j]) <= max_ed) {
          pairs.push_back({pwds[i], pwds[j]});
          pairs.push_back({pwds[j], pwds[i]});
        }
      }
    }
  }
  return pairs;
}

std::vector<std::string> passwords_of(const std::vector<PasswordRecord>& records) {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.password);
  return out;
}

}  // namespace mope::corpus
