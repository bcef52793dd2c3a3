#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mope/alphabet.hpp"

namespace mope::corpus {

struct PasswordRecord {
  std::string password;
  std::optional<std::string> account_key;

  bool operator==(const PasswordRecord&) const = default;
};

/// Ordered (src, tgt) pair of passwords owned by the same account.
struct PairRecord {
  std::string src;
  std::string tgt;

  bool operator==(const PairRecord&) const = default;
};

enum class RejectReason { kEmpty, kTooLong, kInvalidChar, kMalformed };

const char* to_string(RejectReason r);

struct LoadReport {
  std::size_t lines = 0;
  std::size_t kept = 0;
  std::map<RejectReason, std::size_t> rejected;

  std::size_t rejected_total() const;
};

/// Returns the reason `password` fails the record invariants, if any.
std::optional<RejectReason> validate(std::string_view password, const Alphabet& alphabet);

/// One password per line. Lines that violate the record invariants are
/// dropped and counted in `report`; order and multiplicity are preserved.
/// Throws DataError when the file cannot be read or nothing survives.
std::vector<PasswordRecord> load_passwords(const std::filesystem::path& path,
                                           const Alphabet& alphabet,
                                           LoadReport* report = nullptr);

/// Same filtering over in-memory lines.
std::vector<PasswordRecord> filter_lines(const std::vector<std::string>& lines,
                                         const Alphabet& alphabet,
                                         LoadReport* report = nullptr);

/// `account<TAB>password` lines; the account column becomes account_key.
std::vector<PasswordRecord> load_accounts(const std::filesystem::path& path,
                                          const Alphabet& alphabet,
                                          LoadReport* report = nullptr);

/// `src<TAB>tgt` lines. Pairs whose sides fail validation are dropped.
std::vector<PairRecord> load_pairs(const std::filesystem::path& path, const Alphabet& alphabet,
                                   LoadReport* report = nullptr);
void write_pairs(const std::filesystem::path& path, const std::vector<PairRecord>& pairs);

struct Split {
  std::vector<PasswordRecord> train;
  std::vector<PasswordRecord> test;
};

/// Seeded split in which no password string lands on both sides. Distinct
/// strings are shuffled and dealt to test first, then all occurrences of the
/// remaining strings are eligible for train. Throws DataError when the
/// population cannot satisfy the requested sizes.
Split split_train_test(const std::vector<PasswordRecord>& records, std::size_t n_train,
                       std::size_t n_test, std::uint64_t seed);

/// For every account with at least two distinct passwords, emits both
/// orientations of each pair within Levenshtein distance `max_ed`.
std::vector<PairRecord> extract_pairs(const std::vector<PasswordRecord>& records,
                                      std::size_t max_ed);

std::vector<std::string> passwords_of(const std::vector<PasswordRecord>& records);

}  // namespace mope::corpus
