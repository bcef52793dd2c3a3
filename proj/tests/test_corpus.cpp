#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mope/corpus.hpp"
#include "mope/error.hpp"
#include "support/oracles.hpp"
#include "support/tmp.hpp"

using namespace mope;
using namespace mope::corpus;

namespace {

std::vector<PasswordRecord> plain(const std::vector<std::string>& pwds) {
  std::vector<PasswordRecord> out;
  for (const auto& p : pwds) out.push_back({p, std::nullopt});
  return out;
}

std::vector<PasswordRecord> owned(const std::string& acct, const std::vector<std::string>& pwds) {
  std::vector<PasswordRecord> out;
  for (const auto& p : pwds) out.push_back({p, acct});
  return out;
}

}  // namespace

TEST_CASE("load_passwords keeps valid lines and counts rejects") {
  testing::TempDir dir;
  testing::write_lines(dir / "p.txt", {"abc123", "p\xc3\xa4ssword", std::string(20, 'a')});
  LoadReport rep;
  const auto recs = load_passwords(dir / "p.txt", Alphabet::printable_ascii(), &rep);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].password == "abc123");
  CHECK(rep.kept == 1);
  CHECK(rep.rejected_total() == 2);
  CHECK(rep.rejected[RejectReason::kInvalidChar] == 1);
  CHECK(rep.rejected[RejectReason::kTooLong] == 1);
}

TEST_CASE("load_passwords identity and multiplicity") {
  testing::TempDir dir;
  testing::write_lines(dir / "a.txt", {"123456"});
  CHECK(passwords_of(load_passwords(dir / "a.txt", Alphabet::printable_ascii())) ==
        std::vector<std::string>{"123456"});
  testing::write_lines(dir / "b.txt", {"hello", "x", "hello", "hello"});
  const auto recs = load_passwords(dir / "b.txt", Alphabet::printable_ascii());
  CHECK(std::count_if(recs.begin(), recs.end(), [](auto& r) { return r.password == "hello"; }) == 3);
  CHECK(recs.size() == 4);
}

TEST_CASE("load_passwords errors") {
  testing::TempDir dir;
  CHECK_THROWS_AS(load_passwords(dir / "missing.txt", Alphabet::printable_ascii()), DataError);
  testing::write_lines(dir / "bad.txt", {"", std::string(17, 'x')});
  CHECK_THROWS_AS(load_passwords(dir / "bad.txt", Alphabet::printable_ascii()), DataError);
}

TEST_CASE("CRLF line endings are tolerated") {
  testing::TempDir dir;
  {
    std::ofstream out(dir / "crlf.txt", std::ios::binary);
    out << "abc\r\ndef\r\n";
  }
  CHECK(passwords_of(load_passwords(dir / "crlf.txt", Alphabet::printable_ascii())) ==
        std::vector<std::string>{"abc", "def"});
}

TEST_CASE("fuzz: random byte lines only yield valid records") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> byte(0, 255), len(0, 24);
  const auto alphabet = Alphabet::printable_ascii();
  std::vector<std::string> lines;
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    const int n = len(rng);
    for (int j = 0; j < n; ++j) {
      char c = static_cast<char>(byte(rng));
      if (c == '\n') c = 'n';
      s.push_back(c);
    }
    lines.push_back(s);
  }
  LoadReport rep;
  const auto recs = filter_lines(lines, alphabet, &rep);
  CHECK(rep.kept + rep.rejected_total() == lines.size());
  for (const auto& r : recs) {
    CHECK(!r.password.empty());
    CHECK(r.password.size() <= 16);
    CHECK(alphabet.covers(r.password));
  }
}

TEST_CASE("split_train_test is disjoint, sized and deterministic") {
  std::vector<std::string> pwds;
  for (int i = 0; i < 10; ++i) pwds.push_back("pw" + std::to_string(i));
  const auto recs = plain(pwds);
  const auto a = split_train_test(recs, 6, 4, 7);
  const auto b = split_train_test(recs, 6, 4, 7);
  CHECK(a.train.size() == 6);
  CHECK(a.test.size() == 4);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  std::set<std::string> train;
  for (const auto& r : a.train) train.insert(r.password);
  for (const auto& r : a.test) CHECK(train.count(r.password) == 0);
}

TEST_CASE("split_train_test keeps duplicates on one side") {
  const auto recs = plain({"a", "a", "a", "b", "c", "c", "d"});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = split_train_test(recs, 3, 2, seed);
    std::set<std::string> train;
    for (const auto& r : s.train) train.insert(r.password);
    for (const auto& r : s.test) CHECK(train.count(r.password) == 0);
  }
}

TEST_CASE("split_train_test pigeonhole") {
  CHECK_THROWS_AS(split_train_test(plain({"a", "b", "c", "d", "e"}), 4, 2, 1), DataError);
}

TEST_CASE("extract_pairs examples") {
  CHECK(extract_pairs(owned("A", {"pass1", "pass12"}), 4) ==
        std::vector<PairRecord>{{"pass1", "pass12"}, {"pass12", "pass1"}});
  CHECK(oracle::levenshtein("abcdef", "zzzzzzzzzz") > 4);
  CHECK(extract_pairs(owned("B", {"abcdef", "zzzzzzzzzz"}), 4).empty());
  CHECK(extract_pairs(owned("C", {"x"}), 4).empty());
  CHECK(extract_pairs(owned("D", {"same", "same"}), 4).empty());
}

TEST_CASE("extract_pairs is symmetric and respects the threshold") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> acct(0, 40), len(1, 8), ch('a', 'd');
  std::vector<PasswordRecord> recs;
  for (int i = 0; i < 400; ++i) {
    std::string s;
    const int n = len(rng);
    for (int j = 0; j < n; ++j) s.push_back(static_cast<char>(ch(rng)));
    recs.push_back({s, "acct" + std::to_string(acct(rng))});
  }
  const auto pairs = extract_pairs(recs, 2);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : pairs) {
    CHECK(oracle::levenshtein(p.src, p.tgt) <= 2);
    seen.insert({p.src, p.tgt});
  }
  for (const auto& p : pairs) CHECK(seen.count({p.tgt, p.src}) == 1);
}

TEST_CASE("pair files round-trip") {
  testing::TempDir dir;
  const std::vector<PairRecord> pairs{{"abc", "abc1"}, {"x y", "x"}};
  write_pairs(dir / "p.tsv", pairs);
  CHECK(load_pairs(dir / "p.tsv", Alphabet::printable_ascii()) == pairs);
}

TEST_CASE("load_accounts reads the account column") {
  testing::TempDir dir;
  testing::write_lines(dir / "acc.tsv", {"u1\tpass1", "u1\tpass12", "broken-line", "u2\tzz"});
  LoadReport rep;
  const auto recs = load_accounts(dir / "acc.tsv", Alphabet::printable_ascii(), &rep);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].account_key == std::optional<std::string>("u1"));
  CHECK(rep.rejected[RejectReason::kMalformed] == 1);
}
