#include "mope/edit_ops.hpp"

#include <algorithm>
#include <numeric>

#include "mope/error.hpp"

namespace mope::edit {

std::string to_string(const EditOp& op) {
  switch (op.kind) {
    case OpKind::kEnd: return "end";
    case OpKind::kDel: return "del(" + std::to_string(op.pos) + ")";
    case OpKind::kIns: return "ins('" + std::string(1, op.ch) + "'," + std::to_string(op.pos) + ")";
    case OpKind::kRep: return "rep('" + std::string(1, op.ch) + "'," + std::to_string(op.pos) + ")";
  }
  return "?";
}

std::string to_string(const EditSequence& seq) {
  std::string out = "[";
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ", ";
    out += to_string(seq[i]);
  }
  return out + "]";
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

EditSequence min_edit_script(std::string_view src, std::string_view tgt) {
  const std::size_t m = src.size();
  const std::size_t n = tgt.size();
  // d(i, j) = distance between the suffixes src[i..] and tgt[j..].
  std::vector<std::size_t> d((m + 1) * (n + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (n + 1) + j]; };
  for (std::size_t i = m + 1; i-- > 0;) {
    for (std::size_t j = n + 1; j-- > 0;) {
      if (i == m) {
        at(i, j) = n - j;
      } else if (j == n) {
        at(i, j) = m - i;
      } else {
        at(i, j) = std::min({at(i + 1, j) + 1, at(i, j + 1) + 1,
                             at(i + 1, j + 1) + (src[i] == tgt[j] ? 0 : 1)});
      }
    }
  }

  // Walk forward taking the first optimal edit at each cell. Every op
  // lands at position j because tgt[0..j) is already in place.
  EditSequence seq;
  std::size_t i = 0, j = 0;
  while (i < m || j < n) {
    const std::size_t here = at(i, j);
    if (i < m && j < n && src[i] != tgt[j] && here == at(i + 1, j + 1) + 1) {
      seq.push_back(EditOp::rep(tgt[j], j));
      ++i, ++j;
    } else if (i < m && here == at(i + 1, j) + 1) {
      seq.push_back(EditOp::del(j));
      ++i;
    } else if (j < n && here == at(i, j + 1) + 1) {
      seq.push_back(EditOp::ins(tgt[j], j));
      ++j;
    } else {
      ++i, ++j;
    }
  }
  seq.push_back(EditOp::end());
  return seq;
}

bool applicable(const EditOp& op, std::size_t len) {
  switch (op.kind) {
    case OpKind::kEnd: return len >= 1 && len <= kMaxPasswordLength;
    case OpKind::kDel: return op.pos < len && len > 1;
    case OpKind::kIns: return op.pos <= len && len < kMaxWorkingLength;
    case OpKind::kRep: return op.pos < len;
  }
  return false;
}

void apply(std::string& s, const EditOp& op) {
  if (!applicable(op, s.size())) {
    throw InvalidArgument(to_string(op) + " not applicable to a string of length " +
                          std::to_string(s.size()));
  }
  switch (op.kind) {
    case OpKind::kEnd: break;
    case OpKind::kDel: s.erase(op.pos, 1); break;
    case OpKind::kIns: s.insert(s.begin() + op.pos, op.ch); break;
    case OpKind::kRep: s[op.pos] = op.ch; break;
  }
}

std::string apply_edits(std::string_view src, const EditSequence& seq, const Alphabet& alphabet) {
  if (seq.empty() || seq.back().kind != OpKind::kEnd) {
    throw InvalidArgument("edit sequence must terminate in end");
  }
  std::string s(src);
  for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
    if (seq[t].kind == OpKind::kEnd) throw InvalidArgument("end before the tail of the sequence");
    apply(s, seq[t]);
  }
  apply(s, seq.back());
  if (!alphabet.covers(s)) throw InvalidArgument("edited password leaves the alphabet");
  return s;
}

OpCodec::OpCodec(const Alphabet& alphabet, std::size_t max_len)
    : alphabet_(alphabet), max_len_(max_len) {
  ins_base_ = 1 + max_len_;
  rep_base_ = ins_base_ + alphabet_.size() * (max_len_ + 1);
  size_ = rep_base_ + alphabet_.size() * max_len_;
}

Symbol OpCodec::encode(const EditOp& op) const {
  switch (op.kind) {
    case OpKind::kEnd: return 0;
    case OpKind::kDel:
      if (op.pos >= max_len_) break;
      return static_cast<Symbol>(1 + op.pos);
    case OpKind::kIns: {
      const auto c = alphabet_.ordinal(op.ch);
      if (!c || op.pos > max_len_) break;
      return static_cast<Symbol>(ins_base_ + *c * (max_len_ + 1) + op.pos);
    }
    case OpKind::kRep: {
      const auto c = alphabet_.ordinal(op.ch);
      if (!c || op.pos >= max_len_) break;
      return static_cast<Symbol>(rep_base_ + *c * max_len_ + op.pos);
    }
  }
  throw InvalidArgument("edit op outside the operation space: " + to_string(op));
}

EditOp OpCodec::decode(Symbol s) const {
  if (s == 0) return EditOp::end();
  if (s < ins_base_) return EditOp::del(s - 1);
  if (s < rep_base_) {
    const std::size_t k = s - ins_base_;
    return EditOp::ins(alphabet_.character(static_cast<Symbol>(k / (max_len_ + 1))),
                       k % (max_len_ + 1));
  }
  if (s < size_) {
    const std::size_t k = s - rep_base_;
    return EditOp::rep(alphabet_.character(static_cast<Symbol>(k / max_len_)), k % max_len_);
  }
  throw InvalidArgument("op symbol out of range");
}

}  // namespace mope::edit
