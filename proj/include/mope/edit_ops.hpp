#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mope/alphabet.hpp"

namespace mope::edit {

/// Longest intermediate string while a script is being applied. An
/// insertion may precede the deletion that brings a 16-character password
/// back into range; four ops of headroom covers the default distance cap.
inline constexpr std::size_t kMaxWorkingLength = kMaxPasswordLength + 4;

enum class OpKind : std::uint8_t { kEnd, kDel, kIns, kRep };

/// One edit. `pos` indexes the string as it stands when the op is applied,
/// not the original source.
struct EditOp {
  OpKind kind = OpKind::kEnd;
  std::uint8_t pos = 0;
  char ch = 0;

  static EditOp end() { return {}; }
  static EditOp del(std::size_t pos) { return {OpKind::kDel, static_cast<std::uint8_t>(pos), 0}; }
  static EditOp ins(char c, std::size_t pos) {
    return {OpKind::kIns, static_cast<std::uint8_t>(pos), c};
  }
  static EditOp rep(char c, std::size_t pos) {
    return {OpKind::kRep, static_cast<std::uint8_t>(pos), c};
  }

  bool operator==(const EditOp&) const = default;
};

/// Ops terminated by exactly one trailing end.
using EditSequence = std::vector<EditOp>;

std::string to_string(const EditOp& op);
std::string to_string(const EditSequence& seq);

/// Classic two-row Levenshtein distance (unit costs).
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Minimal script turning `src` into `tgt`, ops in left-to-right order with
/// positions against the progressively edited string. Among optimal scripts
/// the earliest possible edit wins, preferring rep, then del, then ins.
EditSequence min_edit_script(std::string_view src, std::string_view tgt);

/// True when `op` can be applied to a string of length `len`. Intermediate
/// strings stay in [1, kMaxWorkingLength]; end requires a final length in
/// [1, 16].
bool applicable(const EditOp& op, std::size_t len);

/// Applies `op` in place. Throws InvalidArgument if not applicable.
void apply(std::string& s, const EditOp& op);

/// Applies ops in order up to and including the terminating end. Throws
/// InvalidArgument on an out-of-range position, a missing or misplaced end,
/// or a result outside the alphabet or length bounds.
std::string apply_edits(std::string_view src, const EditSequence& seq,
                        const Alphabet& alphabet = Alphabet::printable_ascii());

/// Dense ordinal encoding of the operation space for an alphabet and the
/// working length cap L:
///   0                       end
///   1 .. L                  del(pos)
///   L+1 .. L+|S|(L+1)       ins(c, pos)
///   ...  .. +|S|L           rep(c, pos)
class OpCodec {
 public:
  explicit OpCodec(const Alphabet& alphabet, std::size_t max_len = kMaxWorkingLength);

  std::size_t size() const { return size_; }
  Symbol encode(const EditOp& op) const;
  EditOp decode(Symbol s) const;
  const Alphabet& alphabet() const { return alphabet_; }

 private:
  Alphabet alphabet_;
  std::size_t max_len_;
  std::size_t ins_base_;
  std::size_t rep_base_;
  std::size_t size_;
};

}  // namespace mope::edit
