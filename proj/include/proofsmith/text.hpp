#ifndef PROOFSMITH_TEXT_HPP
#define PROOFSMITH_TEXT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace proofsmith {

// Shared text helpers used by the parser, the additive-contract check and
// the stub verifier. All of them treat a "normalized" line as: leading and
// trailing whitespace stripped, internal whitespace runs collapsed to one
// space. Comments are compared verbatim.

std::string trim(const std::string &s);

// Collapse internal whitespace runs to a single space and trim the ends.
std::string normalize_ws(const std::string &s);

std::vector<std::string> split_lines(const std::string &text);

std::string join_lines(const std::vector<std::string> &lines);

// Normalized, empty-line-free view of a program text. This is the input to
// subsequence checks, program hashing and stub-script matching.
std::vector<std::string> normalized_lines(const std::string &text);

std::string normalize_program(const std::string &text);

// FNV-1a, printed as 16 hex digits. Used for transcript fingerprints and
// stub-verifier program hashes.
std::uint64_t fnv1a64(const std::string &data);
std::string fnv1a64_hex(const std::string &data);

struct LineDiff {
  int added = 0;
  int removed = 0;
  std::vector<std::string> added_lines;
};

// LCS line diff over normalized non-empty lines.
LineDiff diff_lines(const std::string &before, const std::string &after);

bool starts_with(const std::string &s, const std::string &prefix);
bool contains(const std::string &haystack, const std::string &needle);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);
// Write via temp file in the same directory, then rename.
void write_file_atomic(const std::string &path, const std::string &content);

std::string iso8601_now();

} // namespace proofsmith

#endif
