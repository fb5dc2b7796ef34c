#ifndef PROOFSMITH_ACCESS_ANALYSIS_HPP
#define PROOFSMITH_ACCESS_ANALYSIS_HPP

#include "proofsmith/source_model.hpp"

#include <set>
#include <string>
#include <vector>

namespace proofsmith {

// Per-loop read/write variable sets and the precondition-propagation rule:
// a precondition becomes a loop invariant when none of its variables are
// written in the loop and at least one of them is read in it.

struct AccessSets {
  std::set<std::string> reads;
  std::set<std::string> writes;
};

// Reads: identifiers in the loop condition or in any expression position of
// the body (indices, call arguments, spec expressions included). Writes:
// assignment targets, receivers of mutating method calls, `&mut` call
// arguments, transitively through nested statements. Bindings local to the
// loop are removed from both sets.
AccessSets loop_access_sets(const Stmt &while_stmt);

// Stable-order filter of the clauses satisfying the propagation rule,
// duplicates removed by whitespace-normalized equality.
std::vector<SpecExpr> propagate_invariants(const std::vector<SpecExpr> &preconditions,
                                           const AccessSets &acc);

} // namespace proofsmith

#endif
