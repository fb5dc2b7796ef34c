#ifndef PROOFSMITH_SEGMENTER_HPP
#define PROOFSMITH_SEGMENTER_HPP

#include "proofsmith/source_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace proofsmith {

// Decomposes a function into segments around loops and rebuilds each segment
// as a standalone verifiable sub-program. Interface conditions live on the
// plan's boundaries so a segment's entry list and its predecessor's exit
// list are the same object.

enum class SegmentKind { LoopFree, Loop };
enum class Granularity { Fine, Coarse };

struct LiveVar {
  std::string name;
  std::string type_text;
  bool mutable_in_segment = false; // assigned or mutated within the segment
  bool by_ref = false;             // passed as a mutable reference

  bool operator==(const LiveVar &o) const {
    return name == o.name && type_text == o.type_text &&
           mutable_in_segment == o.mutable_in_segment && by_ref == o.by_ref;
  }
};

struct Segment {
  int id = 0;
  SegmentKind kind = SegmentKind::LoopFree;
  std::vector<Stmt> stmts;
  std::vector<LiveVar> live_vars; // locals crossing into this segment
};

using Interface = std::vector<SpecExpr>;

struct SegmentPlan {
  FunctionAst function;
  Granularity granularity = Granularity::Fine;
  std::vector<Segment> segments;
  // boundaries[k] is the entry interface of segment k and the exit interface
  // of segment k-1; boundaries[0] is the requires list, boundaries[n] the
  // ensures list. Internal boundaries start unresolved.
  std::vector<std::optional<Interface>> boundaries;

  const std::optional<Interface> &entry_interface(int seg_id) const {
    return boundaries[seg_id];
  }
  const std::optional<Interface> &exit_interface(int seg_id) const {
    return boundaries[seg_id + 1];
  }
  bool fully_resolved() const {
    for (const auto &b : boundaries)
      if (!b)
        return false;
    return true;
  }
};

struct InterfaceUnresolved : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fine: alternate maximal straight-line runs and single-While segments.
// Coarse: split only between loops; a straight-line run attaches to the
// following loop, a trailing run to the preceding one. Nested loops stay
// inside their parent's segment.
SegmentPlan segment_function(const FunctionAst &fn, Granularity granularity);

// Standalone function for one segment: original params plus live locals
// (scalars by value, re-bound mutably when the segment assigns them),
// surviving requires clauses, one assume per entry clause not already
// required, the segment statements verbatim, and a proof block asserting
// the exit clauses. Throws InterfaceUnresolved when a needed boundary has
// not been resolved yet.
FunctionAst build_subprogram(const SegmentPlan &plan, int seg_id);

// Function made of segments 0..=seg_id with the original requires and no
// ensures; the input for postcondition queries at boundary seg_id.
FunctionAst build_prefix_program(const SegmentPlan &plan, int seg_id);

} // namespace proofsmith

#endif
