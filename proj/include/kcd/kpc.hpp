#pragma once

#include <string>
#include <vector>

#include "kcd/citest.hpp"
#include "kcd/graph.hpp"
#include "kcd/separation.hpp"

namespace kcd {

enum class Step5Mode { Off, SinglePass, Fixpoint };
enum class ColliderConflict { FirstWins, Overwrite };

struct KpcOptions {
    Step5Mode step5 = Step5Mode::SinglePass;
    SearchScope scope = SearchScope::AllSubsets;
    ColliderConflict collider_conflict = ColliderConflict::FirstWins;
    bool record_trace = false;
    // Assert after the FCI stage that no discriminating path still ends in a
    // circle; holds with a ground-truth tester.
    bool verify_no_discriminating_circle = false;
};

// Note on the rule set: the discriminating-path rule R4 is part of the FCI
// stage. Its collider branch is redundant under a ground-truth tester (those
// arrowheads always arrive via unshielded colliders plus R1/R2, see
// LearnerStats::r4_collider_branch), but its sepset branch orients tails the
// other rules cannot reach. The selection-bias rules R5-R7 are omitted: the
// tail-tail edges produced here never represent selection bias.

// One endpoint-mark orientation. Replaying a trace onto the learner's
// post-skeleton graph reproduces its output.
struct RuleEvent {
    std::string rule;        // UC, R1, R2, R3, R8, R9, R10, R11, R12
    int at = 0;              // vertex whose endpoint mark changed
    int other = 0;           // the far end of the edge
    Mark mark = Mark::Tail;  // new mark at `at`
    std::vector<int> witness;

    friend bool operator==(const RuleEvent&, const RuleEvent&) = default;
};

struct LearnerStats {
    long ci_queries = 0;
    int max_cond_size = 0;
    long conflicts = 0;
    long r4_collider_branch = 0;  // discriminating-path else-branch firings
};

struct LearnerResult {
    Pmg graph;
    Pmg after_skeleton;  // state at the end of the edge-removal stage
    SepsetTable sepsets;
    std::vector<RuleEvent> trace;
    LearnerStats stats;
};

// Working state threaded through the orientation stages; exposed so the
// stages can be driven and inspected individually.
class LearnerState {
public:
    LearnerState(Pmg graph, SepsetTable sepsets, ConditioningBound bound, KpcOptions opts);

    const Pmg& graph() const { return graph_; }
    const SepsetTable& sepsets() const { return sepsets_; }
    ConditioningBound bound() const { return bound_; }
    const KpcOptions& options() const { return opts_; }
    const std::vector<RuleEvent>& trace() const { return trace_; }
    long conflicts() const { return conflicts_; }
    long r4_collider_branch() const { return r4_collider_branch_; }
    void count_r4_collider_branch() { ++r4_collider_branch_; }

    // Orients the mark at `at` on the edge to `other`. Only circle marks may
    // change; a demand against a fixed mark counts as a conflict and is
    // skipped (or applied when the policy allows overwriting). Returns true
    // when the graph changed.
    bool orient(const char* rule, int at, int other, Mark mark, std::vector<int> witness = {},
                bool allow_overwrite = false);

private:
    Pmg graph_;
    SepsetTable sepsets_;
    ConditioningBound bound_;
    KpcOptions opts_;
    std::vector<RuleEvent> trace_;
    long conflicts_ = 0;
    long r4_collider_branch_ = 0;
};

// For any induced a o-o c o-o b with a, b non-adjacent and c outside the
// recorded separating set, put arrowheads at c on both edges.
void orient_unshielded_colliders(LearnerState& state);

// FCI orientation: R1-R4 to a fixpoint, then R8-R10 interleaved with R1-R4
// until nothing changes.
void fci_orient(LearnerState& state);

enum class FciRule { R1, R2, R3, R4, R8, R9, R10 };

// One scan-and-apply pass of a single rule; returns true when the graph
// changed.
bool apply_fci_rule(LearnerState& state, FciRule rule);

// Tail rules at vertices with no incoming arrowhead: orientations are
// computed from a snapshot and applied in one pass.
void apply_r11_r12(LearnerState& state);

// True if some discriminating path in the graph still has a circle mark on
// the far-node edge (the precondition of the discriminating-path rule that
// this rule set deliberately omits).
bool has_discriminating_circle(const Pmg& g);

// Bounded-conditioning constraint learner: sepset search, skeleton pruning,
// unshielded colliders, FCI rules, tail rules.
LearnerResult kpc_learn(CiTester& tester, ConditioningBound bound, const KpcOptions& opts = {});

struct PcOptions {
    int max_cond_size = -1;  // -1: unbounded (limited by adjacency sizes)
    bool record_trace = false;
};

// PC-stable baseline: level-wise adjacency-scoped sepset search with
// per-level adjacency snapshots, v-structures, Meek rules. Output is
// CPDAG-style (directed and tail-tail edges).
LearnerResult pc_stable_learn(CiTester& tester, const PcOptions& opts = {});

// Meek rules 1-4 applied to a fixpoint over a graph of directed and
// undirected (tail-tail) edges.
void meek_closure(Pmg& g);

// Essential graph of a DAG: v-structures plus Meek closure.
Pmg cpdag_of(const Dag& d);

}  // namespace kcd
