#pragma once

#include "vecsr/optimizer.hpp"
#include "vecsr/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vecsr {

struct GroundAction {
    Symbol schema = kNoSymbol;
    std::vector<ObjectId> args;

    bool operator==(const GroundAction&) const = default;
};

// One plan step per line: "[Walk] <bedroom> (31)".
std::string render_ground_action(const Program& p, const GroundAction& a);

struct Plan {
    std::vector<GroundAction> steps;
    Symbol task = kNoSymbol;
    OptLevel kb_level = OptLevel::Standard;
};

std::string render_plan(const Program& p, const Plan& plan);

// Why an action was legal at a state: whether its preconditions solved, the
// proof when they did, and the first failing literal or constraint otherwise.
struct LegalResult {
    bool ok = false;
    std::string reason; // empty when ok
    std::optional<Literal> failing; // first failing precondition literal
    std::vector<Derivation> proofs; // one per precondition literal when ok
};

struct IllegalAction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepJustification {
    GroundAction chosen;
    int tier = 4;
    std::vector<Derivation> preconditions;
    struct Rejected {
        GroundAction action;
        int tier = 0;
        std::string reason;
    };
    std::vector<Rejected> rejected; // candidates ranked above the chosen one
    std::vector<Literal> newly_satisfied; // goal literals made true by the step
};

struct JustificationTrace {
    std::vector<StepJustification> steps;
};

std::string render_trace(const Program& p, const JustificationTrace& t);

struct PlanLimits {
    int max_depth = 50;
    long max_expansions = 100000;
    double wall_timeout_s = 600.0;
};

enum class FailureReason : std::uint8_t {
    DepthExceeded,
    Exhausted,
    Timeout,
    NoCandidateObjects,
};

const char* failure_reason_name(FailureReason r);

struct PlanFailure {
    FailureReason reason = FailureReason::Exhausted;
    std::string detail;
    // Dynamic relations the task needs but no schema can produce, e.g.
    // "no schema adds open(_)". Set only for exhausted searches.
    std::vector<std::string> capability_gaps;
};

struct PlanResult {
    std::optional<Plan> plan;
    JustificationTrace trace;
    std::optional<PlanFailure> failure;
    long expansions = 0;
    double seconds = 0.0;

    bool ok() const { return plan.has_value(); }
};

// True iff every goal literal holds in s: dynamic literals by membership,
// static ones by derivation. Open goal variables are solved existentially.
bool state_subset(const std::vector<Literal>& goal, const StateRecord& s,
                  const CompiledKB& kb);

// Preconditions solve in s and applying the action violates no constraint.
LegalResult legal(const GroundAction& a, const StateRecord& s,
                  const CompiledKB& kb);

// (s - del) + add, dels first, input untouched. Adding close(x) also closes
// over x's support chain (surfaces and containers, both directions, never
// across rooms). Throws IllegalAction when the preconditions do not hold.
StateRecord update(const GroundAction& a, const StateRecord& s,
                   const CompiledKB& kb);

// One ranked candidate from the action chooser. Illegal candidates stay in
// the stream so the trace can explain why they were passed over.
struct Candidate {
    int tier = 4;
    std::size_t schema_index = 0;
    GroundAction action;
    bool is_legal = false;
    std::string reject_reason;
    std::vector<Derivation> proofs;
};

// Ranked candidate actions: (1) adds satisfying an unmet goal literal,
// (2) adds establishing a failing precondition of a tier-1 candidate,
// (3) navigation toward tier-1/2 objects, (4) every other legal action.
// Within a tier: schema declaration order, then ascending object index.
std::vector<Candidate> enumerate_candidates(const StateRecord& s,
                                            const std::vector<Literal>& goal,
                                            const CompiledKB& kb);

// The legal actions from enumerate_candidates, in stream order.
std::vector<GroundAction> choose_action(const StateRecord& s,
                                        const std::vector<Literal>& goal,
                                        const CompiledKB& kb);

// Depth-first search over choose_action order with path-local visited-state
// exclusion; first plan found wins.
PlanResult plan(const CompiledKB& kb, const TaskDef& task,
                const PlanLimits& limits = {});

// Optimizes at the requested level and plans; on failure retries down the
// ladder (full -> ground -> standard; other levels -> standard). Returns the
// result plus the compiled KB that produced it.
struct FallbackResult {
    PlanResult result;
    CompiledKB kb;
    std::vector<OptLevel> levels_tried;
};

FallbackResult plan_with_fallback(const Program& p, const FactBase& f,
                                  const SceneGraph& scene, const TaskDef& task,
                                  OptLevel level, const PlanLimits& limits = {});

} // namespace vecsr
