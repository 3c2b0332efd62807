#include "vecsr/planner.hpp"

#include "vecsr/parser.hpp"
#include "vecsr/world_model.hpp"
#include "support/world_gen.hpp"
#include "support/world_oracle.hpp"

#include <doctest.h>

#include <chrono>
#include <deque>
#include <initializer_list>
#include <random>
#include <set>
#include <string>

using namespace vecsr;
using namespace vecsr::testsupport;

namespace {

ObjectId obj(const char* name, int idx) {
    return ObjectId{intern(name), idx};
}

GroundAction ga(const char* schema, std::initializer_list<ObjectId> args) {
    return GroundAction{intern(schema), std::vector<ObjectId>(args)};
}

// Two rooms; mug on the table, couch and lit lamp nearby, agent in the hall.
const char* kStudyScene = R"({
  "nodes": [
    {"id": 90, "class_name": "hall", "category": "Rooms"},
    {"id": 91, "class_name": "study", "category": "Rooms"},
    {"id": 1, "class_name": "character", "category": "Agents"},
    {"id": 2, "class_name": "mug", "properties": ["GRABBABLE"]},
    {"id": 3, "class_name": "table", "properties": ["SURFACE"]},
    {"id": 4, "class_name": "couch", "properties": ["SITTABLE"]},
    {"id": 5, "class_name": "lamp", "properties": ["HAS_SWITCH"], "states": ["ON"]}
  ],
  "edges": [
    {"from_id": 1, "relation_type": "INSIDE", "to_id": 90},
    {"from_id": 2, "relation_type": "INSIDE", "to_id": 91},
    {"from_id": 2, "relation_type": "ON_TOP_OF", "to_id": 3},
    {"from_id": 3, "relation_type": "INSIDE", "to_id": 91},
    {"from_id": 4, "relation_type": "INSIDE", "to_id": 91},
    {"from_id": 5, "relation_type": "INSIDE", "to_id": 91}
  ]
})";

struct Fixture {
    SceneGraph scene;
    FactBase facts;

    explicit Fixture(const char* json) {
        scene = ingest_scene(json);
        facts = to_facts(scene);
        facts.state = initial_state(facts, scene);
    }

    CompiledKB kb(const std::string& goal) const {
        Program tp = parse_program("task t { goal: " + goal + " }");
        return standard_kb(toy_program(), facts, tp.tasks[0]);
    }

    TaskDef task(const std::string& goal) const {
        Program tp = parse_program("task t { goal: " + goal + " }");
        return tp.tasks[0];
    }
};

} // namespace

TEST_CASE("state_subset: membership for dynamics, derivation for statics") {
    Fixture w(kStudyScene);
    StateRecord s = w.facts.state;

    CHECK(state_subset({}, s, w.kb("on(lamp5)")));          // empty goal
    CHECK(state_subset(parse_query("on(lamp5)"), s, w.kb("on(lamp5)")));
    CHECK(state_subset(parse_query("on_top_of(mug2, table3)"), s,
                       w.kb("on(lamp5)")));
    CHECK_FALSE(state_subset(parse_query("holds(mug2)"), s, w.kb("on(lamp5)")));
    CHECK_FALSE(state_subset(parse_query("not on(lamp5)"), s, w.kb("on(lamp5)")));

    s.add(RelationKind::Holds, {obj("mug", 2)});
    s.add(RelationKind::Sitting, {obj("couch", 4)}); // irrelevant extra tuple
    CHECK(state_subset(parse_query("holds(mug2)"), s, w.kb("on(lamp5)")));
    CHECK(state_subset(parse_query("type(X, mug), holds(X)"), s,
                       w.kb("on(lamp5)")));
    CHECK_FALSE(state_subset(parse_query("type(X, lamp), holds(X)"), s,
                             w.kb("on(lamp5)")));
}

TEST_CASE("legal: precondition walk reports the first failing literal") {
    Fixture w(kStudyScene);
    CompiledKB kb = w.kb("holds(mug2)");
    const StateRecord& s0 = w.facts.state;

    LegalResult walk = legal(ga("walk_room", {obj("study", 91)}), s0, kb);
    CHECK(walk.ok);
    CHECK(walk.reason.empty());
    CHECK(walk.proofs.size() == 3); // room(R) and the two naf literals

    LegalResult stay = legal(ga("walk_room", {obj("hall", 90)}), s0, kb);
    CHECK_FALSE(stay.ok);
    REQUIRE(stay.failing.has_value());
    CHECK(render_literal(*stay.failing) == "not inside(agent, hall90)");

    LegalResult far_grab = legal(ga("grab", {obj("mug", 2)}), s0, kb);
    CHECK_FALSE(far_grab.ok);
    REQUIRE(far_grab.failing.has_value());
    CHECK(render_literal(*far_grab.failing) == "close(mug2)");
    CHECK(far_grab.reason == "failing precondition close(mug2)");

    LegalResult not_grabbable = legal(ga("grab", {obj("table", 3)}), s0, kb);
    CHECK_FALSE(not_grabbable.ok);
    CHECK(not_grabbable.reason == "failing precondition grabbable(table3)");

    LegalResult unknown = legal(ga("fly", {}), s0, kb);
    CHECK_FALSE(unknown.ok);
    CHECK(unknown.reason == "unknown action schema fly");

    LegalResult arity = legal(ga("grab", {}), s0, kb);
    CHECK_FALSE(arity.ok);
    CHECK(arity.reason == "arity mismatch for grab");
}

TEST_CASE("legal: an action whose successor violates a constraint is rejected") {
    Fixture w(R"({
      "nodes": [
        {"id": 90, "class_name": "hall", "category": "Rooms"},
        {"id": 1, "class_name": "character", "category": "Agents"},
        {"id": 2, "class_name": "mug", "properties": ["GRABBABLE"]},
        {"id": 3, "class_name": "book", "properties": ["GRABBABLE"]},
        {"id": 4, "class_name": "pillow", "properties": ["GRABBABLE"]}
      ],
      "edges": [
        {"from_id": 1, "relation_type": "INSIDE", "to_id": 90},
        {"from_id": 2, "relation_type": "INSIDE", "to_id": 90},
        {"from_id": 3, "relation_type": "INSIDE", "to_id": 90},
        {"from_id": 4, "relation_type": "INSIDE", "to_id": 90}
      ]
    })");
    CompiledKB kb = w.kb("holds(mug2)");

    // Both hands full: a third grab passes its own preconditions but the
    // successor state trips the three-holds constraint.
    StateRecord s = w.facts.state;
    s.add(RelationKind::Holds, {obj("mug", 2)});
    s.add(RelationKind::Holds, {obj("book", 3)});
    s.add(RelationKind::Close, {obj("pillow", 4)});
    LegalResult third = legal(ga("grab", {obj("pillow", 4)}), s, kb);
    CHECK_FALSE(third.ok);
    CHECK(third.reason.find("violates constraint") == 0);
    CHECK(third.reason.find("holds(X), holds(Y), holds(Z)") !=
          std::string::npos);
}

TEST_CASE("update: grab takes the object out of its support chain") {
    Fixture w(kStudyScene);
    CompiledKB kb = w.kb("holds(mug2)");

    StateRecord s = w.facts.state;
    s.remove(RelationKind::Inside, {obj("agent", 1), obj("hall", 90)});
    s.add(RelationKind::Inside, {obj("agent", 1), obj("study", 91)});
    s.add(RelationKind::Close, {obj("mug", 2)});

    StateRecord next = update(ga("grab", {obj("mug", 2)}), s, kb);
    CHECK(next.contains(RelationKind::Holds, {obj("mug", 2)}));
    CHECK_FALSE(next.contains(RelationKind::OnTopOf,
                              {obj("mug", 2), obj("table", 3)}));
    CHECK_FALSE(next.contains(RelationKind::Inside,
                              {obj("mug", 2), obj("study", 91)}));
    CHECK(next.contains(RelationKind::Close, {obj("mug", 2)}));
    // Input state untouched.
    CHECK(s.contains(RelationKind::OnTopOf, {obj("mug", 2), obj("table", 3)}));

    CHECK_THROWS_AS(update(ga("grab", {obj("table", 3)}), s, kb),
                    IllegalAction);
    CHECK_THROWS_AS(update(ga("grab", {obj("mug", 2)}), w.facts.state, kb),
                    IllegalAction);
}

TEST_CASE("update: switch_off after switch_on restores the state key") {
    Fixture w(kStudyScene);
    CompiledKB kb = w.kb("on(lamp5)");

    StateRecord s = w.facts.state;
    s.remove(RelationKind::On, {obj("lamp", 5)});
    s.remove(RelationKind::Inside, {obj("agent", 1), obj("hall", 90)});
    s.add(RelationKind::Inside, {obj("agent", 1), obj("study", 91)});
    s.add(RelationKind::Close, {obj("lamp", 5)});

    StateRecord on = update(ga("switch_on", {obj("lamp", 5)}), s, kb);
    CHECK(on.contains(RelationKind::On, {obj("lamp", 5)}));
    StateRecord off = update(ga("switch_off", {obj("lamp", 5)}), on, kb);
    CHECK(state_key(off) == state_key(s));
}

TEST_CASE("update: close propagates through the support chain, both ways") {
    Fixture w(kStudyScene);
    CompiledKB kb = w.kb("close(table3)");

    StateRecord s = w.facts.state;
    s.remove(RelationKind::Inside, {obj("agent", 1), obj("hall", 90)});
    s.add(RelationKind::Inside, {obj("agent", 1), obj("study", 91)});

    // Walking to the table also closes the mug sitting on it.
    StateRecord at_table = update(ga("walk_to", {obj("table", 3)}), s, kb);
    CHECK(at_table.contains(RelationKind::Close, {obj("table", 3)}));
    CHECK(at_table.contains(RelationKind::Close, {obj("mug", 2)}));
    CHECK_FALSE(at_table.contains(RelationKind::Close, {obj("study", 91)}));

    // Walking to the mug closes its supporting table.
    StateRecord at_mug = update(ga("walk_to", {obj("mug", 2)}), s, kb);
    CHECK(at_mug.contains(RelationKind::Close, {obj("mug", 2)}));
    CHECK(at_mug.contains(RelationKind::Close, {obj("table", 3)}));

    // Walking into a room adds close for the room only: no closure into it.
    StateRecord in_hall = update(ga("walk_room", {obj("hall", 90)}), at_mug, kb);
    CHECK(in_hall.contains(RelationKind::Close, {obj("hall", 90)}));
    CHECK(in_hall.list(RelationKind::Close).size() == 1);
}

TEST_CASE("engine and oracle agree on every action over reachable states") {
    Fixture w(kStudyScene);
    const Program& p = toy_program();
    CompiledKB kb = w.kb("holds(mug2)");

    std::vector<ObjectId> objects = world_objects(w.facts);
    CHECK(objects.size() == 6); // agent excluded: schemas never take it

    std::vector<std::pair<Symbol, int>> schemas;
    for (const ActionSchema& sc : p.actions)
        schemas.emplace_back(sc.name, static_cast<int>(sc.params.size()));

    auto all_actions = [&] {
        std::vector<GroundAction> out;
        for (auto [name, arity] : schemas) {
            std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
            while (true) {
                GroundAction a;
                a.schema = name;
                for (std::size_t i : idx)
                    a.args.push_back(objects[i]);
                out.push_back(a);
                int pos = arity - 1;
                while (pos >= 0) {
                    if (++idx[static_cast<std::size_t>(pos)] < objects.size())
                        break;
                    idx[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 0)
                    break;
            }
        }
        return out;
    }();

    std::deque<StateRecord> frontier{w.facts.state};
    std::set<std::string> seen{state_key(w.facts.state)};
    std::size_t compared = 0;
    bool saw_holds = false, saw_sitting = false;

    while (!frontier.empty() && seen.size() <= 300) {
        StateRecord s = frontier.front();
        frontier.pop_front();
        saw_holds |= !s.list(RelationKind::Holds).empty();
        saw_sitting |= !s.list(RelationKind::Sitting).empty();

        std::vector<GroundAction> legal_here;
        for (const GroundAction& a : all_actions) {
            bool engine_ok = legal(a, s, kb).ok;
            bool oracle_ok = oracle_legal(p, w.facts, s, a);
            if (engine_ok != oracle_ok)
                CAPTURE(render_ground_action(p, a));
            REQUIRE(engine_ok == oracle_ok);
            ++compared;
            if (!engine_ok)
                continue;
            legal_here.push_back(a);
            StateRecord engine_next = update(a, s, kb);
            StateRecord oracle_next = oracle_apply(p, w.facts, s, a);
            REQUIRE(state_key(engine_next) == state_key(oracle_next));
            std::string k = state_key(engine_next);
            if (!seen.count(k)) {
                seen.insert(k);
                frontier.push_back(engine_next);
            }
        }
        CHECK(legal_here == oracle_actions(p, w.facts, s));
    }

    CHECK(compared >= 3000);
    CHECK(saw_holds);
    CHECK(saw_sitting);
}

TEST_CASE("candidate stream: goal-directed tiers rank before blind search") {
    Fixture w(kStudyScene);

    // Goal object close at hand: the satisfying action leads the stream.
    StateRecord near = w.facts.state;
    near.remove(RelationKind::Inside, {obj("agent", 1), obj("hall", 90)});
    near.add(RelationKind::Inside, {obj("agent", 1), obj("study", 91)});
    near.add(RelationKind::Close, {obj("couch", 4)});
    CompiledKB kb = w.kb("sitting(couch4)");
    std::vector<Candidate> stream = enumerate_candidates(near, kb.goal, kb);
    REQUIRE_FALSE(stream.empty());
    CHECK(stream[0].action == ga("sit", {obj("couch", 4)}));
    CHECK(stream[0].tier == 1);
    CHECK(stream[0].is_legal);
    for (std::size_t i = 1; i < stream.size(); ++i)
        CHECK(stream[i - 1].tier <= stream[i].tier);

    // Goal object in another room: navigation enters at tier 3.
    std::vector<Candidate> far = enumerate_candidates(w.facts.state, kb.goal, kb);
    const Candidate* first_legal = nullptr;
    for (const Candidate& c : far)
        if (c.is_legal) {
            first_legal = &c;
            break;
        }
    REQUIRE(first_legal != nullptr);
    CHECK(first_legal->action == ga("walk_room", {obj("study", 91)}));
    CHECK(first_legal->tier == 3);
    bool saw_illegal_tier1 = false;
    for (const Candidate& c : far)
        if (c.tier == 1 && !c.is_legal &&
            c.action == ga("sit", {obj("couch", 4)}))
            saw_illegal_tier1 = true;
    CHECK(saw_illegal_tier1);

    std::vector<GroundAction> chosen =
        choose_action(w.facts.state, kb.goal, kb);
    REQUIRE_FALSE(chosen.empty());
    CHECK(chosen[0] == ga("walk_room", {obj("study", 91)}));
}

TEST_CASE("plan: cross-room sit runs tier 3 navigation, 2 approach, 1 goal") {
    Fixture w(kStudyScene);
    CompiledKB kb = w.kb("sitting(couch4)");
    PlanResult res = plan(kb, w.task("sitting(couch4)"));

    REQUIRE(res.ok());
    CHECK(render_plan(toy_program(), *res.plan) ==
          "[Walk] <study> (91)\n"
          "[Walk] <couch> (4)\n"
          "[Sit] <couch> (4)\n");
    REQUIRE(res.trace.steps.size() == 3);
    CHECK(res.trace.steps[0].tier == 3);
    CHECK(res.trace.steps[1].tier == 2);
    CHECK(res.trace.steps[2].tier == 1);
    REQUIRE(res.trace.steps[2].newly_satisfied.size() == 1);
    CHECK(render_literal(res.trace.steps[2].newly_satisfied[0]) ==
          "sitting(couch4)");

    bool tier1_reject = false;
    for (const auto& r : res.trace.steps[0].rejected)
        if (r.tier == 1 && r.reason == "failing precondition close(couch4)")
            tier1_reject = true;
    CHECK(tier1_reject);

    std::string text = render_trace(toy_program(), res.trace);
    CHECK(text.find("step 1: [Walk] <study> (91)  [tier 3]") !=
          std::string::npos);
    CHECK(text.find("step 3: [Sit] <couch> (4)  [tier 1]") !=
          std::string::npos);
    CHECK(text.find("satisfies: sitting(couch4)") != std::string::npos);
    CHECK(text.find("rejected above:") != std::string::npos);
}

TEST_CASE("plan: three-step go-to-sleep is minimal") {
    Fixture w(R"({
      "nodes": [
        {"id": 90, "class_name": "hall", "category": "Rooms"},
        {"id": 91, "class_name": "study", "category": "Rooms"},
        {"id": 1, "class_name": "character", "category": "Agents"},
        {"id": 2, "class_name": "bed", "properties": ["LIEABLE"]}
      ],
      "edges": [
        {"from_id": 1, "relation_type": "INSIDE", "to_id": 90},
        {"from_id": 2, "relation_type": "INSIDE", "to_id": 91}
      ]
    })");
    TaskDef task = w.task("type(B, bed), lying(agent, B)");
    CompiledKB kb = standard_kb(toy_program(), w.facts, task);

    PlanResult res = plan(kb, task);
    REQUIRE(res.ok());
    CHECK(render_plan(toy_program(), *res.plan) ==
          "[Walk] <study> (91)\n"
          "[Walk] <bed> (2)\n"
          "[Lie] <bed> (2)\n");

    BfsResult bfs = bfs_solvable(toy_program(), w.facts, w.facts.state,
                                 task.goal);
    CHECK(bfs.solvable);
    CHECK(bfs.depth == 3); // no shorter plan exists
    CHECK(res.plan->steps.size() == 3);
}

TEST_CASE("plan: a naf goal is reached by deleting the offending tuple") {
    Fixture w(kStudyScene);
    StateRecord s = w.facts.state;
    s.remove(RelationKind::Inside, {obj("agent", 1), obj("hall", 90)});
    s.add(RelationKind::Inside, {obj("agent", 1), obj("study", 91)});
    s.add(RelationKind::Close, {obj("lamp", 5)});
    Fixture w2 = w;
    w2.facts.state = s;

    TaskDef task = w2.task("not on(lamp5)");
    CompiledKB kb = standard_kb(toy_program(), w2.facts, task);
    PlanResult res = plan(kb, task);
    REQUIRE(res.ok());
    CHECK(render_plan(toy_program(), *res.plan) == "[SwitchOff] <lamp> (5)\n");
    CHECK(res.trace.steps[0].tier == 1);
}

TEST_CASE("plan: satisfied goal yields the empty plan") {
    Fixture w(kStudyScene);
    TaskDef task = w.task("on(lamp5)");
    CompiledKB kb = standard_kb(toy_program(), w.facts, task);
    PlanResult res = plan(kb, task);
    REQUIRE(res.ok());
    CHECK(res.plan->steps.empty());
    CHECK(res.trace.steps.empty());
    CHECK(res.expansions == 0);
}

TEST_CASE("plan: unreachable goal relation reports a capability gap") {
    Fixture w(R"({
      "nodes": [
        {"id": 90, "class_name": "hall", "category": "Rooms"},
        {"id": 1, "class_name": "character", "category": "Agents"},
        {"id": 2, "class_name": "fridge", "properties": ["CAN_OPEN"]}
      ],
      "edges": [
        {"from_id": 1, "relation_type": "INSIDE", "to_id": 90},
        {"from_id": 2, "relation_type": "INSIDE", "to_id": 90}
      ]
    })");
    TaskDef task = w.task("open(fridge2)");
    CompiledKB kb = standard_kb(toy_program(), w.facts, task);
    PlanResult res = plan(kb, task);

    REQUIRE_FALSE(res.ok());
    REQUIRE(res.failure.has_value());
    CHECK(res.failure->reason == FailureReason::Exhausted);
    CHECK(res.failure->detail == "goal literal unreachable: open(fridge2)");
    REQUIRE(res.failure->capability_gaps.size() == 1);
    CHECK(res.failure->capability_gaps[0] == "no schema adds open(_)");
    CHECK(res.expansions == 0); // rejected before any search
}

TEST_CASE("plan: depth, expansion, and wall limits each fail distinctly") {
    Fixture w(kStudyScene);
    TaskDef task = w.task("sitting(couch4)");
    CompiledKB kb = standard_kb(toy_program(), w.facts, task);

    PlanLimits shallow;
    shallow.max_depth = 1;
    PlanResult d = plan(kb, task, shallow);
    REQUIRE_FALSE(d.ok());
    CHECK(d.failure->reason == FailureReason::DepthExceeded);
    CHECK(d.failure->detail == "no plan within depth 1");
    CHECK(std::string(failure_reason_name(d.failure->reason)) ==
          "depth_exceeded");

    PlanLimits tiny;
    tiny.max_expansions = 1;
    PlanResult b = plan(kb, task, tiny);
    REQUIRE_FALSE(b.ok());
    CHECK(b.failure->reason == FailureReason::Exhausted);
    CHECK(b.failure->detail == "expansion budget exhausted");
    CHECK(b.failure->capability_gaps.empty()); // sit can add sitting

    PlanLimits instant;
    instant.wall_timeout_s = 0.0;
    PlanResult t = plan(kb, task, instant);
    REQUIRE_FALSE(t.ok());
    CHECK(t.failure->reason == FailureReason::Timeout);
    CHECK(std::string(failure_reason_name(t.failure->reason)) == "timeout");
}

TEST_CASE("plan: goals over absent object classes fail fast") {
    Fixture w(kStudyScene);
    TaskDef task = w.task("type(X, unicorn), holds(X)");
    CompiledKB kb = standard_kb(toy_program(), w.facts, task);
    PlanResult res = plan(kb, task);
    REQUIRE_FALSE(res.ok());
    CHECK(res.failure->reason == FailureReason::NoCandidateObjects);
    CHECK(res.failure->detail == "no objects satisfy the goal constraints");
    CHECK(std::string(failure_reason_name(res.failure->reason)) ==
          "no_candidate_objects");
}

TEST_CASE("plan: identical inputs give identical plans and traces") {
    std::mt19937 rng(7);
    for (int i = 0; i < 8; ++i) {
        SmallWorld w = random_world(rng);
        CompiledKB kb = standard_kb(toy_program(), w.facts, w.task);
        PlanLimits lim;
        lim.max_depth = 30;
        lim.max_expansions = 20000;
        PlanResult a = plan(kb, w.task, lim);
        PlanResult b = plan(kb, w.task, lim);
        CAPTURE(w.goal_text);
        CHECK(a.ok() == b.ok());
        CHECK(a.expansions == b.expansions);
        if (a.ok() && b.ok())
            CHECK(render_plan(toy_program(), *a.plan) ==
                  render_plan(toy_program(), *b.plan));
        CHECK(render_trace(toy_program(), a.trace) ==
              render_trace(toy_program(), b.trace));
    }
}

TEST_CASE("plan matches breadth-first reachability on 60 random worlds") {
    const Program& p = toy_program();
    std::mt19937 rng(20260823);
    int solvable = 0, unsolvable = 0;

    for (int i = 0; i < 60; ++i) {
        SmallWorld w = random_world(rng);
        CAPTURE(i);
        CAPTURE(w.goal_text);

        CompiledKB kb = standard_kb(p, w.facts, w.task);
        PlanLimits lim;
        lim.max_depth = 30;
        lim.max_expansions = 20000;
        lim.wall_timeout_s = 5.0;

        auto t0 = std::chrono::steady_clock::now();
        PlanResult res = plan(kb, w.task, lim);
        double dt = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        CHECK(dt < 5.0);

        BfsResult bfs =
            bfs_solvable(p, w.facts, w.facts.state, w.task.goal, 50000);
        REQUIRE(res.ok() == bfs.solvable);
        if (bfs.solvable)
            ++solvable;
        else {
            ++unsolvable;
            CHECK(res.failure.has_value());
        }

        if (!res.ok())
            continue;

        // Replay through the independent semantics and check the goal holds.
        StateRecord s = w.facts.state;
        std::set<std::string> path{state_key(s)};
        for (const GroundAction& step : res.plan->steps) {
            CAPTURE(render_ground_action(p, step));
            REQUIRE(oracle_legal(p, w.facts, s, step));
            s = oracle_apply(p, w.facts, s, step);
            CHECK(path.insert(state_key(s)).second); // no state revisited
        }
        CHECK(state_subset(w.task.goal, s, kb));
        CHECK(res.plan->steps.size() <= 30);
        CHECK(res.trace.steps.size() == res.plan->steps.size());
    }

    // The template mix must genuinely exercise both outcomes.
    CHECK(solvable >= 15);
    CHECK(unsolvable >= 10);
}

TEST_CASE("fallback ladder: overeager grounding is rescued at standard") {
    Fixture w(R"({
      "nodes": [
        {"id": 90, "class_name": "hall", "category": "Rooms"},
        {"id": 91, "class_name": "study", "category": "Rooms"},
        {"id": 1, "class_name": "character", "category": "Agents"},
        {"id": 2, "class_name": "mug", "properties": []},
        {"id": 5, "class_name": "mug", "properties": ["GRABBABLE"]}
      ],
      "edges": [
        {"from_id": 1, "relation_type": "INSIDE", "to_id": 90},
        {"from_id": 2, "relation_type": "INSIDE", "to_id": 91},
        {"from_id": 5, "relation_type": "INSIDE", "to_id": 91}
      ]
    })");
    Program tp =
        parse_program("task fetch { goal: type(X, mug), holds(X); room: study }");
    TaskDef task = tp.tasks[0];

    FallbackResult fb = plan_with_fallback(toy_program(), w.facts, w.scene,
                                           task, OptLevel::Full);
    REQUIRE(fb.result.ok());
    CHECK(fb.kb.level == OptLevel::Standard);
    REQUIRE(fb.levels_tried.size() == 3);
    CHECK(fb.levels_tried[0] == OptLevel::Full);
    CHECK(fb.levels_tried[1] == OptLevel::PartialGround);
    CHECK(fb.levels_tried[2] == OptLevel::Standard);
    CHECK(render_plan(toy_program(), *fb.result.plan) ==
          "[Walk] <study> (91)\n"
          "[Walk] <mug> (5)\n"
          "[Grab] <mug> (5)\n");
    CHECK(fb.result.plan->kb_level == OptLevel::Standard);
}
