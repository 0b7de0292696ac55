#include <catch2/catch_amalgamated.hpp>

#include <deque>
#include <map>
#include <string>
#include <vector>

#include <voxagent/actions.hpp>
#include <voxagent/knowledge.hpp>

#include "util.hpp"

using namespace voxagent;

// ---------------------------------------------------------------------------
// Independent BFS oracle over the exact move set (pillar budget 0): forced
// unit falls off unsupported cells, 4-way walks, single climbs. Reimplements
// the rules from the block predicates up; shares no search code with A*.
// ---------------------------------------------------------------------------
namespace oracle {

inline bool feet_ok(const World& w, Vec3i f) {
    return !w.solid(f) && !w.solid(f.up()) && w.at(f) != BlockKind::lava &&
           w.at(f.down()) != BlockKind::lava;
}

inline std::vector<Vec3i> moves_from(const World& w, Vec3i p) {
    std::vector<Vec3i> out;
    if (!w.solid(p.down())) {  // airborne: gravity is the only move
        if (p.y > 1) out.push_back(p.down());
        return out;
    }
    for (Vec3i d : {Vec3i{1, 0, 0}, Vec3i{-1, 0, 0}, Vec3i{0, 0, 1}, Vec3i{0, 0, -1}}) {
        Vec3i n = p + d;
        if (feet_ok(w, n)) {
            out.push_back(n);
        } else if (w.solid(n) && !w.solid(n.up()) && !w.solid(n.up(2)) && !w.solid(p.up(2)) &&
                   feet_ok(w, n.up())) {
            out.push_back(n.up());
        }
    }
    return out;
}

// Shortest move count from `from` to `to`, or -1 when unreachable.
inline int bfs_distance(const World& w, Vec3i from, Vec3i to) {
    auto key = [&](Vec3i p) {
        return (static_cast<int64_t>(p.y) << 40) | (static_cast<int64_t>(p.z) << 20) |
               static_cast<int64_t>(p.x);
    };
    std::map<int64_t, int> dist{{key(from), 0}};
    std::deque<Vec3i> q{from};
    while (!q.empty()) {
        Vec3i p = q.front();
        q.pop_front();
        int d = dist[key(p)];
        if (p == to) return d;
        for (Vec3i n : moves_from(w, p))
            if (dist.emplace(key(n), d + 1).second) q.push_back(n);
    }
    return -1;
}

}  // namespace oracle

namespace {

// Random rough terrain in a 32^3 box: height-varying floor with scattered
// boulders, pits and lava pools.
World rough_grid(uint64_t seed) {
    World w = vt::box_world({32, 32, 32}, 0);
    Rng r(seed);
    for (int x = 0; x < 32; ++x)
        for (int z = 0; z < 32; ++z) {
            int h = 2 + static_cast<int>(r.below(4));  // floor height 2..5
            for (int y = 1; y <= h; ++y) w.set({x, y, z}, BlockKind::stone);
            if (r.below(100) < 18) {  // boulder: 1-3 extra blocks
                int extra = 1 + static_cast<int>(r.below(3));
                for (int y = h + 1; y <= h + extra; ++y) w.set({x, y, z}, BlockKind::stone);
            } else if (r.below(100) < 6) {
                w.set({x, h, z}, BlockKind::lava);
            }
        }
    return w;
}

std::vector<Vec3i> standing_cells(const World& w) {
    std::vector<Vec3i> out;
    for (int x = 1; x < w.config.dims.x - 1; ++x)
        for (int y = 1; y < w.config.dims.y - 2; ++y)
            for (int z = 1; z < w.config.dims.z - 1; ++z) {
                Vec3i p{x, y, z};
                if (w.solid(p.down()) && oracle::feet_ok(w, p)) out.push_back(p);
            }
    return out;
}

bool replay_is_legal(const World& w, const Path& path, Vec3i from, Vec3i to) {
    Vec3i cur = from;
    for (const PathMove& m : path) {
        if (m.from != cur) return false;
        bool legal = false;
        for (Vec3i n : oracle::moves_from(w, cur))
            if (n == m.to) legal = true;
        if (!legal) return false;
        cur = m.to;
    }
    return cur == to;
}

}  // namespace

TEST_CASE("A* matches the BFS oracle on 100 random grids") {
    int reachable = 0, blocked = 0;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        World w = rough_grid(seed);
        auto cells = standing_cells(w);
        REQUIRE(cells.size() > 50);
        Rng pick(seed * 7919 + 1);
        Vec3i from = cells[pick.below(cells.size())];

        // A handful of start/goal pairs per grid, all within the direct
        // (patch-radius) planning regime where A* promises optimality.
        std::vector<Vec3i> near;
        for (Vec3i c : cells)
            if (!(c == from) && chebyshev(from, c) <= kPatchRadius) near.push_back(c);
        REQUIRE_FALSE(near.empty());
        for (int trial = 0; trial < 5; ++trial) {
            Vec3i to = near[pick.below(near.size())];
            int want = oracle::bfs_distance(w, from, to);
            auto path = plan_path_astar(w, from, to, {0, 0, 400000, 64});
            CAPTURE(seed, trial, from.x, from.y, from.z, to.x, to.y, to.z, want);
            if (want < 0) {
                REQUIRE_FALSE(path.has_value());
                ++blocked;
            } else {
                REQUIRE(path.has_value());
                REQUIRE(static_cast<int>(path->size()) == want);
                REQUIRE(replay_is_legal(w, *path, from, to));
                ++reachable;
            }
        }
    }
    REQUIRE(reachable > 300);  // the mix must actually exercise pathing
    REQUIRE(blocked > 0);      // and some walled-off pairs
}

TEST_CASE("forced falls are part of the move set") {
    World w = vt::box_world({32, 32, 32}, 2);
    // A 3-high ledge: the only way down is off the edge.
    for (int x = 10; x <= 14; ++x)
        for (int z = 10; z <= 14; ++z)
            for (int y = 3; y <= 5; ++y) w.set({x, y, z}, BlockKind::stone);
    Vec3i from{12, 6, 12};  // on the ledge
    Vec3i to{12, 3, 16};    // on the floor nearby
    int want = oracle::bfs_distance(w, from, to);
    REQUIRE(want > 0);
    auto path = plan_path_astar(w, from, to, {0, 0, 400000, 64});
    REQUIRE(path.has_value());
    REQUIRE(static_cast<int>(path->size()) == want);
    bool fell = false;
    for (auto& m : *path) fell = fell || m.kind == PathMove::Kind::fall;
    REQUIRE(fell);
}

TEST_CASE("pillar moves unlock towers and respect the budget") {
    World w = vt::box_world({32, 32, 32}, 2);
    for (int y = 3; y <= 5; ++y) w.set({16, y, 16}, BlockKind::stone);  // 3-high tower
    Vec3i from{12, 3, 16};
    Vec3i to{16, 6, 16};  // tower top

    REQUIRE_FALSE(plan_path_astar(w, from, to, {0, 0, 400000, 64}).has_value());
    REQUIRE_FALSE(plan_path_astar(w, from, to, {1, 0, 400000, 64}).has_value());

    // Two pillars put the agent at tower-top-minus-one; a climb finishes it.
    auto path = plan_path_astar(w, from, to, {3, 0, 400000, 64});
    REQUIRE(path.has_value());
    int pillars = 0;
    bool climbed = false;
    for (auto& m : *path) {
        if (m.kind == PathMove::Kind::pillar) ++pillars;
        if (m.kind == PathMove::Kind::climb) climbed = true;
    }
    REQUIRE(pillars == 2);  // pillars cost double, so A* prefers the climb
    REQUIRE(climbed);
    REQUIRE(path->back().to == to);
}

TEST_CASE("long-range planning chains segments beyond the patch radius") {
    World w = vt::box_world({64, 32, 64}, 4);
    Vec3i from{5, 5, 5}, to{58, 5, 58};
    auto path = plan_path_astar(w, from, to, {0, 0, 400000, 64});
    REQUIRE(path.has_value());
    REQUIRE(replay_is_legal(w, *path, from, to));
}

TEST_CASE("goal radius stops short of the target") {
    World w = vt::box_world({32, 32, 32}, 4);
    Vec3i from{5, 5, 5}, to{20, 5, 20};
    auto path = plan_path_astar(w, from, to, {0, 2, 400000, 64});
    REQUIRE(path.has_value());
    Vec3i end = path->empty() ? from : path->back().to;
    REQUIRE(chebyshev(end, to) <= 2);
}

TEST_CASE("paths ground out into primitives the world accepts") {
    KnowledgeBase kb = load_default_kb();
    World w = vt::box_world({32, 32, 32}, 4);
    AgentState a = vt::agent_at({8, 5, 8});
    w.set({14, 5, 17}, BlockKind::log);
    Executor ex(w, a, kb);

    uint64_t before = w.tick_count;
    StructuredAction ap;
    ap.name = "approach";
    ap.args = {{"object", "log"}};
    REQUIRE(ex.execute(ap).success);
    REQUIRE(chebyshev(a.feet(), {14, 5, 17}) <= 2);
    REQUIRE(w.tick_count > before);  // movement consumed world ticks
    REQUIRE(w.supported(a.feet()));
}

TEST_CASE("mine: visibility gates the action") {
    KnowledgeBase kb = load_default_kb();
    World w = vt::box_world({32, 32, 32}, 4);
    AgentState a = vt::agent_at({10, 5, 10});
    a.add("stone_pickaxe", 1);

    // Ore sealed inside a wall two cells thick: present but invisible.
    Vec3i ore{18, 5, 10};
    w.set(ore, BlockKind::iron_ore);
    for (int y = 5; y <= 7; ++y)
        for (int z = 7; z <= 13; ++z)
            for (int dx : {-1, 1}) w.set({18 + dx, y, z}, BlockKind::stone);
    w.set({18, 5, 9}, BlockKind::stone);
    w.set({18, 5, 11}, BlockKind::stone);
    w.set({18, 6, 10}, BlockKind::stone);
    w.set({18, 7, 10}, BlockKind::stone);

    Executor ex(w, a, kb);
    StructuredAction mine;
    mine.name = "mine";
    mine.args = {{"object", "iron_ore"}, {"tool", "stone_pickaxe"}, {"count", 1}};

    ActionResult hidden = ex.execute(mine);
    REQUIRE_FALSE(hidden.success);
    REQUIRE(hidden.reason == FailureReason::not_visible);
    REQUIRE_FALSE(hidden.message.empty());

    // Open a sight line and the same action succeeds.
    w.set({17, 5, 10}, BlockKind::air);
    w.set({17, 6, 10}, BlockKind::air);
    ActionResult seen = ex.execute(mine);
    CAPTURE(seen.message);
    REQUIRE(seen.success);
    REQUIRE(a.count("iron_ore") == 1);
}

TEST_CASE("mine: tier shortfalls name the tool that is needed") {
    KnowledgeBase kb = load_default_kb();
    World w = vt::box_world({32, 32, 32}, 4);
    AgentState a = vt::agent_at({10, 5, 10});
    w.set({12, 5, 10}, BlockKind::iron_ore);

    Executor ex(w, a, kb);
    StructuredAction mine;
    mine.name = "mine";
    mine.args = {{"object", "iron_ore"}, {"tool", nullptr}, {"count", 1}};
    ActionResult r = ex.execute(mine);
    REQUIRE_FALSE(r.success);
    REQUIRE(r.message.find("stone-tier") != std::string::npos);

    // With the right pickaxe in the bag the same call auto-equips and mines.
    a.add("stone_pickaxe", 1);
    ActionResult r2 = ex.execute(mine);
    REQUIRE(r2.success);
    REQUIRE(a.count("iron_ore") == 1);
}

TEST_CASE("craft: deltas, auto-batching and failure codes") {
    KnowledgeBase kb = load_default_kb();
    World w = vt::box_world({32, 32, 32}, 4);
    AgentState a = vt::agent_at({10, 5, 10});
    Executor ex(w, a, kb);

    auto craft = [&](const std::string& object, int count) {
        StructuredAction c;
        c.name = "craft";
        c.args = {{"object", object}, {"count", count}};
        return ex.execute(c);
    };

    SECTION("planks from a log, with an exact inventory delta") {
        a.add("log", 2);
        ActionResult r = craft("planks", 4);
        REQUIRE(r.success);
        REQUIRE(r.inventory_delta.at("planks") == 4);
        REQUIRE(r.inventory_delta.at("log") == -1);
        REQUIRE(a.count("log") == 1);
    }

    SECTION("batch yield rounds up to whole recipe units") {
        a.add("log", 2);
        ActionResult r = craft("planks", 5);  // two batches of 4
        REQUIRE(r.success);
        REQUIRE(a.count("planks") == 8);
        REQUIRE(a.count("log") == 0);
    }

    SECTION("missing materials are itemized") {
        a.add("planks", 1);
        ActionResult r = craft("stick", 4);
        REQUIRE_FALSE(r.success);
        REQUIRE(r.reason == FailureReason::insufficient_materials);
        REQUIRE(r.message.find("missing") != std::string::npos);
        REQUIRE(r.message.find("planks") != std::string::npos);
    }

    SECTION("station must be in the inventory") {
        a.add("planks", 3);
        a.add("stick", 2);
        ActionResult r = craft("wooden_pickaxe", 1);
        REQUIRE_FALSE(r.success);
        REQUIRE(r.reason == FailureReason::not_in_inventory);
        REQUIRE(r.message.find("crafting_table") != std::string::npos);

        a.add("crafting_table", 1);
        ActionResult r2 = craft("wooden_pickaxe", 1);
        REQUIRE(r2.success);
        REQUIRE(a.count("wooden_pickaxe") == 1);
        REQUIRE(a.count("crafting_table") == 1);  // stations are not consumed
    }

    SECTION("smelt shares the mechanics through the furnace station") {
        a.add("iron_ore", 1);
        a.add("coal", 1);
        a.add("furnace", 1);
        StructuredAction s;
        s.name = "smelt";
        s.args = {{"object", "iron_ingot"}, {"count", 1}};
        ActionResult r = ex.execute(s);
        REQUIRE(r.success);
        REQUIRE(a.count("iron_ingot") == 1);
        REQUIRE(a.count("iron_ore") == 0);
        REQUIRE(a.count("coal") == 0);
        REQUIRE(a.count("furnace") == 1);
    }
}

TEST_CASE("equip moves an owned item into the hand") {
    KnowledgeBase kb = load_default_kb();
    World w = vt::box_world({32, 32, 32}, 4);
    AgentState a = vt::agent_at({10, 5, 10});
    Executor ex(w, a, kb);

    StructuredAction e;
    e.name = "equip";
    e.args = {{"object", "wooden_pickaxe"}};
    ActionResult missing = ex.execute(e);
    REQUIRE_FALSE(missing.success);
    REQUIRE(missing.reason == FailureReason::not_in_inventory);

    a.add("wooden_pickaxe", 1);
    ActionResult r = ex.execute(e);
    REQUIRE(r.success);
    REQUIRE(a.equipped == "wooden_pickaxe");
}

TEST_CASE("dig_down and go_up invert each other") {
    KnowledgeBase kb = load_default_kb();
    WorldConfig c;
    c.seed = 21;
    World w = generate_world(c);
    AgentState a = spawn_agent(w, 21);
    a.add("iron_pickaxe", 1);
    a.add("dirt", 64);
    Executor ex(w, a, kb);

    int surface_feet = a.feet().y;
    StructuredAction dig;
    dig.name = "dig_down";
    dig.args = {{"ylevel", 40}, {"tool", "iron_pickaxe"}};
    ActionResult down = ex.execute(dig);
    CAPTURE(down.message);
    REQUIRE(down.success);
    REQUIRE(a.feet().y <= 41);
    REQUIRE(a.ground == GroundStatus::underground);
    REQUIRE_FALSE(a.shafts.empty());

    StructuredAction up;
    up.name = "go_up";
    up.args = json::object();
    ActionResult back = ex.execute(up);
    CAPTURE(back.message);
    REQUIRE(back.success);
    REQUIRE(a.ground == GroundStatus::on_ground);
    REQUIRE(a.shafts.empty());
    REQUIRE(a.feet().y >= surface_feet - 1);
    REQUIRE(w.supported(a.feet()));
}

TEST_CASE("go_up without dirt reports the shortfall precisely") {
    KnowledgeBase kb = load_default_kb();
    WorldConfig c;
    c.seed = 33;
    World w = generate_world(c);
    AgentState a = spawn_agent(w, 33);
    a.add("iron_pickaxe", 1);
    a.add("dirt", 64);
    Executor ex(w, a, kb);

    StructuredAction dig;
    dig.name = "dig_down";
    dig.args = {{"ylevel", 45}, {"tool", "iron_pickaxe"}};
    REQUIRE(ex.execute(dig).success);

    a.inventory.erase("dirt");  // lose the climbing stock
    StructuredAction up;
    up.name = "go_up";
    up.args = json::object();
    ActionResult r = ex.execute(up);
    REQUIRE_FALSE(r.success);
    REQUIRE(r.reason == FailureReason::insufficient_materials);
    REQUIRE(r.message.find("dirt to pillar up") != std::string::npos);
    REQUIRE(r.message.find("need ") != std::string::npos);
}

TEST_CASE("bfs_explore sweeps the surface until the target is visible") {
    KnowledgeBase kb = load_default_kb();
    WorldConfig c;
    c.seed = 12;
    World w = generate_world(c);
    AgentState a = spawn_agent(w, 12);
    Executor ex(w, a, kb);

    ExploreOutcome out = ex.bfs_explore("log");
    REQUIRE(out.found);
    REQUIRE(block_name(w.at(out.target_cell)) == "log");
}

TEST_CASE("approach closes to within talking distance") {
    KnowledgeBase kb = load_default_kb();
    World w = vt::box_world({48, 32, 48}, 4);
    AgentState a = vt::agent_at({10, 5, 10});
    w.set({30, 5, 10}, BlockKind::log);
    Executor ex(w, a, kb);

    StructuredAction ap;
    ap.name = "approach";
    ap.args = {{"object", "log"}};
    ActionResult r = ex.execute(ap);
    CAPTURE(r.message);
    REQUIRE(r.success);
    REQUIRE(chebyshev(a.feet(), {30, 5, 10}) <= 2);
}

TEST_CASE("action name normalization folds paper spellings") {
    REQUIRE(normalize_action_name("DigDown") == "dig_down");
    REQUIRE(normalize_action_name("digdown") == "dig_down");
    REQUIRE(normalize_action_name("go_back_to_ground") == "go_up");
    REQUIRE(normalize_action_name("goup") == "go_up");
    REQUIRE(normalize_action_name("Mine") == "mine");
    REQUIRE(normalize_action_name("explore") == "explore");
}

TEST_CASE("parse_structured_action validates the catalog contract") {
    REQUIRE_THROWS_AS(parse_structured_action(json::parse("[]")), ParseError);
    REQUIRE_THROWS_AS(parse_structured_action(json{{"args", json::object()}}), ParseError);
    REQUIRE_THROWS_AS(parse_structured_action(json{{"name", "warp"}}), ParseError);
    REQUIRE_THROWS_AS(parse_structured_action(json{{"name", "mine"}}), ParseError);
    REQUIRE_THROWS_AS(
        parse_structured_action(json{{"name", "mine"}, {"args", {{"object", "log"}, {"count", 0}}}}),
        ParseError);
    REQUIRE_THROWS_AS(
        parse_structured_action(json{{"name", "dig_down"}, {"args", {{"ylevel", "deep"}}}}),
        ParseError);

    StructuredAction ok = parse_structured_action(
        json{{"name", "Mine"}, {"args", {{"object", "log"}, {"tool", nullptr}, {"count", 2}}}});
    REQUIRE(ok.name == "mine");
    REQUIRE(ok.args.at("count") == 2);
}
