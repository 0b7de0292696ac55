#pragma once
// Structured actions and their executors. Every action bottoms out in world
// primitives, consumes one tick per primitive, and reports a typed result
// with the exact inventory delta. Targets are only ever chosen from lidar
// hits, so nothing here can act on blocks the agent has not seen.

#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "decomposer.hpp"
#include "world.hpp"

namespace voxagent {

// ===================== results =====================

enum class FailureReason {
    not_in_inventory,
    not_visible,
    no_path,
    out_of_reach,
    insufficient_materials,
    step_cap_exceeded,
    invalid_placement,
    api_failure,
};

inline const char* failure_name(FailureReason r) {
    switch (r) {
        case FailureReason::not_in_inventory: return "not_in_inventory";
        case FailureReason::not_visible: return "not_visible";
        case FailureReason::no_path: return "no_path";
        case FailureReason::out_of_reach: return "out_of_reach";
        case FailureReason::insufficient_materials: return "insufficient_materials";
        case FailureReason::step_cap_exceeded: return "step_cap_exceeded";
        case FailureReason::invalid_placement: return "invalid_placement";
        case FailureReason::api_failure: return "api_failure";
    }
    return "api_failure";
}

struct StructuredAction {
    std::string name;
    json args = json::object();
    std::string expectation;

    json to_json() const { return {{"name", name}, {"args", args}, {"expectation", expectation}}; }
};

struct ActionResult {
    bool success = false;
    std::optional<FailureReason> reason;
    std::string message;
    std::map<std::string, int> inventory_delta;  // signed, item -> change
    struct Snapshot {
        std::map<std::string, int> inventory;
        std::string biome;
        int y_level = 0;
        GroundStatus ground = GroundStatus::on_ground;
    } state;

    json to_json() const {
        json delta = json::object();
        for (auto& [k, v] : inventory_delta) delta[k] = v;
        json inv = json::object();
        for (auto& [k, v] : state.inventory) inv[k] = v;
        return {{"success", success},
                {"reason", reason ? json(failure_name(*reason)) : json(nullptr)},
                {"message", message},
                {"inventory_delta", delta},
                {"state",
                 {{"inventory", inv},
                  {"biome", state.biome},
                  {"y_level", state.y_level},
                  {"ground", ground_status_name(state.ground)}}}};
    }
};

// ===================== blueprints =====================

struct Blueprint {
    struct Cell {
        Vec3i offset;
        std::string block;
    };
    std::vector<Cell> cells;

    static Blueprint from_json(const json& doc) {
        if (!doc.is_array()) throw DataError("blueprint: expected an array of cells");
        Blueprint b;
        int last_dy = std::numeric_limits<int>::min();
        for (auto& c : doc) {
            Cell cell{{c.at("dx").get<int>(), c.at("dy").get<int>(), c.at("dz").get<int>()},
                      c.at("block").get<std::string>()};
            if (!placeable_block(cell.block))
                throw DataError("blueprint: block \"" + cell.block + "\" is not placeable");
            if (cell.offset.y < last_dy)
                throw DataError("blueprint: cells must be sorted by ascending dy");
            last_dy = cell.offset.y;
            b.cells.push_back(cell);
        }
        return b;
    }
};

inline Blueprint load_blueprint(const std::string& name) {
    auto path = default_data_dir() / "blueprints" / (name + ".json");
    return Blueprint::from_json(detail::read_json_file(path));
}

// ===================== action vocabulary =====================

// Raised on malformed plan text; the message is fed back to the provider.
struct ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string normalize_action_name(std::string n) {
    for (auto& c : n)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (n == "digdown") return "dig_down";
    if (n == "go_back_to_ground" || n == "goup" || n == "go_back") return "go_up";
    return n;
}

namespace detail {

inline bool is_opt_str(const json& a, const char* key) {
    return !a.contains(key) || a.at(key).is_null() || a.at(key).is_string();
}
inline void need_str(const json& a, const char* key, const std::string& action) {
    if (!a.contains(key) || !a.at(key).is_string() || a.at(key).get<std::string>().empty())
        throw ParseError(action + " needs a string \"" + key + "\" argument");
}

}  // namespace detail

// Validate one {name, args, expectation} record against the action catalog.
inline StructuredAction parse_structured_action(const json& j) {
    if (!j.is_object()) throw ParseError("action entry is not an object");
    if (!j.contains("name") || !j.at("name").is_string())
        throw ParseError("action entry is missing a string \"name\"");
    StructuredAction a;
    a.name = normalize_action_name(j.at("name").get<std::string>());
    if (j.contains("args")) {
        if (!j.at("args").is_object()) throw ParseError(a.name + ": args must be an object");
        a.args = j.at("args");
    }
    if (j.contains("expectation") && j.at("expectation").is_string())
        a.expectation = j.at("expectation").get<std::string>();

    const json& g = a.args;
    if (a.name == "equip" || a.name == "approach") {
        detail::need_str(g, "object", a.name);
    } else if (a.name == "explore") {
        detail::need_str(g, "object", a.name);
        if (!detail::is_opt_str(g, "strategy"))
            throw ParseError("explore: strategy must be text or null");
    } else if (a.name == "mine") {
        detail::need_str(g, "object", a.name);
        if (!detail::is_opt_str(g, "tool")) throw ParseError("mine: tool must be text or null");
        if (g.contains("count") && !g.at("count").is_null() &&
            (!g.at("count").is_number_integer() || g.at("count").get<int>() < 1))
            throw ParseError("mine: count must be a positive integer");
    } else if (a.name == "attack") {
        detail::need_str(g, "object", a.name);
        if (!detail::is_opt_str(g, "tool")) throw ParseError("attack: tool must be text or null");
    } else if (a.name == "dig_down") {
        bool has_level = (g.contains("ylevel") && g.at("ylevel").is_number_integer()) ||
                         (g.contains("object") && g.at("object").is_number_integer());
        if (!has_level) throw ParseError("dig_down needs an integer \"ylevel\" argument");
        if (!detail::is_opt_str(g, "tool")) throw ParseError("dig_down: tool must be text or null");
    } else if (a.name == "go_up") {
        if (!detail::is_opt_str(g, "tool")) throw ParseError("go_up: tool must be text or null");
    } else if (a.name == "build") {
        if (!g.contains("blueprint") || (!g.at("blueprint").is_string() && !g.at("blueprint").is_array()))
            throw ParseError("build needs a \"blueprint\" name or cell list");
    } else if (a.name == "craft" || a.name == "smelt") {
        if (!g.contains("object") || (!g.at("object").is_string() && !g.at("object").is_object()))
            throw ParseError(a.name + " needs an \"object\" name or {name: count} dict");
        if (g.contains("count") && !g.at("count").is_null() &&
            (!g.at("count").is_number_integer() || g.at("count").get<int>() < 1))
            throw ParseError(a.name + ": count must be a positive integer");
    } else if (a.name == "apply") {
        detail::need_str(g, "object", a.name);
        if (!detail::is_opt_str(g, "tool")) throw ParseError("apply: tool must be text or null");
    } else {
        throw ParseError("unknown action \"" + a.name + "\"");
    }
    return a;
}

// The interface contract, rendered for provider prompts.
inline const std::string& action_catalog_text() {
    static const std::string text = R"(equip(object)
Equip the object from the inventory: hold the named object in hand before using it.
Arguments:
- object: a string, the name of the object to equip. The object must be in the inventory.

explore(object, strategy)
Explore the world to find the object: walks the surface in expanding rings when on the ground, or tunnels outward branch by branch when underground. Stops as soon as the object is sighted.
Arguments:
- object: a string, the name of the object to find.
- strategy: a string describing how to explore, e.g. "bfs_ground" to sweep the surface or "dfs_underground" to tunnel at the current depth. Set to null to choose automatically.

approach(object)
Move next to a sighted object: plans a path with walking, jumping, falling, and pillaring moves. Fails if the object has not been sighted.
Arguments:
- object: a string, the name of the object to walk to.

mine(object, tool, count)
Mine the object: breaks sighted blocks that drop the object and collects the drops. The block must be within reach (4 blocks). Mines repeatedly when count is given and instances are in reach.
Arguments:
- object: a string, the name of the object to mine.
- tool: a string, the tool used for mining, e.g. the pickaxe needed for that block. Set to null if no tool is required. The tool must be in the inventory.
- count: an integer, how many to collect. Set to null for 1.

attack(object, tool)
Attack the creature and collect what it drops.
Arguments:
- object: a string, the name of the creature to attack.
- tool: a string, the weapon to use. Set to null to use bare hands.

dig_down(ylevel, tool)
Dig straight down to the given y-level and remember the starting location: the only way to go underground.
Arguments:
- ylevel: an integer, the target depth level.
- tool: a string, the tool used for digging. Set to null if no tool is required.

go_up(tool)
Go back to the ground from underground by returning to the remembered dig location and pillaring up with dirt blocks: the only way to return to the surface.
Arguments:
- tool: a string, the tool used for digging on the way. Set to null if no tool is required.

build(blueprint)
Build a structure by placing blocks around the current location, lowest layer first. The blocks must be in the inventory.
Arguments:
- blueprint: a string naming a stored blueprint, or a list of {dx, dy, dz, block} records sorted by ascending dy.

craft(object, count)
Craft the object from materials in the inventory. If the recipe needs a crafting table, the crafting_table must be in the inventory; it is used in place and not consumed.
Arguments:
- object: a string, the name of the object to craft.
- count: an integer, how many to craft. Set to null for 1.

smelt(object, count)
Smelt materials into the object. The furnace must be in the inventory; it is used in place and not consumed.
Arguments:
- object: a string, the name of the object to smelt.
- count: an integer, how many to smelt. Set to null for 1.

apply(object, tool)
Apply the tool on the object: used for fetching water or milk with a bucket, or shearing sheep with shears.
Arguments:
- object: a string, the object to apply to.
- tool: a string, the tool used to apply.)";
    return text;
}

// ===================== pathfinding =====================

// Move set: unit translations (N/S/E/W), a one-block jump-climb, unit falls,
// and pillaring (jump + place a block underfoot). Unit edge cost everywhere
// except pillar, which costs 2 to bias plans toward walking.
struct PathMove {
    enum class Kind { walk, climb, fall, pillar };
    Kind kind;
    Vec3i from, to;
};
using Path = std::vector<PathMove>;

struct PathOptions {
    int pillar_budget = 0;
    int goal_radius = 1;  // success when chebyshev(feet, target) <= radius
    int max_expansions = 400000;
    int max_segments = 64;  // frontier hops when the target is far away
};

namespace detail {

struct AStarNode {
    Vec3i pos;
    int pillars = 0;
};

inline int64_t node_key(Vec3i p, int pillars) {
    return ((static_cast<int64_t>(p.y) * 1024 + p.z) * 1024 + p.x) * 72 + pillars;
}

// Lava is never a valid support or body cell.
inline bool feet_ok(const World& w, Vec3i feet) {
    return w.body_fits(feet) && w.at(feet) != BlockKind::lava &&
           w.at(feet.down()) != BlockKind::lava;
}

template <typename EdgeFn>
inline void for_each_move(const World& w, Vec3i p, int pillars, int pillar_budget, EdgeFn&& fn) {
    if (!w.supported(p)) {  // forced unit fall
        if (p.y > 1) fn(PathMove{PathMove::Kind::fall, p, p.down()}, 1, pillars);
        return;
    }
    for (Vec3i d : cardinal_dirs()) {
        Vec3i n = p + d;
        if (feet_ok(w, n)) {
            fn(PathMove{PathMove::Kind::walk, p, n}, 1, pillars);
        } else if (w.solid(n) && w.passable(n.up()) && w.passable(n.up(2)) &&
                   w.passable(p.up(2)) && feet_ok(w, n.up())) {
            fn(PathMove{PathMove::Kind::climb, p, n.up()}, 1, pillars);
        }
    }
    if (pillars < pillar_budget && w.passable(p.up(2)))
        fn(PathMove{PathMove::Kind::pillar, p, p.up()}, 2, pillars + 1);
}

struct Segment {
    bool found = false;
    Path path;
    Vec3i end;
};

// One A* search. `confine` (optional) restricts expanded cells; the goal test
// is distance-based so solid targets (ore in a wall) are approachable.
inline Segment astar_segment(const World& w, Vec3i start, Vec3i target, const PathOptions& opt,
                             bool confine, Vec3i confine_center) {
    struct Open {
        int f, g;
        uint64_t order;
        Vec3i pos;
        int pillars;
        bool operator>(const Open& o) const {
            return f != o.f ? f > o.f : (g != o.g ? g > o.g : order > o.order);
        }
    };
    std::priority_queue<Open, std::vector<Open>, std::greater<Open>> open;
    std::unordered_map<int64_t, int> best_g;
    std::unordered_map<int64_t, std::pair<int64_t, PathMove>> came;
    uint64_t order = 0;

    auto h = [&](Vec3i p) { return chebyshev(p, target); };
    int cap_pillars = std::min(opt.pillar_budget, 71);
    open.push({h(start), 0, order++, start, 0});
    best_g[node_key(start, 0)] = 0;

    int expansions = 0;
    while (!open.empty()) {
        Open cur = open.top();
        open.pop();
        int64_t ck = node_key(cur.pos, cur.pillars);
        if (best_g[ck] != cur.g) continue;
        if (chebyshev(cur.pos, target) <= opt.goal_radius) {
            Path path;
            int64_t k = ck;
            while (k != node_key(start, 0)) {
                auto& [pk, mv] = came.at(k);
                path.push_back(mv);
                k = pk;
            }
            std::reverse(path.begin(), path.end());
            return {true, std::move(path), cur.pos};
        }
        if (++expansions > opt.max_expansions) break;
        for_each_move(w, cur.pos, cur.pillars, cap_pillars,
                      [&](PathMove mv, int cost, int pillars) {
                          if (confine && chebyshev(mv.to, confine_center) > kPatchRadius) return;
                          int g = cur.g + cost;
                          int64_t k = node_key(mv.to, pillars);
                          auto it = best_g.find(k);
                          if (it != best_g.end() && it->second <= g) return;
                          best_g[k] = g;
                          came[k] = {node_key(cur.pos, cur.pillars), mv};
                          open.push({g + h(mv.to), g, order++, mv.to, pillars});
                      });
    }
    return {};
}

// All cells reachable inside the current patch, with their paths, used to
// pick the frontier cell nearest a far-away target. Cells in `banned` (prior
// hop anchors, including the start) are never selected, so the caller can
// accept non-improving hops without cycling.
inline Segment frontier_segment(const World& w, Vec3i start, Vec3i target, const PathOptions& opt,
                                const std::unordered_set<int64_t>& banned) {
    struct Item {
        int g;
        uint64_t order;
        Vec3i pos;
        int pillars;
        bool operator>(const Item& o) const { return g != o.g ? g > o.g : order > o.order; }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> open;
    std::unordered_map<int64_t, int> best_g;
    std::unordered_map<int64_t, std::pair<int64_t, PathMove>> came;
    uint64_t order = 0;
    int cap_pillars = std::min(opt.pillar_budget, 71);
    open.push({0, order++, start, 0});
    best_g[node_key(start, 0)] = 0;

    bool have_best = false;
    int best_d = chebyshev(start, target), best_len = 0;
    int64_t best_key = node_key(start, 0);
    Vec3i best_pos = start;

    while (!open.empty()) {
        Item cur = open.top();
        open.pop();
        int64_t ck = node_key(cur.pos, cur.pillars);
        if (best_g[ck] != cur.g) continue;
        int d = chebyshev(cur.pos, target);
        if (!banned.count(node_key(cur.pos, 0)) &&
            (!have_best || d < best_d || (d == best_d && cur.g < best_len))) {
            best_d = d;
            best_len = cur.g;
            best_key = ck;
            best_pos = cur.pos;
            have_best = true;
        }
        for_each_move(w, cur.pos, cur.pillars, cap_pillars,
                      [&](PathMove mv, int cost, int pillars) {
                          if (chebyshev(mv.to, start) > kPatchRadius) return;
                          int g = cur.g + cost;
                          int64_t k = node_key(mv.to, pillars);
                          auto it = best_g.find(k);
                          if (it != best_g.end() && it->second <= g) return;
                          best_g[k] = g;
                          came[k] = {node_key(cur.pos, cur.pillars), mv};
                          open.push({g, order++, mv.to, pillars});
                      });
    }
    if (!have_best) return {};
    Path path;
    int64_t k = best_key;
    while (k != node_key(start, 0)) {
        auto& [pk, mv] = came.at(k);
        path.push_back(mv);
        k = pk;
    }
    std::reverse(path.begin(), path.end());
    return {true, std::move(path), best_pos};
}

}  // namespace detail

// Plan a path from `from` to within goal_radius of `to`. Targets inside the
// current voxel patch are planned directly; farther targets are reached by
// iterating A* toward the frontier cell nearest the target, re-centering the
// patch after every hop.
inline std::optional<Path> plan_path_astar(const World& w, Vec3i from, Vec3i to,
                                           const PathOptions& opt = {}) {
    Path total;
    Vec3i cur = from;
    PathOptions o = opt;
    std::unordered_set<int64_t> anchors{detail::node_key(from, 0)};
    for (int seg = 0; seg < opt.max_segments; ++seg) {
        if (chebyshev(cur, to) <= opt.goal_radius) return total;
        if (chebyshev(cur, to) <= kPatchRadius) {
            auto direct = detail::astar_segment(w, cur, to, o, false, cur);
            if (direct.found) {
                total.insert(total.end(), direct.path.begin(), direct.path.end());
                return total;
            }
            // fall through: the goal may still be reachable from another angle
        }
        // Hops need not shrink the distance (tunnels snake); the anchor set
        // keeps the walk from revisiting a hop endpoint.
        auto hop = detail::frontier_segment(w, cur, to, o, anchors);
        if (!hop.found) return std::nullopt;
        anchors.insert(detail::node_key(hop.end, 0));
        o.pillar_budget -= static_cast<int>(std::count_if(
            hop.path.begin(), hop.path.end(),
            [](const PathMove& m) { return m.kind == PathMove::Kind::pillar; }));
        total.insert(total.end(), hop.path.begin(), hop.path.end());
        cur = hop.end;
    }
    return std::nullopt;
}

// ===================== executor =====================

constexpr int kExploreStepCap = 10000;  // primitives per explore invocation
constexpr int kActionStepCap = 10000;   // generic per-action primitive cap
constexpr int kChessboardSpacing = 20;  // bfs_explore node grid pitch
constexpr int kBranchSpacing = 16;      // dfs tunnel branch interval

struct ExploreOutcome {
    bool found = false;
    std::optional<FailureReason> failure;
    Vec3i target_cell;
    int node_transitions = 0;
    int steps_used = 0;
};

// Shared executor context: world, agent, knowledge, tick deadline, and an
// acquisition hook the harness uses for milestone tracking.
class Executor {
public:
    World& world;
    AgentState& agent;
    const KnowledgeBase& kb;
    uint64_t deadline = std::numeric_limits<uint64_t>::max();
    std::function<void(const std::string&, uint64_t)> on_first_acquire;

    Executor(World& w, AgentState& a, const KnowledgeBase& k) : world(w), agent(a), kb(k) {}

    bool budget_exhausted() const { return world.tick_count >= deadline; }

    ActionResult execute(const StructuredAction& action) {
        std::map<std::string, int> before = agent.inventory;
        ActionResult r = dispatch(action);
        for (auto& [item, n] : agent.inventory) {
            int prev = before.count(item) ? before[item] : 0;
            if (n != prev) r.inventory_delta[item] = n - prev;
        }
        for (auto& [item, n] : before)
            if (!agent.inventory.count(item)) r.inventory_delta[item] = -n;
        r.state.inventory = agent.inventory;
        r.state.biome = world.biome_at(agent.feet().x, agent.feet().z);
        r.state.y_level = agent.feet().y;
        r.state.ground = agent.ground;
        return r;
    }

    // ---- spec'd exploration ops (public so tests drive them directly) ----

    // Chessboard ring sweep over 20x20 ground cells; observes at every node.
    ExploreOutcome bfs_explore(const std::string& target, int step_cap = kExploreStepCap) {
        ExploreOutcome out;
        std::string want = kb.canonical(target);
        if (check_visible(want, &out.target_cell)) return mark_found(out);

        Vec3i start = agent.feet();
        int max_ring = std::max(world.config.dims.x, world.config.dims.z) / kChessboardSpacing + 1;
        for (int ring = 1; ring <= max_ring; ++ring) {
            for (auto [di, dj] : ring_cells(ring)) {
                int x = start.x + di * kChessboardSpacing;
                int z = start.z + dj * kChessboardSpacing;
                if (x < 1 || z < 1 || x >= world.config.dims.x - 1 || z >= world.config.dims.z - 1)
                    continue;
                int h = world.surface_y(x, z);
                if (h < 0 || block_fluid(world.at({x, h, z}))) continue;
                Vec3i node{x, h + 1, z};
                // walking only: exploration must not spend pillar material
                auto path = plan_path_astar(world, agent.feet(), node, {0, 1, 400000, 64});
                if (!path) continue;
                if (!run_path(*path, out.steps_used, step_cap)) {
                    out.failure = FailureReason::step_cap_exceeded;
                    return out;
                }
                out.node_transitions++;
                if (check_visible(want, &out.target_cell)) return mark_found(out);
            }
        }
        out.failure = FailureReason::not_visible;
        return out;
    }

    // Depth-first branch mining at the current level: 1-wide, 2-high tunnels,
    // new branches every kBranchSpacing blocks, left turns explored first.
    ExploreOutcome dfs_mine_explore(const std::string& target, const std::string& tool,
                                    int step_cap = kExploreStepCap) {
        ExploreOutcome out;
        std::string want = kb.canonical(target);
        if (agent.count(tool) == 0) {
            out.failure = FailureReason::not_in_inventory;
            return out;
        }
        select_item(tool, out.steps_used);
        if (check_visible(want, &out.target_cell)) return mark_found(out);

        struct Branch {
            Vec3i pos;
            Vec3i dir;
        };
        std::vector<Branch> stack;
        std::set<std::pair<int, int>> carved;
        Vec3i dir = detail::yaw_cardinal(agent.yaw);
        stack.push_back({agent.feet(), turn_left(dir)});
        stack.push_back({agent.feet(), dir});

        while (!stack.empty()) {
            Branch b = stack.back();
            stack.pop_back();
            // Walk back through the tunnel network to the branch point; the
            // dirt stock covers pillaring out of any cavity fallen into.
            if (agent.feet() != b.pos) {
                auto back = plan_path_astar(world, agent.feet(), b.pos,
                                            {pillar_budget(), 0, 400000, 64});
                if (!back || !run_path(*back, out.steps_used, step_cap)) {
                    if (out.steps_used >= step_cap || budget_exhausted()) {
                        out.failure = FailureReason::step_cap_exceeded;
                        return out;
                    }
                    continue;
                }
            }
            Vec3i d = b.dir;
            int run = 0;
            while (true) {
                if (out.steps_used >= step_cap || budget_exhausted()) {
                    out.failure = FailureReason::step_cap_exceeded;
                    return out;
                }
                Vec3i ahead = agent.feet() + d;
                if (!world.in_bounds(ahead) || carved.count({ahead.x, ahead.z})) break;
                if (block_fluid(world.at(ahead)) || block_fluid(world.at(ahead.up())))
                    break;  // never open into a fluid pocket
                // head cell first: the eye-level ray is unobstructed there
                if (!carve_cell(ahead.up(), out.steps_used) || !carve_cell(ahead, out.steps_used))
                    break;  // unbreakable wall: abandon this heading
                carved.insert({ahead.x, ahead.z});
                face(d, out.steps_used);
                if (!step_primitive(Primitive::move_forward(), out.steps_used)) break;
                if (agent.feet() != ahead) break;  // fell through a cavity; stop this run
                if (check_visible(want, &out.target_cell)) return mark_found(out);
                if (++run % kBranchSpacing == 0) {
                    stack.push_back({agent.feet(), turn_right(d)});
                    stack.push_back({agent.feet(), turn_left(d)});
                }
            }
        }
        out.failure = FailureReason::step_cap_exceeded;
        return out;
    }

private:
    ActionResult dispatch(const StructuredAction& action) {
        std::string name = normalize_name(action.name);
        const json& a = action.args;
        if (name == "equip") return do_equip(arg_str(a, "object"));
        if (name == "explore") return do_explore(arg_str(a, "object"), arg_str(a, "strategy"));
        if (name == "approach") return do_approach(arg_str(a, "object"));
        if (name == "mine") return do_mine(arg_str(a, "object"), arg_str(a, "tool"), arg_int(a, "count", 1));
        if (name == "attack") return do_attack(arg_str(a, "object"), arg_str(a, "tool"));
        if (name == "dig_down") return do_dig_down(arg_int(a, "ylevel", arg_int(a, "object", -1)),
                                                   arg_str(a, "tool"));
        if (name == "go_up") return do_go_up(arg_str(a, "tool"));
        if (name == "build") return do_build(a.contains("blueprint") ? a.at("blueprint") : json());
        if (name == "craft" || name == "smelt") return do_craft(action);
        if (name == "apply") return do_apply(arg_str(a, "object"), arg_str(a, "tool"));
        return fail(FailureReason::api_failure, "unknown action \"" + action.name + "\"");
    }

    // ---- primitive plumbing ----

    bool step_primitive(const Primitive& p, int& steps) {
        if (budget_exhausted()) return false;
        std::map<std::string, int> before;
        if (on_first_acquire) before = agent.inventory;
        apply_primitive(world, agent, p);
        tick(world, &agent);
        ++steps;
        if (on_first_acquire)
            for (auto& [item, n] : agent.inventory)
                if (n > 0 && !before.count(item)) on_first_acquire(item, world.tick_count);
        return true;
    }

    void face(Vec3i dir, int& steps) {
        double want = dir.x == 1 ? 0 : dir.x == -1 ? 180 : dir.z == 1 ? 90 : 270;
        double dyaw = std::remainder(want - agent.yaw, 360.0);
        if (std::abs(dyaw) > 1e-9 || std::abs(agent.pitch) > 1e-9)
            step_primitive(Primitive::turn(dyaw, -agent.pitch), steps);
    }

    void aim(double yaw, double pitch, int& steps) {
        double dyaw = std::remainder(yaw - agent.yaw, 360.0);
        double dpitch = pitch - agent.pitch;
        if (std::abs(dyaw) > 1e-9 || std::abs(dpitch) > 1e-9)
            step_primitive(Primitive::turn(dyaw, dpitch), steps);
    }

    void select_item(const std::string& item, int& steps) {
        if (!item.empty() && agent.equipped != item && agent.count(item) > 0)
            step_primitive(Primitive::select(item), steps);
    }

    bool run_path(const Path& path, int& steps, int cap) {
        for (auto& mv : path) {
            if (steps >= cap || budget_exhausted()) return false;
            if (agent.feet() == mv.to) continue;  // already there (e.g. settled falls)
            switch (mv.kind) {
                case PathMove::Kind::fall:
                    continue;  // gravity resolves falls inside the move primitives
                case PathMove::Kind::walk: {
                    face(horizontal_dir(mv), steps);
                    if (!step_primitive(Primitive::move_forward(), steps)) return false;
                    // a walk edge may start a fall chain; landing below is fine
                    Vec3i f = agent.feet();
                    if (f.x != mv.to.x || f.z != mv.to.z || f.y > mv.to.y) return false;
                    break;
                }
                case PathMove::Kind::climb: {
                    face(horizontal_dir(mv), steps);
                    if (!step_primitive(Primitive::jump(), steps)) return false;
                    if (!step_primitive(Primitive::move_forward(), steps)) return false;
                    if (agent.feet() != mv.to) return false;
                    break;
                }
                case PathMove::Kind::pillar: {
                    if (!step_primitive(Primitive::jump(), steps)) return false;
                    if (!step_primitive(Primitive::place_block("dirt"), steps)) return false;
                    if (agent.feet() != mv.to) return false;
                    break;
                }
            }
        }
        return true;
    }

    static Vec3i horizontal_dir(const PathMove& mv) {
        return {mv.to.x - mv.from.x, 0, mv.to.z - mv.from.z};
    }
    static Vec3i turn_left(Vec3i d) { return {d.z, 0, -d.x}; }
    static Vec3i turn_right(Vec3i d) { return {-d.z, 0, d.x}; }

    static std::vector<std::pair<int, int>> ring_cells(int r) {
        std::vector<std::pair<int, int>> cells;
        for (int i = -r; i <= r; ++i) cells.push_back({i, -r});
        for (int j = -r + 1; j <= r; ++j) cells.push_back({r, j});
        for (int i = r - 1; i >= -r; --i) cells.push_back({i, r});
        for (int j = r - 1; j >= -r + 1; --j) cells.push_back({-r, j});
        return cells;
    }

    int pillar_budget() const { return agent.count("dirt"); }

    // Break the block at `cell` if present, clicking through whatever the aim
    // ray clips first. False = the cell cannot be opened with this tool.
    bool carve_cell(Vec3i cell, int& steps) {
        for (int tries = 0; tries < 4; ++tries) {
            if (!block_opaque(world.at(cell))) return true;
            Vec3d eye = agent.eye();
            Vec3d d = center_of(cell) + Vec3d{0, 0.5, 0} - eye;
            double dist = d.norm();
            if (dist > kReach) return false;
            constexpr double pi = 3.14159265358979323846;
            double yaw = std::atan2(d.z, d.x) * 180.0 / pi;
            double pitch = std::asin(std::clamp(d.y / dist, -1.0, 1.0)) * 180.0 / pi;
            LidarHit would = cast_ray(world, eye, yaw, pitch, kReach);
            if (would.distance < 0 || would.is_entity) return false;
            BlockKind k = world.at(would.cell);
            if (!block_breakable(k) || world.rules.required(k) > equipped_tier()) return false;
            aim(yaw, pitch, steps);
            if (!step_primitive(Primitive::attack_click(), steps)) return false;
        }
        return !block_opaque(world.at(cell));
    }

    ToolTier equipped_tier() const {
        return agent.equipped ? item_tool_tier(*agent.equipped) : ToolTier::none;
    }

    // ---- visibility ----

    bool matches_target(const LidarHit& h, const std::string& want) const {
        if (h.distance < 0) return false;
        if (h.is_entity) return h.kind == want;
        if (h.kind == want) return true;
        auto k = block_from_name(h.kind);
        return k && block_drop(*k) == want;
    }

    bool check_visible(const std::string& want, Vec3i* cell_out = nullptr,
                       LidarHit* hit_out = nullptr) {
        Observation obs = observe(world, agent);
        const LidarHit* best =
            obs.nearest([&](const LidarHit& h) { return matches_target(h, want); });
        if (!best) return false;
        if (cell_out) *cell_out = best->cell;
        if (hit_out) *hit_out = *best;
        return true;
    }

    static ExploreOutcome mark_found(ExploreOutcome out) {
        out.found = true;
        return out;
    }

    // ---- arg helpers ----

    static std::string arg_str(const json& a, const char* key) {
        if (a.is_object() && a.contains(key) && a.at(key).is_string())
            return a.at(key).get<std::string>();
        return "";
    }
    static int arg_int(const json& a, const char* key, int fallback) {
        if (a.is_object() && a.contains(key) && a.at(key).is_number_integer())
            return a.at(key).get<int>();
        return fallback;
    }

    static std::string normalize_name(std::string n) { return normalize_action_name(std::move(n)); }

    ActionResult fail(FailureReason r, std::string msg) {
        ActionResult res;
        res.success = false;
        res.reason = r;
        res.message = std::move(msg);
        return res;
    }
    ActionResult ok(std::string msg) {
        ActionResult res;
        res.success = true;
        res.message = std::move(msg);
        return res;
    }

    // ---- actions ----

    ActionResult do_equip(const std::string& object) {
        std::string item = kb.canonical(object);
        if (agent.count(item) < 1)
            return fail(FailureReason::not_in_inventory, item + " is not in the inventory");
        int steps = 0;
        select_item(item, steps);
        return ok("equipped " + item);
    }

    ActionResult do_explore(const std::string& object, const std::string& strategy) {
        std::string want = kb.canonical(object);
        bool dfs;
        if (strategy.find("dfs") != std::string::npos || strategy.find("under") != std::string::npos)
            dfs = true;
        else if (strategy.find("bfs") != std::string::npos ||
                 strategy.find("ground") != std::string::npos ||
                 strategy.find("surface") != std::string::npos)
            dfs = false;
        else
            dfs = agent.ground == GroundStatus::underground;
        ExploreOutcome out;
        if (dfs) {
            std::string tool = best_pickaxe(ToolTier::wood);
            if (tool.empty())
                return fail(FailureReason::not_in_inventory, "no pickaxe to tunnel with");
            out = dfs_mine_explore(want, tool);
        } else {
            out = bfs_explore(want);
        }
        if (out.found) return ok("found " + want + " nearby");
        ActionResult r = fail(out.failure.value_or(FailureReason::not_visible),
                              want + " was not found while exploring");
        return r;
    }

    ActionResult do_approach(const std::string& object) {
        std::string want = kb.canonical(object);
        for (int attempt = 0; attempt < 8; ++attempt) {
            LidarHit hit;
            if (!check_visible(want, nullptr, &hit))
                return attempt == 0 ? fail(FailureReason::not_visible, want + " is not visible")
                                    : fail(FailureReason::no_path, "lost sight of " + want);
            if (chebyshev(agent.feet(), hit.cell) <= 1) return ok("next to " + want);
            // radius 1 means standing beside it; radius 2 still keeps the
            // cell inside interaction reach (floating tree stumps and the
            // like have no adjacent standing room)
            std::optional<std::vector<PathMove>> path;
            for (int radius = 1; radius <= 2 && !path; ++radius)
                path = plan_path_astar(world, agent.feet(), hit.cell,
                                       {pillar_budget(), radius, 400000, 64});
            if (!path)
                return fail(FailureReason::no_path, "no path to the " + want + " in sight");
            int steps = 0;
            if (!run_path(*path, steps, kActionStepCap))
                return fail(FailureReason::step_cap_exceeded, "ran out of steps approaching " + want);
            if (chebyshev(agent.feet(), hit.cell) <= 2) return ok("near the " + want);
            if (!hit.is_entity) return fail(FailureReason::no_path, "could not reach " + want);
            // entities wander; loop and re-acquire
        }
        return fail(FailureReason::no_path, "could not catch up with " + want);
    }

    ActionResult do_mine(const std::string& object, const std::string& tool, int count) {
        std::string want = kb.canonical(object);
        if (count < 1) count = 1;
        int start_have = agent.count(want);
        int steps = 0;
        if (!tool.empty()) {
            std::string t = kb.canonical(tool);
            if (agent.count(t) < 1)
                return fail(FailureReason::not_in_inventory, t + " is not in the inventory");
            select_item(t, steps);
        }
        bool rode_support = false;
        for (int round = 0; round < count * 4 + 8; ++round) {
            if (agent.count(want) - start_have >= count) break;
            if (budget_exhausted() || steps >= kActionStepCap)
                return fail(FailureReason::step_cap_exceeded, "ran out of steps mining " + want);
            Observation obs = observe(world, agent);
            // mining the cell underfoot is fine once (ore under the feet), but
            // chasing the support repeatedly rides a collapsing column down --
            // the agent would eat its own pillar all the way to the bottom.
            // Own placed blocks (pillars, builds) are never harvest targets.
            std::map<Vec3i, const LidarHit*> by_cell;
            for (auto& h : obs.lidar_hits) {
                if (h.distance < 0 || !matches_target(h, want)) continue;
                if (agent.placed.count(h.cell)) continue;
                if (rode_support && h.cell == agent.feet().down()) continue;
                auto [it, fresh] = by_cell.try_emplace(h.cell, &h);
                if (!fresh && h.distance < it->second->distance) it->second = &h;
            }
            std::vector<const LidarHit*> cands;
            for (auto& [cell, h] : by_cell) cands.push_back(h);
            std::sort(cands.begin(), cands.end(), [](const LidarHit* a, const LidarHit* b) {
                return a->distance != b->distance ? a->distance < b->distance
                                                  : a->cell < b->cell;
            });
            if (cands.empty())
                return fail(FailureReason::not_visible,
                            progress_note(want, start_have, count) + want + " is not visible");
            LidarHit hit = *cands.front();
            if (hit.is_entity)
                return fail(FailureReason::api_failure, want + " is a creature; use attack instead");
            if (hit.distance > kReach) {
                // the nearest sighting may be unreachable (across water, in a
                // pit wall); walk to the closest candidate that admits a path.
                // Radius 3 is a fallback: merely getting closer lets the next
                // round re-observe and re-target from the new spot.
                std::optional<Path> path;
                for (int radius = 1; radius <= 3 && !path; ++radius)
                    for (size_t ci = 0; ci < cands.size() && ci < 12 && !path; ++ci) {
                        hit = *cands[ci];
                        path = plan_path_astar(world, agent.feet(), hit.cell,
                                               {pillar_budget(), radius, 400000, 64});
                        if (path && path->empty()) path.reset();  // must make progress
                    }
                if (!path || !run_path(*path, steps, kActionStepCap))
                    return fail(FailureReason::out_of_reach,
                                progress_note(want, start_have, count) + want + " is " +
                                    std::to_string(static_cast<int>(cands.front()->distance)) +
                                    " blocks away");
                continue;
            }
            BlockKind k = *block_from_name(hit.kind);
            ToolTier need = world.rules.required(k);
            if (need > equipped_tier() && tool.empty()) {
                std::string t = best_pickaxe(need);
                if (!t.empty()) select_item(t, steps);
            }
            if (need > equipped_tier())
                return fail(FailureReason::api_failure,
                            hit.kind + " needs a " + tier_name(need) + "-tier tool; " +
                                (agent.equipped ? *agent.equipped : std::string("bare hands")) +
                                " will yield nothing");
            if (hit.cell == agent.feet().down()) rode_support = true;
            aim(hit.yaw, hit.pitch, steps);
            if (!step_primitive(Primitive::attack_click(), steps))
                return fail(FailureReason::step_cap_exceeded, "tick budget exhausted");
            collect_drops_near(hit.cell, steps);
        }
        int gained = agent.count(want) - start_have;
        if (gained >= count) return ok("mined " + std::to_string(gained) + " " + want);
        return fail(FailureReason::not_visible,
                    progress_note(want, start_have, count) + want + " ran out nearby");
    }

    // "got 2 of 3 so far; " prefix once some of the count has been collected
    std::string progress_note(const std::string& item, int start_have, int count) const {
        int gained = agent.count(item) - start_have;
        if (gained <= 0) return "";
        return "got " + std::to_string(gained) + " of " + std::to_string(count) + " so far; ";
    }

    void collect_drops_near(Vec3i around, int& steps) {
        for (int tries = 0; tries < 3; ++tries) {
            std::optional<Vec3i> drop_pos;
            for (auto& d : world.drops)
                if (chebyshev(d.pos, around) <= 2) {
                    drop_pos = d.pos;
                    break;
                }
            if (!drop_pos) return;
            if (chebyshev(*drop_pos, agent.feet()) <= 1) {
                step_primitive(Primitive::turn(0, 0), steps);  // wait a tick; pickup resolves
                continue;
            }
            auto path = plan_path_astar(world, agent.feet(), *drop_pos, {0, 1, 100000, 8});
            if (!path) return;
            if (!run_path(*path, steps, kActionStepCap)) return;
            step_primitive(Primitive::turn(0, 0), steps);
        }
    }

    ActionResult do_attack(const std::string& object, const std::string& tool) {
        std::string want = kb.canonical(object);
        std::string mob = want;
        if (const FactEntry* f = kb.fact(want); f && f->hints.mob) mob = *f->hints.mob;
        int steps = 0;
        if (!tool.empty()) {
            std::string t = kb.canonical(tool);
            if (agent.count(t) < 1)
                return fail(FailureReason::not_in_inventory, t + " is not in the inventory");
            select_item(t, steps);
        }
        int path_misses = 0;
        for (int round = 0; round < 24; ++round) {
            if (budget_exhausted() || steps >= kActionStepCap)
                return fail(FailureReason::step_cap_exceeded, "ran out of steps hunting " + mob);
            LidarHit hit;
            if (!check_visible(mob, nullptr, &hit))
                return fail(FailureReason::not_visible, mob + " is not visible");
            if (hit.distance > kReach) {
                auto path = plan_path_astar(world, agent.feet(), hit.cell, {0, 1, 400000, 64});
                if (!path) {
                    if (++path_misses >= 6)
                        return fail(FailureReason::no_path, "no path to the " + mob);
                    for (int i = 0; i < 4; ++i)  // it wanders; wait and retry
                        step_primitive(Primitive::turn(0, 0), steps);
                    continue;
                }
                if (!run_path(*path, steps, kActionStepCap))
                    return fail(FailureReason::step_cap_exceeded, "ran out of steps chasing " + mob);
                continue;
            }
            aim(hit.yaw, hit.pitch, steps);
            if (!step_primitive(Primitive::attack_click(), steps))
                return fail(FailureReason::step_cap_exceeded, "tick budget exhausted");
            bool dead = true;
            for (auto& e : world.entities)
                if (e.id == hit.entity_id && e.alive) dead = false;
            if (dead) {
                collect_drops_near(hit.cell, steps);
                return ok("killed the " + mob);
            }
        }
        return fail(FailureReason::step_cap_exceeded, "the " + mob + " kept getting away");
    }

    ActionResult do_dig_down(int ylevel, const std::string& tool) {
        if (ylevel < 1)
            return fail(FailureReason::api_failure, "dig_down needs a target ylevel >= 1");
        int steps = 0;
        if (!tool.empty()) {
            std::string t = kb.canonical(tool);
            if (agent.count(t) < 1)
                return fail(FailureReason::not_in_inventory, t + " is not in the inventory");
            select_item(t, steps);
        } else {
            std::string t = best_pickaxe(ToolTier::wood);
            if (!t.empty()) select_item(t, steps);
        }
        if (agent.feet().y <= ylevel) return ok("already at level " + std::to_string(agent.feet().y));
        Vec3i start = agent.feet();
        if (agent.ground == GroundStatus::on_ground) agent.dig_anchor = start;
        agent.ground = GroundStatus::underground;
        bool merged = !agent.shafts.empty() && agent.shafts.back().bottom.x == start.x &&
                      agent.shafts.back().bottom.z == start.z &&
                      agent.shafts.back().bottom.y == start.y;
        if (!merged) agent.shafts.push_back({start, start});

        while (agent.feet().y > ylevel) {
            if (budget_exhausted() || steps >= kActionStepCap)
                return fail(FailureReason::step_cap_exceeded, "tick budget exhausted while digging");
            Vec3i below = agent.feet().down();
            BlockKind k = world.at(below);
            bool blocked = k == BlockKind::bedrock || block_fluid(k) ||
                           (block_opaque(k) && world.rules.required(k) > equipped_tier());
            if (blocked) {
                // the column is obstructed (fluid pocket, ore above the tool's
                // tier): shift one cell sideways and dig a fresh column
                if (!dig_sidestep(steps))
                    return fail(FailureReason::api_failure,
                                "the shaft is blocked by " + std::string(block_name(k)) +
                                    " at level " + std::to_string(below.y) +
                                    " and every side is blocked too");
                continue;
            }
            if (block_opaque(k)) {
                aim(agent.yaw, -90, steps);
                if (!step_primitive(Primitive::attack_click(), steps))
                    return fail(FailureReason::step_cap_exceeded, "tick budget exhausted");
            } else {
                step_primitive(Primitive::turn(0, 0), steps);  // settle down the open shaft
            }
            agent.shafts.back().bottom = agent.feet();
        }
        return ok("reached level " + std::to_string(agent.feet().y));
    }

    // Move one cell horizontally inside the shaft so digging can continue in
    // a fresh column. Tries each direction; a cell qualifies when its body
    // space holds no fluid and nothing above the equipped tool's tier.
    bool dig_sidestep(int& steps, bool record_shaft = true) {
        static const Vec3i dirs[] = {{1, 0, 0}, {-1, 0, 0}, {0, 0, 1}, {0, 0, -1}};
        for (const Vec3i& d : dirs) {
            Vec3i n = agent.feet() + d;
            if (!world.in_bounds(n) || !world.in_bounds(n.up())) continue;
            bool viable = true;
            for (Vec3i cell : {n.up(), n}) {
                BlockKind k = world.at(cell);
                if (k == BlockKind::bedrock || block_fluid(k) ||
                    (block_opaque(k) && world.rules.required(k) > equipped_tier())) {
                    viable = false;
                    break;
                }
            }
            if (!viable) continue;
            if (!carve_cell(n.up(), steps) || !carve_cell(n, steps)) continue;
            face(d, steps);
            Vec3i before = agent.feet();
            if (!step_primitive(Primitive::move_forward(), steps)) return false;
            if (agent.feet().x == before.x && agent.feet().z == before.z) continue;
            // a fall through an open floor is fine; record the climbable span
            if (record_shaft) agent.shafts.push_back({n, agent.feet()});
            return true;
        }
        return false;
    }

    // Last-resort ascent when the recorded shaft bottom is unreachable (the
    // agent fell through a cavity floor, or the return tunnel collapsed into
    // dead ends): carve the ceiling overhead and pillar straight up, shifting
    // one column sideways around bedrock, fluids, or blocks the equipped tool
    // cannot break.
    bool mine_up_escape(int target_y, int& steps) {
        while (agent.feet().y < target_y) {
            if (budget_exhausted() || steps >= kActionStepCap) return false;
            if (agent.count("dirt") < 1) return false;
            Vec3i overhead = agent.feet() + Vec3i{0, 2, 0};
            if (!world.in_bounds(overhead)) return false;
            BlockKind k = world.at(overhead);
            bool blocked = k == BlockKind::bedrock || block_fluid(k) ||
                           (block_opaque(k) && world.rules.required(k) > equipped_tier());
            if (!blocked && block_opaque(k) && !carve_cell(overhead, steps)) blocked = true;
            if (blocked) {
                if (!dig_sidestep(steps, false)) return false;
                continue;
            }
            Vec3i before = agent.feet();
            if (!step_primitive(Primitive::jump(), steps) ||
                !step_primitive(Primitive::place_block("dirt"), steps))
                return false;
            if (agent.feet().y <= before.y || !world.supported(agent.feet())) return false;
        }
        return true;
    }

    ActionResult do_go_up(const std::string& tool) {
        if (!agent.dig_anchor || agent.shafts.empty())
            return fail(FailureReason::api_failure, "no dig location on record; dig_down first");
        int steps = 0;
        if (!tool.empty() && agent.count(kb.canonical(tool)) > 0) select_item(kb.canonical(tool), steps);

        while (!agent.shafts.empty()) {
            DigShaft s = agent.shafts.back();
            if (agent.feet().y >= s.top.y) {
                agent.shafts.pop_back();
                continue;
            }
            if (agent.feet() != s.bottom) {
                auto path = plan_path_astar(world, agent.feet(), s.bottom,
                                            {pillar_budget(), 0, 400000, 64});
                if (!path) {
                    int climb = s.top.y - agent.feet().y;
                    if (agent.count("dirt") < climb)
                        return fail(FailureReason::insufficient_materials,
                                    "need " + std::to_string(climb) + " dirt to pillar up, have " +
                                        std::to_string(agent.count("dirt")));
                    if (!mine_up_escape(s.top.y, steps)) {
                        if (agent.count("dirt") < 1)
                            return fail(FailureReason::insufficient_materials,
                                        "need 4 dirt to pillar up, have 0");
                        return fail(FailureReason::no_path, "no way back to the dig shaft");
                    }
                    agent.shafts.pop_back();
                    continue;
                }
                if (!run_path(*path, steps, kActionStepCap))
                    return fail(FailureReason::step_cap_exceeded, "tick budget exhausted");
            }
            int climb = s.top.y - agent.feet().y;
            if (agent.count("dirt") < climb)
                return fail(FailureReason::insufficient_materials,
                            "need " + std::to_string(climb) + " dirt to pillar up, have " +
                                std::to_string(agent.count("dirt")));
            while (agent.feet().y < s.top.y) {
                if (budget_exhausted() || steps >= kActionStepCap)
                    return fail(FailureReason::step_cap_exceeded, "tick budget exhausted");
                if (!step_primitive(Primitive::jump(), steps) ||
                    !step_primitive(Primitive::place_block("dirt"), steps))
                    return fail(FailureReason::step_cap_exceeded, "tick budget exhausted");
                if (!world.supported(agent.feet()))
                    return fail(FailureReason::api_failure, "pillaring failed; the shaft is blocked");
            }
            agent.shafts.pop_back();
        }
        agent.ground = GroundStatus::on_ground;
        agent.dig_anchor.reset();
        return ok("back on the surface at level " + std::to_string(agent.feet().y));
    }

    ActionResult do_build(const json& blueprint_arg) {
        Blueprint bp;
        try {
            if (blueprint_arg.is_string())
                bp = load_blueprint(blueprint_arg.get<std::string>());
            else if (blueprint_arg.is_array())
                bp = Blueprint::from_json(blueprint_arg);
            else
                return fail(FailureReason::api_failure, "build needs a blueprint name or cell list");
        } catch (const DataError& e) {
            return fail(FailureReason::api_failure, e.what());
        }
        Vec3i origin = agent.feet();
        int steps = 0, placed = 0;
        for (auto& cell : bp.cells) {
            Vec3i target = origin + cell.offset;
            if (agent.count(cell.block) < 1)
                return fail(FailureReason::insufficient_materials,
                            "placed " + std::to_string(placed) + " blocks, then ran out of " +
                                cell.block);
            if (world.solid(target) || chebyshev(target, agent.feet()) > static_cast<int>(kReach) ||
                target == agent.feet() || target == agent.feet().up())
                return fail(FailureReason::invalid_placement,
                            "cannot place " + cell.block + " at offset (" +
                                std::to_string(cell.offset.x) + "," + std::to_string(cell.offset.y) +
                                "," + std::to_string(cell.offset.z) + ")");
            select_item(cell.block, steps);
            if (!step_primitive(Primitive::place_block(cell.block, target), steps))
                return fail(FailureReason::step_cap_exceeded, "tick budget exhausted");
            if (world.solid(target)) ++placed;
            else
                return fail(FailureReason::invalid_placement,
                            "placement of " + cell.block + " was rejected");
        }
        return ok("built " + std::to_string(placed) + " blocks");
    }

    // craft and smelt share mechanics; the recipe's station decides which
    // tool item must be in the inventory (used in place, never consumed).
    ActionResult do_craft(const StructuredAction& action) {
        const json& a = action.args;
        std::string object;
        int count = arg_int(a, "count", 0);
        if (a.contains("object") && a.at("object").is_string()) {
            object = a.at("object").get<std::string>();
        } else if (a.contains("object") && a.at("object").is_object() &&
                   !a.at("object").empty()) {
            auto it = a.at("object").items().begin();
            object = it.key();
            if (count == 0 && it.value().is_number_integer()) count = it.value().get<int>();
        }
        if (count <= 0) count = 1;
        std::string want = kb.canonical(object);
        const Recipe* r = kb.recipe(want);
        if (!r)
            return fail(FailureReason::api_failure, "no recipe is known for \"" + want + "\"");
        if (r->tool && agent.count(kb.canonical(*r->tool)) < 1)
            return fail(FailureReason::not_in_inventory,
                        *r->tool + " is not in the inventory");

        int units = (count + r->output_count - 1) / r->output_count;
        int made = 0, steps = 0;
        for (int u = 0; u < units; ++u) {
            std::string missing;
            for (auto& [m, n] : r->materials) {
                int have = agent.count(kb.canonical(m));
                if (have < n) {
                    if (!missing.empty()) missing += ", ";
                    missing += std::to_string(n - have) + " " + m;
                }
            }
            if (!missing.empty())
                return fail(FailureReason::insufficient_materials,
                            "crafted " + std::to_string(made * r->output_count) + " of " +
                                std::to_string(count) + " " + want + "; missing " + missing);
            for (auto& [m, n] : r->materials) agent.take(kb.canonical(m), n);
            agent.add(want, r->output_count);
            if (on_first_acquire && agent.count(want) == r->output_count)
                on_first_acquire(want, world.tick_count + 1);
            step_primitive(Primitive::turn(0, 0), steps);  // one tick of work per unit
            ++made;
        }
        return ok("crafted " + std::to_string(made * r->output_count) + " " + want +
                  (r->tool ? " using the " + *r->tool : ""));
    }

    ActionResult do_apply(const std::string& object, const std::string& tool) {
        std::string want = kb.canonical(object);
        std::string target = want;
        std::string use_tool = kb.canonical(tool);
        if (const FactEntry* f = kb.fact(want); f && f->hints.source == "apply") {
            if (f->hints.target) target = *f->hints.target;
            if (use_tool.empty() && f->hints.tool) use_tool = *f->hints.tool;
        }
        if (use_tool.empty())
            return fail(FailureReason::api_failure, "apply needs a tool");
        if (agent.count(use_tool) < 1)
            return fail(FailureReason::not_in_inventory, use_tool + " is not in the inventory");
        int steps = 0;
        select_item(use_tool, steps);
        LidarHit hit;
        if (!check_visible(target, nullptr, &hit))
            return fail(FailureReason::not_visible, target + " is not visible");
        if (hit.distance > kReach)
            return fail(FailureReason::out_of_reach, target + " is out of reach");
        aim(hit.yaw, hit.pitch, steps);
        std::map<std::string, int> before = agent.inventory;
        if (!step_primitive(Primitive::use_click(), steps))
            return fail(FailureReason::step_cap_exceeded, "tick budget exhausted");
        if (agent.inventory != before) return ok("used " + use_tool + " on " + target);
        return fail(FailureReason::api_failure, use_tool + " has no use on " + target);
    }

    std::string best_pickaxe(ToolTier at_least) const {
        static const char* order[] = {"diamond_pickaxe", "iron_pickaxe", "stone_pickaxe",
                                      "golden_pickaxe", "wooden_pickaxe"};
        for (const char* p : order)
            if (agent.count(p) > 0 && item_tool_tier(p) >= at_least) return p;
        return "";
    }
};

}  // namespace voxagent
